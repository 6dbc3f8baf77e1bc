#include "mlfir/benchmarks.hpp"

#include <cmath>
#include <sstream>

namespace mlfir {

namespace {

BenchmarkSpec lowpass(std::string name, double pass_edge, double stop_edge, double dp, double ds,
                      std::string provenance) {
  return {std::move(name),
          {{0.0, pass_edge, 1.0 - dp, 1.0 + dp}, {stop_edge, 1.0, -ds, ds}},
          std::move(provenance)};
}

std::vector<std::int64_t> parse_ints(const char* text) {
  std::istringstream in(text);
  std::vector<std::int64_t> out;
  for (std::int64_t v; in >> v;) out.push_back(v);
  return out;
}

}  // namespace

const std::vector<BenchmarkSpec>& benchmarks() {
  static const std::vector<BenchmarkSpec> list = [] {
    std::vector<BenchmarkSpec> v;
    v.push_back(lowpass("S1a", 0.3, 0.5, 0.00645, 0.00645, "reference low-pass, s89"));
    v.push_back(lowpass("S1b", 0.3, 0.5, 0.00636, 0.00636, "reference low-pass, rbd00"));
    v.push_back(lowpass("S1c", 0.3, 0.5, 0.01570, 0.00660, "reference low-pass, yl07/sy11a"));
    v.push_back(lowpass("S2a", 0.042, 0.14, 0.01160, 0.001, "narrow low-pass, s89/a08"));
    v.push_back(lowpass("S2b", 0.042, 0.14, 0.01200, 0.001, "narrow low-pass, yl07/sy11a"));
    // High-pass: the stopband comes first in frequency.
    v.push_back({"L1", {{0.0, 0.74, -0.0001, 0.0001}, {0.8, 1.0, 1.0 - 0.0057, 1.0 + 0.0057}}, "high-pass, a08/yl07"});
    v.push_back(lowpass("L2", 0.2, 0.28, 0.028, 0.001, "low-pass, lp83/szlm12"));
    // The printed stopband lower bound is 0, but every published row for this
    // filter needs the symmetric -0.0316 (see notes in the README).
    v.push_back({"L3",
                 {{0.0, 0.15, 0.9772, 1.0232},
                  {0.15, 0.1875, 0.9441, 1.0232},
                  {0.1875, 0.2125, 0.9016, 1.0232},
                  {0.2875, 1.0, -0.0316, 0.0316}},
                 "multiband, yl07"});
    return v;
  }();
  return list;
}

BenchmarkSpec redmill(double p_db) {
  const double delta = std::pow(10.0, -p_db / 20.0);
  std::ostringstream name;
  name << "redmill:" << p_db;
  return lowpass(name.str(), 0.3, 0.5, delta, delta, "Redmill family, delta = 10^(-p/20)");
}

FilterSpec redmill_spec(double p_db, int order) {
  FilterSpec s;
  s.bands = redmill(p_db).bands;
  s.order = order;
  s.type = FilterType::I;
  s.wordlength = 9;
  s.gain = GainMode::fixed(1.0);
  return s;
}

BenchmarkSpec find_benchmark(const std::string& name) {
  if (name.rfind("redmill:", 0) == 0) {
    const std::string arg = name.substr(8);
    try {
      std::size_t used = 0;
      const double p = std::stod(arg, &used);
      if (used == arg.size() && p > 0.0) return redmill(p);
    } catch (const std::exception&) {
    }
    throw SpecError("bad Redmill parameter '" + arg + "'");
  }
  for (const auto& b : benchmarks())
    if (b.name == name) return b;
  throw SpecError("unknown benchmark '" + name + "'");
}

bool PublishedRow::complete() const {
  return static_cast<int>(printed.size()) == coefficient_count(type, order);
}

FilterSpec PublishedRow::spec() const {
  FilterSpec s;
  s.bands = find_benchmark(name).bands;
  s.order = order;
  s.type = type;
  s.wordlength = wordlength;
  s.gain = GainMode::fixed(gain);
  return s;
}

FilterSpec PublishedRow::as_printed() const {
  FilterSpec s = spec();
  const int m = static_cast<int>(printed.size());
  switch (type) {
    case FilterType::I: s.order = 2 * (m - 1); break;
    case FilterType::II:
    case FilterType::IV: s.order = 2 * m - 1; break;
    case FilterType::III: s.order = 2 * m; break;
  }
  return s;
}

const std::vector<PublishedRow>& published_rows() {
  using enum FilterType;
  struct Raw {
    const char* name;
    const char* source;
    int order;
    FilterType type;
    int am, as, a, ad;
    double gain;
    int b;
    double error;
    const char* coeffs;
  };
  static const Raw raw[] = {
      {"S1a", "s89", 24, I, 11, 24, 35, 2, 2.41, 8, 0.00159, "1 3 -1 -8 -7 10 20 -1 -40 -34 56 184 246"},
      {"S1a", "ours", 24, I, 7, 20, 27, 2, 1.251, 9, 0, "1 4 0 -8 -7 10 22 0 -41 -36 57 192 256"},
      {"S1a", "ours", 24, I, 6, 20, 26, 2, 1.245678, 9, 0.00159, "1 4 0 -8 -8 10 22 0 -40 -37 57 192 256"},
      {"S1a", "ours", 23, II, 7, 19, 26, 2, 2.654716, 8, 0, "3 3 -5 -11 0 20 16 -23 -52 0 134 253"},
      {"S1a", "ours", 23, II, 5, 19, 24, 2, 2.172388, 8, 0.00159, "2 2 -3 -9 0 16 13 -18 -42 0 110 208"},
      {"S1b", "rbd00", 24, I, 6, 20, 26, 3, 2.4570, 9, 0, "2 8 0 -16 -14 20 43 0 -80 -71 112 377 502"},
      {"S1b", "ours", 24, I, 6, 20, 26, 2, 1.40946, 9, 0, "2 4 0 -10 -8 12 24 0 -47 -40 65 216 288"},
      {"S1b", "ours", 23, II, 5, 19, 24, 2, 2.46492, 9, 0, "6 6 -8 -21 0 36 32 -42 -96 0 248 472"},
      {"S1b", "ours", 23, II, 7, 19, 26, 2, 2.65462, 8, 0, "3 3 -5 -11 0 20 16 -23 -52 0 134 253"},
      {"S1c", "yl07", 24, I, 4, 24, 28, 2, 1.8950, 8, 0, "2 3 -2 -8 -4 10 16 -3 -32 -24 48 144 191"},
      {"S1c", "ours", 24, I, 5, 20, 25, 2, 1.25615, 8, 0, "1 2 0 -4 -3 6 11 0 -21 -18 29 96 128"},
      {"S1c", "ours", 23, II, 5, 19, 24, 2, 1.86904, 7, 0, "1 1 -2 -4 0 7 6 -8 -18 0 47 89"},
      {"S1c", "sy11a", 23, II, 4, 19, 23, 2, 1.34766, 8, 0.00118, "2 2 -2 -5 0 10 8 -12 -26 0 68 128"},
      {"S1c", "ours", 23, II, 4, 19, 23, 2, 1.34717, 8, 0.00118, "2 2 -2 -5 0 10 8 -12 -26 0 68 128"},
      {"S2a", "s89", 59, II, 57, 59, 116, 2, 7.1324, 13, 0,
       "31 28 29 22 8 -17 -59 -116 -188 -268 -352 -432 -500 -532 -529 -464 -336 -129 158 526 964 1472 2008 2576 "
       "3136 3648 4110 4478 4737 4868"},
      {"S2a", "ours", 59, II, 22, 59, 81, 2, 9.25424, 10, 0,
       "4 4 4 4 1 -2 -9 -18 -30 -42 -56 -69 -80 -86 -85 -76 -56 -22 24 84 155 236 325 416 508 593 668 728 770 792"},
      {"S2b", "yl07", 59, II, 19, 59, 78, 3, 10.6888, 10, 0,
       "5 5 6 5 3 -2 -10 -20 -32 -48 -64 -80 -91 -99 -99 -88 -64 -26 28 96 178 273 376 482 587 686 772 842 892 916"},
      {"S2b", "yl07", 59, II, 21, 59, 80, 2, 10.48712, 10, 0,
       "5 5 5 4 2 -4 -10 -20 -34 -48 -64 -78 -91 -98 -96 -86 -62 -24 28 96 176 269 369 473 575 672 756 824 872 897"},
      {"S2b", "ours", 59, II, 19, 57, 76, 2, 10.506472, 10, 0,
       "4 4 5 4 0 -4 -11 -22 -34 -49 -64 -79 -90 -98 -96 -84 -60 -24 30 97 178 270 370 474 576 672 756 824 872 896"},
      {"S2b", "sy11a", 59, II, 17, 59, 76, 3, 10.47032, 10, 0.01395,
       "5 5 6 5 2 -2 -10 -20 -32 -48 -64 -78 -92 -98 -87 -65 -26 26 93 174 267 368 472 575 672 757 826 874 898"},
      {"S2b", "ours", 59, II, 15, 51, 66, 2, 7.5904, 10, 0.00789,
       "0 0 0 -2 -5 -10 -16 -23 -32 -40 -50 -58 -64 -64 -61 -50 -29 0 38 86 143 206 274 344 412 476 532 576 608 624"},
      {"L2", "yl07", 62, I, 17, 62, 79, 3, 2.6668, 11, 0,
       "4 9 13 12 4 -10 -26 -36 -32 -12 18 44 52 32 -10 -56 -80 -64 -4 74 130 128 48 -86 -215 -263 -168 88 460 854 "
       "1153 1265"},
      {"L2", "ours", 62, I, 16, 62, 78, 3, 2.6668, 11, 0,
       "4 9 13 12 4 -10 -26 -36 -32 -12 18 44 52 32 -10 -56 -80 -64 -4 74 130 128 48 -86 -215 -263 -168 88 460 854 "
       "1153 1265"},
      {"L3", "yl07", 35, II, 3, 35, 38, 2, 3.192, 8, 0, "8 1 -6 -12 -10 -1 6 20 20 6 -12 -32 -40 -16 32 96 160 196"},
      {"L3", "ours", 35, II, 5, 33, 38, 2, 2.58268, 7, 0, "4 0 -2 -4 -4 -1 4 7 8 3 -5 -14 -16 -7 12 39 64 79"},
      {"L3", "ours", 35, II, 5, 31, 36, 1, 2.6257, 8, 0, "7 0 -5 -8 -10 0 6 15 15 8 -12 -28 -32 -14 24 80 130 160"},
      {"L3", "ours", 35, II, 4, 31, 35, 2, 2.10468, 8, 0, "5 0 -4 -8 -8 0 4 11 13 5 -10 -22 -26 -11 20 64 104 129"},
      {"L3", "sy11a", 35, II, 4, 31, 35, 1, 2.627, 7, 0.00213, "3 0 -2 -5 -5 0 3 7 8 3 -6 -14 -16 -7 12 40 65 80"},
      {"L3", "ours", 35, II, 4, 31, 35, 1, 2.61998, 7, 0.00213, "3 0 -2 -4 -6 0 3 7 7 4 -6 -14 -16 -7 12 40 65 80"},
      {"L3", "ours", 35, II, 5, 29, 34, 2, 2.6211, 8, 0.00213, "7 0 0 -10 -8 0 8 16 16 7 -10 -28 -32 -14 24 78 130 160"},
      {"L3", "ours", 35, II, 3, 31, 34, 1, 2.60028, 8, 0.00213, "6 0 -3 -10 -10 0 7 12 16 7 -12 -28 -32 -14 24 80 128 160"},
      {"L3", "ours", 35, II, 3, 31, 34, 2, 2.60564, 7, 0.00213, "4 0 -2 -4 -4 0 3 8 8 3 -6 -13 -16 -8 13 40 64 80"},
  };
  static const std::vector<PublishedRow> rows = [] {
    std::vector<PublishedRow> v;
    for (const Raw& r : raw)
      v.push_back({r.name, r.source, r.order, r.type, r.am, r.as, r.a, r.ad, r.gain, r.b, r.error, parse_ints(r.coeffs)});
    return v;
  }();
  return rows;
}

GainMode gain_octave(double g) {
  if (!(g > 0.0)) throw SpecError("gain must be positive");
  const double k = std::floor(std::log2(g * 1.5));
  const double base = std::exp2(k);
  return GainMode::variable(base * 2.0 / 3.0, base * 4.0 / 3.0);
}

}  // namespace mlfir
