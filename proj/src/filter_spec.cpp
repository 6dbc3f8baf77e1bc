#include "mlfir/filter_spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mlfir {

std::string_view to_string(FilterType type) {
  switch (type) {
    case FilterType::I: return "I";
    case FilterType::II: return "II";
    case FilterType::III: return "III";
    case FilterType::IV: return "IV";
  }
  return "?";
}

FilterType parse_filter_type(std::string_view text) {
  if (text == "I" || text == "1") return FilterType::I;
  if (text == "II" || text == "2") return FilterType::II;
  if (text == "III" || text == "3") return FilterType::III;
  if (text == "IV" || text == "4") return FilterType::IV;
  throw SpecError("unknown filter type '" + std::string(text) + "' (expected I, II, III or IV)");
}

int coefficient_count(FilterType type, int order) {
  switch (type) {
    case FilterType::I: return order / 2 + 1;
    case FilterType::II: return (order + 1) / 2;
    case FilterType::III: return order / 2;
    case FilterType::IV: return (order + 1) / 2;
  }
  return 0;
}

int FilterSpec::coefficient_count() const { return mlfir::coefficient_count(type, order); }

FilterSpec FilterSpec::widened() const {
  FilterSpec out = *this;
  for (Band& band : out.bands) {
    band.lower -= allow_error;
    band.upper += allow_error;
  }
  out.allow_error = 0.0;
  return out;
}

void FilterSpec::check() const {
  if (order < 0) throw SpecError("filter order must be nonnegative");
  const bool even = order % 2 == 0;
  if ((type == FilterType::I || type == FilterType::III) && !even)
    throw SpecError("type " + std::string(to_string(type)) + " filters need an even order");
  if ((type == FilterType::II || type == FilterType::IV) && even)
    throw SpecError("type " + std::string(to_string(type)) + " filters need an odd order");
  if (coefficient_count() < 1) throw SpecError("specification has no free coefficients");
  if (wordlength < 1 || wordlength > kMaxWordLength)
    throw SpecError("word length must be in [1, " + std::to_string(kMaxWordLength) + "]");
  if (bands.empty()) throw SpecError("specification has no bands");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const Band& b = bands[i];
    if (!(b.from_pi >= 0.0 && b.to_pi <= 1.0 && b.from_pi <= b.to_pi))
      throw SpecError("band " + std::to_string(i) + " edges must satisfy 0 <= from <= to <= 1");
    if (!(b.lower <= b.upper))
      throw SpecError("band " + std::to_string(i) + " has lower bound above upper bound");
    if (i > 0 && bands[i - 1].to_pi > b.from_pi)
      throw SpecError("bands must be sorted and have disjoint interiors");
  }
  if (!(gain.lo > 0.0 && gain.lo <= gain.hi)) throw SpecError("gain bounds must satisfy 0 < lo <= hi");
  if (!(allow_error >= 0.0)) throw SpecError("allow_error must be nonnegative");
}

double basis_eval(FilterType type, int m, double omega) {
  if (m < 0) throw std::out_of_range("basis index must be nonnegative");
  const double dm = static_cast<double>(m);
  switch (type) {
    case FilterType::I: return m == 0 ? 1.0 : 2.0 * std::cos(omega * dm);
    case FilterType::II: return 2.0 * std::cos(omega * (dm + 0.5));
    // Antisymmetric, even order: taps pair up around the (always zero) center
    // tap, so index m carries the sine of the (m+1)-th harmonic.
    case FilterType::III: return 2.0 * std::sin(omega * (dm + 1.0));
    case FilterType::IV: return 2.0 * std::sin(omega * (dm + 0.5));
  }
  return 0.0;
}

double zero_phase_response(std::span<const std::int64_t> coefficients, FilterType type,
                           double omega) {
  double sum = 0.0;
  for (std::size_t m = 0; m < coefficients.size(); ++m) {
    if (coefficients[m] != 0)
      sum += static_cast<double>(coefficients[m]) * basis_eval(type, static_cast<int>(m), omega);
  }
  return sum;
}

int structural_adder_count(FilterType type, int order, const std::vector<bool>& zero_flags) {
  int saved = 0;
  for (std::size_t m = 0; m < zero_flags.size(); ++m) {
    if (!zero_flags[m]) continue;
    saved += (type == FilterType::I && m == 0) ? 1 : 2;
  }
  return std::max(0, order - saved);
}

int structural_adder_count(FilterType type, int order, std::span<const std::int64_t> coefficients) {
  std::vector<bool> zeros(coefficients.size());
  for (std::size_t m = 0; m < coefficients.size(); ++m) zeros[m] = coefficients[m] == 0;
  return structural_adder_count(type, order, zeros);
}

std::vector<std::int64_t> from_printed_order(std::span<const std::int64_t> printed) {
  return {printed.rbegin(), printed.rend()};
}

std::vector<std::int64_t> to_printed_order(std::span<const std::int64_t> coefficients) {
  return {coefficients.rbegin(), coefficients.rend()};
}

FilterSpec spec_from_json(const nlohmann::json& doc) {
  FilterSpec spec;
  try {
    spec.type = parse_filter_type(doc.at("type").get<std::string>());
    spec.order = doc.at("order").get<int>();
    spec.wordlength = doc.at("wordlength").get<int>();
    if (doc.contains("gain")) {
      const auto& g = doc.at("gain");
      const std::string mode = g.at("mode").get<std::string>();
      if (mode == "fixed") {
        spec.gain = GainMode::fixed(g.value("value", 1.0));
      } else if (mode == "variable") {
        spec.gain = GainMode::variable(g.value("lo", 2.0 / 3.0), g.value("hi", 4.0 / 3.0));
      } else {
        throw SpecError("gain mode must be 'fixed' or 'variable'");
      }
    }
    for (const auto& b : doc.at("bands")) {
      spec.bands.push_back({b.at("from_pi").get<double>(), b.at("to_pi").get<double>(),
                            b.at("lower").get<double>(), b.at("upper").get<double>()});
    }
    spec.allow_error = doc.value("allow_error", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed specification: ") + e.what());
  }
  std::stable_sort(spec.bands.begin(), spec.bands.end(),
                   [](const Band& a, const Band& b) { return a.from_pi < b.from_pi; });
  spec.check();
  return spec;
}

nlohmann::json spec_to_json(const FilterSpec& spec) {
  nlohmann::json doc;
  doc["type"] = std::string(to_string(spec.type));
  doc["order"] = spec.order;
  doc["wordlength"] = spec.wordlength;
  if (spec.gain.is_fixed())
    doc["gain"] = {{"mode", "fixed"}, {"value", spec.gain.value()}};
  else
    doc["gain"] = {{"mode", "variable"}, {"lo", spec.gain.lo}, {"hi", spec.gain.hi}};
  nlohmann::json bands = nlohmann::json::array();
  for (const Band& b : spec.bands)
    bands.push_back({{"from_pi", b.from_pi}, {"to_pi", b.to_pi}, {"lower", b.lower}, {"upper", b.upper}});
  doc["bands"] = bands;
  if (spec.allow_error > 0.0) doc["allow_error"] = spec.allow_error;
  return doc;
}

FilterSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open specification file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("specification file " + path + " is not valid JSON: " + e.what());
  }
  return spec_from_json(doc);
}

}  // namespace mlfir
