#include "mlfir/ilp2.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "model_util.hpp"

namespace mlfir {

namespace {

using milp::Relation;
using milp::Term;
using milp::VarId;
using milp::VarKind;

constexpr std::uint32_t kCacheMagic = 0x53464c4d;  // "MLFS"
constexpr std::uint32_t kCacheVersion = 1;

int log2_floor(std::int64_t x) { return 63 - std::countl_zero(static_cast<std::uint64_t>(x)); }

void check_aop_input(std::int64_t u, std::int64_t v, std::int64_t c_max) {
  if (c_max < 1 || u < 1 || v < 1 || u % 2 == 0 || v % 2 == 0 || u > c_max || v > c_max)
    throw std::invalid_argument("A-operation inputs must be odd, positive, and at most c_max");
}

// Left shifts beyond this cannot give results <= c_max.
int shift_limit(std::int64_t c_max) { return log2_floor(c_max) + 1; }

std::vector<std::pair<std::int64_t, std::int64_t>> pairs_of(const std::vector<std::int64_t>& values) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i; j < values.size(); ++j) pairs.emplace_back(values[i], values[j]);
  return pairs;
}

StageSets compute_stage_sets(int B, int S, std::size_t cap) {
  StageSets sets;
  sets.wordlength = B;
  sets.stages = S;
  sets.c_max = std::int64_t{1} << (B + 1);
  sets.values.push_back({1});
  sets.triplets.emplace_back();
  std::size_t total = 0;
  for (int s = 1; s <= S; ++s) {
    const auto pairs = pairs_of(sets.values.back());
    // Chunks of pairs per worker, merged in pair order.
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
    std::vector<std::vector<Triplet>> parts(workers);
    auto work = [&](unsigned k) {
      for (std::size_t i = k; i < pairs.size(); i += workers) {
        const auto [u, v] = pairs[i];
        for (std::int64_t w : a_star(u, v, sets.c_max))
          parts[k].push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(w)});
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work, k);
      for (auto& t : pool) t.join();
    }
    std::vector<Triplet> trip;
    for (auto& p : parts) trip.insert(trip.end(), p.begin(), p.end());
    std::sort(trip.begin(), trip.end());
    total += trip.size();
    if (total > cap)
      throw StageSetTooLarge("stage sets for B=" + std::to_string(B) + ", depth " + std::to_string(S) + " exceed " +
                             std::to_string(cap) + " triplets; lower the depth or raise the cap");
    std::vector<std::int64_t> vals;
    for (const Triplet& t : trip) vals.push_back(t.w);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    sets.values.push_back(std::move(vals));
    sets.triplets.push_back(std::move(trip));
  }
  return sets;
}

void put_u32(std::ostream& out, std::uint32_t x) {
  const char bytes[4] = {static_cast<char>(x & 0xff), static_cast<char>((x >> 8) & 0xff),
                         static_cast<char>((x >> 16) & 0xff), static_cast<char>((x >> 24) & 0xff)};
  out.write(bytes, 4);
}

bool get_u32(std::istream& in, std::uint32_t& x) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  x = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

}  // namespace

std::optional<std::int64_t> apply_aop(std::int64_t u, std::int64_t v, const AOpConfig& q) {
  const std::int64_t a = u << q.l_u;
  const std::int64_t b = v << q.l_v;
  const std::int64_t x = std::abs(q.s_v ? a - b : a + b);
  const std::int64_t div = std::int64_t{1} << q.r;
  if (x % div != 0) return std::nullopt;
  return x / div;
}

std::vector<std::int64_t> a_star(std::int64_t u, std::int64_t v, std::int64_t c_max) {
  check_aop_input(u, v, c_max);
  // With both left shifts positive the sum is an even multiple of a case
  // with one shift zero, so those two families cover every odd result.
  const int L = shift_limit(c_max);
  std::vector<std::int64_t> out;
  for (int l = 0; l <= L; ++l) {
    for (const auto& [lu, lv] : {std::pair{l, 0}, std::pair{0, l}}) {
      const std::int64_t a = u << lu;
      const std::int64_t b = v << lv;
      for (const std::int64_t x : {a + b, std::abs(a - b)}) {
        if (x == 0) continue;
        const std::int64_t w = odd_part(x);
        if (w <= c_max) out.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AOpConfig> aop_configs(std::int64_t u, std::int64_t v, std::int64_t w, std::int64_t c_max) {
  check_aop_input(u, v, c_max);
  const int L = shift_limit(c_max);
  std::vector<AOpConfig> out;
  for (int lu = 0; lu <= L; ++lu) {
    for (int lv = 0; lv <= L; ++lv) {
      for (int sv = 0; sv <= 1; ++sv) {
        const std::int64_t x = std::abs((u << lu) + (sv ? -(v << lv) : (v << lv)));
        if (x == 0) continue;
        const int r = std::countr_zero(static_cast<std::uint64_t>(x));
        if ((x >> r) == w) out.push_back({lu, lv, r, sv});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const AOpConfig& a, const AOpConfig& b) {
    return std::tie(a.r, a.l_u, a.l_v, a.s_v) < std::tie(b.r, b.l_u, b.l_v, b.s_v);
  });
  return out;
}

bool StageSets::contains(int stage, std::int64_t w) const {
  const auto& v = values.at(static_cast<std::size_t>(stage));
  return std::binary_search(v.begin(), v.end(), w);
}

std::size_t StageSets::triplet_count() const {
  std::size_t n = 0;
  for (const auto& t : triplets) n += t.size();
  return n;
}

std::string stage_set_cache_name(int wordlength, int stages) {
  return "stagesets_v" + std::to_string(kCacheVersion) + "_B" + std::to_string(wordlength) + "_S" +
         std::to_string(stages) + ".bin";
}

void write_stage_sets(const StageSets& sets, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write stage-set cache " + tmp);
    put_u32(out, kCacheMagic);
    put_u32(out, kCacheVersion);
    put_u32(out, static_cast<std::uint32_t>(sets.wordlength));
    put_u32(out, static_cast<std::uint32_t>(sets.stages));
    for (const auto& vals : sets.values) {
      put_u32(out, static_cast<std::uint32_t>(vals.size()));
      for (std::int64_t w : vals) put_u32(out, static_cast<std::uint32_t>(w));
    }
    for (std::size_t s = 1; s < sets.triplets.size(); ++s) {
      put_u32(out, static_cast<std::uint32_t>(sets.triplets[s].size()));
      for (const Triplet& t : sets.triplets[s]) {
        put_u32(out, t.u);
        put_u32(out, t.v);
        put_u32(out, t.w);
      }
    }
    if (!out) throw std::runtime_error("failed writing stage-set cache " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<StageSets> read_stage_sets(const std::string& path, int wordlength, int stages) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint32_t magic = 0, version = 0, b = 0, s = 0;
  if (!get_u32(in, magic) || !get_u32(in, version) || !get_u32(in, b) || !get_u32(in, s)) return std::nullopt;
  if (magic != kCacheMagic || version != kCacheVersion || b != static_cast<std::uint32_t>(wordlength) ||
      s != static_cast<std::uint32_t>(stages))
    return std::nullopt;
  StageSets sets;
  sets.wordlength = wordlength;
  sets.stages = stages;
  sets.c_max = std::int64_t{1} << (wordlength + 1);
  for (int k = 0; k <= stages; ++k) {
    std::uint32_t n = 0;
    if (!get_u32(in, n)) return std::nullopt;
    std::vector<std::int64_t> vals(n);
    for (auto& w : vals) {
      std::uint32_t x = 0;
      if (!get_u32(in, x)) return std::nullopt;
      w = x;
    }
    sets.values.push_back(std::move(vals));
  }
  sets.triplets.emplace_back();
  for (int k = 1; k <= stages; ++k) {
    std::uint32_t n = 0;
    if (!get_u32(in, n)) return std::nullopt;
    std::vector<Triplet> trip(n);
    for (auto& t : trip) {
      if (!get_u32(in, t.u) || !get_u32(in, t.v) || !get_u32(in, t.w)) return std::nullopt;
    }
    sets.triplets.push_back(std::move(trip));
  }
  return sets;
}

StageSets build_stage_sets(int wordlength, int stages, const StageSetOptions& options) {
  if (stages < 0) throw std::invalid_argument("adder depth must be nonnegative");
  if (wordlength < 1 || wordlength > kMaxWordLength) throw std::invalid_argument("word length out of range");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, StageSets> memo;
  const auto key = std::pair{wordlength, stages};
  auto store = [&](const StageSets& sets, const std::filesystem::path& file) {
    std::error_code ec;
    std::filesystem::create_directories(*options.cache_dir, ec);
    try {
      write_stage_sets(sets, file.string());
    } catch (const std::exception&) {
      // A read-only cache location only costs rebuild time.
    }
  };
  {
    std::lock_guard lock(mutex);
    if (auto it = memo.find(key); it != memo.end()) {
      if (it->second.triplet_count() > options.triplet_cap)
        throw StageSetTooLarge("stage sets for B=" + std::to_string(wordlength) + ", depth " +
                               std::to_string(stages) + " exceed " + std::to_string(options.triplet_cap) + " triplets");
      if (options.cache_dir) {
        const auto file = std::filesystem::path(*options.cache_dir) / stage_set_cache_name(wordlength, stages);
        if (!std::filesystem::exists(file)) store(it->second, file);
      }
      return it->second;
    }
  }
  std::optional<StageSets> sets;
  std::filesystem::path file;
  if (options.cache_dir) {
    file = std::filesystem::path(*options.cache_dir) / stage_set_cache_name(wordlength, stages);
    sets = read_stage_sets(file.string(), wordlength, stages);
    if (sets && sets->triplet_count() > options.triplet_cap)
      throw StageSetTooLarge("cached stage sets exceed the triplet cap");
  }
  if (!sets) {
    sets = compute_stage_sets(wordlength, stages, options.triplet_cap);
    if (options.cache_dir) store(*sets, file);
  }
  std::lock_guard lock(mutex);
  memo.emplace(key, *sets);
  return *sets;
}

std::int64_t odd_part(std::int64_t w) {
  if (w <= 0) throw std::invalid_argument("odd part is defined for positive integers only");
  return w >> std::countr_zero(static_cast<std::uint64_t>(w));
}

int max_adder_depth(int wordlength) {
  if (wordlength < 1) throw std::invalid_argument("word length must be positive");
  const int digits = (wordlength + 1) / 2 + 1;
  int d = 0;
  while ((1 << d) < digits) ++d;
  return d;
}

namespace {

struct Range {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// Builds everything below the response rows: magnitude selection, sign,
// and the stage-wise realization network.
void build_network(Ilp2Instance& inst, const std::vector<Range>& ranges, std::int64_t w_max,
                   std::vector<Term>& objective) {
  milp::MilpModel& model = inst.model;
  const StageSets& sets = *inst.sets;
  const int S = inst.stages;
  const int M = static_cast<int>(ranges.size());

  auto available_before = [&](int s, std::int64_t w) {
    for (int k = 0; k < s; ++k)
      if (sets.contains(k, w)) return true;
    return false;
  };
  auto realizable = [&](std::int64_t odd) { return available_before(S + 1, odd); };

  // Magnitude selection h_{m,w} and sign phi_m.
  std::set<std::int64_t> needed;
  inst.h_w.assign(static_cast<std::size_t>(M), {});
  for (int m = 0; m < M; ++m) {
    const auto k = static_cast<std::size_t>(m);
    const Range r = ranges[k];
    bool pos = false;
    bool neg = false;
    std::vector<Term> pick;
    std::vector<Term> magnitude;
    const std::int64_t top = std::min(w_max, std::max(std::abs(r.lo), std::abs(r.hi)));
    for (std::int64_t w = 0; w <= top; ++w) {
      const bool p = w >= r.lo && w <= r.hi;
      const bool n = -w >= r.lo && -w <= r.hi;
      if (!p && !n) continue;
      if (w > 0 && !realizable(odd_part(w))) continue;
      pos |= p && w > 0;
      neg |= n && w > 0;
      const VarId v = model.add_binary("h" + std::to_string(m) + "_" + std::to_string(w));
      inst.h_w[k][w] = v;
      pick.push_back({v, 1.0});
      if (w > 0) {
        magnitude.push_back({v, static_cast<double>(w)});
        needed.insert(odd_part(w));
      }
    }
    if (pick.empty()) {
      // No admissible magnitude: keep the model well-formed but infeasible.
      const VarId z = model.add_variable("empty" + std::to_string(m), VarKind::Continuous, 0.0, 0.0);
      model.add_constraint({{z, 1.0}}, Relation::GreaterEq, 1.0, "no_value_" + std::to_string(m));
      inst.sign.push_back(-1);
      continue;
    }
    model.add_constraint(pick, Relation::Equal, 1.0, "one_value_" + std::to_string(m));

    const VarId phi = model.add_binary("phi" + std::to_string(m));
    inst.sign.push_back(phi);
    if (!neg) model.fix(phi, 0.0);
    if (!pos && neg) model.fix(phi, 1.0);
    const VarId h = inst.response.h[k];
    auto plus = magnitude;
    for (Term& t : plus) t.coeff = -t.coeff;
    plus.push_back({h, 1.0});
    auto minus = magnitude;
    minus.push_back({h, 1.0});
    if (!neg) {
      model.add_constraint(std::move(plus), Relation::Equal, 0.0, "value_" + std::to_string(m));
    } else if (!pos) {
      model.add_constraint(std::move(minus), Relation::Equal, 0.0, "value_" + std::to_string(m));
    } else {
      model.add_indicator(phi, false, std::move(plus), Relation::Equal, 0.0, "value_pos_" + std::to_string(m));
      model.add_indicator(phi, true, std::move(minus), Relation::Equal, 0.0, "value_neg_" + std::to_string(m));
    }
  }

  // Which values each stage has to be able to provide, from the output
  // stage backwards. Stage S needs the odd parts of selectable magnitudes.
  std::vector<std::set<std::int64_t>> need(static_cast<std::size_t>(S) + 1);
  if (S >= 1) need[static_cast<std::size_t>(S)] = needed;
  std::vector<std::map<std::int64_t, std::vector<std::pair<std::int64_t, std::int64_t>>>> sources(
      static_cast<std::size_t>(S) + 1);
  for (int s = S; s >= 1; --s) {
    const auto& here = need[static_cast<std::size_t>(s)];
    auto& below = need[static_cast<std::size_t>(s) - 1];
    for (std::int64_t w : here) {
      if (available_before(s, w)) below.insert(w);
    }
    for (const Triplet& t : sets.triplets[static_cast<std::size_t>(s)]) {
      if (t.w == 1 || !here.contains(t.w)) continue;
      sources[static_cast<std::size_t>(s)][t.w].emplace_back(t.u, t.v);
      below.insert(t.u);
      below.insert(t.v);
    }
  }

  inst.adder.assign(static_cast<std::size_t>(S) + 1, {});
  inst.wire.assign(static_cast<std::size_t>(S) + 1, {});
  inst.pair.assign(static_cast<std::size_t>(S) + 1, {});
  for (int s = 1; s <= S; ++s) {
    const auto ks = static_cast<std::size_t>(s);
    for (std::int64_t w : need[ks]) {
      const std::string tag = std::to_string(w) + "_" + std::to_string(s);
      // Realizing 1 with an adder is never cheaper than the input wire.
      if (w != 1 && sets.contains(s, w)) {
        const VarId a = model.add_binary("a" + tag);
        inst.adder[ks][w] = a;
        objective.push_back({a, 1.0});
      }
      if (available_before(s, w)) inst.wire[ks][w] = model.add_binary("r" + tag);
    }
  }

  auto realized_terms = [&](int s, std::int64_t w) {
    std::vector<Term> t;
    const auto ks = static_cast<std::size_t>(s);
    if (auto it = inst.adder[ks].find(w); it != inst.adder[ks].end()) t.push_back({it->second, 1.0});
    if (auto it = inst.wire[ks].find(w); it != inst.wire[ks].end()) t.push_back({it->second, 1.0});
    return t;
  };

  // Output-stage coverage, one row per magnitude, scaled by 1/M.
  if (S >= 1) {
    std::map<std::int64_t, std::vector<Term>> per_w;
    for (int m = 0; m < M; ++m)
      for (const auto& [w, v] : inst.h_w[static_cast<std::size_t>(m)])
        if (w > 0) per_w[w].push_back({v, 1.0 / M});
    for (auto& [w, terms] : per_w) {
      for (Term t : realized_terms(S, odd_part(w))) terms.push_back({t.var, -1.0});
      model.add_constraint(std::move(terms), Relation::LessEq, 0.0, "cover_" + std::to_string(w));
    }
  } else {
    // Depth zero: only powers of two, which need no adder.
    for (int m = 0; m < M; ++m)
      for (const auto& [w, v] : inst.h_w[static_cast<std::size_t>(m)])
        if (w > 0 && odd_part(w) != 1) model.fix(v, 0.0);
  }

  for (int s = 2; s <= S; ++s) {
    const auto ks = static_cast<std::size_t>(s);
    // Replication needs a realization one stage earlier.
    for (const auto& [w, r] : inst.wire[ks]) {
      std::vector<Term> terms{{r, 1.0}};
      for (Term t : realized_terms(s - 1, w)) terms.push_back({t.var, -1.0});
      model.add_constraint(std::move(terms), Relation::LessEq, 0.0, "wire_" + std::to_string(w) + "_" + std::to_string(s));
    }
    // An adder needs an available input pair.
    auto& pairs = inst.pair[ks - 1];
    for (const auto& [w, a] : inst.adder[ks]) {
      std::vector<Term> terms{{a, 1.0}};
      for (const auto& uv : sources[ks][w]) {
        auto it = pairs.find(uv);
        if (it == pairs.end()) {
          const VarId x = model.add_binary("x" + std::to_string(uv.first) + "_" + std::to_string(uv.second) + "_" +
                                           std::to_string(s - 1));
          inst.relaxable.insert(x);
          it = pairs.emplace(uv, x).first;
        }
        terms.push_back({it->second, -1.0});
      }
      model.add_constraint(std::move(terms), Relation::LessEq, 0.0, "adder_" + std::to_string(w) + "_" + std::to_string(s));
    }
    for (const auto& [uv, x] : pairs) {
      for (const std::int64_t in : {uv.first, uv.second}) {
        std::vector<Term> terms{{x, 1.0}};
        for (Term t : realized_terms(s - 1, in)) terms.push_back({t.var, -1.0});
        model.add_constraint(std::move(terms), Relation::LessEq, 0.0,
                             "pair_" + std::to_string(uv.first) + "_" + std::to_string(uv.second) + "_" + std::to_string(s - 1));
        if (uv.first == uv.second) break;
      }
    }
  }
}

}  // namespace

Ilp2Instance build_ilp2(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                        int stages, const StageSets& sets, double margin) {
  if (stages < 0 || stages > sets.stages) throw std::invalid_argument("stage sets do not cover the requested depth");
  if (sets.wordlength != spec.wordlength) throw std::invalid_argument("stage sets built for another word length");
  Ilp2Instance inst;
  inst.stages = stages;
  inst.wordlength = spec.wordlength;
  inst.sets = &sets;
  inst.response = add_response_rows(inst.model, spec, grid, bounds, VarKind::Integer, margin);
  for (VarId h : inst.response.h) inst.relaxable.insert(h);

  std::vector<Range> ranges;
  for (std::size_t m = 0; m < bounds.size(); ++m) ranges.push_back({bounds.lo[m], bounds.hi[m]});
  std::vector<Term> objective;
  build_network(inst, ranges, spec.max_magnitude(), objective);

  // Structural adders: N minus the saving of every zero coefficient.
  const auto weights = detail::structural_weights(spec);
  for (std::size_t m = 0; m < ranges.size(); ++m) {
    if (auto it = inst.h_w[m].find(0); it != inst.h_w[m].end()) objective.push_back({it->second, -weights[m]});
  }
  inst.model.set_objective(std::move(objective), spec.order);
  return inst;
}

Ilp2Instance build_ilp2_targets(const std::vector<std::int64_t>& targets, int wordlength, int stages,
                                const StageSets& sets) {
  if (stages < 0 || stages > sets.stages) throw std::invalid_argument("stage sets do not cover the requested depth");
  Ilp2Instance inst;
  inst.stages = stages;
  inst.wordlength = wordlength;
  inst.sets = &sets;
  std::vector<Range> ranges;
  std::int64_t w_max = 0;
  for (std::size_t m = 0; m < targets.size(); ++m) {
    const double t = static_cast<double>(targets[m]);
    inst.response.h.push_back(inst.model.add_variable("h" + std::to_string(m), VarKind::Integer, t, t));
    ranges.push_back({targets[m], targets[m]});
    w_max = std::max(w_max, std::abs(targets[m]));
  }
  std::vector<Term> objective;
  build_network(inst, ranges, w_max, objective);
  inst.model.set_objective(std::move(objective));
  return inst;
}

AdderGraph extract_from_ilp2(const Ilp2Instance& inst, const milp::SolveOutcome& outcome) {
  if (!outcome.has_solution()) throw GraphError("no assignment to extract from");
  const StageSets& sets = *inst.sets;
  AdderGraph g;
  // value -> node realizing it, updated as stages are walked.
  std::map<std::int64_t, int> node_of{{1, 0}};
  std::set<std::int64_t> realized_prev{1};

  for (int s = 1; s <= inst.stages; ++s) {
    const auto ks = static_cast<std::size_t>(s);
    std::set<std::int64_t> realized;
    for (const auto& [w, r] : inst.wire[ks]) {
      if (!outcome.is_set(r)) continue;
      if (!realized_prev.contains(w))
        throw GraphError("value " + std::to_string(w) + " wired at stage " + std::to_string(s) + " without a source");
      realized.insert(w);
    }
    std::map<std::int64_t, int> new_nodes;
    for (const auto& [w, a] : inst.adder[ks]) {
      if (!outcome.is_set(a)) continue;
      // Lexicographically smallest pair with both inputs available.
      std::optional<std::pair<std::int64_t, std::int64_t>> chosen;
      for (const Triplet& t : sets.triplets[ks]) {
        if (t.w != w) continue;
        if (realized_prev.contains(t.u) && realized_prev.contains(t.v)) {
          chosen = std::pair<std::int64_t, std::int64_t>{t.u, t.v};
          break;
        }
      }
      if (!chosen)
        throw GraphError("no realized input pair explains " + std::to_string(w) + " at stage " + std::to_string(s));
      const auto [u, v] = *chosen;
      const AOpConfig q = aop_configs(u, v, w, sets.c_max).front();
      Operand left{node_of.at(u), q.r > 0 ? -q.r : q.l_u, false};
      Operand right{node_of.at(v), q.r > 0 ? -q.r : q.l_v, false};
      if (q.s_v) {
        // Negate the smaller shifted operand so the sum stays positive.
        if ((u << q.l_u) >= (v << q.l_v))
          right.negated = true;
        else
          left.negated = true;
      }
      const int id = g.add_node(left, right, s);
      if (g.node(id).value != w) throw GraphError("A-operation reconstruction failed for " + std::to_string(w));
      new_nodes[w] = id;
      realized.insert(w);
    }
    for (const auto& [w, id] : new_nodes) node_of[w] = id;
    realized_prev = std::move(realized);
  }

  std::vector<OutputTap> taps;
  for (std::size_t m = 0; m < inst.h_w.size(); ++m) {
    std::int64_t w = -1;
    for (const auto& [value, v] : inst.h_w[m]) {
      if (outcome.is_set(v)) {
        if (w >= 0) throw GraphError("coefficient " + std::to_string(m) + " selects two magnitudes");
        w = value;
      }
    }
    if (w < 0) throw GraphError("coefficient " + std::to_string(m) + " selects no magnitude");
    if (w == 0) {
      taps.push_back(OutputTap::zero());
      continue;
    }
    const std::int64_t odd = odd_part(w);
    const auto it = node_of.find(odd);
    if (it == node_of.end()) throw GraphError("magnitude " + std::to_string(w) + " has no realizing node");
    const bool negative = inst.sign[m] >= 0 && outcome.is_set(inst.sign[m]);
    taps.push_back({it->second, std::countr_zero(static_cast<std::uint64_t>(w)), negative ? -1 : 1});
  }
  g.set_outputs(std::move(taps));
  simulate(g);
  return g;
}

MethodResult solve_bounded_ad(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                              std::optional<int> depth, const Ilp2Options& options) {
  const auto start = std::chrono::steady_clock::now();
  MethodResult result;
  std::vector<int> budgets;
  if (depth) {
    budgets.push_back(*depth);
  } else {
    for (int s = 1; s <= max_adder_depth(spec.wordlength); ++s) budgets.push_back(s);
  }
  for (const int S : budgets) {
    const StageSets sets = build_stage_sets(spec.wordlength, S, options.stage_sets);
    const Ilp2Instance inst = build_ilp2(spec, grid, bounds, S, sets, options.margin);
    milp::SolveOptions so = options.solve;
    so.integral_objective = true;
    if (options.relax) so.relax = inst.relaxable;
    const milp::SolveOutcome out = milp::solve(inst.model, so);
    result.log.push_back(detail::describe("ilp2 AD=" + std::to_string(S) + " vars=" +
                                              std::to_string(inst.model.num_variables()),
                                          out));
    if (out.status == milp::SolveStatus::Infeasible) {
      result.status = MethodStatus::Infeasible;
      continue;
    }
    if (out.status == milp::SolveStatus::Unbounded) throw milp::BackendError("bounded-depth model reported unbounded");
    if (!out.has_solution()) {
      result.status = MethodStatus::TimedOut;
      break;
    }
    AdderGraph g = extract_from_ilp2(inst, out);
    std::vector<std::int64_t> h;
    for (VarId v : inst.response.h) h.push_back(detail::rounded(out, v));
    const double gain = inst.response.gain_is_variable() ? out.value(inst.response.gain) : spec.gain.value();
    const bool proven = out.status == milp::SolveStatus::Optimal;
    result.solution = make_solution(spec, std::move(h), gain, std::move(g),
                                    proven ? Optimality::ProvenOptimal : Optimality::BestKnown);
    result.status = proven ? MethodStatus::Optimal : MethodStatus::BestKnown;
    break;
  }
  result.seconds = detail::seconds_since(start);
  return result;
}

}  // namespace mlfir
