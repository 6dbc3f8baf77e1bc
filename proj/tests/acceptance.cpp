// Acceptance runner: one PASS/FAIL line per criterion.
//   mlfir_acceptance [--criterion K]...   (default: all)

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <tuple>

#include <CLI11.hpp>

#include "mlfir/benchmarks.hpp"
#include "mlfir/design.hpp"
#include "mlfir/ilp1.hpp"
#include "mlfir/ilp2.hpp"

using namespace mlfir;

namespace {

// Pinned limits and tolerances.
constexpr double kMcmSeconds = 60.0;
constexpr double kStageSeconds = 10.0;
constexpr double kSy11aS1cViolation = 0.00118;
constexpr double kSy11aS1cRelTol = 0.10;
constexpr double kSy11aS2bMinViolation = 0.0139;
constexpr double kDesignSeconds = 7200.0;
constexpr double kRedmillSeconds = 1800.0;
constexpr int kRedmillMaxOrder = 60;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(MLFIR_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::optional<double> field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  if (pos == std::string::npos) return std::nullopt;
  try {
    return std::stod(text.substr(pos + key.size()));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void note(const std::string& line) { std::cout << "    " << line << std::endl; }

// ---------------------------------------------------------------- 1

bool criterion_mcm() {
  const std::vector<std::pair<std::string, int>> cases{{"23", 2}, {"7 23", 2}, {"3", 1}, {"1", 0}};
  bool ok = true;
  for (const auto& [args, want] : cases) {
    const auto t = Clock::now();
    const Run r = cli("mcm " + args);
    const double secs = since(t);
    const auto got = field(r.out, "adders: ");
    const bool pass = r.code == 0 && got && static_cast<int>(*got) == want && secs < kMcmSeconds;
    std::ostringstream s;
    s << "mcm " << args << " -> " << (got ? std::to_string(static_cast<int>(*got)) : "?") << " (want " << want
      << ", " << secs << " s)";
    note(s.str());
    ok = ok && pass;
  }
  return ok;
}

// ---------------------------------------------------------------- 2

// Odd results of every configuration (l1, l2, r, sign) with generous shift
// ranges, written independently of the library's enumerator.
std::set<std::int64_t> enumerate_aops(std::int64_t u, std::int64_t v, std::int64_t c_max) {
  std::set<std::int64_t> out;
  int bits = 0;
  while ((std::int64_t{1} << bits) <= c_max) ++bits;
  for (int l1 = 0; l1 <= bits + 2; ++l1)
    for (int l2 = 0; l2 <= bits + 2; ++l2)
      for (int sign : {1, -1})
        for (int r = 0; r <= bits + 2; ++r) {
          const std::int64_t x = std::abs((u << l1) + sign * (v << l2));
          if (x == 0 || x % (std::int64_t{1} << r) != 0) continue;
          const std::int64_t y = x >> r;
          if (y % 2 == 1 && y <= c_max) out.insert(y);
        }
  return out;
}

bool criterion_stage_sets() {
  const auto t = Clock::now();
  bool ok = true;
  for (int B = 2; B <= 4; ++B) {
    const std::int64_t c_max = std::int64_t{1} << (B + 1);
    const StageSets sets = build_stage_sets(B, 1);
    std::set<std::int64_t> want_a{1};
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> want_t;
    for (std::int64_t w : enumerate_aops(1, 1, c_max)) {
      want_a.insert(w);
      want_t.insert({1, 1, w});
    }
    const std::set<std::int64_t> got_a(sets.values[1].begin(), sets.values[1].end());
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> got_t;
    for (const Triplet& tr : sets.triplets[1]) got_t.insert({tr.u, tr.v, tr.w});
    // A^1 holds A^0 plus the new values.
    const bool pass = got_a == want_a && got_t == want_t;
    note("B=" + std::to_string(B) + ": A^1 size " + std::to_string(got_a.size()) + ", T^1 size " +
         std::to_string(got_t.size()) + (pass ? " match" : " MISMATCH"));
    ok = ok && pass;
  }
  const StageSets s3 = build_stage_sets(3, 2);
  const bool a1 = s3.values[1] == std::vector<std::int64_t>{1, 3, 5, 7, 9, 15};
  bool t2 = true;
  for (const Triplet tr : {Triplet{1, 3, 11}, Triplet{1, 5, 11}, Triplet{3, 5, 11}})
    t2 = t2 && std::binary_search(s3.triplets[2].begin(), s3.triplets[2].end(), tr);
  const double secs = since(t);
  note(std::string("A^1(B=3) = {1,3,5,7,9,15}: ") + (a1 ? "yes" : "no") + "; T^2 members: " + (t2 ? "yes" : "no") +
       "; " + std::to_string(secs) + " s");
  return ok && a1 && t2 && secs < kStageSeconds;
}

// ---------------------------------------------------------------- 3 and 7

// A row printed one tap short is scored as printed, i.e. at the order its
// length implies; the best completion at the stated order is reported too.
double validate_row(const PublishedRow& row) {
  const auto h = from_printed_order(row.printed);
  if (!row.complete()) {
    const FilterSpec stated = row.spec();
    const Completion c = least_violation_completion(stated, h, row.gain, default_density(stated));
    std::ostringstream s;
    s << row.name << " " << row.source << ": printed list is one tap short of N=" << row.order
      << "; scored as printed (N=" << row.as_printed().order << "); best completion at N=" << row.order
      << " violates by " << c.lower_bound;
    note(s.str());
    const FilterSpec spec = row.as_printed();
    return validate(spec, h, row.gain, default_density(spec)).max_violation;
  }
  const FilterSpec spec = row.spec();
  return validate(spec, h, row.gain, default_density(spec)).max_violation;
}

bool criterion_validation() {
  bool ok = true;
  int checked = 0;
  for (const PublishedRow& row : published_rows()) {
    if (!row.ours() || row.error != 0.0) continue;
    const double v = validate_row(row);
    ++checked;
    if (v != 0.0) {
      std::ostringstream s;
      s << row.name << " N=" << row.order << " B=" << row.wordlength << " G=" << row.gain << ": violation " << v;
      note(s.str());
      ok = false;
    }
  }
  note(std::to_string(checked) + " error-free rows checked");
  for (const PublishedRow& row : published_rows()) {
    if (row.source != "sy11a") continue;
    const double v = validate_row(row);
    std::ostringstream s;
    s << row.name << " sy11a: violation " << v;
    if (row.name == "S1c") {
      const bool pass = std::abs(v - kSy11aS1cViolation) <= kSy11aS1cRelTol * kSy11aS1cViolation;
      s << (pass ? " (within 10% of 0.00118)" : " (outside 10% of 0.00118)");
      ok = ok && pass;
    } else if (row.name == "S2b") {
      const bool pass = v >= kSy11aS2bMinViolation;
      s << (pass ? " (>= 0.0139)" : " (< 0.0139)");
      ok = ok && pass;
    }
    note(s.str());
  }
  return ok;
}

bool criterion_validation_only() {
  bool ok = true;
  for (const std::string name : {"L1", "S2a", "S2b", "L2"}) {
    find_benchmark(name);  // the spec itself must exist
    int rows = 0;
    for (const PublishedRow& row : published_rows()) {
      if (row.name != name) continue;
      ++rows;
      const double v = validate_row(row);
      std::ostringstream s;
      s << name << " " << row.source << " N=" << row.order << " B=" << row.wordlength << " G=" << row.gain
        << ": violation " << v << " (published error " << row.error << ")";
      // Our own rows must stay inside the allowance they were designed with.
      if (row.ours()) {
        const bool pass = v <= row.error + kValidationTolerance;
        if (!pass) s << " EXCEEDS";
        ok = ok && pass;
      }
      note(s.str());
    }
    if (rows == 0) note(name + ": no coefficients published (the reference run timed out); nothing to validate");
  }
  return ok;
}

// ---------------------------------------------------------------- 4

struct EndToEnd {
  std::string label;
  std::string bench;
  FilterType type;
  int order;
  double published_gain;
  double allow_error;
  int depth;
  int want;
};

bool criterion_designs() {
  const std::vector<EndToEnd> cases{
      {"S1c I N=24 AD2", "S1c", FilterType::I, 24, 1.25625, 0.0, 2, 25},
      {"S1a II N=23 err 0.00159", "S1a", FilterType::II, 23, 2.172388, 0.00159, 2, 24},
      {"L3 II N=35 AD2", "L3", FilterType::II, 35, 2.10468, 0.0, 2, 35},
      {"L3 II N=35 err 0.00213 AD1", "L3", FilterType::II, 35, 2.60028, 0.00213, 1, 34},
  };
  bool ok = true;
  for (const EndToEnd& c : cases) {
    FilterSpec s;
    s.bands = find_benchmark(c.bench).bands;
    s.type = c.type;
    s.order = c.order;
    s.wordlength = 8;
    s.gain = gain_octave(c.published_gain);
    s.allow_error = c.allow_error;
    DesignOptions o;
    o.method = Method::Ilp2;
    o.depth = c.depth;
    o.solve.time_limit = kDesignSeconds;
    const DesignOutcome out = design(s, o);
    std::ostringstream line;
    line << c.label << ": " << to_string(out.status) << " in " << out.seconds << " s";
    // A count equal to the published optimum passes even when the time limit
    // stopped the optimality proof; the status is printed either way.
    bool pass = (out.status == DesignStatus::Optimal || out.status == DesignStatus::BestKnown) &&
                out.solution.has_value();
    if (out.solution) {
      const DesignSolution& sol = *out.solution;
      line << ", A=" << sol.adders_total << " (A_M " << sol.adders_mb << ", A_S " << sol.adders_structural
           << "), G=" << sol.gain << ", violation " << sol.violation << " (want A=" << c.want << ")";
      pass = pass && sol.adders_total == c.want && sol.violation <= c.allow_error + kValidationTolerance;
    }
    note(line.str());
    ok = ok && pass;
  }
  return ok;
}

// ---------------------------------------------------------------- 5

struct RedmillPoint {
  int order = -1;
  int adders = -1;
  std::string status;
};

RedmillPoint redmill_min_order(double p, Method method) {
  RedmillPoint pt;
  for (int N = 0; N <= kRedmillMaxOrder; N += 2) {
    const FilterSpec s = redmill_spec(p, N);
    DesignOptions o;
    o.method = method;
    o.depth = 2;
    o.solve.time_limit = kRedmillSeconds;
    const DesignOutcome out = design(s, o);
    pt.status = to_string(out.status);
    if (out.status == DesignStatus::SpecInfeasible || out.status == DesignStatus::IntegerInfeasible) continue;
    if ((out.status == DesignStatus::Optimal || out.status == DesignStatus::BestKnown) && out.report &&
        out.report->valid()) {
      pt.order = N;
      pt.adders = out.solution->adders_total;
    }
    // A timeout or divergence leaves the minimal order undecided.
    if (pt.order < 0) pt.order = -(N + 1);
    return pt;
  }
  return pt;
}

bool criterion_redmill() {
  bool ok = true;
  int equal = 0;
  int points = 0;
  for (int p = 2; p <= 14; ++p) {
    const RedmillPoint a = redmill_min_order(p, Method::Ilp1Total);
    const RedmillPoint b = redmill_min_order(p, Method::Ilp2);
    ++points;
    const bool both = a.order >= 0 && b.order >= 0;
    std::ostringstream s;
    s << "p=" << p << ": ILP1 N=" << a.order << " A=" << a.adders << " (" << a.status << "), ILP2 N=" << b.order
      << " A=" << b.adders << " (" << b.status << ")";
    note(s.str());
    if (!both || a.adders > b.adders) ok = false;
    if (both && a.adders == b.adders) ++equal;
  }
  note(std::to_string(equal) + " of " + std::to_string(points) + " points equal");
  return ok && 2 * equal > points;
}

// ---------------------------------------------------------------- 6

FilterSpec small_lowpass(FilterType type, int order, int B) {
  FilterSpec s;
  s.bands = {{0.0, 0.2, 0.9, 1.1}, {0.55, 1.0, -0.08, 0.08}};
  s.type = type;
  s.order = order;
  s.wordlength = B;
  return s;
}

bool prop_simulate_extract(std::vector<std::string>& why) {
  bool ok = true;
  auto check_graph = [&](const AdderGraph& g, const std::vector<std::int64_t>& want, const std::string& what) {
    try {
      // Re-derive every tap from the simulated node values.
      const std::vector<std::int64_t> values = simulate(g);
      std::vector<std::int64_t> taps;
      for (const OutputTap& t : g.outputs())
        taps.push_back(t.is_zero() ? 0 : t.sign * (values[static_cast<std::size_t>(t.node)] << t.shift));
      if (taps != want) throw std::runtime_error("simulated taps differ from the targets");
    } catch (const std::exception& e) {
      why.push_back("simulate/extract: " + what + ": " + e.what());
      ok = false;
    }
  };
  for (const std::vector<std::int64_t>& t :
       std::vector<std::vector<std::int64_t>>{{23}, {7, 23}, {3}, {1}, {45, 0, -9}, {11, 13, 9}}) {
    check_graph(minimal_mcm(t).graph, t, "ILP1 MCM");
    std::int64_t top = 1;
    for (auto x : t) top = std::max(top, std::abs(x));
    const int B = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(top)));
    const StageSets sets = build_stage_sets(B, 3);
    const Ilp2Instance inst = build_ilp2_targets(t, B, 3, sets);
    milp::SolveOptions so;
    so.relax = inst.relaxable;
    const auto out = milp::solve(inst.model, so);
    if (out.has_solution()) check_graph(extract_from_ilp2(inst, out), t, "ILP2 MCM");
  }
  for (FilterType type : {FilterType::I, FilterType::II, FilterType::III, FilterType::IV}) {
    const int order = (type == FilterType::I || type == FilterType::III) ? 8 : 9;
    FilterSpec s = small_lowpass(type, order, 5);
    if (type == FilterType::III || type == FilterType::IV) {
      // Antisymmetric types vanish at 0: use a high-pass.
      s.bands = {{0.0, 0.35, -0.08, 0.08}, {0.75, 1.0, 0.9, 1.1}};
      if (type == FilterType::III) s.bands = {{0.3, 0.7, 0.85, 1.15}};
    }
    for (Method m : {Method::Ilp1Total, Method::Ilp2}) {
      DesignOptions o;
      o.method = m;
      const DesignOutcome out = design(s, o);
      if (!out.solution) continue;
      try {
        out.solution->check();
      } catch (const std::exception& e) {
        why.push_back(std::string("design solution check: ") + e.what());
        ok = false;
      }
      check_graph(out.solution->graph, out.solution->coefficients, "design");
    }
  }
  return ok;
}

bool prop_bounds_sound(std::vector<std::string>& why) {
  bool ok = true;
  for (const PublishedRow& row : published_rows()) {
    if (!row.ours()) continue;
    FilterSpec fixed = row.spec();
    fixed.allow_error = row.error;
    fixed = fixed.widened();
    FilterSpec variable = fixed;
    variable.gain = gain_octave(row.gain);
    const auto h = from_printed_order(row.printed);
    for (const FilterSpec& s : {fixed, variable}) {
      const FrequencyGrid grid = afp_grid(s, 4 * static_cast<std::size_t>(s.coefficient_count())).grid;
      if (!tighten(s, grid).contains(h)) {
        std::ostringstream m;
        m << "bounds: " << row.name << " N=" << row.order << " G=" << row.gain << " outside its box";
        why.push_back(m.str());
        ok = false;
      }
    }
  }
  return ok;
}

bool prop_monotone(std::vector<std::string>& why) {
  FilterSpec s;
  s.bands = find_benchmark("S1c").bands;
  s.type = FilterType::I;
  s.order = 24;
  s.wordlength = 8;
  FrequencyGrid grid = afp_grid(s, 20).grid;
  CoefficientBounds prev = tighten(s, grid);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  for (int step = 0; step < 6; ++step) {
    std::vector<NewPoint> add;
    for (int i = 0; i < 3; ++i) {
      const double w = pick(rng);
      if (w <= 0.2) add.push_back({w, 0});
      else if (w >= 0.5) add.push_back({w, 1});
    }
    const FrequencyGrid next = refine(grid, s, add);
    for (const GridPoint& p : grid.points())
      if (!next.contains(p.omega_pi)) {
        why.push_back("refine dropped a grid point");
        return false;
      }
    const CoefficientBounds b = tighten(s, next);
    for (std::size_t m = 0; m < b.size(); ++m)
      if (b.lo[m] < prev.lo[m] || b.hi[m] > prev.hi[m]) {
        why.push_back("bounds grew under refinement");
        return false;
      }
    grid = next;
    prev = b;
  }
  return true;
}

bool prop_linearization(std::vector<std::string>& why) {
  using namespace milp;
  auto holds = [](const LinearConstraint& c, const std::vector<double>& x) {
    double a = 0.0;
    for (const Term& t : c.terms) a += t.coeff * x[static_cast<std::size_t>(t.var)];
    switch (c.rel) {
      case Relation::LessEq: return a <= c.rhs + 1e-9;
      case Relation::GreaterEq: return a >= c.rhs - 1e-9;
      case Relation::Equal: return std::abs(a - c.rhs) <= 1e-9;
    }
    return false;
  };
  auto feasible = [&](const MilpModel& m, const std::vector<double>& x) {
    for (const auto& c : m.constraints())
      if (!holds(c, x)) return false;
    for (const auto& ind : m.indicators())
      if ((x[static_cast<std::size_t>(ind.guard)] > 0.5) == ind.guard_value && !holds(ind.implied, x)) return false;
    return true;
  };
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> rhs(-4, 4);
  std::uniform_int_distribution<int> rel(0, 2);
  for (int trial = 0; trial < 30; ++trial) {
    MilpModel m;
    const int n = 8 + trial % 5;  // up to 12 binaries
    for (int i = 0; i < n; ++i) m.add_binary("b" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
      std::vector<Term> terms;
      for (int k = 1; k <= 3; ++k) terms.push_back({(i + k) % n, static_cast<double>(coef(rng))});
      m.add_indicator(i, (trial + i) % 2 == 0, terms, static_cast<Relation>(rel(rng)), rhs(rng));
    }
    const MilpModel lin = linearize_indicators(m);
    if (!lin.indicators().empty()) {
      why.push_back("linearization left indicators");
      return false;
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
      if (feasible(m, x) != feasible(lin, x)) {
        why.push_back("linearization changed the feasible set");
        return false;
      }
    }
  }
  return true;
}

bool prop_determinism(std::vector<std::string>& why) {
  FilterSpec s;
  s.bands = find_benchmark("S1c").bands;
  s.type = FilterType::I;
  s.order = 24;
  s.wordlength = 8;
  if (!(afp_grid(s, 52).grid == afp_grid(s, 52).grid)) {
    why.push_back("afp_grid differs between runs");
    return false;
  }
  const FilterSpec small = small_lowpass(FilterType::I, 8, 5);
  for (Method m : {Method::Ilp1Total, Method::Ilp2}) {
    DesignOptions o;
    o.method = m;
    o.solve.threads = 1;
    const DesignOutcome a = design(small, o);
    const DesignOutcome b = design(small, o);
    const bool same = a.status == b.status && a.grid == b.grid && a.solution.has_value() == b.solution.has_value() &&
                      (!a.solution || (a.solution->coefficients == b.solution->coefficients &&
                                       a.solution->gain == b.solution->gain && a.solution->graph == b.solution->graph));
    if (!same) {
      why.push_back("design differs between runs");
      return false;
    }
  }
  return true;
}

bool criterion_properties() {
  std::vector<std::string> why;
  const std::vector<std::pair<std::string, std::function<bool(std::vector<std::string>&)>>> props{
      {"simulate/extract exactness", prop_simulate_extract},
      {"bounds soundness", prop_bounds_sound},
      {"refinement monotonicity", prop_monotone},
      {"linearization equivalence", prop_linearization},
      {"determinism", prop_determinism},
  };
  bool ok = true;
  for (const auto& [name, f] : props) {
    const auto t = Clock::now();
    const bool pass = f(why);
    std::ostringstream s;
    s << name << ": " << (pass ? "ok" : "failed") << " (" << since(t) << " s)";
    note(s.str());
    ok = ok && pass;
  }
  for (const auto& w : why) note(w);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number (repeatable); default all")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7};

  const std::map<int, std::pair<std::string, std::function<bool()>>> criteria{
      {1, {"MCM core", criterion_mcm}},
      {2, {"stage-set oracle", criterion_stage_sets}},
      {3, {"validation fidelity", criterion_validation}},
      {4, {"end-to-end small designs", criterion_designs}},
      {5, {"ILP1/ILP2 cross-check on the Redmill family", criterion_redmill}},
      {6, {"property suite", criterion_properties}},
      {7, {"validation-only references", criterion_validation_only}},
  };
  bool all = true;
  for (int k : selected) {
    const auto& [name, run] = criteria.at(k);
    const auto t = Clock::now();
    bool pass = false;
    try {
      pass = run();
    } catch (const std::exception& e) {
      note(std::string("exception: ") + e.what());
    }
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << k << ": " << name << " (" << since(t) << " s)"
              << std::endl;
    all = all && pass;
  }
  return all ? 0 : 1;
}
