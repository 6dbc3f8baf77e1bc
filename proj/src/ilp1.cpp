#include "mlfir/ilp1.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>

#include "model_util.hpp"

namespace mlfir {

namespace {

using milp::Relation;
using milp::Term;
using milp::VarId;
using milp::VarKind;

std::string idx(int a, int i) { return std::to_string(a) + (i == 0 ? "l" : "r"); }

// Magnitudes reachable by sign * 2^s * c, c odd in [1, c_max]; used to skip
// output selections that the coefficient range excludes.
bool sign_shift_possible(std::int64_t lo, std::int64_t hi, int s, int phi, std::int64_t c_lo, std::int64_t c_hi) {
  const std::int64_t a = c_lo << s;
  const std::int64_t b = c_hi << s;
  if (phi == 0) return b >= lo && a <= hi;
  return -a >= lo && -b <= hi;
}

struct Ranges {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;
};

// Coefficient link (C3) and the zero indicators; shared by all builds.
void add_outputs(Ilp1Instance& inst, const Ranges& r, bool with_block) {
  milp::MilpModel& model = inst.model;
  const int M = static_cast<int>(r.lo.size());
  const std::int64_t c_max = std::int64_t{1} << (inst.wordlength + 1);
  inst.zero.assign(static_cast<std::size_t>(M), -1);
  for (int m = 0; m < M; ++m) {
    const auto k = static_cast<std::size_t>(m);
    const VarId h = inst.response.h[k];
    std::vector<Term> choose;
    if (r.lo[k] <= 0 && r.hi[k] >= 0) {
      const VarId z = model.add_binary("hz" + std::to_string(m));
      inst.zero[k] = z;
      model.add_indicator(z, true, {{h, 1.0}}, Relation::Equal, 0.0, "zero_" + std::to_string(m));
      choose.push_back({z, 1.0});
    }
    if (with_block) {
      for (int a = 0; a <= inst.adders; ++a) {
        // The input is the constant 1; adders carry odd values up to c_max.
        const std::int64_t c_lo = 1;
        const std::int64_t c_hi = a == 0 ? 1 : c_max;
        for (int s = 0; s <= inst.wordlength; ++s) {
          for (int phi = 0; phi <= 1; ++phi) {
            if (!sign_shift_possible(r.lo[k], r.hi[k], s, phi, c_lo, c_hi)) continue;
            const VarId o = model.add_binary("o" + std::to_string(a) + "_" + std::to_string(m) + "_" +
                                             std::to_string(s) + "_" + std::to_string(phi));
            inst.output[{a, m, s, phi}] = o;
            choose.push_back({o, 1.0});
            const double sign = phi ? -1.0 : 1.0;
            const double scale = std::ldexp(1.0, -s);
            // Written as c_a = sign 2^-s h' to keep the big-M small.
            if (a == 0) {
              model.add_indicator(o, true, {{h, 1.0}}, Relation::Equal, sign * std::ldexp(1.0, s),
                                  "out_" + std::to_string(m));
            } else {
              model.add_indicator(o, true, {{inst.block[static_cast<std::size_t>(a) - 1].value, 1.0}, {h, -sign * scale}},
                                  Relation::Equal, 0.0, "out_" + std::to_string(m));
            }
          }
        }
      }
    }
    if (choose.empty()) {
      const VarId z = model.add_variable("empty" + std::to_string(m), VarKind::Continuous, 0.0, 0.0);
      model.add_constraint({{z, 1.0}}, Relation::GreaterEq, 1.0, "no_value_" + std::to_string(m));
    } else {
      model.add_constraint(std::move(choose), Relation::Equal, 1.0, "one_output_" + std::to_string(m));
    }
  }
}

// The multiplier block: adders 1..A_M with source, shift and sign selection.
void add_block(Ilp1Instance& inst) {
  milp::MilpModel& model = inst.model;
  const int B = inst.wordlength;
  const double c_max = std::ldexp(1.0, B + 1);
  const double sh_max = 2.0 * c_max;
  for (int a = 1; a <= inst.adders; ++a) {
    Ilp1Adder ad;
    const std::string name = std::to_string(a);
    ad.value = model.add_variable("c" + name, VarKind::Integer, 1.0, c_max);
    ad.half = model.add_variable("c_half" + name, VarKind::Integer, 0.0, std::floor((c_max - 1.0) / 2.0));
    inst.relaxable.insert(ad.value);
    // Odd fundamentals: c_a = 2 half + 1.
    model.add_constraint({{ad.value, 1.0}, {ad.half, -2.0}}, Relation::Equal, 1.0, "odd" + name);
    for (int i = 0; i < 2; ++i) {
      const std::string tag = idx(a, i);
      ad.input[i] = model.add_variable("cin" + tag, VarKind::Integer, 1.0, c_max);
      inst.relaxable.insert(ad.input[i]);
      // Right-shifted inputs are fractional, so these two are always continuous.
      ad.shifted[i] = model.add_variable("csh" + tag, VarKind::Continuous, 0.0, sh_max);
      ad.signed_[i] = model.add_variable("cshsg" + tag, VarKind::Continuous, -sh_max, sh_max);
      for (int k = 0; k < a; ++k) {
        const VarId sel = model.add_binary("csel" + tag + "_" + std::to_string(k));
        ad.source[i].push_back(sel);
        if (k == 0) {
          model.add_indicator(sel, true, {{ad.input[i], 1.0}}, Relation::Equal, 1.0, "src" + tag);
        } else {
          model.add_indicator(sel, true, {{ad.input[i], 1.0}, {inst.block[static_cast<std::size_t>(k) - 1].value, -1.0}},
                              Relation::Equal, 0.0, "src" + tag);
        }
      }
      std::vector<Term> one_src;
      for (VarId v : ad.source[i]) one_src.push_back({v, 1.0});
      model.add_constraint(std::move(one_src), Relation::Equal, 1.0, "one_src" + tag);

      std::vector<Term> one_shift;
      for (int s = inst.shifts.min; s <= inst.shifts.max; ++s) {
        const VarId sv = model.add_binary("varphi" + tag + "_" + std::to_string(s));
        ad.shift[i][s] = sv;
        one_shift.push_back({sv, 1.0});
        // Left shifts: c^sh = 2^s c_in. Right shifts: 2^-s c^sh = c_in.
        if (s >= 0)
          model.add_indicator(sv, true, {{ad.shifted[i], 1.0}, {ad.input[i], -std::ldexp(1.0, s)}}, Relation::Equal, 0.0,
                              "shift" + tag);
        else
          model.add_indicator(sv, true, {{ad.shifted[i], std::ldexp(1.0, -s)}, {ad.input[i], -1.0}}, Relation::Equal,
                              0.0, "shift" + tag);
      }
      model.add_constraint(std::move(one_shift), Relation::Equal, 1.0, "one_shift" + tag);

      ad.negate[i] = model.add_binary("phi" + tag);
      model.add_indicator(ad.negate[i], true, {{ad.signed_[i], 1.0}, {ad.shifted[i], 1.0}}, Relation::Equal, 0.0,
                          "neg" + tag);
      model.add_indicator(ad.negate[i], false, {{ad.signed_[i], 1.0}, {ad.shifted[i], -1.0}}, Relation::Equal, 0.0,
                          "pos" + tag);
    }
    // Odd fundamentals: only the right input takes a left shift, and right
    // shifts apply to both inputs alike.
    for (int s = inst.shifts.min; s <= inst.shifts.max; ++s) {
      if (s > 0) model.fix(ad.shift[0][s], 0.0);
      if (s < 0)
        model.add_constraint({{ad.shift[0][s], 1.0}, {ad.shift[1][s], -1.0}}, Relation::Equal, 0.0, "same_rshift" + name);
    }
    model.add_constraint({{ad.negate[0], 1.0}, {ad.negate[1], 1.0}}, Relation::LessEq, 1.0, "one_neg" + name);
    model.add_constraint({{ad.value, 1.0}, {ad.signed_[0], -1.0}, {ad.signed_[1], -1.0}}, Relation::Equal, 0.0,
                         "sum" + name);
    inst.block.push_back(std::move(ad));
  }
}

void set_structural_objective(Ilp1Instance& inst, const FilterSpec& spec) {
  const auto weights = detail::structural_weights(spec);
  std::vector<Term> obj;
  for (std::size_t m = 0; m < inst.zero.size(); ++m)
    if (inst.zero[m] >= 0) obj.push_back({inst.zero[m], -weights[m]});
  inst.model.set_objective(std::move(obj), spec.order);
}

Ranges ranges_of(const CoefficientBounds& b) { return {b.lo, b.hi}; }

}  // namespace

Ilp1Instance build_ilp1(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                        int adders, ShiftRange shifts, double margin) {
  if (adders < 0) throw std::invalid_argument("adder count must be nonnegative");
  Ilp1Instance inst;
  inst.adders = adders;
  inst.wordlength = spec.wordlength;
  inst.shifts = shifts;
  inst.response = add_response_rows(inst.model, spec, grid, bounds, VarKind::Integer, margin);
  for (VarId h : inst.response.h) inst.relaxable.insert(h);
  add_block(inst);
  add_outputs(inst, ranges_of(bounds), true);
  set_structural_objective(inst, spec);
  return inst;
}

Ilp1Instance build_ilp1_targets(const std::vector<std::int64_t>& targets, int wordlength, int adders,
                                ShiftRange shifts) {
  if (adders < 0) throw std::invalid_argument("adder count must be nonnegative");
  Ilp1Instance inst;
  inst.adders = adders;
  inst.wordlength = wordlength;
  inst.shifts = shifts;
  Ranges r;
  for (std::size_t m = 0; m < targets.size(); ++m) {
    const double t = static_cast<double>(targets[m]);
    inst.response.h.push_back(inst.model.add_variable("h" + std::to_string(m), VarKind::Integer, t, t));
    r.lo.push_back(targets[m]);
    r.hi.push_back(targets[m]);
  }
  add_block(inst);
  add_outputs(inst, r, true);
  return inst;
}

Ilp1Instance build_sparse(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                          double margin) {
  Ilp1Instance inst;
  inst.wordlength = spec.wordlength;
  inst.shifts = ShiftRange::for_wordlength(spec.wordlength);
  inst.response = add_response_rows(inst.model, spec, grid, bounds, VarKind::Integer, margin);
  const Ranges r = ranges_of(bounds);
  inst.zero.assign(bounds.size(), -1);
  for (std::size_t m = 0; m < bounds.size(); ++m) {
    if (r.lo[m] > 0 || r.hi[m] < 0) continue;
    const VarId z = inst.model.add_binary("hz" + std::to_string(m));
    inst.zero[m] = z;
    inst.model.add_indicator(z, true, {{inst.response.h[m], 1.0}}, Relation::Equal, 0.0, "zero_" + std::to_string(m));
  }
  set_structural_objective(inst, spec);
  return inst;
}

AdderGraph extract_from_ilp1(const Ilp1Instance& inst, const milp::SolveOutcome& outcome) {
  if (!outcome.has_solution()) throw GraphError("no assignment to extract from");
  auto exactly_one = [&](const auto& vars, const std::string& what) {
    int found = -1;
    int count = 0;
    for (const auto& [key, var] : vars) {
      if (outcome.is_set(var)) {
        found = key;
        ++count;
      }
    }
    if (count != 1) throw GraphError(what + " has " + std::to_string(count) + " selections");
    return found;
  };

  AdderGraph g;
  for (int a = 1; a <= inst.adders; ++a) {
    const Ilp1Adder& ad = inst.block[static_cast<std::size_t>(a) - 1];
    std::array<Operand, 2> ops;
    for (int i = 0; i < 2; ++i) {
      std::vector<std::pair<int, VarId>> src;
      for (std::size_t k = 0; k < ad.source[i].size(); ++k) src.emplace_back(static_cast<int>(k), ad.source[i][k]);
      ops[i].src = exactly_one(src, "input " + idx(a, i));
      ops[i].shift = exactly_one(ad.shift[i], "shift of input " + idx(a, i));
      ops[i].negated = outcome.is_set(ad.negate[i]);
    }
    const int id = g.add_node(ops[0], ops[1]);
    const std::int64_t claimed = detail::rounded(outcome, ad.value);
    if (g.node(id).value != claimed)
      throw GraphError("adder " + std::to_string(a) + " computes " + std::to_string(g.node(id).value) +
                       " but the solver reports " + std::to_string(claimed));
  }

  std::vector<OutputTap> taps(inst.response.h.size());
  std::vector<int> chosen(taps.size(), 0);
  for (const auto& [key, var] : inst.output) {
    if (!outcome.is_set(var)) continue;
    const auto [a, m, s, phi] = key;
    taps[static_cast<std::size_t>(m)] = {a, s, phi ? -1 : 1};
    ++chosen[static_cast<std::size_t>(m)];
  }
  for (std::size_t m = 0; m < taps.size(); ++m) {
    const bool zero = inst.zero[m] >= 0 && outcome.is_set(inst.zero[m]);
    if (chosen[m] + (zero ? 1 : 0) != 1) throw GraphError("coefficient " + std::to_string(m) + " has no unique source");
  }
  g.set_outputs(std::move(taps));
  simulate(g);
  return g;
}

FixedAmResult solve_fixed_am(const FilterSpec& spec, const Ilp1Instance& inst, const Ilp1Options& options) {
  milp::SolveOptions so = options.solve;
  so.integral_objective = true;
  if (options.relax) so.relax = inst.relaxable;
  FixedAmResult res{milp::solve(inst.model, so), std::nullopt};
  if (!res.outcome.has_solution()) return res;
  AdderGraph g = extract_from_ilp1(inst, res.outcome);
  std::vector<std::int64_t> h;
  for (VarId v : inst.response.h) h.push_back(detail::rounded(res.outcome, v));
  if (g.coefficients() != h) throw GraphError("output taps disagree with the solved coefficients");
  const double gain = inst.response.gain_is_variable() ? res.outcome.value(inst.response.gain) : spec.gain.value();
  const bool proven = res.outcome.status == milp::SolveStatus::Optimal;
  res.solution = make_solution(spec, std::move(h), gain, std::move(g),
                               proven ? Optimality::ProvenOptimal : Optimality::BestKnown);
  return res;
}

MethodResult minimize_total_adders(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                                   const Ilp1Options& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::optional<double> budget = options.solve.time_limit;
  auto remaining = [&]() -> std::optional<double> {
    if (!budget) return std::nullopt;
    return std::max(0.0, *budget - detail::seconds_since(start));
  };
  MethodResult result;
  bool proven = true;

  // Lower bound on A_S from the sparsest feasible filter.
  Ilp1Options sub = options;
  sub.solve.time_limit = remaining();
  const Ilp1Instance sparse = build_sparse(spec, grid, bounds, options.margin);
  milp::SolveOptions so = sub.solve;
  so.integral_objective = true;
  const milp::SolveOutcome sparse_out = milp::solve(sparse.model, so);
  result.log.push_back(detail::describe("sparse A_S bound", sparse_out));
  if (sparse_out.status == milp::SolveStatus::Infeasible) {
    result.status = MethodStatus::Infeasible;
    result.seconds = detail::seconds_since(start);
    return result;
  }
  // Without a proof the only safe bound is zero.
  const int as_min = sparse_out.status == milp::SolveStatus::Optimal
                         ? static_cast<int>(std::llround(sparse_out.objective))
                         : 0;
  if (sparse_out.status != milp::SolveStatus::Optimal) proven = false;

  const ShiftRange shifts = options.shifts.value_or(ShiftRange::for_wordlength(spec.wordlength));
  const int cap = spec.coefficient_count() * ((spec.wordlength + 2) / 2);
  std::optional<DesignSolution> best;
  bool stopped = false;
  for (int am = 0; am <= cap; ++am) {
    if (best && am + as_min >= best->adders_total) {
      stopped = true;
      break;
    }
    sub.solve.time_limit = remaining();
    if (sub.solve.time_limit && *sub.solve.time_limit <= 0.0) {
      proven = false;
      break;
    }
    const Ilp1Instance inst = build_ilp1(spec, grid, bounds, am, shifts, options.margin);
    const FixedAmResult r = solve_fixed_am(spec, inst, sub);
    result.log.push_back(detail::describe("ilp1 A_M=" + std::to_string(am) + " vars=" +
                                              std::to_string(inst.model.num_variables()),
                                          r.outcome));
    if (r.outcome.status == milp::SolveStatus::Infeasible) continue;
    if (r.outcome.status != milp::SolveStatus::Optimal) proven = false;
    if (!r.solution) continue;
    if (!best || r.solution->adders_total < best->adders_total) best = r.solution;
    if (r.outcome.status == milp::SolveStatus::Optimal && r.solution->adders_structural <= as_min) {
      stopped = true;
      break;
    }
  }
  result.seconds = detail::seconds_since(start);
  if (!best) {
    result.status = proven ? MethodStatus::Infeasible : MethodStatus::TimedOut;
    return result;
  }
  const bool optimal = proven && stopped;
  best->optimality = optimal ? Optimality::ProvenOptimal : Optimality::BestKnown;
  result.status = optimal ? MethodStatus::Optimal : MethodStatus::BestKnown;
  result.solution = std::move(best);
  return result;
}

McmResult minimal_mcm(const std::vector<std::int64_t>& targets, const Ilp1Options& options) {
  if (targets.empty()) throw std::invalid_argument("no constants given");
  std::int64_t top = 1;
  for (std::int64_t t : targets) top = std::max(top, std::abs(t));
  const int B = std::max(1, static_cast<int>(std::bit_width(static_cast<std::uint64_t>(top))));
  if (B > kMaxWordLength) throw std::invalid_argument("constant too large");
  const ShiftRange shifts = options.shifts.value_or(ShiftRange::for_wordlength(B));
  const int cap = static_cast<int>(targets.size()) * ((B + 2) / 2);
  bool timed_out = false;
  for (int am = 0; am <= cap; ++am) {
    const Ilp1Instance inst = build_ilp1_targets(targets, B, am, shifts);
    milp::SolveOptions so = options.solve;
    if (options.relax) so.relax = inst.relaxable;
    const milp::SolveOutcome out = milp::solve(inst.model, so);
    if (out.status == milp::SolveStatus::Infeasible) continue;
    if (!out.has_solution()) {
      timed_out = true;
      continue;
    }
    return {extract_from_ilp1(inst, out), timed_out ? MethodStatus::BestKnown : MethodStatus::Optimal};
  }
  throw std::runtime_error("no adder graph found within the search cap");
}

}  // namespace mlfir
