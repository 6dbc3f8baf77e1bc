#include "mlfir/design.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "mlfir/ilp1.hpp"
#include "model_util.hpp"

namespace mlfir {

namespace {

constexpr double kGainNudge = 1e-9;

// Worst violation and side at one point for a given gain.
std::pair<double, int> violation_at(const GridPoint& p, double response, double denom) {
  const double h = response / denom;
  const double below = p.lower - h;
  const double above = h - p.upper;
  if (below <= kValidationTolerance && above <= kValidationTolerance) return {0.0, 0};
  return below >= above ? std::pair{below, -1} : std::pair{above, 1};
}

struct Sample {
  GridPoint p;
  double h = 0.0;
};

// Dense uniform samples plus every interior local extremum of H, refined by
// golden-section search. Bounds are constant per band, so the worst point of
// a band is an edge or an extremum; the extrema do not depend on the gain.
std::vector<Sample> check_samples(const FilterSpec& spec, std::span<const std::int64_t> coefficients,
                                  std::size_t density) {
  const FrequencyGrid dense = uniform_grid(spec, std::max(density, spec.bands.size()));
  auto H = [&](double omega_pi) { return zero_phase_response(coefficients, spec.type, omega_pi * std::numbers::pi); };
  std::vector<Sample> out;
  out.reserve(dense.size() + 2 * coefficients.size());
  for (const GridPoint& p : dense.points()) out.push_back({p, H(p.omega_pi)});
  const std::size_t n = out.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Sample& a = out[i - 1];
    const Sample& b = out[i];
    const Sample& c = out[i + 1];
    if (a.p.band != b.p.band || c.p.band != b.p.band) continue;
    const bool is_max = b.h >= a.h && b.h >= c.h;
    const bool is_min = b.h <= a.h && b.h <= c.h;
    if (!is_max && !is_min) continue;
    const double sign = is_max ? 1.0 : -1.0;
    constexpr double kPhi = 0.6180339887498949;
    double lo = a.p.omega_pi;
    double hi = c.p.omega_pi;
    double x1 = hi - kPhi * (hi - lo);
    double x2 = lo + kPhi * (hi - lo);
    double f1 = sign * H(x1);
    double f2 = sign * H(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      if (f1 >= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kPhi * (hi - lo);
        f1 = sign * H(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kPhi * (hi - lo);
        f2 = sign * H(x2);
      }
    }
    const double w = f1 >= f2 ? x1 : x2;
    GridPoint q = b.p;
    q.omega_pi = w;
    out.push_back({q, H(w)});
  }
  return out;
}

}  // namespace

std::size_t default_density(const FilterSpec& spec, std::size_t design_grid_size) {
  return std::max<std::size_t>(128 * static_cast<std::size_t>(spec.coefficient_count()), 10 * design_grid_size);
}

ValidationReport validate(const FilterSpec& spec, std::span<const std::int64_t> coefficients, double gain,
                          std::size_t density) {
  if (static_cast<int>(coefficients.size()) != spec.coefficient_count())
    throw SpecError("coefficient count does not match the filter order and type");
  if (!(gain > 0.0)) throw SpecError("gain must be positive");
  const std::vector<Sample> samples = check_samples(spec, coefficients, density);
  const double denom = gain * spec.scale();
  ValidationReport rep;
  rep.points = samples.size();
  rep.band_worst.resize(spec.bands.size());
  for (std::size_t b = 0; b < spec.bands.size(); ++b) rep.band_worst[b].band = static_cast<int>(b);
  for (const auto& [p, h] : samples) {
    const auto [v, side] = violation_at(p, h, denom);
    BandWorst& bw = rep.band_worst[static_cast<std::size_t>(p.band)];
    if (v > bw.violation) bw = {p.band, p.omega_pi, v, side};
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.omega_max_pi = p.omega_pi;
      rep.band_max = p.band;
      rep.side_max = side;
    }
  }
  return rep;
}

std::optional<std::pair<double, double>> feasible_gain_interval(const FilterSpec& spec,
                                                                std::span<const std::int64_t> coefficients,
                                                                std::size_t density) {
  const double S = spec.scale();
  double lo = spec.gain.lo;
  double hi = spec.gain.hi;
  const double zero_tol = kValidationTolerance * S * hi;
  for (const auto& [p, h] : check_samples(spec, coefficients, density)) {
    // G S lower <= h
    if (p.lower > 0) hi = std::min(hi, h / (S * p.lower));
    else if (p.lower < 0) lo = std::max(lo, h / (S * p.lower));
    else if (h < -zero_tol) return std::nullopt;
    // h <= G S upper
    if (p.upper > 0) lo = std::max(lo, h / (S * p.upper));
    else if (p.upper < 0) hi = std::min(hi, h / (S * p.upper));
    else if (h > zero_tol) return std::nullopt;
    if (lo > hi) return std::nullopt;
  }
  return std::pair{lo, hi};
}

GainAdjustment adjust_gain(const FilterSpec& spec, std::span<const std::int64_t> coefficients, double gain,
                           const ValidationReport& report, std::size_t density) {
  GainAdjustment adj{false, gain, report};
  if (spec.gain.is_fixed() || report.valid() || report.band_max < 0) return adj;

  const GridPoint p = point_for(spec, report.omega_max_pi);
  const double h = zero_phase_response(coefficients, spec.type, p.omega());
  const double bound = report.side_max < 0 ? p.lower : p.upper;
  std::optional<double> target;
  if (bound != 0.0) {
    const double g = h / (spec.scale() * bound);
    if (g > 0.0) {
      // Pick the nudge direction that leaves the broken bound satisfied.
      for (const double f : {1.0 - kGainNudge, 1.0 + kGainNudge}) {
        const double cand = std::clamp(g * f, spec.gain.lo, spec.gain.hi);
        if (violation_at(p, h, cand * spec.scale()).first == 0.0) {
          target = cand;
          break;
        }
      }
      if (!target) target = std::clamp(g, spec.gain.lo, spec.gain.hi);
    }
  }
  if (target) {
    const ValidationReport rep = validate(spec, coefficients, *target, density);
    if (rep.valid()) return {true, *target, rep};
  }

  // The single rescale was not enough; use the exact interval if one exists.
  const auto interval = feasible_gain_interval(spec, coefficients, density);
  if (!interval) return adj;
  const auto [lo, hi] = *interval;
  const double inset = std::min(kGainNudge * hi, (hi - lo) / 2.0);
  const double g = std::clamp(target.value_or(gain), lo + inset, hi - inset);
  const ValidationReport rep = validate(spec, coefficients, g, density);
  if (!rep.valid()) return adj;
  return {true, g, rep};
}

Completion least_violation_completion(const FilterSpec& spec, std::span<const std::int64_t> partial, double gain,
                                      std::size_t density) {
  const int M = spec.coefficient_count();
  if (static_cast<int>(partial.size()) + 1 != M) throw SpecError("exactly one coefficient must be missing");
  if (!(gain > 0.0)) throw SpecError("gain must be positive");
  const FrequencyGrid dense = uniform_grid(spec, std::max(density, spec.bands.size()));
  const double denom = gain * spec.scale();
  const std::int64_t box = spec.max_magnitude();

  Completion best;
  double best_v = std::numeric_limits<double>::infinity();
  std::vector<double> rest(dense.size());
  std::vector<double> slope(dense.size());
  for (int k = 0; k < M; ++k) {
    std::vector<std::int64_t> h(partial.begin(), partial.end());
    h.insert(h.begin() + k, 0);
    for (std::size_t i = 0; i < dense.size(); ++i) {
      const double w = dense[i].omega();
      rest[i] = zero_phase_response(h, spec.type, w);
      slope[i] = basis_eval(spec.type, k, w);
    }
    auto violation = [&](std::int64_t x) {
      double v = 0.0;
      for (std::size_t i = 0; i < dense.size(); ++i)
        v = std::max(v, violation_at(dense[i], rest[i] + slope[i] * static_cast<double>(x), denom).first);
      return v;
    };
    // Integer ternary search on a convex function.
    std::int64_t lo = -box;
    std::int64_t hi = box;
    while (hi - lo > 2) {
      const std::int64_t m1 = lo + (hi - lo) / 3;
      const std::int64_t m2 = hi - (hi - lo) / 3;
      if (violation(m1) <= violation(m2)) hi = m2;
      else lo = m1;
    }
    for (std::int64_t x = lo; x <= hi; ++x) {
      const double v = violation(x);
      if (v < best_v) {
        best_v = v;
        h[static_cast<std::size_t>(k)] = x;
        best.coefficients = h;
        best.position = static_cast<std::size_t>(k);
      }
    }
  }
  best.lower_bound = best_v;
  best.report = validate(spec, best.coefficients, gain, density);
  return best;
}

const char* to_string(DesignStatus s) {
  switch (s) {
    case DesignStatus::Optimal: return "optimal";
    case DesignStatus::BestKnown: return "best-known";
    case DesignStatus::SpecInfeasible: return "spec-infeasible";
    case DesignStatus::IntegerInfeasible: return "integer-infeasible";
    case DesignStatus::Diverged: return "diverged";
    case DesignStatus::TimedOut: return "timed-out";
  }
  return "?";
}

const char* to_string(MethodStatus s) {
  switch (s) {
    case MethodStatus::Optimal: return "optimal";
    case MethodStatus::BestKnown: return "best-known";
    case MethodStatus::Infeasible: return "infeasible";
    case MethodStatus::TimedOut: return "timed-out";
  }
  return "?";
}

DesignOutcome design(const FilterSpec& spec, const DesignOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  spec.check();
  const FilterSpec work = spec.allow_error > 0.0 ? spec.widened() : spec;
  const int M = work.coefficient_count();
  DesignOutcome out;
  auto finish = [&](DesignStatus status, std::string message = {}) {
    out.status = status;
    out.message = std::move(message);
    out.seconds = detail::seconds_since(start);
    return out;
  };
  auto remaining = [&]() -> std::optional<double> {
    if (!options.solve.time_limit) return std::nullopt;
    return std::max(0.0, *options.solve.time_limit - detail::seconds_since(start));
  };

  const AfpGrid afp = afp_grid(work, static_cast<std::size_t>(options.grid_k) * static_cast<std::size_t>(M),
                               options.afp_factor, options.force_edges);
  out.grid = afp.grid;
  if (afp.fell_back) out.log.push_back("afp: rank-deficient candidate set, uniform grid used");

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    out.iterations = iter;
    const auto budget = remaining();
    if (budget && *budget <= 0.0) return finish(DesignStatus::TimedOut, "time limit reached");
    milp::SolveOptions so = options.solve;
    so.time_limit = budget;

    try {
      out.bounds = tighten(work, out.grid, out.bounds ? &*out.bounds : nullptr, so);
    } catch (const SpecInfeasible& e) {
      return finish(DesignStatus::SpecInfeasible, e.what());
    } catch (const IntegerInfeasible& e) {
      return finish(DesignStatus::IntegerInfeasible, e.what());
    }

    std::ostringstream head;
    head << "iteration " << iter << ": grid " << out.grid.size() << " points";
    out.log.push_back(head.str());

    MethodResult mr;
    if (options.method == Method::Ilp1Total) {
      Ilp1Options o;
      o.solve = so;
      o.relax = options.relax;
      o.margin = options.margin;
      mr = minimize_total_adders(work, out.grid, *out.bounds, o);
    } else {
      Ilp2Options o;
      o.solve = so;
      o.relax = options.relax;
      o.margin = options.margin;
      o.stage_sets = options.stage_sets;
      mr = solve_bounded_ad(work, out.grid, *out.bounds, options.depth, o);
    }
    for (auto& line : mr.log) out.log.push_back("  " + line);

    if (mr.status == MethodStatus::Infeasible) {
      const bool depth_limited = options.method == Method::Ilp2;
      return finish(DesignStatus::IntegerInfeasible, depth_limited ? "no design within the adder-depth budget"
                                                                   : "no integer design on the current grid");
    }
    if (!mr.solution) return finish(DesignStatus::TimedOut, "solver stopped without an incumbent");

    DesignSolution sol = std::move(*mr.solution);
    const std::size_t density = options.density ? options.density : default_density(work, out.grid.size());
    ValidationReport rep = validate(work, sol.coefficients, sol.gain, density);
    if (!rep.valid()) {
      const GainAdjustment adj = adjust_gain(work, sol.coefficients, sol.gain, rep, density);
      std::ostringstream msg;
      msg << "  violation " << rep.max_violation << " at " << rep.omega_max_pi << "*pi";
      if (adj.improved) msg << "; gain " << sol.gain << " -> " << adj.gain;
      out.log.push_back(msg.str());
      if (adj.improved) {
        sol.gain = adj.gain;
        rep = adj.report;
      }
    }
    if (rep.valid()) {
      out.report = validate(spec, sol.coefficients, sol.gain, density);
      sol.violation = out.report->max_violation;
      sol.spec = spec;
      out.solution = std::move(sol);
      return finish(mr.status == MethodStatus::Optimal ? DesignStatus::Optimal : DesignStatus::BestKnown);
    }

    std::vector<NewPoint> add{{rep.omega_max_pi, rep.band_max}};
    for (const BandWorst& bw : rep.band_worst)
      if (bw.violation > 0.0) add.push_back({bw.omega_pi, bw.band});
    FrequencyGrid next = refine(out.grid, work, add);
    sol.violation = validate(spec, sol.coefficients, sol.gain, density).max_violation;
    sol.spec = spec;
    out.solution = std::move(sol);  // latest unvalidated incumbent
    if (next.size() == out.grid.size()) return finish(DesignStatus::Diverged, "refinement added no new points");
    out.grid = std::move(next);
  }
  return finish(DesignStatus::Diverged, "iteration cap reached");
}

void write_bundle(const std::string& dir, const FilterSpec& spec, const DesignOutcome& outcome, std::size_t density) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);

  nlohmann::ordered_json doc;
  doc["status"] = to_string(outcome.status);
  if (!outcome.message.empty()) doc["message"] = outcome.message;
  doc["iterations"] = outcome.iterations;
  doc["seconds"] = outcome.seconds;
  doc["grid_size"] = outcome.grid.size();
  if (outcome.solution) doc["solution"] = outcome.solution->to_json();
  if (outcome.report) {
    nlohmann::ordered_json r;
    r["max_violation"] = outcome.report->max_violation;
    r["omega_max_over_pi"] = outcome.report->omega_max_pi;
    r["points"] = outcome.report->points;
    doc["validation"] = r;
  }
  std::ofstream(root / "solution.json") << doc.dump(2) << "\n";

  if (outcome.solution) {
    std::ofstream(root / "graph.dot") << emit(outcome.solution->graph, GraphFormat::Dot);
    const std::size_t n = density ? density : default_density(spec, outcome.grid.size());
    const FrequencyGrid dense = uniform_grid(spec, n);
    std::ofstream csv(root / "response.csv");
    csv.precision(12);
    csv << "omega_over_pi,H_normalized,lower,upper\n";
    const double denom = outcome.solution->gain * spec.scale();
    for (const GridPoint& p : dense.points())
      csv << p.omega_pi << ',' << zero_phase_response(outcome.solution->coefficients, spec.type, p.omega()) / denom
          << ',' << p.lower << ',' << p.upper << '\n';
  }
  std::ofstream log(root / "log.txt");
  for (const auto& line : outcome.log) log << line << '\n';
  log << "status: " << to_string(outcome.status);
  if (!outcome.message.empty()) log << " (" << outcome.message << ")";
  log << '\n';
}

}  // namespace mlfir
