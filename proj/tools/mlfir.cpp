// Command-line front end: design, validate, mcm, sweep.
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mlfir/benchmarks.hpp"
#include "mlfir/design.hpp"
#include "mlfir/ilp1.hpp"

using namespace mlfir;

namespace {

enum Exit { kOk = 0, kUsage = 1, kBestKnown = 2, kInfeasible = 3, kNoResult = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GainMode parse_gain(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  auto num = [&](std::size_t i) {
    try {
      return std::stod(parts.at(i));
    } catch (const std::exception&) {
      throw UsageError("bad --gain '" + text + "'");
    }
  };
  if (!parts.empty() && parts[0] == "fixed") {
    if (parts.size() == 1) return GainMode::fixed(1.0);
    if (parts.size() == 2) return GainMode::fixed(num(1));
  } else if (!parts.empty() && parts[0] == "variable") {
    if (parts.size() == 1) return GainMode::variable();
    if (parts.size() == 3) return GainMode::variable(num(1), num(2));
  }
  throw UsageError("bad --gain '" + text + "' (expected fixed:v or variable[:lo:hi])");
}

std::vector<std::int64_t> parse_coeffs(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::int64_t> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad coefficient '" + tok + "'");
    }
  }
  return out;
}

// Spec selection flags shared by design, validate and sweep.
struct SpecFlags {
  std::string file;
  std::string benchmark;
  std::optional<int> order;
  std::string type;
  std::optional<int> wordlength;
  std::string gain;
  std::optional<double> allow_error;

  void add(CLI::App* app, bool with_file = true) {
    if (with_file) app->add_option("spec", file, "Spec JSON file");
    app->add_option("--benchmark", benchmark, "Reference spec (S1a..L3) or redmill:P");
    app->add_option("--order", order, "Filter order N");
    app->add_option("--type", type, "Filter type I, II, III or IV");
    app->add_option("--wordlength", wordlength, "Effective word length B (sign bit excluded)");
    app->add_option("--gain", gain, "fixed:v or variable[:lo:hi] (default variable:2/3:4/3)");
    app->add_option("--allow-error", allow_error, "Widen every bound by this much while designing");
  }

  FilterSpec build() const {
    if (!file.empty() && !benchmark.empty()) throw UsageError("give either a spec file or --benchmark, not both");
    FilterSpec spec;
    if (!file.empty()) {
      spec = load_spec_file(file);
    } else if (!benchmark.empty()) {
      spec.bands = find_benchmark(benchmark).bands;
      if (benchmark.rfind("redmill:", 0) == 0) {
        spec.type = FilterType::I;
        spec.wordlength = 9;
        spec.gain = GainMode::fixed(1.0);
      }
      if (!order) throw UsageError("--benchmark needs --order");
    } else {
      throw UsageError("no specification: give a spec file or --benchmark");
    }
    if (order) spec.order = *order;
    if (!type.empty()) spec.type = parse_filter_type(type);
    if (wordlength) spec.wordlength = *wordlength;
    if (!gain.empty()) spec.gain = parse_gain(gain);
    if (allow_error) spec.allow_error = *allow_error;
    spec.check();
    return spec;
  }
};

struct SolverFlags {
  std::string method = "ilp2";
  std::string ad = "2";
  int grid_k = 4;
  bool no_force_edges = false;
  std::string solver = "highs";
  double time_limit = 3600;
  std::string relax_aux = "on";
  std::string cache_dir;
  int threads = 1;

  void add(CLI::App* app) {
    app->add_option("--method", method, "ilp1 (total adders) or ilp2 (bounded adder depth)")
        ->check(CLI::IsMember({"ilp1", "ilp2"}));
    app->add_option("--ad", ad, "Adder-depth budget for ilp2: K or auto");
    app->add_option("--grid-k", grid_k, "Initial grid points per coefficient")->check(CLI::PositiveNumber);
    app->add_flag("--no-force-edges", no_force_edges, "Do not force band edges into the initial grid");
    app->add_option("--solver", solver, "MILP backend")->check(CLI::IsMember(milp::available_backends()));
    app->add_option("--time-limit", time_limit, "Wall-clock budget in seconds")->check(CLI::PositiveNumber);
    app->add_option("--relax-aux", relax_aux, "Solve integer auxiliaries as continuous")
        ->check(CLI::IsMember({"on", "off"}));
    app->add_option("--cache-dir", cache_dir, "Directory for persisted stage sets");
    app->add_option("--threads", threads, "Solver threads per job");
  }

  DesignOptions build() const {
    DesignOptions o;
    o.method = method == "ilp1" ? Method::Ilp1Total : Method::Ilp2;
    if (method == "ilp1" && ad != "2") throw UsageError("--ad applies to --method ilp2 only");
    if (ad == "auto") {
      o.depth.reset();
    } else {
      try {
        std::size_t used = 0;
        o.depth = std::stoi(ad, &used);
        if (used != ad.size() || *o.depth < 0) throw std::invalid_argument(ad);
      } catch (const std::exception&) {
        throw UsageError("bad --ad '" + ad + "'");
      }
    }
    o.grid_k = grid_k;
    o.force_edges = !no_force_edges;
    o.solve.backend = solver;
    o.solve.time_limit = time_limit;
    o.solve.threads = threads;
    o.relax = relax_aux == "on";
    if (!cache_dir.empty()) o.stage_sets.cache_dir = cache_dir;
    return o;
  }
};

int exit_code(DesignStatus s) {
  switch (s) {
    case DesignStatus::Optimal: return kOk;
    case DesignStatus::BestKnown: return kBestKnown;
    case DesignStatus::SpecInfeasible:
    case DesignStatus::IntegerInfeasible: return kInfeasible;
    case DesignStatus::Diverged:
    case DesignStatus::TimedOut: return kNoResult;
  }
  return kNoResult;
}

std::string join(const std::vector<std::int64_t>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
  return s.str();
}

void print_outcome(const DesignOutcome& out) {
  std::cout << "status: " << to_string(out.status);
  if (!out.message.empty()) std::cout << " (" << out.message << ")";
  std::cout << "\niterations: " << out.iterations << "  grid: " << out.grid.size() << "  seconds: " << out.seconds
            << "\n";
  if (!out.solution) return;
  const DesignSolution& s = *out.solution;
  std::cout << "A_M: " << s.adders_mb << "  A_S: " << s.adders_structural << "  A: " << s.adders_total
            << "  AD: " << s.adder_depth << "\n"
            << "G: " << s.gain << "\n"
            << "coefficients: " << join(to_printed_order(s.coefficients)) << "\n"
            << "error: " << s.violation << "\n";
}

// One row of the sweep CSV.
struct SweepJob {
  std::string name;
  FilterSpec spec;
  DesignOptions options;
  std::string method;
  std::string ad;
};

std::string sweep_row(const SweepJob& job) {
  std::ostringstream row;
  DesignOutcome out;
  std::string status;
  try {
    out = design(job.spec, job.options);
    status = to_string(out.status);
  } catch (const std::exception& e) {
    status = std::string("error: ") + e.what();
  }
  row.precision(10);
  row << job.name << ',' << job.spec.order << ',' << to_string(job.spec.type) << ',' << job.spec.wordlength << ','
      << job.method << ',' << (job.method == "ilp1" ? "" : job.ad) << ',';
  if (out.solution) {
    const DesignSolution& s = *out.solution;
    row << s.adders_mb << ',' << s.adders_structural << ',' << s.adders_total << ',' << s.gain << ',' << s.violation;
  } else {
    row << ",,,,";
  }
  std::string quoted = status;
  if (quoted.find(',') != std::string::npos) quoted = '"' + quoted + '"';
  row << ',' << quoted << ',' << out.seconds;
  return row.str();
}

template <typename T>
std::vector<T> split_list(const std::string& text, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::stringstream in(text);
  for (std::string p; std::getline(in, p, ',');)
    if (!p.empty()) out.push_back(convert(p));
  return out;
}

int to_int(const std::string& s) { return std::stoi(s); }
double to_double(const std::string& s) { return std::stod(s); }
std::string to_str(const std::string& s) { return s; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Multiplierless linear-phase FIR design with optimal adder counts.\n"
      "Coefficient lists are the M independent integer coefficients, outermost tap first\n"
      "(the last value is the center tap for types I and II)."};
  app.require_subcommand(1);

  SpecFlags design_spec;
  SolverFlags design_solver;
  std::string out_dir;
  auto* design_cmd = app.add_subcommand("design", "Design a filter and report adder counts");
  design_spec.add(design_cmd);
  design_solver.add(design_cmd);
  design_cmd->add_option("--out", out_dir, "Write solution.json, graph.dot, response.csv and log.txt here");

  SpecFlags validate_spec;
  bool fill_missing = false;
  std::string coeffs;
  std::string coeffs_file;
  std::size_t density = 0;
  auto* validate_cmd = app.add_subcommand("validate", "Check a coefficient set against a specification");
  validate_spec.add(validate_cmd);
  validate_cmd->add_option("--coeffs", coeffs, "Whitespace-separated integers, outermost tap first");
  validate_cmd->add_option("--coeffs-file", coeffs_file, "File holding the coefficients");
  validate_cmd->add_flag("--fill-missing", fill_missing,
                         "With one coefficient short, report the least violation over every completion");
  validate_cmd->add_option("--density", density, "Dense-grid size (default max(128 M, 10 x design grid))");

  std::vector<std::int64_t> constants;
  double mcm_time = 3600;
  std::string mcm_format = "json";
  auto* mcm_cmd = app.add_subcommand("mcm", "Minimal adder graph for a list of constants");
  mcm_cmd->add_option("constants", constants, "Target constants")->required();
  mcm_cmd->add_option("--time-limit", mcm_time, "Wall-clock budget in seconds");
  mcm_cmd->add_option("--format", mcm_format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

  std::string names, spec_files, orders, types, wordlengths, ps, methods = "ilp2", ads = "2", gain_text, csv_path;
  int jobs = 1;
  SolverFlags sweep_solver;
  auto* sweep_cmd = app.add_subcommand("sweep", "Cartesian product of design runs, CSV summary");
  sweep_cmd->add_option("--benchmarks", names, "Comma list of reference specs");
  sweep_cmd->add_option("--specs", spec_files, "Comma list of spec JSON files");
  sweep_cmd->add_option("--p", ps, "Comma list of Redmill parameters in dB");
  sweep_cmd->add_option("--orders", orders, "Comma list of orders")->required();
  sweep_cmd->add_option("--types", types, "Comma list of types");
  sweep_cmd->add_option("--wordlengths", wordlengths, "Comma list of word lengths");
  sweep_cmd->add_option("--methods", methods, "Comma list of ilp1, ilp2");
  sweep_cmd->add_option("--ads", ads, "Comma list of depth budgets for ilp2");
  sweep_cmd->add_option("--gain", gain_text, "Gain mode for every job");
  sweep_cmd->add_option("--jobs", jobs, "Parallel jobs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--csv", csv_path, "Summary file (default stdout)");
  sweep_cmd->add_option("--time-limit", sweep_solver.time_limit, "Budget per job in seconds");
  sweep_cmd->add_option("--cache-dir", sweep_solver.cache_dir, "Directory for persisted stage sets");

  std::cout.precision(10);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*design_cmd) {
      const FilterSpec spec = design_spec.build();
      const DesignOptions options = design_solver.build();
      const DesignOutcome out = design(spec, options);
      print_outcome(out);
      if (!out_dir.empty()) write_bundle(out_dir, spec, out, options.density);
      return exit_code(out.status);
    }

    if (*validate_cmd) {
      if (coeffs.empty() == coeffs_file.empty()) throw UsageError("give exactly one of --coeffs and --coeffs-file");
      std::string text = coeffs;
      if (!coeffs_file.empty()) {
        std::ifstream in(coeffs_file);
        if (!in) throw UsageError("cannot read " + coeffs_file);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
      }
      const auto printed = parse_coeffs(text);
      FilterSpec spec = validate_spec.build();
      const std::size_t n = density ? density : default_density(spec);
      if (fill_missing && static_cast<int>(printed.size()) + 1 == spec.coefficient_count()) {
        if (!spec.gain.is_fixed()) throw UsageError("--fill-missing needs a fixed gain");
        const Completion c = least_violation_completion(spec, from_printed_order(printed), spec.gain.value(), n);
        std::cout << "G: " << spec.gain.value() << "\n"
                  << "completed_tap: " << c.coefficients.size() - 1 - c.position << " (printed order) = "
                  << c.coefficients[c.position] << "\n"
                  << "points: " << c.report.points << "\n"
                  << "max_violation_lower_bound: " << c.lower_bound << "\n"
                  << "max_violation: " << c.report.max_violation << "\n";
        return c.report.valid() ? kOk : kInfeasible;
      }
      if (static_cast<int>(printed.size()) != spec.coefficient_count()) {
        std::ostringstream msg;
        msg << "expected " << spec.coefficient_count() << " coefficients for order " << spec.order << " type "
            << to_string(spec.type) << ", got " << printed.size();
        throw UsageError(msg.str());
      }
      const auto h = from_printed_order(printed);
      double gain = spec.gain.value();
      if (!spec.gain.is_fixed()) {
        // Best gain inside the interval, if any meets the bounds.
        const auto interval = feasible_gain_interval(spec, h, n);
        gain = interval ? 0.5 * (interval->first + interval->second) : 0.5 * (spec.gain.lo + spec.gain.hi);
      }
      const ValidationReport rep = validate(spec, h, gain, n);
      std::cout << "G: " << gain << "\n"
                << "A_S: " << structural_adder_count(spec.type, spec.order, std::span<const std::int64_t>(h)) << "\n"
                << "points: " << rep.points << "\n"
                << "max_violation: " << rep.max_violation << "\n";
      if (!rep.valid()) std::cout << "omega_max_over_pi: " << rep.omega_max_pi << "\n";
      for (const BandWorst& bw : rep.band_worst)
        if (bw.violation > 0.0)
          std::cout << "band " << bw.band << ": " << bw.violation << " at " << bw.omega_pi << "*pi ("
                    << (bw.side < 0 ? "below" : "above") << ")\n";
      return rep.valid() ? kOk : kInfeasible;
    }

    if (*mcm_cmd) {
      Ilp1Options o;
      o.solve.time_limit = mcm_time;
      const McmResult r = minimal_mcm(constants, o);
      std::cout << "adders: " << r.graph.adder_count() << "  status: " << to_string(r.status) << "\n";
      std::cout << emit(r.graph, mcm_format == "dot" ? GraphFormat::Dot : GraphFormat::Json) << "\n";
      switch (r.status) {
        case MethodStatus::Optimal: return kOk;
        case MethodStatus::BestKnown: return kBestKnown;
        case MethodStatus::Infeasible: return kInfeasible;
        case MethodStatus::TimedOut: return kNoResult;
      }
    }

    if (*sweep_cmd) {
      std::vector<std::string> spec_names = split_list<std::string>(names, to_str);
      for (double p : split_list<double>(ps, to_double)) spec_names.push_back(redmill(p).name);
      const auto file_list = split_list<std::string>(spec_files, to_str);
      if (spec_names.empty() && file_list.empty()) throw UsageError("sweep needs --benchmarks, --specs or --p");
      const auto order_list = split_list<int>(orders, to_int);
      if (order_list.empty()) throw UsageError("--orders is empty");
      auto type_list = split_list<std::string>(types, to_str);
      auto b_list = split_list<int>(wordlengths, to_int);
      const auto method_list = split_list<std::string>(methods, to_str);
      const auto ad_list = split_list<std::string>(ads, to_str);

      std::vector<SweepJob> work;
      std::vector<std::pair<std::string, bool>> sources;  // (name or path, is file)
      for (const auto& n : spec_names) sources.emplace_back(n, false);
      for (const auto& f : file_list) sources.emplace_back(f, true);
      for (const auto& [name, is_file] : sources)
        for (int n : order_list)
          for (const auto& t : type_list.empty() ? std::vector<std::string>{""} : type_list)
            for (int b : b_list.empty() ? std::vector<int>{0} : b_list)
              for (const auto& m : method_list)
                for (const auto& ad : m == "ilp1" ? std::vector<std::string>{"2"} : ad_list) {
                  SpecFlags sf;
                  (is_file ? sf.file : sf.benchmark) = name;
                  sf.order = n;
                  sf.type = t;
                  if (b > 0) sf.wordlength = b;
                  sf.gain = gain_text;
                  SolverFlags so = sweep_solver;
                  so.method = m;
                  so.ad = ad;
                  const std::string label = is_file ? std::filesystem::path(name).stem().string() : name;
                  work.push_back({label, sf.build(), so.build(), m, ad});
                }

      std::vector<std::string> rows(work.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < work.size();) rows[i] = sweep_row(work[i]);
      };
      std::vector<std::thread> pool;
      for (int j = 0; j < std::min<int>(jobs, static_cast<int>(work.size())); ++j) pool.emplace_back(worker);
      for (auto& t : pool) t.join();

      std::ofstream file;
      if (!csv_path.empty()) file.open(csv_path);
      std::ostream& out = csv_path.empty() ? std::cout : file;
      out << "name,N,type,B,method,AD,A_M,A_S,A,G,error,status,seconds\n";
      for (const auto& r : rows) out << r << "\n";
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoResult;
  }
  return kUsage;
}
