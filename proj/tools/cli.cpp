#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "msstab/msstab.hpp"

namespace msstab::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Scheme> parse_schemes(const std::vector<std::string>& tokens, std::vector<Scheme> fallback) {
  if (tokens.empty()) return fallback;
  std::vector<Scheme> out;
  for (const auto& t : tokens) {
    auto s = parse_scheme(t);
    if (!s) throw UsageError("unknown scheme '" + t + "' (expected ab2, ab2i, am2, am2i, bdf2, bdf2i)");
    out.push_back(*s);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to --out when given, otherwise to `out`.
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn fn) {
  if (path.empty()) {
    fn(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write " + path);
  fn(file);
}

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
  const auto z = parse_complex(s);
  if (s.find(',') == std::string::npos) throw UsageError(std::string(what) + " expects two values 'a,b'");
  return {z.real(), z.imag()};
}

std::string opt_index(const std::optional<int>& k) { return k ? std::to_string(*k) : std::string(); }

struct ScalarArgs {
  std::vector<std::string> schemes;
  std::string lambda = "-5";
  std::string mu = "2";
  double h = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--scheme", schemes, "Scheme token (repeatable)")->take_all();
    cmd->add_option("--lambda", lambda, "Drift coefficient, 're' or 're,im'");
    cmd->add_option("--mu", mu, "Diffusion coefficient, 're' or 're,im'");
    cmd->add_option("--h", h, "Step size");
  }
  ScalarTestEq<double> eq() const { return {parse_complex(lambda), parse_complex(mu)}; }
};

int cmd_classify(const ScalarArgs& a, bool check, bool as_json, std::ostream& out, std::ostream& err) {
  const auto eq = a.eq();
  const auto schemes = parse_schemes(a.schemes, {kAllSchemes.begin(), kAllSchemes.end()});
  bool disagreement = false;
  json rows = json::array();
  if (!as_json) out << "scheme,verdict,rho,witness,failed_condition\n" << std::setprecision(12);
  for (Scheme s : schemes) {
    const auto r = classify_checked(s, eq, a.h);
    for (const auto& d : r.disagreements) err << to_string(s) << ": disagreement: " << d << '\n';
    if (check) {
      for (const auto& f : r.findings) err << to_string(s) << ": finding: " << f << '\n';
    }
    disagreement |= !r.consistent();
    if (as_json) {
      json row = {{"scheme", std::string(to_string(s))},
                  {"verdict", std::string(to_string(r.theorem.status))},
                  {"rho", r.rho},
                  {"witness", r.theorem.witness},
                  {"failed_condition", r.theorem.failed_condition ? json(*r.theorem.failed_condition) : json()}};
      if (check) {
        row["schur_cohn_general"] = std::string(to_string(r.general.status));
        row["schur_cohn_jury"] = r.jury ? json(std::string(to_string(r.jury->status))) : json();
        row["consistent"] = r.consistent();
      }
      rows.push_back(std::move(row));
    } else {
      out << to_string(s) << ',' << to_string(r.theorem.status) << ',' << r.rho << ',' << r.theorem.witness << ','
          << opt_index(r.theorem.failed_condition) << '\n';
    }
  }
  if (as_json) out << rows.dump(2) << '\n';
  return check && disagreement ? kNumerical : kOk;
}

struct RegionArgs {
  std::vector<std::string> schemes;
  std::string grid = "400";
  std::string x_range = "-8,0";
  std::string y_range = "0,16";
  std::string out_path;
  unsigned threads = 0;
};

int cmd_region(const RegionArgs& a, std::ostream& out) {
  RegionGrid g;
  const auto comma = a.grid.find(',');
  try {
    g.nx = std::stoul(a.grid.substr(0, comma));
    g.ny = comma == std::string::npos ? g.nx : std::stoul(a.grid.substr(comma + 1));
  } catch (const std::exception&) {
    throw UsageError("--grid expects NX or NX,NY");
  }
  std::tie(g.x_min, g.x_max) = parse_pair(a.x_range, "--x-range");
  std::tie(g.y_min, g.y_max) = parse_pair(a.y_range, "--y-range");
  const auto cells = scan_region(parse_schemes(a.schemes, {kAllSchemes.begin(), kAllSchemes.end()}), g, a.threads);
  emit(a.out_path, out, [&](std::ostream& os) { write_region_csv(os, cells); });
  return kOk;
}

int cmd_h0(const ScalarArgs& a, std::ostream& out) {
  const auto eq = a.eq();
  const auto schemes = parse_schemes(a.schemes, {Scheme::AB2, Scheme::AM2});
  out << "scheme,h0\n" << std::setprecision(12);
  for (Scheme s : schemes) {
    double h0 = 0;
    if (s == Scheme::AB2) {
      h0 = h0_ab2(eq);
    } else if (s == Scheme::AM2) {
      h0 = h0_am2(eq);
    } else {
      throw UsageError("closed-form step-size bounds exist for ab2 and am2 only");
    }
    out << to_string(s) << ',' << h0 << '\n';
  }
  return kOk;
}

struct SpectralArgs {
  std::vector<std::string> schemes;
  std::string system_path;
  std::string example = "single";
  double lambda = -5, sigma = 1, eps = 1;
  double h = 0.5;
  bool as_json = false;
};

SystemTestEq<double> spectral_system(const SpectralArgs& a) {
  if (!a.system_path.empty()) return parse_system_json(read_file(a.system_path));
  if (a.example == "single") return single_noise_system(a.lambda, a.sigma, a.eps);
  if (a.example == "two") return two_noise_system(a.lambda, a.sigma, a.eps);
  throw UsageError("--example expects 'single' or 'two'");
}

int cmd_spectral(const SpectralArgs& a, std::ostream& out, std::ostream& err) {
  const auto eq = spectral_system(a);
  const auto schemes = parse_schemes(a.schemes, {kAllSchemes.begin(), kAllSchemes.end()});
  const double alpha = spectral_abscissa(sde_ms_matrix(eq));
  json rows = json::array();
  if (!a.as_json) out << "scheme,rho,gelfand,verdict\n" << std::setprecision(12);
  for (Scheme s : schemes) {
    const auto S = build_system_stability_matrix(reduce_system(catalog(s), eq, a.h));
    const double rho = spectral_radius(S);
    const double gel = gelfand_radius(S);
    const auto v = verdict_from_radius(rho, Tolerances{}.radius_margin);
    if (a.as_json) {
      rows.push_back({{"scheme", std::string(to_string(s))},
                      {"rho", rho},
                      {"gelfand", gel},
                      {"verdict", std::string(to_string(v.status))}});
    } else {
      out << to_string(s) << ',' << rho << ',' << gel << ',' << to_string(v.status) << '\n';
    }
  }
  if (a.as_json) {
    out << json{{"sde_abscissa", alpha}, {"sde_stable", alpha < 0}, {"schemes", rows}}.dump(2) << '\n';
  } else {
    err << "sde spectral abscissa " << alpha << (alpha < 0 ? " (stable)" : " (not stable)") << '\n';
  }
  return kOk;
}

struct SimulateArgs {
  ScalarArgs scalar;
  std::string config_path;
  std::string system_path;
  std::string out_path;
  double t_end = 1.0;
  double theta = 0.5;
  std::uint64_t seed = SimConfig{}.seed;
  std::size_t batches = 100, paths = 100;
  unsigned threads = 0;
  bool comparators = false;
  bool dump_config = false;
};

SimJob simulate_job(const SimulateArgs& a, const CLI::App* cmd) {
  SimJob job;
  if (!a.config_path.empty()) job = parse_sim_job_json(read_file(a.config_path));
  auto& c = job.config;
  auto given = [&](const char* name) { return a.config_path.empty() || cmd->count(name) > 0; };
  if (given("--scheme")) c.schemes = parse_schemes(a.scalar.schemes, {kAllSchemes.begin(), kAllSchemes.end()});
  if (given("--h")) c.h = a.scalar.h;
  if (given("--t-end")) c.t_end = a.t_end;
  if (given("--theta")) c.theta = a.theta;
  if (given("--seed")) c.seed = a.seed;
  if (given("--batches")) c.batches = a.batches;
  if (given("--paths")) c.paths_per_batch = a.paths;
  if (given("--threads")) c.threads = a.threads;
  if (given("--comparators")) c.theta_comparator = c.euler_comparator = a.comparators;
  if (!a.system_path.empty()) {
    job.system = parse_system_json(read_file(a.system_path));
    job.scalar.reset();
  } else if (!job.system && (given("--lambda") || given("--mu") || !job.scalar)) {
    auto eq = job.scalar.value_or(ScalarTestEq<double>{-5.0, 2.0});
    if (given("--lambda")) eq.lambda = parse_complex(a.scalar.lambda);
    if (given("--mu")) eq.mu = parse_complex(a.scalar.mu);
    job.scalar = eq;
  }
  c.validate();
  return job;
}

int cmd_simulate(const SimulateArgs& a, const CLI::App* cmd, std::ostream& out) {
  const SimJob job = simulate_job(a, cmd);
  if (a.dump_config) {
    emit(a.out_path, out, [&](std::ostream& os) { os << sim_job_to_json(job) << '\n'; });
    return kOk;
  }
  if (job.system) {
    const auto traces = run_two_step_system(job.config, *job.system);
    emit(a.out_path, out, [&](std::ostream& os) { write_trace_csv(os, traces, true); });
  } else {
    const auto traces = run_two_step_scalar(job.config, *job.scalar);
    emit(a.out_path, out, [&](std::ostream& os) { write_trace_csv(os, traces); });
  }
  return kOk;
}

struct CheckArgs {
  ScalarArgs scalar;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};

// Random (a, b, c, d) with moduli <= 1.5 through every criterion.
int cmd_check_sweep(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> radius(0.0, 1.5), angle(0.0, 2 * 3.14159265358979323846);
  auto draw = [&] { return std::polar(radius(rng), angle(rng)); };
  std::size_t compared = 0, disagreements = 0;
  for (std::size_t k = 0; k < a.samples; ++k) {
    ReducedCoeffs<double> rc;
    rc.a = draw();
    rc.b = draw();
    rc.c = draw();
    rc.d = draw();
    const auto p = quartic_coeffs(rc);
    const double rho = root_radius(p);
    if (std::abs(rho - 1) <= 1e-9) continue;
    ++compared;
    const Status expect = rho < 1 ? Status::Stable : Status::Unstable;
    const auto th = theorem_conditions(rc);
    const auto gen = schur_cohn_general(p);
    Status jury = Status::Marginal;
    try {
      jury = schur_cohn_jury(p).status;
    } catch (const Error& e) {
      err << "sample " << k << ": " << e.what() << '\n';
    }
    if (th.status != expect || gen.status != expect || jury != expect) {
      ++disagreements;
      err << "sample " << k << ": roots " << to_string(expect) << ", theorem " << to_string(th.status)
          << ", general " << to_string(gen.status) << ", jury " << to_string(jury) << '\n';
    }
  }
  out << "samples,compared,disagreements\n" << a.samples << ',' << compared << ',' << disagreements << '\n';
  return disagreements ? kNumerical : kOk;
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotApplicable:
    case ErrorCode::OutsideDomain:
      return kUsage;
    default:
      return kNumerical;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-square stability of two-step Maruyama methods", "msstab"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  bool check = false, as_json = false;
  ScalarArgs classify_args;
  auto* classify = app.add_subcommand("classify", "Classify (scheme, lambda, mu, h) for the scalar test equation");
  classify_args.add(classify);
  classify->add_flag("--check", check, "Cross-validate theorem, Schur-Cohn and root oracle");
  classify->add_flag("--json", as_json, "JSON output");

  RegionArgs region_args;
  auto* region = app.add_subcommand("region", "Raster the stability regions in the (x, Y) plane");
  region->add_option("--scheme", region_args.schemes, "Scheme token (repeatable)")->take_all();
  region->add_option("--grid", region_args.grid, "Resolution NX or NX,NY");
  region->add_option("--x-range", region_args.x_range, "x = lambda h bounds 'min,max'");
  region->add_option("--y-range", region_args.y_range, "Y = mu^2 h bounds 'min,max'");
  region->add_option("--out", region_args.out_path, "Output CSV path");
  region->add_option("--threads", region_args.threads, "Worker threads (0: all cores)");

  ScalarArgs h0_args;
  h0_args.schemes.clear();
  auto* h0 = app.add_subcommand("h0", "Step-size bound for conditional stability of ab2 / am2");
  h0->add_option("--scheme", h0_args.schemes, "ab2 or am2 (repeatable)")->take_all();
  h0->add_option("--lambda", h0_args.lambda, "Drift coefficient, 're' or 're,im'");
  h0->add_option("--mu", h0_args.mu, "Diffusion coefficient, 're' or 're,im'");

  SpectralArgs spectral_args;
  auto* spectral = app.add_subcommand("spectral", "Spectral radius of the system stability matrix");
  spectral->add_option("--scheme", spectral_args.schemes, "Scheme token (repeatable)")->take_all();
  spectral->add_option("--system", spectral_args.system_path, "System JSON {\"F\": .., \"G\": [..]}");
  spectral->add_option("--example", spectral_args.example, "Built-in 2x2 system: single or two");
  spectral->add_option("--lambda", spectral_args.lambda, "Example drift");
  spectral->add_option("--sigma", spectral_args.sigma, "Example diagonal noise");
  spectral->add_option("--eps", spectral_args.eps, "Example off-diagonal noise");
  spectral->add_option("--h", spectral_args.h, "Step size");
  spectral->add_flag("--json", spectral_args.as_json, "JSON output");

  SimulateArgs sim_args;
  sim_args.scalar.h = SimConfig{}.h;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo mean-square traces");
  sim_args.scalar.add(simulate);
  simulate->add_option("--config", sim_args.config_path, "JSON config; flags override its fields");
  simulate->add_option("--system", sim_args.system_path, "System JSON instead of the scalar equation");
  simulate->add_option("--t-end", sim_args.t_end, "Final time");
  simulate->add_option("--theta", sim_args.theta, "Bootstrap / comparator theta");
  simulate->add_option("--seed", sim_args.seed, "RNG seed");
  simulate->add_option("--batches", sim_args.batches, "Number of batches M");
  simulate->add_option("--paths", sim_args.paths, "Paths per batch L");
  simulate->add_option("--threads", sim_args.threads, "Worker threads (0: all cores)");
  simulate->add_flag("--comparators", sim_args.comparators, "Add theta-method and Euler traces");
  simulate->add_option("--out", sim_args.out_path, "Output path");
  simulate->add_flag("--dump-config", sim_args.dump_config, "Print the resolved config as JSON and exit");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Cross-validate the criteria; random sweep without --lambda");
  check_args.scalar.add(check_cmd);
  check_cmd->add_option("--samples", check_args.samples, "Random samples for the sweep");
  check_cmd->add_option("--seed", check_args.seed, "Sweep seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*classify) return cmd_classify(classify_args, check, as_json, out, err);
    if (*region) return cmd_region(region_args, out);
    if (*h0) return cmd_h0(h0_args, out);
    if (*spectral) return cmd_spectral(spectral_args, out, err);
    if (*simulate) return cmd_simulate(sim_args, simulate, out);
    if (*check_cmd) {
      if (check_cmd->count("--lambda") == 0 && check_cmd->count("--mu") == 0) {
        return cmd_check_sweep(check_args, out, err);
      }
      return cmd_classify(check_args.scalar, true, false, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_for(e.code());
  }
  return kUsage;
}

}  // namespace msstab::cli
