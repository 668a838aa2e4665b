#include "plc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "plc/eigensolver.hpp"
#include "plc/envelope.hpp"
#include "plc/error.hpp"
#include "plc/field_io.hpp"
#include "plc/transforms.hpp"
#include "plc/verify.hpp"

namespace plc::cli {
namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

const std::vector<std::string> kCheckOrder = {
    "segment_concavity", "hessian_convexity", "ac_modulus",  "li_yau",
    "pde_residual",      "envelope_gradient", "subsolution", "lipschitz",
    "rayleigh",          "locality",          "alpha_kappa_monotonicity",
    "trace_concavity",
};

struct Options {
  std::string domain_path;
  std::string field_path;
  std::string out;
  std::string report;
  std::string facets;
  std::optional<double> h;
  std::string kappa_text = "bar";
  std::string alpha_text = "0.5";
  std::string checks_text = "all";
  std::optional<double> band;
  std::uint64_t seed = 42;
  std::size_t pairs = 10000;
  std::size_t trace_trials = 10000;
  bool richardson = false;
  double s_max = 1.5;
  std::size_t points = 250;
  int iterations = 12;
};

// A ground state with its eigenvalue, from a solve or a PLSF file.
struct GroundState {
  ConvexDomain domain;
  GridField u;
  double lambda1 = 0.0;
  std::string lambda1_source;
  std::optional<double> residual;
  std::optional<int> iterations;
};

ConvexDomain load_domain(const std::string& path) {
  if (path.empty()) throw ConfigError("--domain is required");
  std::ifstream is(path);
  if (!is) throw IoError("cannot open domain file '" + path + "'");
  json spec;
  try {
    is >> spec;
  } catch (const json::exception& e) {
    throw IoError("domain file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return ConvexDomain::from_json(spec);
  } catch (const json::exception& e) {
    throw ConfigError("domain file '" + path + "': " + e.what());
  }
}

std::optional<double> sidecar_lambda(const std::string& field_path) {
  const std::string path = field_path + ".json";
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream is(path);
  if (!is) throw IoError("cannot open sidecar '" + path + "'");
  try {
    json j;
    is >> j;
    return j.at("lambda1").get<double>();
  } catch (const json::exception& e) {
    throw IoError("sidecar '" + path + "': " + e.what());
  }
}

GroundState ground_state(const Options& o) {
  GroundState g{load_domain(o.domain_path), {}, 0.0, {}, {}, {}};
  if (!o.field_path.empty()) {
    g.u = load_field(o.field_path, g.domain);
    if (g.u.role != FieldRole::u) {
      throw ConfigError("field '" + o.field_path + "' has role " + to_string(g.u.role) + ", expected u");
    }
    require_resolution(*g.u.mask);
    if (const auto lambda = sidecar_lambda(o.field_path)) {
      g.lambda1 = *lambda;
      g.lambda1_source = "sidecar";
    } else {
      g.lambda1 = rayleigh_quotient(g.u);
      g.lambda1_source = "rayleigh_quotient";
    }
    return g;
  }
  if (!o.h) throw ConfigError("--h is required unless --field is given");
  if (!(*o.h > 0.0)) throw ConfigError("--h must be positive");
  auto solved = smallest_eigenpair(g.domain, *o.h);
  g.u = std::move(solved.u);
  g.lambda1 = solved.lambda1;
  g.lambda1_source = "solve";
  g.residual = solved.residual;
  g.iterations = solved.iterations;
  return g;
}

struct Threshold {
  double value = 0.0;
  bool clamped = false;
};

// The discrete eigenvalue of an interval (and of nearly degenerate domains)
// sits slightly below pi^2 / D^2. Within the O((pi h / D)^2) discretization
// error the product is clamped to 1.
Threshold threshold_of(const GroundState& g) {
  const double d = g.u.mask->diameter();
  const double product = g.lambda1 * d * d / (kPi * kPi);
  const double slack = std::pow(kPi * g.u.mask->h() / d, 2);
  if (product < 1.0 && product >= 1.0 - slack) return {1.0, true};
  return {kappa_bar(g.lambda1, d), false};
}

std::vector<double> parse_kappas(const std::string& text, std::optional<double> bar) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_kappa(item, bar));
  return out;
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const double a = evaluate_expression(item);
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha '" + item + "' outside (0, 1]");
    out.push_back(a);
  }
  return out;
}

std::vector<std::string> parse_checks(const std::string& text) {
  if (text == "all") return kCheckOrder;
  std::vector<std::string> requested = split_list(text);
  for (const auto& name : requested) {
    if (std::find(kCheckOrder.begin(), kCheckOrder.end(), name) == kCheckOrder.end()) {
      throw ConfigError("unknown check '" + name + "'");
    }
  }
  std::vector<std::string> ordered;
  for (const auto& name : kCheckOrder) {
    if (std::find(requested.begin(), requested.end(), name) != requested.end()) ordered.push_back(name);
  }
  return ordered;
}

json grid_json(const GridMask& mask) {
  const auto dims = mask.dims();
  json j;
  j["dimension"] = mask.dimension();
  j["h"] = mask.h();
  j["dims"] = {dims[0], dims[1]};
  j["origin"] = {mask.origin().x, mask.origin().y};
  j["interior_nodes"] = mask.size();
  return j;
}

json base_report(const std::string& command, const GroundState& g, const Threshold& bar) {
  json j;
  j["tool"] = {{"name", "plc"}, {"version", kVersion}};
  j["command"] = command;
  j["domain"] = g.domain.to_json();
  j["grid"] = grid_json(*g.u.mask);
  j["lambda1"] = g.lambda1;
  j["lambda1_source"] = g.lambda1_source;
  if (g.residual) j["residual"] = *g.residual;
  if (g.iterations) j["iterations"] = *g.iterations;
  if (const auto ref = reference_lambda1(g.domain)) j["reference_lambda1"] = *ref;
  j["diameter"] = g.u.mask->diameter();
  j["kappa_bar"] = bar.value;
  j["kappa_bar_clamped"] = bar.clamped;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path + "'");
  os << text;
  if (!os) throw IoError("write failed for '" + path + "'");
}

void emit_json(const json& j, const Options& o, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (!o.report.empty()) write_text(o.report, text);
  out << text;
}

json locality_json(double kappa, const GroundState& g) {
  json j;
  j["kappa"] = kappa;
  if (kappa < 1.0) {
    const auto data = locality_data(kappa, g.lambda1, g.u.mask->diameter());
    j["w_bar"] = data.w_bar;
    j["u_bar"] = data.u_bar;
    j["omega_nodes"] = omega_kappa_nodes(g.u, data.u_bar).size();
  } else {
    j["w_bar"] = nullptr;
    j["u_bar"] = nullptr;
    j["omega_nodes"] = nullptr;
  }
  return j;
}

int cmd_solve(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw ConfigError("--out is required");
  const GroundState g = ground_state(o);
  write_plsf(o.out, g.u);
  json side;
  side["lambda1"] = g.lambda1;
  side["residual"] = g.residual.value_or(0.0);
  side["iterations"] = g.iterations.value_or(0);
  side["h"] = g.u.mask->h();
  side["diameter"] = g.u.mask->diameter();
  side["domain"] = g.domain.to_json();
  side["interior_nodes"] = g.u.mask->size();
  if (const auto ref = reference_lambda1(g.domain)) side["reference_lambda1"] = *ref;
  if (o.richardson) {
    const auto r = richardson_lambda(g.domain, {2.0 * g.u.mask->h(), g.u.mask->h()});
    side["richardson_lambda1"] = r.lambda;
  }
  write_text(o.out + ".json", side.dump(2) + "\n");
  out << std::setprecision(10) << "lambda1 = " << g.lambda1 << "  (" << g.iterations.value_or(0)
      << " iterations, residual " << std::setprecision(3) << g.residual.value_or(0.0) << ")\n"
      << "wrote " << o.out << " and " << o.out << ".json\n";
  return exit_ok;
}

int cmd_threshold(const Options& o, std::ostream& out) {
  const GroundState g = ground_state(o);
  const Threshold bar = threshold_of(g);
  const auto kappas = parse_kappas(o.kappa_text, bar.value);
  const auto items = split_list(o.kappa_text);
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    // "bar" may resolve to 1 (the interval); it then reports no local data.
    if (kappas[i] >= 1.0 && items[i] != "bar") {
      throw DomainViolation(
          "kappa = 1 has no local threshold: w_bar and Omega_kappa are defined only for kappa < 1");
    }
  }
  json j = base_report("threshold", g, bar);
  j["target"] = locality_target(g.lambda1, g.u.mask->diameter());
  j["kappas"] = json::array();
  for (double k : kappas) j["kappas"].push_back(locality_json(k, g));
  emit_json(j, o, out);
  return exit_ok;
}

int cmd_envelope(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw ConfigError("--out is required");
  const GroundState g = ground_state(o);
  const Threshold bar = threshold_of(g);
  const auto kappas = parse_kappas(o.kappa_text, bar.value);
  if (kappas.size() != 1) throw ConfigError("envelope takes exactly one kappa");
  const GridField w = w_field(g.u, kappas.front());
  const Envelope env = o.band ? convex_envelope(w, *o.band) : convex_envelope(w);
  write_plsf(o.out, env.values());
  const std::string facet_path = o.facets.empty() ? o.out + ".facets.csv" : o.facets;
  {
    std::ofstream os(facet_path);
    if (!os) throw IoError("cannot write '" + facet_path + "'");
    write_facet_csv(os, env);
  }
  std::size_t contact = 0;
  for (std::size_t k = 0; k < env.contact().size(); ++k) contact += env.contact()[k];
  json j = base_report("envelope", g, bar);
  j["kappa"] = kappas.front();
  j["exclusion_band"] = env.exclusion_band();
  j["facets"] = env.facets().size();
  j["included_nodes"] = env.included_count();
  j["contact_nodes"] = contact;
  j["contact_tolerance"] = env.tolerance();
  j["field"] = o.out;
  j["facet_csv"] = facet_path;
  emit_json(j, o, out);
  return exit_ok;
}

// Lazily built per-kappa fields shared by the checks of one run.
class KappaFields {
 public:
  KappaFields(const GridField& u, double kappa) : u_(u), kappa_(kappa) {}

  const GridField& w() {
    if (!w_) w_ = w_field(u_, kappa_);
    return *w_;
  }
  const Envelope& envelope() {
    if (!env_) env_ = convex_envelope(w());
    return *env_;
  }
  const GridField& u_kappa() {
    if (!u_kappa_) u_kappa_ = reconstruct_u_kappa(envelope().values(), kappa_);
    return *u_kappa_;
  }

 private:
  const GridField& u_;
  double kappa_;
  std::optional<GridField> w_;
  std::optional<Envelope> env_;
  std::optional<GridField> u_kappa_;
};

CheckResult run_check(const std::string& name, const GroundState& g, double kappa, double alpha,
                      KappaFields& fields, const Options& o) {
  SamplerConfig sampler;
  sampler.seed = o.seed;
  sampler.pair_count = o.pairs;
  sampler.band = o.band;
  const double d = g.u.mask->diameter();
  if (name == "segment_concavity") {
    return segment_concavity_check(g.u, ConcavityParams(alpha, kappa), sampler);
  }
  if (name == "hessian_convexity") return hessian_convexity_check(fields.w(), o.band);
  if (name == "ac_modulus") return ac_modulus_check(g.u, d, sampler);
  if (name == "li_yau") return li_yau_check(g.u, g.lambda1, o.band);
  if (name == "pde_residual") {
    if (kappa >= 1.0) throw DomainViolation("pde_residual needs kappa < 1 (w vanishes at the maximum)");
    return pde_residual_check(fields.w(), g.lambda1, o.band);
  }
  if (name == "envelope_gradient") return envelope_gradient_check(fields.w(), fields.envelope(), d);
  if (name == "subsolution") return subsolution_check(fields.u_kappa(), g.lambda1, o.band);
  if (name == "lipschitz") return lipschitz_check(fields.u_kappa(), g.lambda1, o.band);
  if (name == "rayleigh") return rayleigh_check(fields.u_kappa(), g.lambda1);
  if (name == "locality") return locality_check(g.u, fields.envelope(), kappa, g.lambda1, d, sampler);
  if (name == "alpha_kappa_monotonicity") {
    std::vector<std::pair<double, double>> alpha_pairs;
    std::vector<std::pair<double, double>> kappa_pairs;
    for (int i = 1; i <= 5; ++i) {
      alpha_pairs.emplace_back(alpha, alpha + (1.0 - alpha) * i / 5.0);
      kappa_pairs.emplace_back(kappa, kappa * (1.0 - 0.2 * i + 0.1));
    }
    SamplerConfig triples = sampler;
    triples.pair_count = std::min<std::size_t>(o.pairs, 1000);
    return alpha_kappa_monotonicity(g.u, triples, alpha_pairs, kappa_pairs, kappa, alpha);
  }
  return trace_concavity_property(o.seed, o.trace_trials);
}

CheckResult failed_check(const std::string& name, const std::exception& e) {
  CheckResult r;
  r.name = name;
  r.worst_violation = 1e300;
  r.tolerance = 0.0;
  r.details["error"] = e.what();
  r.finish();
  return r;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const GroundState g = ground_state(o);
  const Threshold bar = threshold_of(g);
  const auto kappas = parse_kappas(o.kappa_text, bar.value);
  const auto alphas = parse_alphas(o.alpha_text);
  const auto checks = parse_checks(o.checks_text);
  if (o.pairs == 0) throw ConfigError("--pairs must be at least 1");

  json report = base_report("verify", g, bar);
  report["seed"] = o.seed;
  report["pairs"] = o.pairs;
  report["band"] = o.band ? *o.band : default_check_band(*g.u.mask);
  report["checks"] = checks;
  if (o.richardson) {
    const auto r = richardson_lambda(g.domain, {2.0 * g.u.mask->h(), g.u.mask->h()});
    report["richardson"] = {{"lambda1", r.lambda}, {"spacings", r.spacings}, {"lambdas", r.lambdas}};
  }
  report["runs"] = json::array();
  bool all_pass = true;
  std::size_t vacuous = 0;
  for (double kappa : kappas) {
    KappaFields fields(g.u, kappa);
    for (double alpha : alphas) {
      json run = locality_json(kappa, g);
      run["alpha"] = alpha;
      run["results"] = json::array();
      for (const auto& name : checks) {
        CheckResult r;
        try {
          r = run_check(name, g, kappa, alpha, fields, o);
        } catch (const std::exception& e) {
          r = failed_check(name, e);
        }
        all_pass = all_pass && r.pass;
        vacuous += r.vacuous ? 1 : 0;
        out << std::setprecision(4) << "kappa=" << std::setw(10) << std::left << kappa
            << " alpha=" << std::setw(6) << alpha << std::right << ' ' << std::setw(26) << std::left
            << r.name << std::right << (r.pass ? " PASS" : " FAIL") << (r.vacuous ? " (vacuous)" : "")
            << std::setprecision(3) << "  worst " << r.worst_violation << "  tol " << r.tolerance
            << '\n';
        run["results"].push_back(r.to_json());
      }
      report["runs"].push_back(std::move(run));
    }
  }
  report["pass"] = all_pass;
  report["vacuous_passes"] = vacuous;
  if (!o.report.empty()) write_text(o.report, report.dump(2) + "\n");
  out << (all_pass ? "all checks passed" : "some checks failed") << '\n';
  return all_pass ? exit_ok : exit_check_failed;
}

int cmd_psi(const Options& o, const CLI::App& sub, std::ostream& out) {
  if (!(o.s_max > 0.0)) throw ConfigError("--s-max must be positive");
  if (o.points < 2) throw ConfigError("--points must be at least 2");
  const std::string text = sub.count("--kappa") ? o.kappa_text : "0.5,1/sqrt(2),sqrt(2)/sqrt(3),1";
  const auto kappas = parse_kappas(text, std::nullopt);

  double target = 0.0;
  if (o.domain_path.empty()) {
    const double j01 = bessel_j0_first_zero();
    target = locality_target(j01 * j01, 2.0);  // unit disc
  } else {
    const ConvexDomain domain = load_domain(o.domain_path);
    if (const auto ref = reference_lambda1(domain); ref && !o.h && o.field_path.empty()) {
      target = locality_target(*ref, domain.diameter());
    } else {
      const GroundState g = ground_state(o);
      target = locality_target(g.lambda1, g.u.mask->diameter());
    }
  }

  std::vector<double> s;
  for (std::size_t i = 1; i <= o.points; ++i) s.push_back(o.s_max * static_cast<double>(i) / o.points);
  for (double k : kappas) {
    if (k < 1.0) {
      const double zero = std::sqrt(-std::log(k));
      if (zero < o.s_max) s.push_back(zero);
    }
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());

  std::ostringstream csv;
  csv << std::setprecision(17) << 's';
  for (std::size_t i = 0; i < kappas.size(); ++i) csv << ",psi_k" << i + 1;
  csv << ",target\n";
  for (double x : s) {
    csv << x;
    for (double k : kappas) csv << ',' << psi(k, x);
    csv << ',' << target << '\n';
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_text(o.out, csv.str());
    out << "wrote " << o.out << " (" << s.size() << " rows, kappa";
    for (double k : kappas) out << ' ' << std::setprecision(8) << k;
    out << ")\n";
  }
  return exit_ok;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  if (o.iterations < 1) throw ConfigError("--iterations must be at least 1");
  const GroundState g = ground_state(o);
  const Threshold bar = threshold_of(g);
  const SweepResult sweep = kappa_sweep(g.u, bar.value, o.band, o.iterations);
  std::ostringstream csv;
  csv << std::setprecision(17) << "kappa,pass,worst_violation,tolerance\n";
  for (const auto& step : sweep.steps) {
    csv << step.kappa << ',' << (step.pass ? 1 : 0) << ',' << step.worst_violation << ','
        << step.tolerance << '\n';
  }
  if (!o.out.empty()) write_text(o.out, csv.str());
  json j = base_report("sweep", g, bar);
  j["empirical_threshold"] = sweep.threshold;
  j["label"] = "empirical, not proven";
  j["steps"] = sweep.steps.size();
  if (!o.out.empty()) j["csv"] = o.out;
  if (o.out.empty()) out << csv.str();
  emit_json(j, o, out);
  return exit_ok;
}

void add_source_options(CLI::App& sub, Options& o) {
  sub.add_option("--domain", o.domain_path, "domain JSON file");
  sub.add_option("--h", o.h, "grid spacing");
  sub.add_option("--field", o.field_path, "PLSF ground state instead of a solve");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Power-logconcavity lab for the first Dirichlet eigenfunction", "plc"};
  // "--h" is the grid spacing, so help is "--help" only.
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "solve for the ground state and write a PLSF field");
  add_source_options(*solve, o);
  solve->add_option("--out", o.out, "output PLSF path; metadata goes to <out>.json");
  solve->add_flag("--richardson", o.richardson, "add a Richardson estimate from h and 2h");

  auto* threshold = app.add_subcommand("threshold", "print kappa_bar and the local thresholds");
  add_source_options(*threshold, o);
  threshold->add_option("--kappa", o.kappa_text, "kappa list; 'bar' is the global threshold");
  threshold->add_option("--report", o.report, "also write the JSON here");

  auto* envelope = app.add_subcommand("envelope", "convex envelope of w_kappa");
  add_source_options(*envelope, o);
  envelope->add_option("--kappa", o.kappa_text, "one kappa; 'bar' is the global threshold");
  envelope->add_option("--band", o.band, "exclusion band (default max(2h, 0.02 D))");
  envelope->add_option("--out", o.out, "output PLSF path for the envelope");
  envelope->add_option("--facets", o.facets, "facet CSV path (default <out>.facets.csv)");
  envelope->add_option("--report", o.report, "also write the summary JSON here");

  auto* verify = app.add_subcommand("verify", "run the checks and write a report");
  add_source_options(*verify, o);
  verify->add_option("--kappa", o.kappa_text, "kappa list; 'bar' is the global threshold");
  verify->add_option("--alpha", o.alpha_text, "alpha list");
  verify->add_option("--band", o.band, "check band (default max(4h, 0.02 D))");
  verify->add_option("--checks", o.checks_text, "check list or 'all'");
  verify->add_option("--seed", o.seed, "sampling seed");
  verify->add_option("--pairs", o.pairs, "sampled pairs per check");
  verify->add_option("--trace-trials", o.trace_trials, "SPD pairs for trace_concavity");
  verify->add_option("--report", o.report, "report JSON path");
  verify->add_flag("--richardson", o.richardson, "add a Richardson estimate from h and 2h");

  auto* psi_cmd = app.add_subcommand("psi", "tabulate Psi_kappa with the target level");
  psi_cmd->add_option("--kappa", o.kappa_text, "kappa list (default 1/2, 1/sqrt(2), sqrt(2)/sqrt(3), 1)");
  psi_cmd->add_option("--s-max", o.s_max, "largest s");
  psi_cmd->add_option("--points", o.points, "uniform s samples in (0, s_max]");
  add_source_options(*psi_cmd, o);
  psi_cmd->add_option("--out", o.out, "CSV path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "bisect for the largest kappa with convex w_kappa");
  add_source_options(*sweep, o);
  sweep->add_option("--band", o.band, "check band (default max(4h, 0.02 D))");
  sweep->add_option("--iterations", o.iterations, "bisection steps");
  sweep->add_option("--out", o.out, "CSV log path (default stdout)");
  sweep->add_option("--report", o.report, "also write the summary JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*threshold) return cmd_threshold(o, out);
    if (*envelope) return cmd_envelope(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*psi_cmd) return cmd_psi(o, *psi_cmd, out);
    return cmd_sweep(o, out);
  } catch (const IoError& e) {
    err << "plc: I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const SolverError& e) {
    err << "plc: solver error: " << e.what() << '\n';
    return exit_solver;
  } catch (const ConfigError& e) {
    err << "plc: configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "plc: error: " << e.what() << '\n';
    return exit_config;
  }
}

}  // namespace plc::cli
