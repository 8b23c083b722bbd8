#include "greenwalk/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "greenwalk/boundary.hpp"
#include "greenwalk/config.hpp"
#include "greenwalk/cylinder.hpp"
#include "greenwalk/errors.hpp"
#include "greenwalk/green.hpp"
#include "greenwalk/limits.hpp"
#include "greenwalk/reports.hpp"
#include "greenwalk/selfcheck.hpp"

namespace greenwalk {

namespace {

using nlohmann::json;
using Rows = std::vector<std::vector<std::string>>;

/// What one command hands back to the shared emitter.
struct CommandResult {
  json payload;
  std::vector<std::string> findings;
  std::vector<std::string> csv_header;
  Rows csv_rows;          // primary table, written as <command>.csv
  std::string text;       // human one-liner(s) for --format text
};

double finding_threshold(const RunConfig& cfg, double fallback) {
  return cfg.tol > 0.0 ? cfg.tol : fallback;
}

json qi_json(const QiFit& fit) {
  return json{{"slope", fit.slope}, {"additive", fit.additive}, {"points", fit.points}};
}

CommandResult cmd_green(const RunConfig& cfg) {
  const GroupSpec spec = build_group(cfg);
  const StepDistribution mu = build_measure(spec, cfg.measure);
  const GreenTable t =
      green_kernel(spec, mu, cfg.truncation, cfg.radius, -1, cfg.tol);

  CommandResult res;
  double leaked_total = 0.0;
  for (double v : t.leaked) leaked_total += v;
  res.payload = json{{"truncation", t.truncation},
                     {"report_radius", t.report_radius},
                     {"internal_radius", t.internal_radius},
                     {"gee", t.gee()},
                     {"rho_hat", t.rho_hat},
                     {"tail_bound", t.tail_bound},
                     {"leaked_mass", leaked_total}};
  res.payload["quasi_isometry"] = qi_json(quasi_isometry_fit(t));

  // dual route: G_N(e,x) should equal G_N(e,e) * F_N(e,x) up to truncation
  const GroupElement probe =
      apply_letter(spec, identity_element(), spec.generator_letters().front());
  const double f = first_passage(spec, mu, probe, cfg.truncation);
  const double cross = std::abs(t.at(probe) - t.gee() * f);
  res.payload["cross_check"] = json{{"x", format_element(spec, probe)},
                                    {"first_passage", f},
                                    {"gap", cross}};
  if (cross > finding_threshold(cfg, 1e-2))
    res.findings.push_back("Green kernel and first-passage routes disagree at " +
                           format_element(spec, probe) + " by " + std::to_string(cross));

  res.csv_header = {"element", "length", "green", "ratio_to_gee"};
  const BallResult b = ball(spec, cfg.radius);
  for (const auto& x : b.elements)
    res.csv_rows.push_back({format_element(spec, x),
                            std::to_string(word_length(spec, x)),
                            csv_number(t.at(x)), csv_number(t.at(x) / t.gee())});
  std::ostringstream os;
  os << "G_" << t.truncation << "(e,e) = " << t.gee() << ", rho_hat = " << t.rho_hat
     << ", tail bound " << t.tail_bound << "\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_hilbert(const RunConfig& cfg) {
  const GroupSpec spec = build_group(cfg);
  const StepDistribution mu = build_measure(spec, cfg.measure);
  const int pair_radius = cfg.pair_radius > 0 ? cfg.pair_radius : 3;
  const HilbertGreenReport rep =
      verify_hilbert_green(spec, mu, pair_radius, cfg.radius, cfg.truncation);

  CommandResult res;
  res.payload = json{{"pair_radius", pair_radius},
                     {"z_radius", cfg.radius},
                     {"truncation", cfg.truncation},
                     {"pairs", rep.pairs},
                     {"max_deviation", rep.max_deviation}};
  json worst = json::array();
  res.csv_header = {"x", "y", "hilbert", "green", "deviation"};
  for (const auto& pr : rep.worst) {
    worst.push_back(json{{"x", format_element(spec, pr.x)},
                         {"y", format_element(spec, pr.y)},
                         {"hilbert", pr.hilbert},
                         {"green", pr.green},
                         {"deviation", pr.deviation}});
    res.csv_rows.push_back({format_element(spec, pr.x), format_element(spec, pr.y),
                            csv_number(pr.hilbert), csv_number(pr.green),
                            csv_number(pr.deviation)});
  }
  res.payload["worst"] = std::move(worst);
  const double bar = finding_threshold(cfg, 0.01);
  if (rep.max_deviation > bar)
    res.findings.push_back("Hilbert distance deviates from the Green metric by " +
                           std::to_string(rep.max_deviation) + " > " +
                           std::to_string(bar));
  std::ostringstream os;
  os << "max |rho(K_x,K_y) - d_G(x,y)| = " << rep.max_deviation << " over "
     << rep.pairs << " pairs\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_boundary(const RunConfig& cfg) {
  const GroupSpec spec = build_group(cfg);
  const StepDistribution mu = build_measure(spec, cfg.measure);
  const Metric metric = build_metric(spec, mu, cfg.metric);
  const int m = cfg.depth;

  const StationaryMeasure nu = solve_stationary(spec, mu, m);
  const double drift = drift_formula(spec, mu, metric, nu);
  const CylinderFunction psi =
      psi_increment(spec, mu, metric, nu, m, std::nan(""));
  const SpectralReport gap = transfer_contraction(spec, mu, nu, m, 20, cfg.seed);
  const PoissonSolution sol =
      solve_poisson(spec, mu, nu, psi, finding_threshold(cfg, 1e-8), 10000);
  const double sigma2 = sigma2_green_kubo(spec, mu, metric, nu, sol.u, std::nan(""));

  CommandResult res;
  res.payload = json{{"depth", m},
                     {"stationary_residual", nu.residual},
                     {"stationary_iterations", nu.iterations},
                     {"drift_formula", drift},
                     {"psi_sup", psi.sup_norm()},
                     {"psi_holder", holder_seminorm(psi, cfg.alpha)},
                     {"tau_hat", gap.tau_hat},
                     {"transfer_norms", gap.norms},
                     {"poisson",
                      json{{"terms", sol.terms},
                           {"residual", sol.residual},
                           {"lifted_residual", sol.lifted_residual},
                           {"tau_run", sol.tau_run},
                           {"u_sup", sol.u.sup_norm()}}},
                     {"sigma2", sigma2}};
  if (gap.tau_hat >= 1.0)
    res.findings.push_back("transfer operator shows no contraction (tau_hat = " +
                           std::to_string(gap.tau_hat) + ")");
  if (sigma2 < 0.0)
    res.findings.push_back("negative variance " + std::to_string(sigma2));
  res.csv_header = {"iteration", "norm"};
  for (std::size_t i = 0; i < gap.norms.size(); ++i)
    res.csv_rows.push_back({std::to_string(i), csv_number(gap.norms[i])});
  std::ostringstream os;
  os << "nu residual " << nu.residual << ", tau_hat = " << gap.tau_hat
     << ", Poisson residual " << sol.residual << ", sigma^2 = " << sigma2 << "\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_drift(const RunConfig& cfg) {
  const GroupSpec spec = build_group(cfg);
  const StepDistribution mu = build_measure(spec, cfg.measure);
  const Metric metric = build_metric(spec, mu, cfg.metric);
  const DriftReport rep = estimate_drift(spec, mu, metric, cfg.n, cfg.trajectories,
                                         cfg.seed, cfg.threads);

  CommandResult res;
  res.payload = json{{"n", rep.n},
                     {"trajectories", rep.trajectories},
                     {"drift", rep.drift},
                     {"ci95", rep.ci95},
                     {"stddev", rep.stddev},
                     {"checkpoint_ns", rep.checkpoint_ns},
                     {"checkpoint_means", rep.checkpoint_means},
                     {"fitted_exponent", rep.fitted_exponent},
                     {"sublinear", rep.sublinear}};

  if (spec.is_free()) {
    const StationaryMeasure nu = solve_stationary(spec, mu, mu.max_word_length());
    const double formula = drift_formula(spec, mu, metric, nu);
    res.payload["formula"] = formula;
    res.payload["formula_gap"] = std::abs(formula - rep.drift);
    if (std::abs(formula - rep.drift) > finding_threshold(cfg, 0.05))
      res.findings.push_back("integral drift formula disagrees with the walk: " +
                             std::to_string(formula) + " vs " +
                             std::to_string(rep.drift));
    const PositivityReport pos = drift_positivity(
        spec, mu, metric, 2, std::min<long>(cfg.n, 4000),
        std::min<long>(cfg.trajectories, 2000), cfg.seed + 1, cfg.threads);
    res.payload["positivity"] = json{{"depth", pos.depth},
                                     {"buckets", pos.means.size()},
                                     {"min_mean", pos.min_mean},
                                     {"positive", pos.positive}};
    if (!pos.positive)
      res.findings.push_back("conditional drift not positive in some direction "
                             "(min bucket mean " +
                             std::to_string(pos.min_mean) + ")");
  }
  if (spec.is_word_kind() && rep.sublinear)
    res.findings.push_back("sublinear escape (exponent " +
                           std::to_string(rep.fitted_exponent) +
                           ") on a hyperbolic group");
  if (spec.is_lamplighter() && !rep.sublinear)
    res.findings.push_back("lamplighter escape looks ballistic (exponent " +
                           std::to_string(rep.fitted_exponent) + ")");

  res.csv_header = {"n", "mean_distance"};
  for (std::size_t i = 0; i < rep.checkpoint_ns.size(); ++i)
    res.csv_rows.push_back({std::to_string(rep.checkpoint_ns[i]),
                            csv_number(rep.checkpoint_means[i])});
  std::ostringstream os;
  os << "drift = " << rep.drift << " +/- " << rep.ci95 << " (95%), exponent "
     << rep.fitted_exponent << "\n";
  res.text = os.str();
  return res;
}

/// Centering and variance reference for clt/lil: the exact boundary route on
/// free groups, a calibration run elsewhere.
struct Calibration {
  double drift = 0.0;
  double sigma2 = 0.0;
  std::string source;
};

Calibration calibrate(const GroupSpec& spec, const StepDistribution& mu,
                      const Metric& metric, const RunConfig& cfg) {
  Calibration cal;
  if (spec.is_free()) {
    const int m = std::min(cfg.depth, 6);
    const StationaryMeasure nu = solve_stationary(spec, mu, m);
    cal.drift = drift_formula(spec, mu, metric, nu);
    const CylinderFunction psi = psi_increment(spec, mu, metric, nu, m, std::nan(""));
    const PoissonSolution sol = solve_poisson(spec, mu, nu, psi, 1e-10, 10000);
    cal.sigma2 = sigma2_green_kubo(spec, mu, metric, nu, sol.u, std::nan(""));
    cal.source = "boundary";
  } else {
    const long traj = std::max<long>(64, cfg.trajectories / 8);
    const DriftReport pre = estimate_drift(spec, mu, metric, cfg.n, traj,
                                           cfg.seed ^ 0xca11b8a7ULL, cfg.threads);
    cal.drift = pre.drift;
    cal.sigma2 = 0.0; // fall back to the sample variance downstream
    cal.source = "calibration-run";
  }
  return cal;
}

CommandResult cmd_clt(const RunConfig& cfg) {
  const GroupSpec spec = build_group(cfg);
  const StepDistribution mu = build_measure(spec, cfg.measure);
  const Metric metric = build_metric(spec, mu, cfg.metric);
  const Calibration cal = calibrate(spec, mu, metric, cfg);
  const CltReport rep = clt_experiment(spec, mu, metric, cfg.n, cfg.trajectories,
                                       cal.drift, cal.sigma2, cfg.seed, cfg.threads);

  CommandResult res;
  res.payload = json{{"n", rep.n},
                     {"trajectories", rep.trajectories},
                     {"center_drift", rep.center_drift},
                     {"centering_source", cal.source},
                     {"sigma2_ref", rep.sigma2_ref},
                     {"sample_mean", rep.sample_mean},
                     {"sample_variance", rep.sample_variance},
                     {"ks_statistic", rep.ks.statistic},
                     {"ks_p_value", rep.ks.p_value}};
  const double bar = finding_threshold(cfg, 0.01);
  if (rep.ks.p_value <= bar)
    res.findings.push_back("KS test rejects the Gaussian limit: p = " +
                           std::to_string(rep.ks.p_value) + " <= " +
                           std::to_string(bar));
  res.csv_header = {"trajectory", "normalized_deviation"};
  for (std::size_t i = 0; i < rep.samples.size(); ++i)
    res.csv_rows.push_back({std::to_string(i), csv_number(rep.samples[i])});
  std::ostringstream os;
  os << "KS p = " << rep.ks.p_value << " (D = " << rep.ks.statistic
     << "), sample variance " << rep.sample_variance << " vs ref " << rep.sigma2_ref
     << "\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_lil(const RunConfig& cfg) {
  const GroupSpec spec = build_group(cfg);
  const StepDistribution mu = build_measure(spec, cfg.measure);
  const Metric metric = build_metric(spec, mu, cfg.metric);
  Calibration cal = calibrate(spec, mu, metric, cfg);
  if (!(cal.sigma2 > 0.0)) {
    // no boundary variance available: borrow the CLT sample variance
    const CltReport pre = clt_experiment(spec, mu, metric, cfg.n,
                                         std::max<long>(64, cfg.trajectories / 8),
                                         cal.drift, 0.0,
                                         cfg.seed ^ 0x5151aaULL, cfg.threads);
    cal.sigma2 = pre.sample_variance;
  }
  const long n_min = std::max<long>(16, cfg.n / 100);
  const int seeds = static_cast<int>(std::min<long>(cfg.trajectories, 512));
  const LilReport rep = lil_experiment(spec, mu, metric, cfg.n, n_min, 24, seeds,
                                       cal.drift, cal.sigma2, cfg.seed, cfg.threads);

  CommandResult res;
  double ensemble_max_sqrt1 = 0.0;
  json per_seed = json::array();
  for (const auto& tr : rep.seeds) {
    ensemble_max_sqrt1 = std::max(ensemble_max_sqrt1, tr.running_max_sqrt1);
    per_seed.push_back(json{{"max_sqrt2", tr.running_max_sqrt2},
                            {"max_sqrt1", tr.running_max_sqrt1},
                            {"final_sqrt2", tr.stat_sqrt2.back()}});
  }
  res.payload = json{{"n_min", n_min},
                     {"n_max", cfg.n},
                     {"seeds", seeds},
                     {"center_drift", cal.drift},
                     {"sigma2", cal.sigma2},
                     {"checkpoints", rep.checkpoints},
                     {"ensemble_max_sqrt2", rep.ensemble_max_sqrt2},
                     {"min_seed_max_sqrt2", rep.min_seed_max_sqrt2},
                     {"ensemble_max_sqrt1", ensemble_max_sqrt1},
                     {"centering_suspect", rep.centering_suspect},
                     {"per_seed", std::move(per_seed)}};
  if (rep.centering_suspect)
    res.findings.push_back("LIL statistic drifts: centering looks wrong");
  if (rep.ensemble_max_sqrt2 > 3.0)
    res.findings.push_back("LIL upper envelope exceeded: max " +
                           std::to_string(rep.ensemble_max_sqrt2) + " sigma > 3 sigma");
  if (rep.ensemble_max_sqrt2 < 0.3)
    res.findings.push_back("LIL fluctuations below 0.3 sigma across all seeds");

  res.csv_header = {"seed", "checkpoint_n", "stat_sqrt2", "stat_sqrt1"};
  for (std::size_t s = 0; s < rep.seeds.size(); ++s)
    for (std::size_t j = 0; j < rep.checkpoints.size(); ++j)
      res.csv_rows.push_back({std::to_string(s), std::to_string(rep.checkpoints[j]),
                              csv_number(rep.seeds[s].stat_sqrt2[j]),
                              csv_number(rep.seeds[s].stat_sqrt1[j])});
  std::ostringstream os;
  os << "LIL running max " << rep.ensemble_max_sqrt2 << " sigma (sqrt2 norm) over "
     << seeds << " seeds\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_lamplighter(const RunConfig& cfg) {
  GroupSpec spec = GroupSpec::parse("zwrz");
  if (cfg.group != "free:2") { // non-default group requested explicitly
    spec = GroupSpec::parse(cfg.group);
    if (!spec.is_lamplighter())
      throw ConfigError("the lamplighter command runs on group zwrz only");
  }
  const StepDistribution mu = build_measure(spec, cfg.measure);
  std::vector<long> ns;
  for (long v = std::max<long>(64, cfg.n / 128); v < cfg.n; v *= 2) ns.push_back(v);
  ns.push_back(cfg.n);
  const GrowthReport rep =
      growth_exponent(spec, mu, ns, cfg.trajectories, cfg.seed, cfg.threads);

  CommandResult res;
  res.payload = json{{"ns", rep.ns},
                     {"means", rep.means},
                     {"exponent", rep.exponent},
                     {"intercept", rep.intercept},
                     {"trajectories", rep.trajectories}};
  if (rep.exponent > 0.92)
    res.findings.push_back("lamplighter escape looks ballistic (exponent " +
                           std::to_string(rep.exponent) + ")");
  if (rep.exponent < 0.5)
    res.findings.push_back("lamplighter escape slower than diffusive (exponent " +
                           std::to_string(rep.exponent) + ")");
  res.csv_header = {"n", "mean_distance"};
  for (std::size_t i = 0; i < rep.ns.size(); ++i)
    res.csv_rows.push_back({std::to_string(rep.ns[i]), csv_number(rep.means[i])});
  std::ostringstream os;
  os << "growth exponent " << rep.exponent << " over n in [" << ns.front() << ", "
     << ns.back() << "]\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_delta(const RunConfig& cfg) {
  const GroupSpec spec = build_group(cfg);
  const StepDistribution mu = build_measure(spec, cfg.measure);
  const BallResult b = ball(spec, cfg.radius);

  CommandResult res;
  DeltaReport rep;
  if (cfg.metric == "word") {
    rep = hyperbolicity_delta_word(spec, b.elements, cfg.threads);
  } else {
    const Metric dg = build_metric(spec, mu, cfg.metric); // validates capability
    // tol is the finding bar here, not a kernel accuracy demand: the point of
    // the command is to report how far the truncated metric drifts.
    const GreenTable t =
        green_kernel(spec, mu, cfg.truncation, 2 * cfg.radius, -1, 0.0);
    rep = hyperbolicity_delta(
        spec, b.elements,
        [&](const GroupElement& x, const GroupElement& y) {
          return green_metric(t, x, y);
        },
        cfg.threads);
    (void)dg;
  }
  res.payload = json{{"radius", cfg.radius},
                     {"metric", cfg.metric},
                     {"points", rep.points},
                     {"tuples", rep.tuples},
                     {"delta", rep.delta},
                     {"exact_zero", rep.exact_zero}};
  // only free groups are trees; free products legitimately carry delta > 0
  if (spec.is_free() && cfg.metric == "word" && !rep.exact_zero)
    res.findings.push_back("tree four-point constant is " + std::to_string(rep.delta) +
                           ", expected exactly 0");
  if (spec.is_word_kind() && cfg.metric == "green" &&
      rep.delta > finding_threshold(cfg, 0.05))
    res.findings.push_back("Green-metric delta " + std::to_string(rep.delta) +
                           " exceeds the truncation budget");
  std::ostringstream os;
  os << "delta = " << rep.delta << " over " << rep.points << " points ("
     << rep.tuples << " tuples)\n";
  res.text = os.str();
  return res;
}

CommandResult cmd_selftest(const RunConfig& cfg) {
  (void)cfg;
  const std::vector<CheckResult> results = run_selfchecks();
  CommandResult res;
  json arr = json::array();
  std::ostringstream os;
  std::size_t passed = 0;
  res.csv_header = {"check", "status", "detail"};
  for (const auto& r : results) {
    if (r.pass) ++passed;
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    arr.push_back(json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    res.csv_rows.push_back({r.name, r.pass ? "pass" : "fail", r.detail});
    if (!r.pass) res.findings.push_back("selfcheck failed: " + r.name + " (" + r.detail + ")");
  }
  os << passed << "/" << results.size() << " checks passed\n";
  res.payload = json{{"passed", passed}, {"total", results.size()}, {"checks", arr}};
  res.text = os.str();
  return res;
}

std::string error_json(const std::string& kind, int exit_code, const std::string& msg) {
  return json{{"error", json{{"kind", kind}, {"exit", exit_code}, {"message", msg}}}}
      .dump();
}

int emit(const RunConfig& cfg, const CommandResult& res, std::ostream& out) {
  const json envelope = make_envelope(cfg.command, cfg, res.payload, res.findings);
  if (cfg.command == "selftest" || cfg.format == "text") {
    out << res.text;
    for (const auto& f : res.findings) out << "finding: " << f << "\n";
  } else if (cfg.format == "csv" && !res.csv_header.empty()) {
    out << csv_text(res.csv_header, res.csv_rows);
  } else {
    out << envelope.dump(2) << "\n";
  }
  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    const std::filesystem::path dir(cfg.out);
    write_json_file((dir / "report.json").string(), envelope);
    if (!res.csv_header.empty())
      write_csv_file((dir / (cfg.command + ".csv")).string(), res.csv_header,
                     res.csv_rows);
  }
  return res.findings.empty() ? 0 : 2;
}

int run_parsed(const RunConfig& cfg, std::ostream& out) {
  CommandResult res;
  if (cfg.command == "green") res = cmd_green(cfg);
  else if (cfg.command == "hilbert") res = cmd_hilbert(cfg);
  else if (cfg.command == "boundary") res = cmd_boundary(cfg);
  else if (cfg.command == "drift") res = cmd_drift(cfg);
  else if (cfg.command == "clt") res = cmd_clt(cfg);
  else if (cfg.command == "lil") res = cmd_lil(cfg);
  else if (cfg.command == "lamplighter") res = cmd_lamplighter(cfg);
  else if (cfg.command == "delta") res = cmd_delta(cfg);
  else if (cfg.command == "selftest") res = cmd_selftest(cfg);
  else throw ConfigError("unknown command '" + cfg.command + "'");
  return emit(cfg, res, out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"random-walk laboratory for Green metrics, harmonic boundaries and "
               "drift limit theorems on hyperbolic groups"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"green", "truncated Green kernel table, decay fit and quasi-isometry report"},
      {"hilbert", "verify Hilbert projective distance = Green metric on Martin kernels"},
      {"boundary", "stationary cylinder measure, spectral gap, Poisson solve, variance"},
      {"drift", "Monte Carlo escape rate with integral-formula cross-check"},
      {"clt", "central limit theorem experiment with KS test"},
      {"lil", "law of the iterated logarithm envelope experiment"},
      {"lamplighter", "growth exponent on the lamplighter group (anti-example)"},
      {"delta", "four-point hyperbolicity constant on a ball"},
      {"selftest", "run the built-in golden checks"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_option("--group", flags.group, "group spec, e.g. free:2, freeprod:2,3, zwrz");
    sub->add_option("--measure", flags.measure,
                    "uniform | biased | word:weight,word:weight,...");
    sub->add_option("--metric", flags.metric, "word | green");
    sub->add_option("--n", flags.n, "walk length");
    sub->add_option("--trajectories", flags.trajectories, "number of walks / seeds");
    sub->add_option("--depth", flags.depth, "cylinder depth m");
    sub->add_option("--truncation", flags.truncation, "Green kernel truncation N");
    sub->add_option("--radius", flags.radius, "ball radius R");
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--threads", flags.threads, "worker cap (0 = hardware)");
    sub->add_option("--out", flags.out, "artifact directory");
    sub->add_option("--format", flags.format, "json | csv | text");
    sub->add_option("--tol", flags.tol, "tolerance override for findings/solves");
    sub->add_option("--alpha", flags.alpha, "Holder/contraction exponent");
    sub->add_option("--x", flags.x, "element argument");
    sub->add_option("--y", flags.y, "element argument");
    sub->add_option("--pair-radius", flags.pair_radius, "pair ball for hilbert");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("config", 3, e.what()) << "\n";
    return 3;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    RunConfig cfg;
    if (sub->count("--config") > 0) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      json j;
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("config file parse failure at byte " +
                          std::to_string(e.byte) + ": " + e.what());
      }
      cfg = RunConfig::from_json(j);
    }
    if (sub->count("--group")) cfg.group = flags.group;
    if (sub->count("--measure")) cfg.measure = flags.measure;
    if (sub->count("--metric")) cfg.metric = flags.metric;
    if (sub->count("--n")) cfg.n = flags.n;
    if (sub->count("--trajectories")) cfg.trajectories = flags.trajectories;
    if (sub->count("--depth")) cfg.depth = flags.depth;
    if (sub->count("--truncation")) cfg.truncation = flags.truncation;
    if (sub->count("--radius")) cfg.radius = flags.radius;
    if (sub->count("--seed")) cfg.seed = flags.seed;
    if (sub->count("--threads")) cfg.threads = flags.threads;
    if (sub->count("--out")) cfg.out = flags.out;
    if (sub->count("--format")) cfg.format = flags.format;
    if (sub->count("--tol")) cfg.tol = flags.tol;
    if (sub->count("--alpha")) cfg.alpha = flags.alpha;
    if (sub->count("--x")) cfg.x = flags.x;
    if (sub->count("--y")) cfg.y = flags.y;
    if (sub->count("--pair-radius")) cfg.pair_radius = flags.pair_radius;
    cfg.command = sub->get_name();
    cfg.validate();
    return run_parsed(cfg, out);
  } catch (const LabError& e) {
    err << error_json(e.kind(), e.exit_code(), e.what()) << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << error_json("internal", 4, e.what()) << "\n";
    return 4;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

} // namespace greenwalk
