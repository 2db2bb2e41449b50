// Command-line front end: run, compare, eta, certify.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "accel/errors.hpp"
#include "accel/harness.hpp"
#include "accel/solvers.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

struct CommonFlags {
  std::string config;
  std::string problem;
  std::string restart;
  std::string seed;
  std::string tol_grad;
  std::string max_grad_calls;
  std::string out;
  std::string traj;
  std::string traj_coords;
  std::string summary;
  std::string cache_dir;
  std::string stop_f_gap;
  std::string stop_x_err;
  bool no_timing = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "key=value config file");
  app->add_option("--problem", f.problem, "ridge | bowl | bpdn | quadratic");
  app->add_option("--restart", f.restart, "restart period for nl, or 'none'");
  app->add_option("--seed", f.seed, "problem seed");
  app->add_option("--tol-grad", f.tol_grad, "stop when ||f'(y)|| <= tol");
  app->add_option("--max-grad-calls", f.max_grad_calls, "gradient call budget");
  app->add_option("--out", f.out, "trace CSV path");
  app->add_option("--traj", f.traj, "trajectory CSV path");
  app->add_option("--traj-coords", f.traj_coords, "1-based coordinates i,j");
  app->add_option("--summary", f.summary, "summary CSV path");
  app->add_option("--cache-dir", f.cache_dir, "directory for cached problems and references");
  app->add_option("--stop-f-gap", f.stop_f_gap, "stop once f - f* drops below this");
  app->add_option("--stop-x-err", f.stop_x_err, "stop once ||x - x*|| reaches this");
  app->add_flag("--no-timing", f.no_timing, "write time_ns as 0");
  app->add_option("--set", f.sets, "extra key=value setting (repeatable)");
}

// Config file first, then explicit flags, then --set overrides.
accel::ExperimentConfig make_config(const CommonFlags& f) {
  accel::ExperimentConfig cfg;
  if (!f.config.empty()) accel::apply_config_file(cfg, f.config);
  const std::pair<const char*, const std::string*> flags[] = {
      {"problem", &f.problem},         {"restart", &f.restart},
      {"seed", &f.seed},               {"tol-grad", &f.tol_grad},
      {"max-grad-calls", &f.max_grad_calls}, {"out", &f.out},
      {"traj", &f.traj},               {"traj-coords", &f.traj_coords},
      {"summary", &f.summary},         {"cache-dir", &f.cache_dir},
      {"stop-f-gap", &f.stop_f_gap},   {"stop-x-err", &f.stop_x_err},
  };
  for (const auto& [key, value] : flags) {
    if (!value->empty()) accel::apply_setting(cfg, key, *value);
  }
  if (f.no_timing) cfg.no_timing = true;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw accel::ConfigError("--set expects key=value: " + s);
    accel::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated gradient methods with adaptive momentum"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string run_method = "nmul";
  auto* run = app.add_subcommand("run", "run one method and write its trace");
  add_common(run, run_flags);
  run->add_option("--method", run_method, "nl | nmul | adaptive1..4 | cgls");

  CommonFlags cmp_flags;
  std::string cmp_methods = "nl,nmul,adaptive1,adaptive2,adaptive3,adaptive4";
  std::string rank_metric = "fgap";
  double rank_threshold = 1e-12;
  bool parallel = false;
  auto* cmp = app.add_subcommand("compare", "run several methods on one problem");
  add_common(cmp, cmp_flags);
  cmp->add_option("--methods", cmp_methods, "comma-separated method list");
  cmp->add_option("--rank-metric", rank_metric, "fgap | xerr")
      ->check(CLI::IsMember({"fgap", "xerr"}));
  cmp->add_option("--rank-threshold", rank_threshold, "threshold used to pick the best nl");
  cmp->add_flag("--parallel", parallel, "run methods concurrently");

  double eta_rho = 1e-3;
  double eta_d = 1.0;
  int eta_samples = 101;
  auto* eta = app.add_subcommand("eta", "sample the feasibility cubic on [0, 1]");
  eta->add_option("--rho", eta_rho)->required();
  eta->add_option("--d", eta_d)->required();
  eta->add_option("--samples", eta_samples);

  CommonFlags cert_flags;
  int cert_samples = 10000;
  std::uint64_t cert_seed = 1;
  double lip_scale = 1.0;
  auto* cert = app.add_subcommand("certify", "sample-check the class constants of a problem");
  add_common(cert, cert_flags);
  cert->add_option("--samples", cert_samples);
  cert->add_option("--sample-seed", cert_seed);
  cert->add_option("--lip-scale", lip_scale, "multiply the declared L (negative control)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      accel::ExperimentConfig cfg = make_config(run_flags);
      if (run->count("--method") > 0) accel::apply_setting(cfg, "method", run_method);
      const auto result = accel::run_experiment(cfg);
      if (!cfg.summary) {
        std::cout << accel::summary_header() << '\n';
        accel::write_summary_row(std::cout, result.summary);
      }
    } else if (cmp->parsed()) {
      const accel::ExperimentConfig base = make_config(cmp_flags);
      std::vector<accel::ExperimentConfig> cfgs;
      for (const auto& m : split(cmp_methods, ',')) {
        accel::ExperimentConfig c = base;
        accel::apply_setting(c, "method", m);
        c.out.reset();
        c.traj.reset();
        c.summary.reset();
        cfgs.push_back(c);
      }
      accel::CompareOptions opt;
      opt.rank = {rank_metric, rank_threshold};
      opt.parallel = parallel;
      const auto rows = accel::compare(cfgs, opt);
      std::ofstream file;
      if (base.out) {
        file.open(*base.out);
        if (!file) throw accel::ConfigError("cannot write " + base.out->string());
      }
      std::ostream& os = base.out ? static_cast<std::ostream&>(file) : std::cout;
      os << accel::summary_header() << '\n';
      for (const auto& r : rows) accel::write_summary_row(os, r);
    } else if (eta->parsed()) {
      accel::write_eta_csv(std::cout, eta_rho, eta_d, eta_samples);
    } else if (cert->parsed()) {
      const accel::ExperimentConfig cfg = make_config(cert_flags);
      const auto problem = accel::build_problem(cfg);
      accel::Objective obj = accel::objective_of(problem);
      obj.lip *= lip_scale;
      const auto report = accel::scvx_lipschitz_certify(obj, cert_samples, cert_seed);
      std::cout << "samples,lipschitz_violations,convexity_violations,worst_lipschitz_ratio,"
                   "worst_convexity_margin,passed\n"
                << report.samples << ',' << report.lipschitz_violations << ','
                << report.convexity_violations << ',' << report.worst_lipschitz_ratio << ','
                << report.worst_convexity_margin << ',' << (report.passed() ? 1 : 0) << '\n';
    }
  } catch (const accel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const accel::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
