// folbm: simulate foliated Brownian motion, solve for the harmonic density of
// the foliated torus, and run the verification suite.
//
// Settings come from flags, then a `key = value` file given with --config,
// then defaults. Exit codes: 0 success, 1 failed verification or runtime
// error, 2 invalid configuration.

#include "folbm/harmonic.hpp"
#include "folbm/io.hpp"
#include "folbm/kernels.hpp"
#include "folbm/models.hpp"
#include "folbm/sde.hpp"
#include "folbm/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace fs = std::filesystem;
using namespace folbm;

namespace {

struct RunConfig {
  std::string model = "torus3";
  double a = 1.4142135623730951;
  double b = 2.0;
  double alpha = 1.0;
  int q = 1;
  int p = 1;
  double dt = 1e-3;
  int steps = 1000;
  int n_paths = 100;
  std::uint64_t seed = 1;
  int bins = 16;
  int grid_n = 256;
  int threads = 0;
  std::string out = ".";
  // density
  int samples = 100000;
  double horizon = 1e6;
  // verify
  std::vector<std::string> only;
  std::vector<std::string> broken;
  int qv_paths = 1000;
  int generator_paths = 100000;
  int invariance_paths = 100000;
  int martingale_paths = 10000;
  int equivalence_paths = 10000;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& key, const std::string& rule) {
  if (!ok) throw ConfigError("invalid value for " + key + ": requires " + rule);
}

void validate(const RunConfig& c) {
  require(c.model == "product" || c.model == "kronecker" || c.model == "torus3", "model",
          "one of product, kronecker, torus3");
  require(c.a > 0.0 && std::isfinite(c.a), "a", "a > 0");
  require(c.b > 1.0 && std::isfinite(c.b), "b", "b > 1");
  require(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha", "alpha > 0");
  require(c.q >= 1, "q", "q >= 1");
  require(c.p >= 1, "p", "p >= 1");
  require(c.q + c.p <= kMaxDim, "p", "q + p <= " + std::to_string(kMaxDim));
  require(c.dt > 0.0 && std::isfinite(c.dt), "dt", "dt > 0");
  require(c.steps >= 1, "steps", "steps >= 1");
  require(c.n_paths >= 1, "n-paths", "n-paths >= 1");
  require(c.bins >= 1, "bins", "bins >= 1");
  require(c.grid_n >= 4 && c.grid_n % 2 == 0, "grid-n", "an even grid-n >= 4");
  require(c.threads >= 0, "threads", "threads >= 0");
  require(c.samples >= 1, "samples", "samples >= 1");
  require(c.horizon > 0.0 && std::isfinite(c.horizon), "horizon", "horizon > 0");
  for (int v : {c.qv_paths, c.generator_paths, c.invariance_paths, c.martingale_paths,
                c.equivalence_paths}) {
    require(v >= 2, "*-paths", "at least 2 paths per statistical check");
  }
}

// Keeps the model object alive alongside its chart description.
struct BuiltModel {
  std::variant<models::ProductModel, models::KroneckerModel, models::EmbeddedTorusModel> impl;
  [[nodiscard]] const FoliatedModel& foliated() const {
    return std::visit([](const auto& m) -> const FoliatedModel& { return m.foliated(); }, impl);
  }
};

BuiltModel build_model(const RunConfig& c) {
  if (c.model == "product") return {models::ProductModel(c.q, c.p)};
  if (c.model == "kronecker") return {models::KroneckerModel(c.a)};
  return {models::EmbeddedTorusModel(c.b, c.alpha)};
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream o;
  o << "model = " << c.model << '\n'
    << "a = " << io::format_decimal17(c.a) << '\n'
    << "b = " << io::format_decimal17(c.b) << '\n'
    << "alpha = " << io::format_decimal17(c.alpha) << '\n'
    << "q = " << c.q << '\n'
    << "p = " << c.p << '\n'
    << "dt = " << io::format_decimal17(c.dt) << '\n'
    << "steps = " << c.steps << '\n'
    << "n-paths = " << c.n_paths << '\n'
    << "seed = " << c.seed << '\n'
    << "bins = " << c.bins << '\n'
    << "grid-n = " << c.grid_n << '\n';
  return o.str();
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out);
  std::ofstream f(fs::path(c.out) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(c.out) / name).string());
  return f;
}

int cmd_simulate(const RunConfig& c) {
  const BuiltModel built = build_model(c);
  const FoliatedModel& m = built.foliated();
  sde::SdeConfig cfg;
  cfg.dt = c.dt;
  cfg.n_steps = c.steps;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  cfg.record_noise = false;
  const ChartPoint origin(Vec::Zero(m.n));
  const sde::PathEnsemble e =
      sde::fobm_frame_bundle(m, sde::FramePoint::at(m, origin), cfg, c.n_paths);
  {
    std::ofstream csv = open_output(c, "paths.csv");
    io::write_paths_csv(csv, e, m);
  }
  std::ofstream meta = open_output(c, "meta.txt");
  meta << "# folbm simulate\n" << echo_config(c) << "# rows = " << e.n_paths * e.n_records()
       << '\n';
  return 0;
}

int cmd_density(const RunConfig& c) {
  std::vector<std::string> warnings;
  harmonic::DensitySolution sol = harmonic::solve_density_ode_unchecked(c.b, c.grid_n);
  const bool power_of_two = (c.grid_n & (c.grid_n - 1)) == 0;
  if (c.grid_n < 32 || !power_of_two) {
    warnings.push_back("grid-n " + std::to_string(c.grid_n) +
                       " is too coarse or not a power of two; the null vector is not checked "
                       "for uniqueness or sign");
  } else {
    // Checked solve: throws when the null space is not one-dimensional.
    sol.profile = harmonic::example3_density_ode_solve(c.b, c.grid_n);
  }
  const harmonic::DensityProfile exact = harmonic::example3_density_closed_form(c.b, c.grid_n);
  const double linf = kernels::max_abs_diff(sol.profile.values, exact.values);

  // Independent leafwise samples: the exact flow from the origin evaluated at
  // Brownian time `horizon`.
  const models::EmbeddedTorusModel torus(c.b, c.alpha);
  sde::SdeConfig cfg;
  cfg.dt = c.horizon;
  cfg.n_steps = 1;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  cfg.record_noise = false;
  const sde::PathEnsemble e =
      sde::fobm_flow_1d(torus.foliated(), ChartPoint{0.0, 0.0}, cfg, c.samples);
  const harmonic::OccupationHistogram hist = harmonic::occupation_estimate(e, {c.bins, c.bins});

  {
    std::ofstream f = open_output(c, "density_ode.csv");
    io::write_density_csv(f, sol.profile);
  }
  {
    std::ofstream f = open_output(c, "density_closed_form.csv");
    io::write_density_csv(f, exact);
  }
  {
    std::ofstream f = open_output(c, "occupation.csv");
    io::write_histogram_csv(f, hist);
  }
  std::ostringstream report;
  report << "b = " << io::format_decimal17(c.b) << '\n'
         << "grid-n = " << c.grid_n << '\n'
         << "linf_ode_vs_closed_form = " << io::format_decimal17(linf) << '\n'
         << "smallest_singular_value = " << io::format_decimal17(sol.smallest_singular_value)
         << '\n'
         << "second_singular_value = " << io::format_decimal17(sol.second_singular_value) << '\n'
         << "normalization = " << io::format_decimal17(sol.profile.normalization_integral())
         << '\n'
         << "occupation_samples = " << hist.total << '\n'
         << "occupation_horizon = " << io::format_decimal17(c.horizon) << '\n';
  try {
    const harmonic::ChiSquareReport chi = harmonic::chi_square_uniform(hist);
    report << "chi_square = " << io::format_decimal17(chi.statistic) << '\n'
           << "chi_square_dof = " << chi.dof << '\n'
           << "chi_square_p_value = " << io::format_decimal17(chi.p_value) << '\n';
  } catch (const InsufficientSamples& err) {
    warnings.push_back(std::string("chi-square skipped: ") + err.what());
  }
  for (const std::string& w : warnings) {
    report << "warning = " << w << '\n';
    std::cerr << "warning: " << w << '\n';
  }
  std::ofstream f = open_output(c, "density_report.txt");
  f << report.str();
  std::cout << report.str();
  return 0;
}

int cmd_verify(const RunConfig& c) {
  verify::VerifyOptions o;
  o.a = c.a;
  o.b = c.b;
  o.alpha = c.alpha;
  o.seed = c.seed;
  o.threads = c.threads;
  o.bins = c.bins;
  o.grid_n = c.grid_n;
  o.qv_paths = c.qv_paths;
  o.generator_paths = c.generator_paths;
  o.invariance_paths = c.invariance_paths;
  o.martingale_paths = c.martingale_paths;
  o.equivalence_paths = c.equivalence_paths;
  o.broken.insert(c.broken.begin(), c.broken.end());
  std::vector<stats::TestReport> reports;
  try {
    reports = verify::run_verification(o, c.only);
  } catch (const InvalidArgument& err) {
    throw ConfigError(err.what());
  }
  std::ofstream f = open_output(c, "verify_report.txt");
  bool all = true;
  for (const stats::TestReport& r : reports) {
    f << r.to_text() << '\n';
    std::cout << r.to_text() << '\n';
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Foliated Brownian motion: simulation, harmonic densities, verification"};
  app.set_config("--config", "", "File of `key = value` lines; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--model", c.model, "product | kronecker | torus3")->capture_default_str();
  app.add_option("--a", c.a, "Kronecker slope")->capture_default_str();
  app.add_option("--b", c.b, "Torus radius ratio, > 1")->capture_default_str();
  app.add_option("--alpha", c.alpha, "Torus leaf slope")->capture_default_str();
  app.add_option("--q", c.q, "Product model: transverse dimension")->capture_default_str();
  app.add_option("--p", c.p, "Product model: leaf dimension")->capture_default_str();
  app.add_option("--dt", c.dt, "Time step")->capture_default_str();
  app.add_option("--steps", c.steps, "Number of steps")->capture_default_str();
  app.add_option("--n-paths,--n_paths", c.n_paths, "Number of paths")->capture_default_str();
  app.add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app.add_option("--bins", c.bins, "Histogram bins per coordinate")->capture_default_str();
  app.add_option("--grid-n,--grid_n", c.grid_n, "Collocation points")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads, 0 = automatic")->capture_default_str();
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--samples", c.samples, "Occupation samples")->capture_default_str();
  app.add_option("--horizon", c.horizon, "Occupation sampling time")->capture_default_str();
  app.add_option("--only", c.only, "Run only these properties")->delimiter(',');
  app.add_option("--break", c.broken, "Inject a fault into a property (qv, generator, martingale)")
      ->delimiter(',');
  app.add_option("--qv-paths,--qv_paths", c.qv_paths)->capture_default_str();
  app.add_option("--generator-paths,--generator_paths", c.generator_paths)->capture_default_str();
  app.add_option("--invariance-paths,--invariance_paths", c.invariance_paths)
      ->capture_default_str();
  app.add_option("--martingale-paths,--martingale_paths", c.martingale_paths)
      ->capture_default_str();
  app.add_option("--equivalence-paths,--equivalence_paths", c.equivalence_paths)
      ->capture_default_str();

  CLI::App* simulate = app.add_subcommand("simulate", "Write paths.csv and meta.txt");
  CLI::App* density = app.add_subcommand("density", "Solve for the torus harmonic density");
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  try {
    validate(c);
    if (simulate->parsed()) return cmd_simulate(c);
    if (density->parsed()) return cmd_density(c);
    if (verify_cmd->parsed()) return cmd_verify(c);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
