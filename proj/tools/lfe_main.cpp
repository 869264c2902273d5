#include <string>

#include "CLI11.hpp"
#include "lfe/config.hpp"

namespace {

struct flag_state {
  std::string config_path;
  std::string lambda_grid;
};

void add_common(CLI::App *cmd, lfe::run_config &cfg, flag_state &fs) {
  cmd->add_option("--config", fs.config_path, "key = value config file (flags override it)");
  cmd->add_option("--electric", cfg.electric, "electric potential family (arctan)");
  cmd->add_option("--lambda", cfg.lambda, "electric potential strength");
  cmd->add_option("--magnetic", cfg.magnetic, "magnetic potential family (none|sine)");
  cmd->add_option("--kappa", cfg.kappa, "magnetic potential strength");
  cmd->add_option("--epsilon", cfg.epsilon, "regularization width, 0 = default 0.5/alpha");
  cmd->add_option("--nodes", cfg.nodes, "discretization nodes");
  cmd->add_option("--seed", cfg.seed, "seed of the run's random generator");
  cmd->add_option("--out", cfg.out_dir, "output directory");
}

void add_search(CLI::App *cmd, lfe::run_config &cfg) {
  cmd->add_option("--m", cfg.m, "Fourier subspace order");
  cmd->add_option("--r", cfg.r, "subspace disk radius");
  cmd->add_option("--verify-nodes", cfg.verify_nodes, "verification resolution");
  cmd->add_option("--tol-crit", cfg.tol_crit, "criticality gate on the gradient norm");
  cmd->add_option("--inner-tol", cfg.inner_tol, "proximal subproblem tolerance");
  cmd->add_option("--tol-ode", cfg.tol_ode, "spectral equation-residual gate");
  cmd->add_option("--sep-tol", cfg.sep_tol, "orbit distance below which orbits merge");
  cmd->add_option("--starts", cfg.starts, "random starts added to the structured ones");
}

} // namespace

int main(int argc, char **argv) {
  lfe::run_config cfg;
  flag_state fs;

  CLI::App app{"periodic orbits of a charged relativistic particle via a "
               "regularized least-action search"};
  app.require_subcommand(1);

  CLI::App *solve = app.add_subcommand("solve", "multi-start search for critical orbits");
  add_common(solve, cfg, fs);
  add_search(solve, cfg);

  CLI::App *sweep = app.add_subcommand("sweep", "orbit search over a grid of lambda values");
  add_common(sweep, cfg, fs);
  add_search(sweep, cfg);
  sweep->add_option("--lambda-grid", fs.lambda_grid, "comma separated lambda values");
  sweep->add_option("--negativity-samples", cfg.negativity_samples,
                    "boundary samples per sweep cell");

  CLI::App *verify = app.add_subcommand("verify", "run the full gate battery on a trajectory CSV");
  add_common(verify, cfg, fs);
  verify->add_option("--trajectory", cfg.trajectory_path, "trajectory CSV to verify")
      ->required();
  verify->add_option("--tol-crit", cfg.tol_crit, "criticality gate on the gradient norm");
  verify->add_option("--inner-tol", cfg.inner_tol, "proximal subproblem tolerance");
  verify->add_option("--tol-ode", cfg.tol_ode, "spectral equation-residual gate");

  CLI::App *lemmas = app.add_subcommand("lemmas", "regularization property battery at random points");
  add_common(lemmas, cfg, fs);
  lemmas->add_option("--battery", cfg.battery, "number of random base points");
  lemmas->add_option("--inner-tol", cfg.inner_tol, "proximal subproblem tolerance");

  CLI::App *sub = app.add_subcommand("subproblem", "forced mean-coupled solve from a forcing CSV");
  add_common(sub, cfg, fs);
  sub->add_option("--forcing", cfg.forcing_path, "forcing CSV (t,f1,f2,f3 rows)")->required();
  sub->add_option("--subproblem-tol", cfg.subproblem_tol, "Newton residual target");

  // the config file must land before flag values, so flags win; find it first
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    if (!path.empty()) {
      try {
        lfe::load_config_file(cfg, path);
      } catch (const lfe::config_error &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (solve->parsed()) cfg.command = "solve";
  else if (sweep->parsed()) cfg.command = "sweep";
  else if (verify->parsed()) cfg.command = "verify";
  else if (lemmas->parsed()) cfg.command = "lemmas";
  else if (sub->parsed()) cfg.command = "subproblem";

  if (!fs.lambda_grid.empty()) {
    try {
      lfe::apply_config_kv(cfg, "lambda_grid", fs.lambda_grid);
    } catch (const lfe::config_error &e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 1;
    }
  }

  return lfe::run(cfg);
}
