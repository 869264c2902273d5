#pragma once

// batch driver: config parsing, command dispatch, deterministic report files

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lfe {

struct run_config {
  std::string command; // solve | sweep | verify | lemmas | subproblem

  std::string electric = "arctan";
  double lambda = 50.0;
  std::string magnetic = "none"; // none | sine
  double kappa = 0.0;

  int m = 1;
  double r = 0.5;
  std::vector<double> lambda_grid; // sweep cells

  int nodes = 256;
  int verify_nodes = 16384;
  double epsilon = 0.0; // 0 selects the default 0.5 / alpha

  double tol_crit = 1e-7;
  double inner_tol = 1e-10;
  double tol_ode = 1e-6;
  double sep_tol = 1e-2;

  std::uint64_t seed = 42;
  int starts = 9;              // random starts added to the structured ones
  int battery = 12;            // lemmas: number of random base points
  int negativity_samples = 200; // sweep: boundary samples per cell

  std::string out_dir = ".";
  std::string trajectory_path; // verify input CSV
  std::string forcing_path;    // subproblem input CSV
  double subproblem_tol = 1e-10;

  // raw bytes of the config file, echoed verbatim into report.json
  std::string config_text;
};

// malformed value or unknown key; the driver maps this to exit code 1
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// one `key = value` assignment, shared by the file loader and flag overrides
void apply_config_kv(run_config &cfg, const std::string &key, const std::string &value);

// line oriented `key = value` file, '#' comments and blank lines allowed;
// stores the raw bytes in cfg.config_text
void load_config_file(run_config &cfg, const std::string &path);

void validate_config(const run_config &cfg);

// executes cfg.command, writes report.json (content deterministic for a fixed
// config) and timings.json (wall clock sidecar) plus any CSV outputs into
// cfg.out_dir; returns 0 on success, 2 when a verification gate fails, 1 on
// usage errors
int run(const run_config &cfg);

} // namespace lfe
