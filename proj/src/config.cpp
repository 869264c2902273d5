#include "lfe/config.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "lfe/bm_solver.hpp"
#include "lfe/moreau.hpp"
#include "lfe/orbit_search.hpp"
#include "lfe/potentials.hpp"
#include "lfe/rng.hpp"
#include "lfe/trajectory.hpp"

namespace lfe {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string &s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string &key, const std::string &v) {
  size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (...) {
    throw config_error("bad number for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw config_error("bad number for " + key + ": '" + v + "'");
  return x;
}

int to_int(const std::string &key, const std::string &v) {
  size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (...) {
    throw config_error("bad integer for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw config_error("bad integer for " + key + ": '" + v + "'");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string &key, const std::string &v) {
  size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &pos);
  } catch (...) {
    throw config_error("bad seed for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw config_error("bad seed for " + key + ": '" + v + "'");
  return x;
}

std::vector<double> to_list(const std::string &key, const std::string &v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw config_error("empty entry in list for " + key);
    out.push_back(to_double(key, item));
  }
  if (out.empty()) throw config_error("empty list for " + key);
  return out;
}

} // namespace

void apply_config_kv(run_config &cfg, const std::string &key, const std::string &value) {
  if (key == "electric") cfg.electric = value;
  else if (key == "lambda") cfg.lambda = to_double(key, value);
  else if (key == "magnetic") cfg.magnetic = value;
  else if (key == "kappa") cfg.kappa = to_double(key, value);
  else if (key == "m") cfg.m = to_int(key, value);
  else if (key == "r") cfg.r = to_double(key, value);
  else if (key == "lambda_grid") cfg.lambda_grid = to_list(key, value);
  else if (key == "nodes") cfg.nodes = to_int(key, value);
  else if (key == "verify_nodes") cfg.verify_nodes = to_int(key, value);
  else if (key == "epsilon") cfg.epsilon = to_double(key, value);
  else if (key == "tol_crit") cfg.tol_crit = to_double(key, value);
  else if (key == "inner_tol") cfg.inner_tol = to_double(key, value);
  else if (key == "tol_ode") cfg.tol_ode = to_double(key, value);
  else if (key == "sep_tol") cfg.sep_tol = to_double(key, value);
  else if (key == "seed") cfg.seed = to_u64(key, value);
  else if (key == "starts") cfg.starts = to_int(key, value);
  else if (key == "battery") cfg.battery = to_int(key, value);
  else if (key == "negativity_samples") cfg.negativity_samples = to_int(key, value);
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "trajectory") cfg.trajectory_path = value;
  else if (key == "forcing") cfg.forcing_path = value;
  else if (key == "subproblem_tol") cfg.subproblem_tol = to_double(key, value);
  else throw config_error("unknown config key: " + key);
}

void load_config_file(run_config &cfg, const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  cfg.config_text = buf.str();

  std::istringstream lines(cfg.config_text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw config_error(path + ":" + std::to_string(lineno) + ": empty key");
    apply_config_kv(cfg, key, value);
  }
}

void validate_config(const run_config &cfg) {
  if (cfg.command != "solve" && cfg.command != "sweep" && cfg.command != "verify" &&
      cfg.command != "lemmas" && cfg.command != "subproblem")
    throw config_error("unknown command: '" + cfg.command + "'");
  if (cfg.electric != "arctan")
    throw config_error("unknown electric potential: " + cfg.electric);
  if (cfg.magnetic != "none" && cfg.magnetic != "sine")
    throw config_error("unknown magnetic potential: " + cfg.magnetic);
  if (!(cfg.lambda > 0)) throw config_error("lambda must be positive");
  if (cfg.kappa < 0) throw config_error("kappa must be nonnegative");
  if (cfg.m < 1) throw config_error("m must be at least 1");
  if (!(cfg.r > 0) || !(cfg.r < 1)) throw config_error("need 0 < r < 1");
  for (double l : cfg.lambda_grid)
    if (!(l > 0)) throw config_error("lambda_grid entries must be positive");
  if (cfg.nodes < 8) throw config_error("nodes must be at least 8");
  if (cfg.verify_nodes < cfg.nodes) throw config_error("verify_nodes must be >= nodes");
  if (cfg.epsilon < 0) throw config_error("epsilon must be nonnegative");
  if (!(cfg.tol_crit > 0) || !(cfg.inner_tol > 0) || !(cfg.tol_ode > 0) ||
      !(cfg.sep_tol > 0) || !(cfg.subproblem_tol > 0))
    throw config_error("tolerances must be positive");
  if (cfg.starts < 0) throw config_error("starts must be nonnegative");
  if (cfg.battery < 1) throw config_error("battery must be positive");
  if (cfg.negativity_samples < 1) throw config_error("negativity_samples must be positive");
}

namespace {

electric_potential electric_of(const run_config &, double lambda) {
  // validate_config has already pinned the name down to the supported one
  return make_arctan_potential(lambda);
}

magnetic_potential magnetic_of(const run_config &cfg) {
  if (cfg.magnetic == "sine" && cfg.kappa > 0) return make_sine_magnetic(cfg.kappa);
  return make_zero_magnetic();
}

search_options options_of(const run_config &cfg) {
  search_options o;
  o.node_count = cfg.nodes;
  o.verify_nodes = cfg.verify_nodes;
  o.tol_crit = cfg.tol_crit;
  o.inner_tol = cfg.inner_tol;
  o.tol_ode = cfg.tol_ode;
  o.sep_tol = cfg.sep_tol;
  o.epsilon_override = cfg.epsilon;
  return o;
}

convexity_budget budget_of(const run_config &cfg, const electric_potential &V,
                           const magnetic_potential &W) {
  convexity_budget b = alpha_bound(V, W);
  if (cfg.epsilon > 0) {
    if (cfg.epsilon * b.alpha >= 1.0)
      throw config_error("epsilon violates epsilon * alpha < 1");
    b.epsilon = cfg.epsilon;
  }
  return b;
}

json config_json(const run_config &cfg) {
  json j;
  j["command"] = cfg.command;
  j["electric"] = cfg.electric;
  j["lambda"] = cfg.lambda;
  j["magnetic"] = cfg.magnetic;
  j["kappa"] = cfg.kappa;
  j["m"] = cfg.m;
  j["r"] = cfg.r;
  j["lambda_grid"] = cfg.lambda_grid;
  j["nodes"] = cfg.nodes;
  j["verify_nodes"] = cfg.verify_nodes;
  j["epsilon"] = cfg.epsilon;
  j["tol_crit"] = cfg.tol_crit;
  j["inner_tol"] = cfg.inner_tol;
  j["tol_ode"] = cfg.tol_ode;
  j["sep_tol"] = cfg.sep_tol;
  j["seed"] = cfg.seed;
  j["starts"] = cfg.starts;
  j["battery"] = cfg.battery;
  j["negativity_samples"] = cfg.negativity_samples;
  j["trajectory"] = cfg.trajectory_path;
  j["forcing"] = cfg.forcing_path;
  j["subproblem_tol"] = cfg.subproblem_tol;
  return j;
}

json lambda_json(const lambda_estimate &est) {
  json j;
  j["value"] = est.value;
  j["unsquared"] = est.unsquared;
  j["conservative"] = est.conservative;
  j["gamma_hat"] = est.gamma_hat;
  j["warnings"] = est.warnings;
  return j;
}

json negativity_json(const negativity_report &rep) {
  json j;
  j["samples"] = rep.samples;
  j["violations"] = rep.violations;
  j["worst_value"] = rep.worst_value;
  j["bound"] = rep.bound;
  j["margin"] = rep.margin;
  j["warnings"] = rep.warnings;
  return j;
}

json orbit_json(const critical_orbit &orb, const std::string &csv_name) {
  json j;
  j["start"] = tag_string(orb.tag);
  j["level"] = orb.level;
  j["grad_norm"] = orb.grad_norm;
  j["vi_residual"] = orb.vi_res;
  j["ode_residual"] = orb.ode_res;
  j["shooting_defect"] = orb.shooting;
  j["minimal_period_divisor"] = orb.minimal_period_divisor;
  j["nodes"] = orb.representative.n();
  j["csv"] = csv_name;
  return j;
}

json set_json(const orbit_set &set, const std::string &out, const std::string &prefix) {
  json j;
  j["m"] = set.m;
  j["lambda"] = set.lambda;
  j["r"] = set.r;
  j["dim_zm"] = set.dim_zm;
  j["boundary_index"] = set.boundary_index;
  j["omega"] = set.omega;
  j["lambda_m"] = lambda_json(set.lambda_m);
  j["orbit_count"] = static_cast<int>(set.orbits.size());
  json orbits = json::array();
  for (size_t i = 0; i < set.orbits.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%sorbit_%03d.csv", prefix.c_str(), static_cast<int>(i));
    write_trajectory_csv(out + "/" + name, set.orbits[i].representative);
    orbits.push_back(orbit_json(set.orbits[i], name));
  }
  j["orbits"] = orbits;
  j["start_log"] = set.start_log;
  return j;
}

int run_solve(const run_config &cfg, json &report, const std::string &out) {
  electric_potential V = electric_of(cfg, cfg.lambda);
  magnetic_potential W = magnetic_of(cfg);
  orbit_set set = multi_start(cfg.m, cfg.r, V, W, cfg.starts, cfg.seed, options_of(cfg));
  report["solve"] = set_json(set, out, "");
  return 0;
}

int run_sweep(const run_config &cfg, json &report, const std::string &out) {
  if (cfg.lambda_grid.empty()) throw config_error("sweep requires lambda_grid");
  magnetic_potential W = magnetic_of(cfg);
  std::FILE *fp = std::fopen((out + "/sweep.csv").c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot write " + out + "/sweep.csv");
  std::fprintf(fp, "lambda,orbit_count,min_level,lambda_m,negativity_margin\n");
  json cells = json::array();
  for (size_t ci = 0; ci < cfg.lambda_grid.size(); ++ci) {
    double lam = cfg.lambda_grid[ci];
    electric_potential V = electric_of(cfg, lam);
    std::uint64_t cell_seed = rng::mix(cfg.seed, 0xce110000ull + ci);
    orbit_set set = multi_start(cfg.m, cfg.r, V, W, cfg.starts, cell_seed, options_of(cfg));
    negativity_report neg =
        verify_negativity(cfg.m, cfg.r, V, W, cfg.negativity_samples, cell_seed, cfg.nodes);
    double min_level =
        set.orbits.empty() ? std::numeric_limits<double>::quiet_NaN() : set.orbits.front().level;
    std::fprintf(fp, "%.17g,%d,%.17g,%.17g,%.17g\n", lam, static_cast<int>(set.orbits.size()),
                 min_level, set.lambda_m.value, neg.margin);
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "cell%02d_", static_cast<int>(ci));
    json cell = set_json(set, out, prefix);
    cell["negativity"] = negativity_json(neg);
    cells.push_back(cell);
  }
  std::fclose(fp);
  report["sweep"] = cells;
  report["sweep_csv"] = "sweep.csv";
  return 0;
}

int run_verify(const run_config &cfg, json &report) {
  if (cfg.trajectory_path.empty()) throw config_error("verify requires trajectory=<csv>");
  periodic_trajectory q = read_trajectory_csv(cfg.trajectory_path);
  electric_potential V = electric_of(cfg, cfg.lambda);
  magnetic_potential W = magnetic_of(cfg);
  convexity_budget budget = budget_of(cfg, V, W);
  search_options opt = options_of(cfg);
  rng gen(rng::mix(cfg.seed, 0xfe12u));
  candidate_assessment a = assess_candidate(q, V, W, budget, opt, gen);
  std::string bad = gate_failure(a, opt);
  json j;
  j["nodes"] = q.n();
  j["level"] = a.level;
  j["grad_norm"] = a.grad_norm;
  j["vi_residual"] = a.vi_res;
  j["ode_residual"] = a.ode_res;
  j["shooting_defect"] = a.shooting;
  j["sup_speed"] = a.speed;
  j["fixed_point"] = a.fixed_point;
  j["cap_active"] = a.cap_active;
  j["prox_converged"] = a.prox_converged;
  j["pass"] = bad.empty();
  j["failure"] = bad;
  report["verify"] = j;
  return bad.empty() ? 0 : 2;
}

int run_lemmas(const run_config &cfg, json &report) {
  electric_potential V = electric_of(cfg, cfg.lambda);
  magnetic_potential W = magnetic_of(cfg);
  convexity_budget budget = budget_of(cfg, V, W);
  json battery = json::array();
  bool all = true;
  for (int i = 0; i < cfg.battery; ++i) {
    rng gen(rng::mix(cfg.seed, 0x1e33a500ull + static_cast<std::uint64_t>(i)));
    double speed = gen.uniform(0.2, 0.8);
    periodic_trajectory q = random_feasible_trajectory(cfg.nodes, speed, gen);
    el_report rep = check_el_properties(q, V, W, budget, 1e-5, cfg.inner_tol, gen);
    json row;
    row["index"] = i;
    row["target_speed"] = speed;
    json checks = json::array();
    for (const auto &c : rep.checks) {
      json cj;
      cj["name"] = c.name;
      cj["worst"] = c.worst;
      cj["threshold"] = c.threshold;
      cj["ok"] = c.ok;
      checks.push_back(cj);
    }
    row["checks"] = checks;
    row["all_ok"] = rep.all_ok();
    all = all && rep.all_ok();
    battery.push_back(row);
  }
  json j;
  j["epsilon"] = budget.epsilon;
  j["alpha"] = budget.alpha;
  j["battery"] = battery;
  j["all_ok"] = all;
  report["lemmas"] = j;
  return all ? 0 : 2;
}

int run_subproblem(const run_config &cfg, json &report, const std::string &out) {
  if (cfg.forcing_path.empty()) throw config_error("subproblem requires forcing=<csv>");
  periodic_trajectory raw = read_trajectory_csv(cfg.forcing_path);
  forcing f(static_cast<size_t>(cfg.nodes));
  if (raw.n() == cfg.nodes) {
    for (int i = 0; i < cfg.nodes; ++i) f[static_cast<size_t>(i)] = raw.node[static_cast<size_t>(i)];
  } else {
    // piecewise-linear resample onto the requested grid
    for (int i = 0; i < cfg.nodes; ++i)
      f[static_cast<size_t>(i)] = raw.eval(two_pi * i / cfg.nodes);
  }
  subproblem_solution sol = solve_subproblem(f, cfg.subproblem_tol);
  write_trajectory_csv(out + "/subproblem_solution.csv", sol.q_f);
  json j;
  j["converged"] = sol.converged;
  j["newton_iterations"] = sol.newton_iterations;
  j["final_residual"] = sol.final_residual;
  j["mean_check"] = sol.mean_check;
  j["ode_residual"] = sol.ode_residual;
  j["p0"] = {sol.p0.x, sol.p0.y, sol.p0.z};
  j["csv"] = "subproblem_solution.csv";
  report["subproblem"] = j;
  return sol.converged ? 0 : 2;
}

} // namespace

int run(const run_config &cfg) {
  auto t0 = std::chrono::steady_clock::now();
  json report;
  try {
    validate_config(cfg);
  } catch (const config_error &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
  std::string out = cfg.out_dir.empty() ? std::string(".") : cfg.out_dir;
  report["command"] = cfg.command;
  report["config"] = config_json(cfg);
  report["config_text"] = cfg.config_text;
  report["format"] = 1;
  int rc = 0;
  try {
    std::filesystem::create_directories(out);
    if (cfg.command == "solve") rc = run_solve(cfg, report, out);
    else if (cfg.command == "sweep") rc = run_sweep(cfg, report, out);
    else if (cfg.command == "verify") rc = run_verify(cfg, report);
    else if (cfg.command == "lemmas") rc = run_lemmas(cfg, report);
    else rc = run_subproblem(cfg, report, out);
  } catch (const config_error &e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  {
    std::ofstream f(out + "/report.json", std::ios::binary);
    f << report.dump(2) << "\n";
  }
  // wall clock lives in a sidecar so report.json stays byte-reproducible
  {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json t;
    t["command"] = cfg.command;
    t["seconds"] = secs;
    std::ofstream f(out + "/timings.json", std::ios::binary);
    f << t.dump(2) << "\n";
  }
  return rc;
}

} // namespace lfe
