// Command-line front end. Talks to the library exclusively through the
// shared C API in heatmass/heatmass.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heatmass/heatmass.h"

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void die(const std::string& msg, int code = 1) {
  std::cerr << "heatmass: " << msg << "\n";
  std::exit(code);
}

void check(hm_status st, const std::string& what) {
  if (st != HM_OK) die(what + ": " + hm_last_error());
}

struct RunConfig {
  hm_case bc = HM_DIRICHLET;
  double T = 0.5;
  int N = 10;
  int mesh_n = 256;
  double dt = 2.5e-4;
  hm_scheme scheme = HM_CRANK_NICOLSON;
  hm_precision precision = HM_PREC_DOUBLE;
  unsigned seed = 20240601;
  std::string output_dir = ".";
};

// `key = value` lines; '#' starts a comment; unknown keys are rejected.
void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) die("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) die("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "case") {
        if (value == "dirichlet") cfg.bc = HM_DIRICHLET;
        else if (value == "neumann") cfg.bc = HM_NEUMANN;
        else die("config: bad case '" + value + "'");
      } else if (key == "T") cfg.T = std::stod(value);
      else if (key == "N") cfg.N = std::stoi(value);
      else if (key == "mesh_n") cfg.mesh_n = std::stoi(value);
      else if (key == "dt") cfg.dt = std::stod(value);
      else if (key == "scheme") {
        if (value == "backward-euler") cfg.scheme = HM_BACKWARD_EULER;
        else if (value == "crank-nicolson") cfg.scheme = HM_CRANK_NICOLSON;
        else die("config: bad scheme '" + value + "'");
      } else if (key == "precision") {
        if (value == "double") cfg.precision = HM_PREC_DOUBLE;
        else if (value == "extended") cfg.precision = HM_PREC_EXTENDED;
        else die("config: bad precision '" + value + "'");
      } else if (key == "seed") cfg.seed = static_cast<unsigned>(std::stoul(value));
      else if (key == "output_dir") cfg.output_dir = value;
      else die("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      die("config: bad value for key '" + key + "'");
    }
  }
}

// "1:1.0,2:0.5" -> [(1, 1.0), (2, 0.5)]
void parse_modes(const std::string& spec, std::vector<int>& idx, std::vector<double>& coeff) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) die("bad mode entry '" + item + "'; expected n:coeff");
    idx.push_back(std::stoi(item.substr(0, colon)));
    coeff.push_back(std::stod(item.substr(colon + 1)));
  }
}

hm_state* make_initial_state(const RunConfig& cfg, const std::string& modes,
                             const std::string& state_csv) {
  if (!state_csv.empty()) {
    hm_state* y = nullptr;
    check(hm_state_read_csv(state_csv.c_str(), &y), "state load");
    return y;
  }
  std::vector<int> idx;
  std::vector<double> coeff;
  parse_modes(modes, idx, coeff);
  hm_state* y = nullptr;
  check(hm_state_from_modes(cfg.bc, static_cast<int>(idx.size()), idx.data(), coeff.data(),
                            cfg.mesh_n, &y),
        "initial state");
  return y;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::ofstream os(out_path(cfg, name));
  if (!os) die("cannot write '" + name + "' under " + cfg.output_dir);
  return os;
}

int cmd_spectrum(const RunConfig& cfg, int n_max, const std::string& format) {
  hm_spectrum* sp = nullptr;
  check(hm_spectrum_create(cfg.bc, n_max, &sp), "spectrum");
  if (format == "csv") {
    check(hm_spectrum_write_csv(sp, out_path(cfg, "spectrum.csv").c_str()), "spectrum csv");
  } else if (format == "json") {
    check(hm_spectrum_write_json(sp, out_path(cfg, "spectrum.json").c_str()), "spectrum json");
  } else {
    die("unknown format '" + format + "'");
  }
  hm_spectrum_destroy(sp);
  return 0;
}

int cmd_control(const RunConfig& cfg, const std::string& modes, const std::string& state_csv,
                int sample_n) {
  hm_state* y0 = make_initial_state(cfg, modes, state_csv);
  hm_control* ctl = nullptr;
  const hm_status st =
      hm_control_synthesize(cfg.bc, y0, cfg.T, cfg.N, cfg.precision, sample_n, &ctl);
  if (st == HM_ECOND) {
    std::cerr << "heatmass: conditioning advisory: " << hm_last_error() << "\n";
    hm_state_destroy(y0);
    return 3;
  }
  check(st, "control synthesis");

  hm_control_info info;
  check(hm_control_info_get(ctl, &info), "control info");
  check(hm_control_write_csv(ctl, out_path(cfg, "control.csv").c_str()), "control csv");
  {
    auto os = open_out(cfg, "control.json");
    os << hm_control_json(ctl, cfg.bc);
  }
  std::cout << "condition estimate: " << fmt17(info.condition)
            << (info.degraded ? " (degraded)" : "") << "\n"
            << "max moment residual: " << fmt17(info.max_residual) << "\n"
            << "control L2 norm: " << fmt17(info.l2_norm) << "\n";
  hm_control_destroy(ctl);
  hm_state_destroy(y0);
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& modes, const std::string& state_csv,
               int syn_n, bool flip_b, bool dump_traj) {
  hm_state* y0 = make_initial_state(cfg, modes, state_csv);
  hm_verify_opts opts;
  hm_verify_opts_default(&opts);
  opts.T = cfg.T;
  opts.N = cfg.N;
  opts.syn_n = syn_n;
  opts.mesh_n = cfg.mesh_n;
  opts.dt = cfg.dt;
  opts.scheme = cfg.scheme;
  opts.precision = cfg.precision;
  opts.seed = cfg.seed;
  opts.flip_b_sign = flip_b ? 1 : 0;

  hm_report* rep = nullptr;
  const hm_status st = hm_verify_run(cfg.bc, y0, &opts, &rep);
  if (st == HM_ECOND) {
    std::cerr << "heatmass: conditioning advisory: " << hm_last_error() << "\n";
    hm_state_destroy(y0);
    return 3;
  }
  check(st, "verify");

  const auto path = fs::path(cfg.output_dir) / "report.json";
  {
    auto os = open_out(cfg, "report.json");
    os << hm_report_json(rep);
  }
  double initial = 0, fd = 0, modal = 0, gap = 0, cnorm = 0;
  hm_report_value(rep, "initial_norm", &initial);
  hm_report_value(rep, "final_norm_fd", &fd);
  hm_report_value(rep, "max_final_modal", &modal);
  hm_report_value(rep, "duality_gap", &gap);
  hm_report_value(rep, "control_norm", &cnorm);
  const bool pass = hm_report_pass(rep) != 0;
  std::cout << "initial H-norm:        " << fmt17(initial) << "\n"
            << "final H-norm (FD):     " << fmt17(fd) << "  (rel "
            << fmt17(initial > 0 ? fd / initial : 0.0) << ")\n"
            << "max |final modal|:     " << fmt17(modal) << "\n"
            << "duality gap:           " << fmt17(gap) << "\n"
            << "control L2 norm:       " << fmt17(cnorm) << "\n"
            << "report: " << path.string() << "\n"
            << (pass ? "PASS" : "FAIL") << "\n";

  if (dump_traj) {
    hm_control* ctl = nullptr;
    check(hm_control_synthesize(cfg.bc, y0, cfg.T, syn_n > 0 ? syn_n : cfg.N, cfg.precision,
                                4001, &ctl),
          "control synthesis");
    hm_trajectory* traj = nullptr;
    check(hm_trajectory_run(cfg.bc, y0, ctl, cfg.mesh_n, cfg.dt, cfg.scheme, cfg.T, &traj),
          "trajectory");
    check(hm_trajectory_write_csv(traj, out_path(cfg, "trajectory.csv").c_str()),
          "trajectory csv");
    hm_trajectory_destroy(traj);
    hm_control_destroy(ctl);
  }
  hm_report_destroy(rep);
  hm_state_destroy(y0);
  return pass ? 0 : 1;
}

int cmd_epsilon(const RunConfig& cfg, const std::string& modes, const std::string& state_csv,
                const std::vector<double>& eps_list, double t_star) {
  if (eps_list.empty()) die("epsilon: need at least one --eps value");
  hm_state* y0 = make_initial_state(cfg, modes, state_csv);
  auto os = open_out(cfg, "epsilon.csv");
  os << "eps,t_star,error_H\n";
  std::vector<double> errors;
  for (double eps : eps_list) {
    double err = 0.0;
    check(hm_epsilon_error(y0, eps, cfg.mesh_n, cfg.dt, cfg.scheme, t_star, &err),
          "epsilon solve");
    errors.push_back(err);
    os << fmt17(eps) << ',' << fmt17(t_star) << ',' << fmt17(err) << '\n';
    std::cout << "eps=" << eps << "  error_H=" << fmt17(err) << "\n";
  }
  if (errors.size() >= 2) {
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
      if (!(errors[i + 1] < errors[i])) decreasing = false;
    }
    std::cout << "trend: " << (decreasing ? "decreasing" : "not monotone") << "\n";
  }
  hm_state_destroy(y0);
  return 0;
}

}  // namespace

struct CommonOptionSet {
  CLI::Option* case_opt = nullptr;
  CLI::Option* T = nullptr;
  CLI::Option* N = nullptr;
  CLI::Option* mesh = nullptr;
  CLI::Option* dt = nullptr;
  CLI::Option* scheme = nullptr;
  CLI::Option* precision = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
};

int main(int argc, char** argv) {
  CLI::App app{"Boundary null control of a two-rod heat system with an internal point mass"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_file, case_name = "dirichlet", scheme_name = "crank-nicolson",
              precision_name = "double", out_dir = ".";
  double T_val = 0.5, dt_val = 2.5e-4;
  int N_val = 10, mesh_val = 256;
  unsigned seed_val = 20240601;

  std::map<const CLI::App*, CommonOptionSet> common;
  auto add_common = [&](CLI::App* sub) {
    CommonOptionSet o;
    sub->add_option("--config", config_file, "key = value config file; flags override");
    o.case_opt = sub->add_option("--case", case_name, "dirichlet|neumann");
    o.T = sub->add_option("--T", T_val, "control horizon");
    o.N = sub->add_option("--N", N_val, "mode truncation");
    o.mesh = sub->add_option("--mesh-n", mesh_val, "grid points per unit interval");
    o.dt = sub->add_option("--dt", dt_val, "time step");
    o.scheme = sub->add_option("--scheme", scheme_name, "backward-euler|crank-nicolson");
    o.precision = sub->add_option("--precision", precision_name, "double|extended");
    o.seed = sub->add_option("--seed", seed_val, "seed for randomized diagnostics");
    o.out = sub->add_option("--out", out_dir, "output directory");
    common[sub] = o;
  };

  auto* sp = app.add_subcommand("spectrum", "eigenvalue/eigenvector table");
  int n_max = 20;
  std::string format = "csv";
  sp->add_option("--n-max", n_max, "number of modes");
  sp->add_option("--format", format, "csv|json");
  add_common(sp);

  auto* ctl = app.add_subcommand("control", "synthesize a null control");
  std::string modes = "1:1.0", state_csv;
  int sample_n = 2001;
  ctl->add_option("--modes", modes, "initial data as n:coeff,...");
  ctl->add_option("--state-csv", state_csv, "initial data as a state CSV file");
  ctl->add_option("--samples", sample_n, "number of output samples");
  add_common(ctl);

  auto* vf = app.add_subcommand("verify", "synthesize, simulate, and report");
  int syn_n = 0;
  bool flip_b = false, dump_traj = false;
  vf->add_option("--modes", modes, "initial data as n:coeff,...");
  vf->add_option("--state-csv", state_csv, "initial data as a state CSV file");
  vf->add_option("--syn-n", syn_n, "synthesis truncation (defaults to N)");
  vf->add_flag("--debug-flip-b-sign", flip_b, "sabotage the input coefficients (debug)");
  vf->add_flag("--dump-trajectory", dump_traj, "also write trajectory.csv");
  add_common(vf);

  auto* ep = app.add_subcommand("epsilon", "density-approximation error sweep");
  std::vector<double> eps_list;
  double t_star = 0.1;
  ep->add_option("--eps", eps_list, "epsilon values")->delimiter(',');
  ep->add_option("--t-star", t_star, "comparison time");
  ep->add_option("--modes", modes, "initial data as n:coeff,...");
  ep->add_option("--state-csv", state_csv, "initial data as a state CSV file");
  add_common(ep);

  CLI11_PARSE(app, argc, argv);

  const CLI::App* active = app.get_subcommands().front();
  if (!config_file.empty()) apply_config_file(config_file, cfg);
  // explicitly given flags override the config file
  const auto& o = common.at(active);
  if (o.T->count()) cfg.T = T_val;
  if (o.N->count()) cfg.N = N_val;
  if (o.mesh->count()) cfg.mesh_n = mesh_val;
  if (o.dt->count()) cfg.dt = dt_val;
  if (o.seed->count()) cfg.seed = seed_val;
  if (o.out->count()) cfg.output_dir = out_dir;
  if (o.case_opt->count()) {
    if (case_name == "dirichlet") cfg.bc = HM_DIRICHLET;
    else if (case_name == "neumann") cfg.bc = HM_NEUMANN;
    else die("bad --case '" + case_name + "'");
  }
  if (o.scheme->count()) {
    if (scheme_name == "backward-euler") cfg.scheme = HM_BACKWARD_EULER;
    else if (scheme_name == "crank-nicolson") cfg.scheme = HM_CRANK_NICOLSON;
    else die("bad --scheme '" + scheme_name + "'");
  }
  if (o.precision->count()) {
    if (precision_name == "double") cfg.precision = HM_PREC_DOUBLE;
    else if (precision_name == "extended") cfg.precision = HM_PREC_EXTENDED;
    else die("bad --precision '" + precision_name + "'");
  }

  if (sp->parsed()) return cmd_spectrum(cfg, n_max, format);
  if (ctl->parsed()) return cmd_control(cfg, modes, state_csv, sample_n);
  if (vf->parsed()) return cmd_verify(cfg, modes, state_csv, syn_n, flip_b, dump_traj);
  if (ep->parsed()) return cmd_epsilon(cfg, modes, state_csv, eps_list, t_star);
  return 1;
}
