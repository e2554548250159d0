// dickesim: run | sweep | analyze | figures
//
// Config comes from a key=value file (--config) with per-flag overrides;
// flags mirror the ExperimentConfig field names. DICKESIM_WORKERS in the
// environment overrides the worker count without touching any output byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dickesim/experiment.hpp"

namespace {

using dicke::ExperimentConfig;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not a number: '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

void set_config(ExperimentConfig& c, const std::string& key,
                const std::string& value) {
  auto dlist = [&] {
    std::vector<double> out;
    for (const auto& tok : split_list(value)) out.push_back(parse_double(key, tok));
    return out;
  };
  if (key == "model") {
    c.model = value;
  } else if (key == "unraveling") {
    c.unraveling = value;
  } else if (key == "n_spins") {
    c.n_spins.clear();
    for (const auto& tok : split_list(value))
      c.n_spins.push_back(int(parse_int(key, tok)));
  } else if (key == "omega0_over_kappa") {
    c.omega0_over_kappa = dlist();
  } else if (key == "omega_z_over_kappa") {
    c.omega_z_over_kappa = parse_double(key, value);
  } else if (key == "alpha") {
    c.alpha = dlist();
  } else if (key == "eta") {
    c.eta = dlist();
  } else if (key == "dt") {
    c.dt = parse_double(key, value);
  } else if (key == "t_final") {
    c.t_final = parse_double(key, value);
  } else if (key == "window") {
    c.window = parse_double(key, value);
  } else if (key == "n_trajectories") {
    c.n_trajectories = int(parse_int(key, value));
  } else if (key == "master_seed") {
    c.master_seed = std::uint64_t(parse_int(key, value));
  } else if (key == "sample_every") {
    c.sample_every = parse_double(key, value);
  } else if (key == "record_entropy") {
    c.record_entropy = parse_bool(key, value);
  } else if (key == "record_qfi") {
    c.record_qfi = parse_bool(key, value);
  } else if (key == "record_trajectories") {
    c.record_trajectories = parse_bool(key, value);
  } else if (key == "initial_state") {
    c.initial_state = value;
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "workers") {
    c.workers = int(parse_int(key, value));
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

void load_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string trimmed;
    for (char ch : line)
      if (ch != '\r') trimmed += ch;
    while (!trimmed.empty() && std::isspace((unsigned char)trimmed.back()))
      trimmed.pop_back();
    std::size_t start = 0;
    while (start < trimmed.size() && std::isspace((unsigned char)trimmed[start]))
      ++start;
    trimmed.erase(0, start);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    std::string key = trimmed.substr(0, eq);
    std::string value = trimmed.substr(eq + 1);
    while (!key.empty() && std::isspace((unsigned char)key.back())) key.pop_back();
    std::size_t vs = 0;
    while (vs < value.size() && std::isspace((unsigned char)value[vs])) ++vs;
    value.erase(0, vs);
    set_config(c, key, value);
  }
}

// Shared option set for run and sweep; overrides apply after the file.
struct ConfigCli {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    static const char* keys[] = {
        "model",          "unraveling",     "n_spins",
        "omega0_over_kappa", "omega_z_over_kappa", "alpha",
        "eta",            "dt",             "t_final",
        "window",         "n_trajectories", "master_seed",
        "sample_every",   "record_entropy", "record_qfi",
        "record_trajectories", "initial_state", "output_dir",
        "workers"};
    for (const char* key : keys) {
      std::string flag = "--" + std::string(key);
      for (auto& ch : flag)
        if (ch == '_') ch = '-';
      cmd->add_option_function<std::string>(
          flag,
          [this, key](const std::string& v) { overrides.emplace_back(key, v); },
          std::string("override ") + key);
    }
  }

  ExperimentConfig build() const {
    ExperimentConfig c;
    if (!config_path.empty()) load_config_file(c, config_path);
    for (const auto& [k, v] : overrides) set_config(c, k, v);
    return c;
  }
};

void write_recipe(const std::filesystem::path& dir, const std::string& name,
                  const std::string& body) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << body;
}

void emit_figures(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_recipe(dir, "entropy_transition_sweep.cfg",
               "# Trajectory entropy across the measurement transition; run with\n"
               "# `dickesim sweep --config entropy_transition_sweep.cfg`, then\n"
               "# `dickesim analyze --task derivative` for the peak position and\n"
               "# `dickesim analyze --task tau-fit` for the saturation-time scaling.\n"
               "model=collective\n"
               "unraveling=qj\n"
               "n_spins=20,40,80,160\n"
               "omega0_over_kappa=0,0.2,0.4,0.6,0.7,0.8,0.9,1.0,1.1,1.2,1.3,1.5,1.75,2.0,2.5,3.0\n"
               "n_trajectories=512\n"
               "t_final=50\n"
               "window=15\n"
               "sample_every=0.1\n"
               "master_seed=7\n"
               "output_dir=entropy_transition\n");
  write_recipe(dir, "fisher_density_scaling.cfg",
               "# Fisher density under homodyne monitoring: constant in the normal\n"
               "# phase (omega0 < kappa), growing with N at the critical point.\n"
               "model=collective\n"
               "unraveling=qsd\n"
               "eta=1\n"
               "n_spins=16,32,64,128\n"
               "omega0_over_kappa=0.5,1.0\n"
               "n_trajectories=256\n"
               "dt=0.005\n"
               "t_final=200\n"
               "window=50\n"
               "record_entropy=false\n"
               "record_qfi=true\n"
               "master_seed=11\n"
               "output_dir=fisher_scaling\n");
  write_recipe(dir, "timecrystal_fisher_qj.cfg",
               "# Jump-unraveling Fisher density in the oscillatory phase;\n"
               "# f_Q/N approaches an N-independent limit curve.\n"
               "model=collective\n"
               "unraveling=qj\n"
               "n_spins=64,128\n"
               "omega0_over_kappa=2.0\n"
               "n_trajectories=256\n"
               "t_final=100\n"
               "window=30\n"
               "record_entropy=false\n"
               "record_qfi=true\n"
               "master_seed=13\n"
               "output_dir=timecrystal_fisher\n");
  write_recipe(dir, "variance_transition_qj.cfg",
               "# Trajectory-to-trajectory variance of <Jz> across the transition\n"
               "# (jump unraveling); pair with variance_transition_qsd.cfg and run\n"
               "# `dickesim analyze --task variance`.\n"
               "model=collective\n"
               "unraveling=qj\n"
               "n_spins=80\n"
               "omega0_over_kappa=0.25,0.5,0.75,0.9,1.0,1.1,1.25,1.5,2.0\n"
               "n_trajectories=512\n"
               "t_final=50\n"
               "window=15\n"
               "master_seed=17\n"
               "output_dir=variance_qj\n");
  write_recipe(dir, "variance_transition_qsd.cfg",
               "# Companion diffusive-unraveling variance scan (Var<Jx>).\n"
               "model=collective\n"
               "unraveling=qsd\n"
               "eta=1\n"
               "n_spins=80\n"
               "omega0_over_kappa=0.25,0.5,0.75,0.9,1.0,1.1,1.25,1.5,2.0\n"
               "n_trajectories=512\n"
               "dt=0.005\n"
               "t_final=50\n"
               "window=15\n"
               "master_seed=17\n"
               "output_dir=variance_qsd\n");
  write_recipe(dir, "homodyne_moments.cfg",
               "# Homodyne-current calibration: mean_di tracks (kappa/J)<Jx> of the\n"
               "# Lindblad average, var_di tracks (kappa/J)^2 Var<Jx> + kappa eta dt/J.\n"
               "model=collective\n"
               "unraveling=qsd\n"
               "eta=1\n"
               "n_spins=20\n"
               "omega0_over_kappa=0.5\n"
               "n_trajectories=1000\n"
               "dt=0.005\n"
               "t_final=20\n"
               "window=5\n"
               "master_seed=19\n"
               "output_dir=homodyne_moments\n");
  write_recipe(dir, "powerlaw_range_sweep.cfg",
               "# Power-law interactions on a ring: entropy saturation time vs N\n"
               "# for long range (alpha=0.2) and short range (alpha=3.0); follow\n"
               "# with `dickesim analyze --task tau-fit`.\n"
               "model=powerlaw\n"
               "unraveling=qj\n"
               "n_spins=6,8,10,12\n"
               "omega0_over_kappa=1.5\n"
               "omega_z_over_kappa=0.5\n"
               "alpha=0.2,3.0\n"
               "n_trajectories=512\n"
               "dt=0.005\n"
               "t_final=50\n"
               "window=15\n"
               "master_seed=23\n"
               "output_dir=powerlaw_range\n");
  write_recipe(dir, "postselection_cost.cfg",
               "# Saturation times for the post-selection overhead estimate\n"
               "# 2^(-tau/bin): sweep N at fixed drive, then\n"
               "# `dickesim analyze --task postselection --bin-width 1`.\n"
               "model=collective\n"
               "unraveling=qj\n"
               "n_spins=20,40,80,160\n"
               "omega0_over_kappa=1.0\n"
               "n_trajectories=512\n"
               "t_final=50\n"
               "window=15\n"
               "master_seed=29\n"
               "output_dir=postselection_cost\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collective-spin trajectory simulator"};
  app.require_subcommand(1);

  ConfigCli run_cli, sweep_cli;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  run_cli.attach(run_cmd);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "cartesian sweep over list-valued axes");
  sweep_cli.attach(sweep_cmd);

  std::string an_input, an_task, an_output = "analysis";
  double an_bin = 1.0;
  CLI::App* an_cmd =
      app.add_subcommand("analyze", "post-process a sweep directory");
  an_cmd->add_option("--input", an_input, "directory with sweep_table.csv")
      ->required();
  an_cmd->add_option("--task", an_task,
                     "tau-fit | variance | derivative | postselection")
      ->required();
  an_cmd->add_option("--output", an_output, "output directory");
  an_cmd->add_option("--bin-width", an_bin,
                     "record bin width for the postselection task");

  std::string fig_dir = "recipes";
  CLI::App* fig_cmd =
      app.add_subcommand("figures", "emit ready-made sweep recipes");
  fig_cmd->add_option("--output-dir", fig_dir, "where to write the .cfg files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const ExperimentConfig c = run_cli.build();
      const dicke::RunSummary s = dicke::run_experiment(c);
      std::printf("wrote %s (fingerprint %s)\n", s.dir.string().c_str(),
                  s.fingerprint.c_str());
      std::printf("  dt=%g stride=%g t_final=%g trajectories=%d jumps=%ld\n",
                  s.dt, s.sample_every, s.t_final, c.n_trajectories,
                  s.total_jumps);
      std::printf("  s_avg=%g fq_avg=%g var_jz/J^2=%g var_jx/J^2=%g\n", s.s_avg,
                  s.fq_avg, s.var_jz_rescaled, s.var_jx_rescaled);
      if (!s.tau_fit.method.empty())
        std::printf("  tau=%g (%s, quality %.3f)\n", s.tau_fit.tau,
                    s.tau_fit.method.c_str(), s.tau_fit.fit_quality);
    } else if (sweep_cmd->parsed()) {
      const ExperimentConfig c = sweep_cli.build();
      const auto rows = dicke::sweep(c);
      long failed = 0;
      for (const auto& r : rows) failed += !r.ok;
      std::printf("wrote %s/sweep_table.csv: %zu points, %ld failed\n",
                  c.output_dir.c_str(), rows.size(), failed);
      for (const auto& r : rows)
        if (!r.ok)
          std::fprintf(stderr, "  failed N=%d omega0=%g: %s\n", r.n_spins,
                       r.omega0_over_kappa, r.error.c_str());
    } else if (an_cmd->parsed()) {
      dicke::analyze(an_input, an_task, an_output, an_bin);
      std::printf("wrote %s\n", (std::filesystem::path(an_output) /
                                 (an_task == "tau-fit" ? "tau_fit.csv"
                                                       : an_task + ".csv"))
                                    .string()
                                    .c_str());
    } else if (fig_cmd->parsed()) {
      emit_figures(fig_dir);
      std::printf("wrote recipes under %s\n", fig_dir.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
