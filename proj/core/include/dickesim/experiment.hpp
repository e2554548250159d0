#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dickesim/analysis.hpp"
#include "dickesim/records.hpp"

namespace dicke {

// One experiment or a cartesian sweep; scalar axes are singleton lists.
// All rates in units of kappa.
struct ExperimentConfig {
  std::string model = "collective";  // collective | powerlaw
  std::string unraveling = "qj";     // qj | qsd | lindblad
  std::vector<int> n_spins = {20};
  std::vector<double> omega0_over_kappa = {1.0};
  double omega_z_over_kappa = 0.0;
  std::vector<double> alpha;  // powerlaw only; sweeps default to {0.2, 3.0}
  std::vector<double> eta;    // qsd only; defaults to {1.0}
  double dt = 0.0;            // 0 picks the unraveling's default
  double t_final = 400.0;
  double window = 100.0;      // averaging window ending at t_final
  int n_trajectories = 1000;
  std::uint64_t master_seed = 1;
  double sample_every = 0.1;
  bool record_entropy = true;
  bool record_qfi = false;
  bool record_trajectories = false;  // per-trajectory files, off by default
  std::string initial_state = "up";
  std::string output_dir = "out";
  int workers = 1;
};

// Throws std::invalid_argument naming the offending field; rejects
// parameter combinations that silently would not be used (eta with qj,
// alpha with the collective model, ensembles for the deterministic
// solver).
void validate(const ExperimentConfig& config);

// FNV-1a over the canonical key=value serialization of everything that
// affects the physics and the sample grid. Worker count and output paths
// are excluded: they must not change a single output byte.
std::string config_fingerprint(const ExperimentConfig& config);

struct RunSummary {
  EnsembleStats stats;
  SeriesStats homodyne;  // qsd only, per-sample dI across the ensemble
  // Window averages over [t_final - window, t_final]; NaN when the
  // underlying series was not recorded.
  double s_avg = 0.0;
  double fq_avg = 0.0;
  double var_jz_rescaled = 0.0;  // window average of Var<Jz> / J^2
  double var_jx_rescaled = 0.0;
  SaturationFit tau_fit;  // method empty when entropy was not recorded
  std::string fingerprint;
  std::filesystem::path dir;
  // Grid actually used (dt and stride snap so samples land on steps).
  double dt = 0.0, sample_every = 0.0, t_final = 0.0;
  long total_jumps = 0;
};

// Runs one grid point: farms trajectories over workers (each on RNG
// stream = trajectory index), reduces in index order, writes summary.csv,
// window_averages.csv, manifest.json, and optional per-trajectory record
// files. Byte-identical across reruns and worker counts.
RunSummary run_experiment(const ExperimentConfig& config);

struct SweepRow {
  int n_spins = 0;
  double omega0_over_kappa = 0.0;
  double eta = 0.0;    // NaN for non-qsd rows
  double alpha = 0.0;  // NaN for collective rows
  double s_avg = 0.0, fq_avg = 0.0;
  double var_jz_rescaled = 0.0, var_jx_rescaled = 0.0;
  double tau = 0.0;
  std::string tau_method;
  double fit_quality = 0.0;
  bool ok = true;
  std::string error;  // failed grid points are recorded, not fatal
};

// Cartesian product over the list axes; one run directory per point plus
// a joined sweep_table.csv at the top level.
std::vector<SweepRow> sweep(const ExperimentConfig& config);

// Post-processing over a run or sweep directory; writes <task>.csv into
// output_dir (tasks: tau-fit, variance, derivative, postselection).
void analyze(const std::filesystem::path& input_dir, const std::string& task,
             const std::filesystem::path& output_dir, double bin_width = 1.0);

// Tiny CSV reader for the files this module writes ('#' lines skipped).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;  // -1 when absent
  double value(std::size_t row, const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace dicke
