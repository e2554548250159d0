#include "dickesim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dickesim/entanglement.hpp"
#include "dickesim/powerlaw.hpp"
#include "dickesim/quantum_jump.hpp"
#include "dickesim/state_diffusion.hpp"

namespace dicke {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Everything that affects a single output byte, in fixed order. Worker
// count and paths deliberately absent.
std::string canonical_config(const ExperimentConfig& c) {
  std::string s;
  s += "model=" + c.model + "\n";
  s += "unraveling=" + c.unraveling + "\n";
  s += "n_spins=" + fmt(c.n_spins) + "\n";
  s += "omega0_over_kappa=" + fmt(c.omega0_over_kappa) + "\n";
  s += "omega_z_over_kappa=" + fmt(c.omega_z_over_kappa) + "\n";
  s += "alpha=" + fmt(c.alpha) + "\n";
  s += "eta=" + fmt(c.eta) + "\n";
  s += "dt=" + fmt(c.dt) + "\n";
  s += "t_final=" + fmt(c.t_final) + "\n";
  s += "window=" + fmt(c.window) + "\n";
  s += "n_trajectories=" + std::to_string(c.n_trajectories) + "\n";
  s += "master_seed=" + std::to_string(c.master_seed) + "\n";
  s += "sample_every=" + fmt(c.sample_every) + "\n";
  s += "record_entropy=" + std::to_string(int(c.record_entropy)) + "\n";
  s += "record_qfi=" + std::to_string(int(c.record_qfi)) + "\n";
  s += "initial_state=" + c.initial_state + "\n";
  return s;
}

int resolved_workers(const ExperimentConfig& c) {
  if (const char* env = std::getenv("DICKESIM_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return std::max(1, c.workers);
}

// Runs body(0..n-1) across a worker pool; the first exception wins and
// stops the dispatch. Results must go into index-addressed slots so the
// later reduction is schedule-independent.
void run_farm(long n, int workers, const std::function<void(long)>& body) {
  if (workers <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < std::min<long>(workers, n); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double window_avg_or_nan(const RealVector& times, const RealVector& values,
                         double t_final, double window) {
  if (values.size() == 0) return std::nan("");
  return time_window_average(times, values, t_final, window);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out.flush())
    throw std::runtime_error("short write to " + path.string());
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (c.model != "collective" && c.model != "powerlaw")
    fail("model must be collective or powerlaw (got '" + c.model + "')");
  if (c.unraveling != "qj" && c.unraveling != "qsd" &&
      c.unraveling != "lindblad")
    fail("unraveling must be qj, qsd, or lindblad (got '" + c.unraveling +
         "')");
  if (c.n_spins.empty()) fail("n_spins list is empty");
  for (int n : c.n_spins)
    if (n < 1) fail("n_spins must be >= 1");
  if (c.omega0_over_kappa.empty()) fail("omega0_over_kappa list is empty");
  if (!c.eta.empty() && c.unraveling != "qsd")
    fail("eta applies to the qsd unraveling only");
  for (double e : c.eta)
    if (!(e >= 0.0 && e <= 1.0)) fail("eta must lie in [0, 1]");
  if (!c.alpha.empty() && c.model != "powerlaw")
    fail("alpha applies to the powerlaw model only");
  for (double a : c.alpha)
    if (!(a >= 0.0)) fail("alpha must be >= 0");
  if (c.model == "powerlaw") {
    if (c.unraveling != "qj")
      fail("the powerlaw model runs under the qj unraveling only");
    for (int n : c.n_spins)
      if (n < 2 || n > 14) fail("powerlaw model supports 2..14 spins");
  }
  if (c.n_trajectories < 1) fail("n_trajectories must be >= 1");
  if (c.unraveling == "lindblad" && c.n_trajectories != 1)
    fail("the deterministic lindblad solver takes no ensemble; "
         "set n_trajectories=1");
  if (c.dt < 0.0) fail("dt must be >= 0 (0 picks the default)");
  if (!(c.t_final > 0.0)) fail("t_final must be > 0");
  if (!(c.sample_every > 0.0)) fail("sample_every must be > 0");
  if (!(c.window > 0.0) || c.window > c.t_final)
    fail("window must lie in (0, t_final]");
  if (c.workers < 1) fail("workers must be >= 1");
}

std::string config_fingerprint(const ExperimentConfig& c) {
  return hex64(fnv1a(canonical_config(c)));
}

namespace {

struct ResolvedPoint {
  int n_spins;
  double omega0, eta, alpha;  // eta/alpha NaN when not applicable
  ExperimentConfig single;    // singleton-axis copy
};

ExperimentConfig resolve_defaults(ExperimentConfig c) {
  if (c.unraveling == "qsd" && c.eta.empty()) c.eta = {1.0};
  if (c.model == "powerlaw" && c.alpha.empty()) c.alpha = {0.2, 3.0};
  return c;
}

std::vector<ResolvedPoint> grid_points(const ExperimentConfig& base) {
  ExperimentConfig c = resolve_defaults(base);
  validate(c);
  const std::vector<double> etas =
      c.unraveling == "qsd" ? c.eta : std::vector<double>{std::nan("")};
  const std::vector<double> alphas =
      c.model == "powerlaw" ? c.alpha : std::vector<double>{std::nan("")};
  std::vector<ResolvedPoint> pts;
  for (int n : c.n_spins)
    for (double w : c.omega0_over_kappa)
      for (double a : alphas)
        for (double e : etas) {
          ResolvedPoint p;
          p.n_spins = n;
          p.omega0 = w;
          p.eta = e;
          p.alpha = a;
          p.single = c;
          p.single.n_spins = {n};
          p.single.omega0_over_kappa = {w};
          p.single.alpha = std::isnan(a) ? std::vector<double>{}
                                         : std::vector<double>{a};
          p.single.eta = std::isnan(e) ? std::vector<double>{}
                                       : std::vector<double>{e};
          pts.push_back(std::move(p));
        }
  return pts;
}

struct SeriesColumn {
  const char* mean_name;
  const char* var_name;
  const SeriesStats* stats;
};

std::string summary_csv(const EnsembleStats& s, const SeriesStats* di) {
  std::string out =
      "time,mean_jx,mean_jy,mean_jz,var_jx,var_jy,var_jz,mean_entropy,"
      "var_entropy,mean_fq,n_traj";
  if (di) out += ",mean_di,var_di";
  out += "\n";
  const Index n = s.times.size();
  auto cell = [&](const RealVector& v, Index i) {
    return v.size() ? fmt(v[i]) : "nan";
  };
  for (Index i = 0; i < n; ++i) {
    out += fmt(s.times[i]);
    out += ',' + cell(s.jx.mean, i) + ',' + cell(s.jy.mean, i) + ',' +
           cell(s.jz.mean, i);
    out += ',' + cell(s.jx.var, i) + ',' + cell(s.jy.var, i) + ',' +
           cell(s.jz.var, i);
    out += ',' + cell(s.entropy.mean, i) + ',' + cell(s.entropy.var, i);
    out += ',' + cell(s.fisher.mean, i);
    out += ',' + std::to_string(s.n_trajectories);
    if (di) {
      // the homodyne grid is one sample shorter than the observable grid
      const bool has = di->mean.size() > i;
      out += ',';
      out += has ? fmt(di->mean[i]) : "nan";
      out += ',';
      out += has ? fmt(di->var[i]) : "nan";
    }
    out += '\n';
  }
  return out;
}

std::string records_csv(const TrajectoryRecord& r) {
  std::string out;
  out += "# seed: " + std::to_string(r.seed) + "\n";
  out += "# fingerprint: " + r.config_fingerprint + "\n";
  out += "# jump_times:";
  for (double t : r.jump_times) out += ' ' + fmt(t);
  out += "\n";
  out += "time,jx,jy,jz";
  if (r.entropy_half.size()) out += ",entropy";
  if (r.fisher_density.size()) out += ",fisher_density";
  out += "\n";
  for (Index i = 0; i < r.sample_times.size(); ++i) {
    out += fmt(r.sample_times[i]) + ',' + fmt(r.jx[i]) + ',' + fmt(r.jy[i]) +
           ',' + fmt(r.jz[i]);
    if (r.entropy_half.size()) out += ',' + fmt(r.entropy_half[i]);
    if (r.fisher_density.size()) out += ',' + fmt(r.fisher_density[i]);
    out += '\n';
  }
  return out;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& base) {
  ExperimentConfig c = resolve_defaults(base);
  validate(c);
  if (c.n_spins.size() != 1 || c.omega0_over_kappa.size() != 1 ||
      c.alpha.size() > 1 || c.eta.size() > 1)
    throw std::invalid_argument("run_experiment takes a single grid point; "
                                "use sweep for lists");

  const int n = c.n_spins[0];
  const double omega0 = c.omega0_over_kappa[0];
  const int workers = resolved_workers(c);
  const std::string fp = config_fingerprint(c);
  const long n_traj = c.n_trajectories;

  HamiltonianSpec spec;
  spec.n_spins = n;
  spec.omega0 = omega0;
  spec.omega_z = c.omega_z_over_kappa;
  spec.kappa = 1.0;

  RunSummary out;
  out.fingerprint = fp;
  out.dir = std::filesystem::path(c.output_dir);
  std::filesystem::create_directories(out.dir);
  const bool keep_records = c.record_trajectories;
  if (keep_records) std::filesystem::create_directories(out.dir / "records");

  std::vector<TrajectoryRecord> records(n_traj);
  const SeriesStats* di_stats = nullptr;
  std::string entropy_kind = "none";

  if (c.unraveling == "qj") {
    QjConfig qc;
    qc.hamiltonian_spec = spec;
    qc.dt = c.dt;
    qc.t_final = c.t_final;
    qc.sample_every = c.sample_every;
    qc.seed = c.master_seed;
    qc.initial_state = c.initial_state;
    qc.record_entropy = c.record_entropy;
    qc.record_fisher = c.record_qfi;

    QjBackend backend;
    if (c.model == "powerlaw") {
      PowerlawSpec ps;
      ps.n_spins = n;
      ps.omega0 = omega0;
      ps.omega_z = c.omega_z_over_kappa;
      ps.alpha = c.alpha[0];
      ps.kappa = 1.0;
      backend = make_powerlaw_qj_backend(ps, qc);
      entropy_kind = c.record_entropy ? "half_ring_entanglement" : "none";
    } else {
      backend =
          make_dicke_qj_backend(qc, parse_initial_state(c.initial_state, n));
      entropy_kind =
          c.record_entropy && n >= 2 ? "half_chain_entanglement" : "none";
    }
    out.dt = backend.prop.dt();
    out.sample_every = backend.prop.dt() * backend.prop.steps_per_block();
    out.t_final =
        std::max(1L, std::lround(c.t_final / out.sample_every)) *
        out.sample_every;

    run_farm(n_traj, workers, [&](long i) {
      CounterRng rng(c.master_seed, std::uint64_t(i));
      TrajectoryRecord rec = run_qj_trajectory(qc, backend, rng);
      rec.config_fingerprint = fp;
      records[i] = std::move(rec);
    });
  } else if (c.unraveling == "qsd") {
    QsdConfig qc;
    qc.hamiltonian_spec = spec;
    qc.eta = c.eta[0];
    if (c.dt > 0.0) qc.dt = c.dt;
    qc.t_final = c.t_final;
    qc.sample_every = c.sample_every;
    qc.seed = c.master_seed;
    qc.initial_state = c.initial_state;
    qc.record_entropy = c.record_entropy;
    qc.record_fisher = c.record_qfi;

    const int steps = std::max(1, int(std::lround(qc.sample_every / qc.dt)));
    out.dt = qc.dt;
    out.sample_every = steps * qc.dt;
    out.t_final = std::max(1L, std::lround(qc.t_final / out.sample_every)) *
                  out.sample_every;
    entropy_kind = !c.record_entropy || n < 2 ? "none"
                   : qc.eta == 1.0 ? "half_chain_entanglement"
                                   : "conditional_von_neumann";

    std::vector<HomodyneRecord> homs(n_traj);
    run_farm(n_traj, workers, [&](long i) {
      CounterRng rng(c.master_seed, std::uint64_t(i));
      auto [rec, hom] = run_qsd_trajectory(qc, rng);
      rec.config_fingerprint = fp;
      records[i] = std::move(rec);
      homs[i] = std::move(hom);
    });
    OnlineMoments acc;
    for (const auto& h : homs) acc.add(h.sampled_di);
    out.homodyne.mean = acc.mean();
    out.homodyne.var = acc.variance();
    di_stats = &out.homodyne;
  } else {  // lindblad
    const PureState init = parse_initial_state(c.initial_state, n);
    const double dt = c.dt > 0.0 ? c.dt : 5e-3;
    const bool need_states = c.record_entropy || c.record_qfi;
    LindbladResult lr = lindblad_evolve(spec, to_mixed(init), dt, c.t_final,
                                        c.sample_every, need_states);
    const int steps = std::max(1, int(std::lround(c.sample_every / dt)));
    out.dt = dt;
    out.sample_every = steps * dt;
    out.t_final = lr.times[lr.times.size() - 1];

    TrajectoryRecord rec;
    rec.sample_times = lr.times;
    rec.jx = lr.jx;
    rec.jy = lr.jy;
    rec.jz = lr.jz;
    rec.seed = 0;
    rec.config_fingerprint = fp;
    if (need_states) {
      CollectiveOperators ops = build_collective_ops(n);
      if (c.record_entropy) rec.entropy_half.resize(lr.states.size());
      if (c.record_qfi) rec.fisher_density.resize(lr.states.size());
      for (std::size_t k = 0; k < lr.states.size(); ++k) {
        if (c.record_entropy) rec.entropy_half[k] = entropy(lr.states[k]);
        if (c.record_qfi)
          rec.fisher_density[k] = qfi_mixed(ops, lr.states[k]).density;
      }
      entropy_kind = c.record_entropy ? "von_neumann" : "none";
    }
    records[0] = std::move(rec);
  }

  out.stats = ensemble_stats(records);
  for (const auto& r : records) out.total_jumps += long(r.jump_times.size());

  // window averages on the actual grid
  const double tf = out.t_final;
  const double win = std::min(c.window, tf);
  out.s_avg = window_avg_or_nan(out.stats.times, out.stats.entropy.mean, tf, win);
  out.fq_avg =
      window_avg_or_nan(out.stats.times, out.stats.fisher.mean, tf, win);
  const double j = 0.5 * n;
  out.var_jz_rescaled =
      window_avg_or_nan(out.stats.times, out.stats.jz.var, tf, win) / (j * j);
  out.var_jx_rescaled =
      window_avg_or_nan(out.stats.times, out.stats.jx.var, tf, win) / (j * j);

  if (out.stats.entropy.mean.size() && out.stats.times.size() >= 4 &&
      c.unraveling != "lindblad") {
    try {
      if (omega0 > 1.0) {
        out.tau_fit = saturation_time_oscillatory(out.stats.times,
                                                  out.stats.entropy.mean);
      } else {
        out.tau_fit = saturation_time_critical(
            out.stats.times, out.stats.entropy.mean, out.s_avg);
      }
    } catch (const std::exception&) {
      out.tau_fit.method = "failed";
      out.tau_fit.tau = std::nan("");
      out.tau_fit.fit_quality = 0.0;
    }
  }

  // persistence
  const std::string summary = summary_csv(out.stats, di_stats);
  write_text(out.dir / "summary.csv", summary);

  std::string wa = "name,value\n";
  wa += "s_avg," + fmt(out.s_avg) + "\n";
  wa += "fq_avg," + fmt(out.fq_avg) + "\n";
  wa += "var_jz_rescaled," + fmt(out.var_jz_rescaled) + "\n";
  wa += "var_jx_rescaled," + fmt(out.var_jx_rescaled) + "\n";
  wa += "tau," + fmt(out.tau_fit.tau) + "\n";
  wa += "tau_method," +
        (out.tau_fit.method.empty() ? std::string("none") : out.tau_fit.method) +
        "\n";
  wa += "fit_quality," + fmt(out.tau_fit.fit_quality) + "\n";
  wa += "total_jumps," + std::to_string(out.total_jumps) + "\n";
  write_text(out.dir / "window_averages.csv", wa);

  if (keep_records) {
    for (long i = 0; i < n_traj; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "traj_%06ld.csv", i);
      write_text(out.dir / "records" / name, records_csv(records[i]));
    }
  }

  std::string man = "{\n";
  man += "  \"fingerprint\": \"" + fp + "\",\n";
  man += "  \"summary_hash\": \"" + hex64(fnv1a(summary)) + "\",\n";
  man += "  \"entropy_kind\": \"" + entropy_kind + "\",\n";
  man += "  \"dt\": " + fmt(out.dt) + ",\n";
  man += "  \"sample_every\": " + fmt(out.sample_every) + ",\n";
  man += "  \"t_final\": " + fmt(out.t_final) + ",\n";
  man += "  \"columns\": \"time,mean_jx,mean_jy,mean_jz,var_jx,var_jy,var_jz,"
         "mean_entropy,var_entropy,mean_fq,n_traj" +
         std::string(di_stats ? ",mean_di,var_di" : "") + "\",\n";
  man += "  \"config\": {\n";
  std::istringstream lines(canonical_config(c));
  std::string line, body;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (!body.empty()) body += ",\n";
    body += "    \"" + json_escape(line.substr(0, eq)) + "\": \"" +
            json_escape(line.substr(eq + 1)) + "\"";
  }
  man += body + "\n  }\n}\n";
  write_text(out.dir / "manifest.json", man);

  return out;
}

std::vector<SweepRow> sweep(const ExperimentConfig& base) {
  ExperimentConfig c = resolve_defaults(base);
  validate(c);
  const std::vector<ResolvedPoint> pts = grid_points(c);
  const std::filesystem::path root(c.output_dir);
  std::filesystem::create_directories(root);
  const bool with_alpha = c.model == "powerlaw";

  std::vector<SweepRow> rows;
  rows.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ResolvedPoint& p = pts[i];
    SweepRow row;
    row.n_spins = p.n_spins;
    row.omega0_over_kappa = p.omega0;
    row.eta = p.eta;
    row.alpha = p.alpha;
    char sub[32];
    std::snprintf(sub, sizeof sub, "run_%04zu", i);
    ExperimentConfig pc = p.single;
    pc.output_dir = (root / sub).string();
    try {
      const RunSummary rs = run_experiment(pc);
      row.s_avg = rs.s_avg;
      row.fq_avg = rs.fq_avg;
      row.var_jz_rescaled = rs.var_jz_rescaled;
      row.var_jx_rescaled = rs.var_jx_rescaled;
      row.tau = rs.tau_fit.tau;
      row.tau_method =
          rs.tau_fit.method.empty() ? "none" : rs.tau_fit.method;
      row.fit_quality = rs.tau_fit.fit_quality;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.s_avg = row.fq_avg = row.var_jz_rescaled = row.var_jx_rescaled =
          row.tau = std::nan("");
      row.tau_method = "error";
    }
    rows.push_back(std::move(row));
  }

  std::string table =
      "n_spins,omega0_over_kappa,eta,s_avg,fq_avg,var_jz_rescaled,"
      "var_jx_rescaled,tau,tau_method,fit_quality";
  if (with_alpha) table += ",alpha";
  table += "\n";
  for (const auto& r : rows) {
    table += std::to_string(r.n_spins) + ',' + fmt(r.omega0_over_kappa) + ',' +
             fmt(r.eta) + ',' + fmt(r.s_avg) + ',' + fmt(r.fq_avg) + ',' +
             fmt(r.var_jz_rescaled) + ',' + fmt(r.var_jx_rescaled) + ',' +
             fmt(r.tau) + ',' + r.tau_method + ',' + fmt(r.fit_quality);
    if (with_alpha) table += ',' + fmt(r.alpha);
    table += '\n';
  }
  write_text(root / "sweep_table.csv", table);

  std::string errors;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!rows[i].ok)
      errors += "run_" + std::to_string(i) + ": " + rows[i].error + "\n";
  std::string man = "{\n";
  man += "  \"fingerprint\": \"" + config_fingerprint(c) + "\",\n";
  man += "  \"points\": " + std::to_string(rows.size()) + ",\n";
  man += "  \"failed\": \"" + json_escape(errors) + "\"\n}\n";
  write_text(root / "manifest.json", man);
  return rows;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return int(i);
  return -1;
}

double CsvTable::value(std::size_t row, const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw std::invalid_argument("missing column " + name);
  return std::strtod(rows.at(row).at(c).c_str(), nullptr);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (t.columns.empty())
      t.columns = split(line);
    else
      t.rows.push_back(split(line));
  }
  return t;
}

void analyze(const std::filesystem::path& input_dir, const std::string& task,
             const std::filesystem::path& output_dir, double bin_width) {
  const auto table_path = input_dir / "sweep_table.csv";
  if (!std::filesystem::exists(table_path))
    throw std::runtime_error("no sweep_table.csv under " +
                             input_dir.string());
  const CsvTable t = read_csv(table_path);
  for (const char* need :
       {"n_spins", "omega0_over_kappa", "eta", "tau", "s_avg"})
    if (t.column(need) < 0)
      throw std::runtime_error(std::string("missing column ") + need);
  const bool has_alpha = t.column("alpha") >= 0;
  std::filesystem::create_directories(output_dir);

  auto row_key = [&](std::size_t r, bool with_n, bool with_omega) {
    std::string k;
    if (with_n) k += "n=" + std::to_string(int(t.value(r, "n_spins"))) + ";";
    if (with_omega) k += "w=" + fmt(t.value(r, "omega0_over_kappa")) + ";";
    k += "e=" + fmt(t.value(r, "eta")) + ";";
    if (has_alpha) k += "a=" + fmt(t.value(r, "alpha")) + ";";
    return k;
  };

  if (task == "tau-fit") {
    // tau vs ln N inside each (omega0, eta, alpha) group
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const std::string k = row_key(r, false, true);
      if (!groups.count(k)) order.push_back(k);
      groups[k].push_back(r);
    }
    std::string out = "omega0_over_kappa,eta";
    if (has_alpha) out += ",alpha";
    out += ",a,b,r2,n_points\n";
    for (const auto& k : order) {
      const auto& rs = groups[k];
      std::vector<std::pair<double, double>> pts;
      for (std::size_t r : rs) {
        const double tau = t.value(r, "tau");
        if (std::isfinite(tau))
          pts.emplace_back(std::log(t.value(r, "n_spins")), tau);
      }
      if (pts.size() < 2) continue;
      std::sort(pts.begin(), pts.end());
      RealVector x(pts.size()), y(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        x[i] = pts[i].first;
        y[i] = pts[i].second;
      }
      const LinearFit f = linear_fit(x, y);
      const std::size_t r0 = rs.front();
      out += fmt(t.value(r0, "omega0_over_kappa")) + ',' +
             fmt(t.value(r0, "eta"));
      if (has_alpha) out += ',' + fmt(t.value(r0, "alpha"));
      out += ',' + fmt(f.slope) + ',' + fmt(f.intercept) + ',' + fmt(f.r2) +
             ',' + std::to_string(pts.size()) + '\n';
    }
    write_text(output_dir / "tau_fit.csv", out);
  } else if (task == "variance") {
    std::string out = "n_spins,omega0_over_kappa,eta";
    if (has_alpha) out += ",alpha";
    out += ",var_jz_rescaled,var_jx_rescaled\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      out += std::to_string(int(t.value(r, "n_spins"))) + ',' +
             fmt(t.value(r, "omega0_over_kappa")) + ',' + fmt(t.value(r, "eta"));
      if (has_alpha) out += ',' + fmt(t.value(r, "alpha"));
      out += ',' + fmt(t.value(r, "var_jz_rescaled")) + ',' +
             fmt(t.value(r, "var_jx_rescaled")) + '\n';
    }
    write_text(output_dir / "variance.csv", out);
  } else if (task == "derivative") {
    // dS/d(omega0) inside each (n_spins, eta, alpha) group
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const std::string k = row_key(r, true, false);
      if (!groups.count(k)) order.push_back(k);
      groups[k].push_back(r);
    }
    std::string out = "n_spins,omega0_over_kappa,ds_domega\n";
    for (const auto& k : order) {
      auto rs = groups[k];
      std::sort(rs.begin(), rs.end(), [&](std::size_t a, std::size_t b) {
        return t.value(a, "omega0_over_kappa") <
               t.value(b, "omega0_over_kappa");
      });
      if (rs.size() < 2) continue;
      RealVector x(rs.size()), y(rs.size());
      for (std::size_t i = 0; i < rs.size(); ++i) {
        x[i] = t.value(rs[i], "omega0_over_kappa");
        y[i] = t.value(rs[i], "s_avg");
      }
      const RealVector d = central_derivative(x, y);
      for (std::size_t i = 0; i < rs.size(); ++i)
        out += std::to_string(int(t.value(rs[i], "n_spins"))) + ',' +
               fmt(x[i]) + ',' + fmt(d[i]) + '\n';
    }
    write_text(output_dir / "derivative.csv", out);
  } else if (task == "postselection") {
    std::string out = "n_spins,omega0_over_kappa,tau,overhead\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double tau = t.value(r, "tau");
      const double oh =
          std::isfinite(tau) && tau > 0.0
              ? postselection_overhead(tau, bin_width)
              : std::nan("");
      out += std::to_string(int(t.value(r, "n_spins"))) + ',' +
             fmt(t.value(r, "omega0_over_kappa")) + ',' + fmt(tau) + ',' +
             fmt(oh) + '\n';
    }
    write_text(output_dir / "postselection.csv", out);
  } else {
    throw std::invalid_argument(
        "unknown analyze task '" + task +
        "' (want tau-fit, variance, derivative, or postselection)");
  }
}

}  // namespace dicke
