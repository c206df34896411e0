#include "gn/cli.hpp"

#include "gn/config.hpp"
#include "gn/initstate.hpp"
#include "gn/model.hpp"
#include "gn/oracle.hpp"
#include "gn/output.hpp"
#include "gn/plot.hpp"
#include "gn/protocols.hpp"
#include "gn/sweep.hpp"
#include "gn/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace gn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void log_line(const std::string& msg) { std::cerr << "[gn_sim] " << msg << std::endl; }

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  os << j.dump(2) << '\n';
  if (!os.flush()) throw ConfigError("write to '" + path.string() + "' failed");
}

json finite_or_null(Real v) { return std::isfinite(v) ? json(v) : json(); }

std::string format_label(const PhaseLabel& label) {
  std::string s = to_string(label.kind);
  if (label.kind == Phase::CP) s += "(" + std::to_string(label.dominant_nu) + ")";
  return s;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Shared epilogue: stamp the manifest with checksums of everything written.
void finish_run(const RunConfig& cfg, const std::vector<std::string>& files,
                const std::vector<std::string>& notes,
                std::chrono::steady_clock::time_point t0) {
  RunManifest m;
  m.command = cfg.command;
  m.version = kVersion;
  m.config_json = cfg.effective_json;
  m.seed = cfg.seed;
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.notes = notes;
  write_manifest(cfg.output_dir, std::move(m), files);
  log_line("wrote " + (fs::path(cfg.output_dir) / "manifest.json").string());
}

// ---------------------------------------------------------------------------

int cmd_steady(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  SteadySolveOptions opt = cfg.steady;
  opt.seed = cfg.seed;
  log_line("solving steady state at mu = " + std::to_string(cfg.model.mu) +
           ", g = " + std::to_string(cfg.model.g));
  const SteadyStateResult res = solve_steady_state(cfg.model, opt);
  if (!res.converged) throw PhysicsError("steady state not reached within the configured horizon");

  const fs::path dir = cfg.output_dir;
  write_checkpoint((dir / "state.gnth").string(), res.theta,
                   opt.strategy == SteadyStrategy::Dynamics ? res.time_or_iters : 0.0);

  const OrderParameterProfile prof = decompose_order_parameter(res.sigma);
  {
    std::ofstream os(dir / "profile.csv", std::ios::trunc);
    os << "j,sigma,m\n";
    for (int j = 0; j < res.sigma.size(); ++j)
      os << j << ',' << g17(res.sigma(j)) << ',' << g17(prof.m(j)) << '\n';
  }
  const HarmonicSpectrum spec = harmonics(prof.m);
  {
    std::ofstream os(dir / "spectrum.csv", std::ios::trunc);
    os << "nu,amplitude\n";
    for (int nu = 0; nu <= cfg.model.L / 2; ++nu)
      os << nu << ',' << g17(folded_amplitude(spec, nu)) << '\n';
  }
  const PhaseLabel label = classify_profile(res.sigma);
  json summary = {{"converged", res.converged},
                  {"method", res.method == SteadyStrategy::Dynamics ? "dynamics" : "fixed-point"},
                  {"time_or_iters", res.time_or_iters},
                  {"deltaJ", prof.deltaJ},
                  {"label",
                   {{"kind", to_string(label.kind)},
                    {"dominant_nu", label.dominant_nu},
                    {"amplitude", label.amplitude},
                    {"text", format_label(label)}}}};
  write_json_file(dir / "summary.json", summary);
  log_line("label: " + format_label(label));

  finish_run(cfg, {"state.gnth", "profile.csv", "spectrum.csv", "summary.json"}, {}, t0);
  return 0;
}

int cmd_quench(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  log_line("quench (" + std::to_string(cfg.quench.from.mu) + ", " +
           std::to_string(cfg.quench.from.g) + ") -> (" + std::to_string(cfg.quench.to.mu) + ", " +
           std::to_string(cfg.quench.to.g) + ")");
  const QuenchResult res = run_quench(cfg.model, cfg.quench);
  log_line("evolved to t = " + std::to_string(res.traj.t_final) +
           (res.traj.steady_reached ? " (steady)" : " (horizon)"));

  const fs::path dir = cfg.output_dir;
  DistanceSeries m_norm;
  const bool have_norm = !res.m_hat.values.empty() && res.m_hat.values.front() > 0.0;
  if (have_norm) m_norm = scale_series(res.m_hat, 1.0 / res.m_hat.values.front());

  TimeseriesOptions opt;
  opt.nu_max = cfg.nu_max;
  if (have_norm) opt.scalars.push_back({"M", &m_norm});
  opt.scalars.push_back({"Mhat", &res.m_hat});
  opt.scalars.push_back({"F_fw", &res.f_fw});
  opt.scalars.push_back({"F_bw", &res.f_bw});
  opt.scalars.push_back({"D_T", &res.d_t});
  write_timeseries(res.traj, (dir / "timeseries.csv").string(), opt);

  write_checkpoint((dir / "theta_in.gnth").string(), res.theta_in, 0.0);
  write_checkpoint((dir / "theta_eq.gnth").string(), res.theta_eq, 0.0);
  write_checkpoint((dir / "theta_final.gnth").string(), res.traj.theta_final, res.traj.t_final);

  const DptReport& d = res.dpt;
  json report = {{"has_dpt", d.has_dpt},
                 {"final_ordered", d.final_ordered},
                 {"dominant_nu_final", d.dominant_nu_final},
                 {"final_amplitude", d.final_amplitude},
                 {"window_found", d.window_found},
                 {"window", {d.window_begin, d.window_end}},
                 {"t_star", d.has_dpt ? json(d.t_star) : json()},
                 {"fbw_checked", d.fbw_checked},
                 {"fbw_jump_time", d.fbw_jump_time},
                 {"fbw_jump_size", d.fbw_jump_size},
                 {"ambiguous", d.ambiguous},
                 {"steady_reached", res.traj.steady_reached},
                 {"t_final", res.traj.t_final}};
  write_json_file(dir / "dpt_report.json", report);
  if (d.has_dpt)
    log_line("transition detected: window [" + std::to_string(d.window_begin) + ", " +
             std::to_string(d.window_end) + "], t_star = " + std::to_string(d.t_star));
  else
    log_line("no transition detected (smooth relaxation)");

  finish_run(cfg,
             {"timeseries.csv", "dpt_report.json", "theta_in.gnth", "theta_eq.gnth",
              "theta_final.gnth"},
             {}, t0);
  return 0;
}

int cmd_scan(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  const std::size_t n =
      cfg.scan.mu_values.size() * cfg.scan.g_values.size() + cfg.scan.extra_points.size();
  log_line("classifying " + std::to_string(n) + " parameter points");
  const ScanResult res = scan_phase_diagram(cfg.model, cfg.scan);

  const fs::path dir = cfg.output_dir;
  std::vector<std::string> notes;
  {
    std::ofstream os(dir / "phase_map.csv", std::ios::trunc);
    os << "mu,g,label,dominant_nu,amplitude,frustrated\n";
    for (const auto& pt : res.points) {
      if (!pt.ok) {
        notes.push_back("point (" + std::to_string(pt.point.mu) + ", " +
                        std::to_string(pt.point.g) + ") failed: " + pt.error);
        continue;
      }
      os << g17(pt.point.mu) << ',' << g17(pt.point.g) << ',' << format_label(pt.label) << ','
         << pt.label.dominant_nu << ',' << g17(pt.label.amplitude) << ','
         << (pt.label.frustrated ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream os(dir / "boundaries.csv", std::ios::trunc);
    os << "mu_a,g_a,mu_b,g_b,mu_mid,g_mid\n";
    for (const auto& b : res.boundaries)
      os << g17(b.a.mu) << ',' << g17(b.a.g) << ',' << g17(b.b.mu) << ',' << g17(b.b.g) << ','
         << g17(b.midpoint.mu) << ',' << g17(b.midpoint.g) << '\n';
  }
  int n_op = 0, n_cp = 0, n_dp = 0, n_fail = 0;
  for (const auto& pt : res.points) {
    if (!pt.ok) {
      ++n_fail;
    } else if (pt.label.kind == Phase::OP) {
      ++n_op;
    } else if (pt.label.kind == Phase::CP) {
      ++n_cp;
    } else {
      ++n_dp;
    }
  }
  write_json_file(dir / "summary.json", json{{"points", res.points.size()},
                                             {"OP", n_op},
                                             {"CP", n_cp},
                                             {"DP", n_dp},
                                             {"failed", n_fail},
                                             {"boundaries", res.boundaries.size()}});
  log_line("done: " + std::to_string(n_op) + " OP, " + std::to_string(n_cp) + " CP, " +
           std::to_string(n_dp) + " DP, " + std::to_string(n_fail) + " failed");

  finish_run(cfg, {"phase_map.csv", "boundaries.csv", "summary.json"}, notes, t0);
  return 0;
}

int cmd_pme(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  log_line("two-step protocol: S -> A -> F vs direct S -> F");
  const PmeOutcome res = run_pme(cfg.model, cfg.pme);

  const fs::path dir = cfg.output_dir;
  std::vector<std::string> files;
  auto write_leg = [&](const PmeLeg& leg, const std::string& name) {
    if (leg.times.empty()) return;
    TimeseriesOptions opt;
    opt.nu_max = cfg.nu_max;
    opt.scalars.push_back({"M", &leg.m_norm});
    opt.scalars.push_back({"envelope", &leg.envelope});
    write_timeseries(leg.traj, (dir / name).string(), opt);
    files.push_back(name);
  };
  write_leg(res.direct, "direct.csv");
  write_leg(res.leg1, "leg1.csv");
  write_leg(res.leg2, "leg2.csv");
  if (!res.leg1.traj.checkpoints.empty()) {
    const auto& [t_sw, theta_sw] = *res.leg1.traj.checkpoints.begin();
    write_checkpoint((dir / "theta_switch.gnth").string(), theta_sw, t_sw);
    files.push_back("theta_switch.gnth");
  }

  const char* policy = cfg.pme.policy == SwitchPolicy::FixedTime      ? "fixed"
                       : cfg.pme.policy == SwitchPolicy::MinDistance  ? "min-distance"
                                                                      : "plateau-start";
  json outcome = {{"t_sf", finite_or_null(res.t_sf)},
                  {"t_si", finite_or_null(res.t_si)},
                  {"t_if", finite_or_null(res.t_if)},
                  {"pme_holds", res.pme_holds},
                  {"all_relaxed", res.all_relaxed},
                  {"degenerate", res.degenerate},
                  {"threshold", res.threshold},
                  {"policy", policy},
                  {"switch_requested", res.switch_requested}};
  write_json_file(dir / "outcome.json", outcome);
  files.push_back("outcome.json");
  {
    std::ostringstream msg;
    msg << "t_SF = " << res.t_sf << ", t_SI = " << res.t_si << ", t_IF = " << res.t_if
        << " -> two-step wins: " << (res.pme_holds ? "yes" : "no");
    log_line(msg.str());
  }

  finish_run(cfg, files, {}, t0);
  return 0;
}

int cmd_qme(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  log_line("multi-copy comparison: " + std::to_string(cfg.qme.points.size()) +
           " copies -> (mu = " + std::to_string(cfg.qme.target.mu) +
           ", g = " + std::to_string(cfg.qme.target.g) + ")");
  const QmeOutcome res = run_qme(cfg.model, cfg.qme);

  const fs::path dir = cfg.output_dir;
  std::vector<std::string> files;
  std::vector<std::string> notes;
  json copies = json::array();
  for (std::size_t i = 0; i < res.copies.size(); ++i) {
    const QmeCopyResult& c = res.copies[i];
    json jc = {{"mu", c.point.mu},
               {"g", c.point.g},
               {"D_E", c.d_e},
               {"ok", c.ok},
               {"pre_nu", c.pre_nu},
               {"pre_amplitude", c.pre_amplitude},
               {"relaxed", c.tau.relaxed},
               {"tau", c.tau.relaxed ? json(c.tau.tau) : json()}};
    if (!c.ok) {
      jc["error"] = c.error;
      notes.push_back("copy " + std::to_string(i) + " failed: " + c.error);
    } else {
      const std::string name = "copy_" + std::to_string(i) + ".csv";
      TimeseriesOptions opt;
      opt.nu_max = cfg.nu_max;
      opt.scalars.push_back({"Mhat", &c.m_hat});
      opt.scalars.push_back({"envelope", &c.envelope});
      write_timeseries(c.traj, (dir / name).string(), opt);
      files.push_back(name);
    }
    copies.push_back(std::move(jc));
  }
  json pairs = json::array();
  for (const auto& p : res.pairs) {
    pairs.push_back({{"closer", {{"mu", res.copies[p.closer].point.mu},
                                 {"g", res.copies[p.closer].point.g}}},
                     {"farther", {{"mu", res.copies[p.farther].point.mu},
                                  {"g", res.copies[p.farther].point.g}}},
                     {"kind", to_string(p.kind)},
                     {"crossing_times", p.crossing_times},
                     {"partial", p.partial}});
  }
  write_json_file(dir / "outcome.json",
                  json{{"copies", copies}, {"pairs", pairs}, {"partial", res.partial}});
  files.push_back("outcome.json");
  for (const auto& p : res.pairs)
    log_line(std::string("pair (") + std::to_string(p.closer) + ", " + std::to_string(p.farther) +
             "): " + to_string(p.kind));

  finish_run(cfg, files, notes, t0);
  return 0;
}

// ---------------------------------------------------------------------------
// validate: fast end-to-end self-checks

void expect(bool ok, const std::string& what) {
  if (!ok) throw PhysicsError(what);
}

} // namespace

std::vector<ValidationCheck> validation_checks() {
  std::vector<ValidationCheck> checks;

  checks.push_back({"mode-resolved dissipator equals thermal-relaxation form", [] {
    ModelParams p;
    p.L = 6;
    p.mu = 0.3;
    p.g = 0.7;
    p.gamma = 0.05;
    p.kBT = 0.05;
    const CorrelationMatrix theta = random_half_filled_theta(p.L, 5);
    const CorrelationMatrix a = rhs(theta, p, DissipatorMode::Matrix);
    const CorrelationMatrix b = rhs(theta, p, DissipatorMode::ExplicitSum);
    const Real scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    expect((a - b).cwiseAbs().maxCoeff() / scale < 1e-12, "dissipator forms disagree");
  }});

  checks.push_back({"correlation-matrix evolution matches many-body reference (L = 4)", [] {
    ModelParams p;
    p.L = 4;
    p.mu = 0.5;
    p.gamma = 0.01;
    p.kBT = 0.05;
    const DisplacementField frozen = DisplacementField::Zero(p.L);
    const CorrelationMatrix theta0 = random_half_filled_theta(p.L, 7);

    EvolutionConfig evo;
    evo.dt = 0.05;
    evo.t_max = 5.0;
    evo.sample_stride = 100;
    evo.steady_tol = 0; // run the full horizon
    evo.frozen_sigma = frozen;
    const TrajectoryRecord mean_field = evolve(theta0, p, evo);

    const ManyBodyBasis basis = jordan_wigner_basis(p.L);
    const RealMatrix h = build_hamiltonian(frozen, p);
    const ComplexMatrix liou = build_liouvillian(basis, h, p);
    const ComplexMatrix rho0 = gaussian_density_matrix(basis, theta0);
    const ManyBodyTrajectory mb = evolve_many_body(rho0, liou, evo.dt, evo.t_max, 100);

    const Real diff =
        (mean_field.theta_final - mb.theta.back()).cwiseAbs().maxCoeff();
    expect(diff < 1e-8, "pictures differ by " + std::to_string(diff));
  }});

  checks.push_back({"bath equilibrium is stationary", [] {
    ModelParams p;
    p.L = 8;
    p.mu = 0.2;
    p.g = 0.5;
    p.gamma = 0.02;
    p.kBT = 0.05;
    std::mt19937_64 rng(3);
    std::normal_distribution<Real> dist(0.0, 0.3);
    DisplacementField sigma(p.L);
    for (int j = 0; j < p.L; ++j) sigma(j) = dist(rng);
    const CorrelationMatrix theta_th = thermal_theta(diagonalize(build_hamiltonian(sigma, p)), p.kBT);
    const CorrelationMatrix r = rhs(theta_th, p, DissipatorMode::Matrix, &sigma);
    expect(r.cwiseAbs().maxCoeff() < 1e-10, "thermal state drifts");
  }});

  checks.push_back({"state overlap purity identity", [] {
    ModelParams p;
    p.L = 8;
    p.mu = 0.2;
    p.g = 0.5;
    p.gamma = 0.02;
    p.kBT = 0.05;
    const SpectralDecomposition s =
        diagonalize(build_hamiltonian(DisplacementField::Zero(p.L), p));
    const CorrelationMatrix theta = thermal_theta(s, p.kBT);
    Real expected = 1.0;
    for (int k = 0; k < p.L; ++k) {
      const Real f = fermi(s.eps(k), p.kBT);
      expected *= (1.0 - f) * (1.0 - f) + f * f;
    }
    expect(std::abs(fidelity(theta, theta) - expected) < 1e-10, "purity identity violated");
  }});

  checks.push_back({"spectral weights conserve norm", [] {
    std::mt19937_64 rng(11);
    std::normal_distribution<Real> dist;
    RealVector m(10);
    for (int j = 0; j < 10; ++j) m(j) = dist(rng);
    const HarmonicSpectrum s = harmonics(m);
    const Real lhs = m.squaredNorm() / m.size();
    const Real rhs_sum = s.mhat.squaredNorm();
    expect(std::abs(lhs - rhs_sum) < 1e-12 * std::max(1.0, lhs), "norm not conserved");
  }});

  checks.push_back({"upper envelope is monotone and dominates", [] {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<Real> dist(0.0, 1.0);
    DistanceSeries s;
    for (int i = 0; i < 200; ++i) {
      s.times.push_back(i);
      s.values.push_back(dist(rng) * std::exp(-i / 50.0));
    }
    const DistanceSeries env = upper_envelope(s);
    for (std::size_t i = 0; i < env.values.size(); ++i) {
      expect(env.values[i] >= s.values[i], "envelope below series");
      if (i) expect(env.values[i] <= env.values[i - 1], "envelope not monotone");
    }
  }});

  checks.push_back({"relaxation-time interpolation", [] {
    DistanceSeries env;
    env.times = {0.0, 10.0};
    env.values = {1.0, 0.001};
    const RelaxationTime tau = relaxation_time(env, 0.01, Interp::Linear);
    expect(tau.relaxed, "threshold not crossed");
    expect(std::abs(tau.tau - 10.0 * (1.0 - 0.01) / (1.0 - 0.001)) < 1e-12, "interpolation off");
  }});

  checks.push_back({"checkpoint round-trip is bit-exact", [] {
    const CorrelationMatrix theta = random_half_filled_theta(10, 11);
    const fs::path path = fs::temp_directory_path() / "gn_validate_ckpt.gnth";
    write_checkpoint(path.string(), theta, 12.5);
    const Checkpoint back = read_checkpoint(path.string());
    fs::remove(path);
    expect(back.time == 12.5, "time not preserved");
    expect(back.theta.rows() == theta.rows(), "shape not preserved");
    expect(std::memcmp(back.theta.data(), theta.data(),
                       sizeof(Complex) * static_cast<std::size_t>(theta.size())) == 0,
           "payload not bit-identical");
  }});

  checks.push_back({"sweep results are worker-count independent", [] {
    auto job = [](std::size_t i) {
      std::mt19937_64 rng(derive_seed(42, i));
      std::uniform_real_distribution<Real> dist;
      Real acc = 0;
      for (int k = 0; k < 1000 + 100 * static_cast<int>(i % 7); ++k) acc += dist(rng);
      return acc;
    };
    std::vector<Real> serial(16), parallel(16);
    parallel_for_each(16, [&](std::size_t i) { serial[i] = job(i); }, 1);
    parallel_for_each(16, [&](std::size_t i) { parallel[i] = job(i); }, 4);
    expect(serial == parallel, "results depend on worker count");
  }});

  return checks;
}

namespace {

int cmd_validate(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  int failed = 0;
  json rows = json::array();
  for (const auto& check : validation_checks()) {
    std::string error;
    try {
      check.run();
    } catch (const std::exception& e) {
      error = e.what();
      ++failed;
    }
    std::printf("[%s] %s%s%s\n", error.empty() ? " ok " : "FAIL", check.name.c_str(),
                error.empty() ? "" : ": ", error.c_str());
    rows.push_back({{"name", check.name}, {"ok", error.empty()}, {"error", error}});
  }
  std::printf("%d/%zu checks passed\n", static_cast<int>(rows.size()) - failed, rows.size());
  write_json_file(fs::path(cfg.output_dir) / "validate_report.json",
                  json{{"checks", rows}, {"failed", failed}});
  finish_run(cfg, {"validate_report.json"}, {}, t0);
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// plot

std::vector<std::vector<std::string>> read_raw_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("plot: cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw ConfigError("plot: '" + path + "' is empty");
  return rows;
}

int cmd_plot(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.plot.input.empty()) throw ConfigError("plot: plot.input (a CSV path) is required");
  fs::create_directories(cfg.output_dir);
  const fs::path out_path = fs::path(cfg.plot.output).is_absolute()
                                ? fs::path(cfg.plot.output)
                                : fs::path(cfg.output_dir) / cfg.plot.output;

  std::string svg;
  if (cfg.plot.kind == "lines") {
    const TimeseriesData data = read_timeseries(cfg.plot.input);
    const auto t_col = data.column("t");
    if (!t_col) throw ConfigError("plot: '" + cfg.plot.input + "' has no 't' column");
    std::vector<std::string> wanted = cfg.plot.columns;
    if (wanted.empty()) {
      for (const char* name : {"M", "Mhat", "F_fw", "F_bw", "D_T", "envelope"})
        if (data.column(name)) wanted.push_back(name);
      if (wanted.empty()) {
        for (const auto& c : data.columns)
          if (c.rfind("mhat_", 0) == 0) wanted.push_back(c);
      }
    }
    if (wanted.empty()) throw ConfigError("plot: no columns to draw");
    std::vector<PlotSeriesData> series;
    for (const auto& name : wanted) {
      const auto col = data.column(name);
      if (!col) throw ConfigError("plot: column '" + name + "' not found");
      PlotSeriesData s;
      s.label = name;
      for (const auto& row : data.rows) {
        if (row[*t_col] && row[*col]) {
          s.x.push_back(*row[*t_col]);
          s.y.push_back(*row[*col]);
        }
      }
      series.push_back(std::move(s));
    }
    LinePlotOptions opt;
    opt.title = fs::path(cfg.plot.input).filename().string();
    opt.log_y = cfg.plot.log_y;
    opt.y_label = cfg.plot.log_y ? "value (log)" : "value";
    svg = svg_line_plot(series, opt);
  } else { // heatmap
    const auto rows = read_raw_csv(cfg.plot.input);
    const auto& header = rows.front();
    auto col_of = [&](const std::string& name) -> std::size_t {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
      throw ConfigError("plot: column '" + name + "' not found in '" + cfg.plot.input + "'");
    };
    const std::size_t c_mu = col_of("mu"), c_g = col_of("g"), c_label = col_of("label");
    HeatmapOptions opt;
    opt.title = fs::path(cfg.plot.input).filename().string();
    std::vector<HeatmapCell> cells;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != header.size())
        throw ConfigError("plot: ragged row in '" + cfg.plot.input + "'");
      HeatmapCell cell;
      cell.mu = std::stod(row[c_mu]);
      cell.g = std::stod(row[c_g]);
      const std::string& label = row[c_label];
      auto it = std::find(opt.category_names.begin(), opt.category_names.end(), label);
      if (it == opt.category_names.end()) {
        opt.category_names.push_back(label);
        cell.category = static_cast<int>(opt.category_names.size()) - 1;
      } else {
        cell.category = static_cast<int>(it - opt.category_names.begin());
      }
      cells.push_back(cell);
    }
    svg = svg_phase_heatmap(cells, opt);
  }

  {
    std::ofstream os(out_path, std::ios::trunc);
    if (!os) throw ConfigError("plot: cannot open '" + out_path.string() + "' for writing");
    os << svg;
    if (!os.flush()) throw ConfigError("plot: write failed");
  }
  log_line("wrote " + out_path.string());
  const bool inside = out_path.parent_path() == fs::path(cfg.output_dir);
  finish_run(cfg, inside ? std::vector<std::string>{out_path.filename().string()}
                         : std::vector<std::string>{},
             {}, t0);
  return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"self-consistent lattice Lindblad simulator"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::uint64_t seed = 0;
  int workers = 0;
  app.add_option("-c,--config", config_path, "JSON configuration file");
  app.add_option("-s,--set", overrides, "override as dotted key.path=value (repeatable)");
  auto* opt_out = app.add_option("-o,--output-dir", output_dir, "output directory");
  auto* opt_seed = app.add_option("--seed", seed, "master seed");
  auto* opt_workers = app.add_option("-j,--workers", workers, "worker thread count");

  app.add_subcommand("scan", "classify steady states over a parameter grid");
  app.add_subcommand("steady", "solve one steady state and store it");
  app.add_subcommand("quench", "evolve across a parameter quench and analyze it");
  app.add_subcommand("pme", "two-step relaxation protocol vs the direct route");
  app.add_subcommand("qme", "multi-copy relaxation comparison toward one target");
  app.add_subcommand("validate", "run fast physics and plumbing self-checks");
  app.add_subcommand("plot", "render a CSV artifact as an SVG figure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (opt_out->count()) overrides.push_back("output_dir=" + output_dir);
  if (opt_seed->count()) overrides.push_back("seed=" + std::to_string(seed));
  if (opt_workers->count()) overrides.push_back("workers=" + std::to_string(workers));

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const RunConfig cfg = load_config(config_path, overrides, command);
    if (command == "steady") return cmd_steady(cfg);
    if (command == "quench") return cmd_quench(cfg);
    if (command == "scan") return cmd_scan(cfg);
    if (command == "pme") return cmd_pme(cfg);
    if (command == "qme") return cmd_qme(cfg);
    if (command == "validate") return cmd_validate(cfg);
    if (command == "plot") return cmd_plot(cfg);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << std::endl;
    return 2;
  } catch (const PhysicsError& e) {
    std::cerr << "physics invariant violated: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

} // namespace gn
