#include "gn/evolution.hpp"

#include "gn/initstate.hpp"
#include "gn/model.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

namespace gn {

void EvolutionConfig::validate() const {
  if (!(dt > 0) || dt > 0.5) throw ConfigError("EvolutionConfig: dt must be in (0, 0.5]");
  if (!(t_max > 0)) throw ConfigError("EvolutionConfig: t_max must be > 0");
  if (sample_stride < 1) throw ConfigError("EvolutionConfig: sample_stride must be >= 1");
  if (theta_stride < 0) throw ConfigError("EvolutionConfig: theta_stride must be >= 0");
  if (bounds_check_stride < 0) throw ConfigError("EvolutionConfig: bounds_check_stride >= 0");
  for (Real t : checkpoint_times)
    if (t < 0 || t > t_max + 1e-9)
      throw ConfigError("EvolutionConfig: checkpoint time outside [0, t_max]");
}

ComplexMatrix coherent_rhs_matrix(const CorrelationMatrix& theta, const RealMatrix& h) {
  const Complex iu(0, 1);
  ComplexMatrix hc = h.cast<Complex>();
  ComplexMatrix out = hc * theta;
  out.noalias() -= theta * hc;
  return iu * out;
}

ComplexMatrix coherent_rhs_explicit(const CorrelationMatrix& theta,
                                    const DisplacementField& sigma, Real J) {
  const int L = static_cast<int>(theta.rows());
  if (sigma.size() != L) throw ConfigError("coherent_rhs_explicit: sigma/theta size mismatch");
  const Complex iu(0, 1);
  ComplexMatrix out(L, L);
  auto bond = [&](int j) { return J + sigma((j + L) % L); };
  for (int j = 0; j < L; ++j) {
    const int jm = (j + L - 1) % L, jp = (j + 1) % L;
    for (int k = 0; k < L; ++k) {
      const int km = (k + L - 1) % L, kp = (k + 1) % L;
      out(j, k) = -iu * bond(j - 1) * theta(jm, k) + iu * bond(k) * theta(j, kp) -
                  iu * bond(j) * theta(jp, k) + iu * bond(k - 1) * theta(j, km);
    }
  }
  return out;
}

ComplexMatrix dissipator_rhs_matrix(const CorrelationMatrix& theta,
                                    const CorrelationMatrix& theta_th, Real gamma) {
  return -gamma * (theta - theta_th);
}

ComplexMatrix dissipator_rhs_explicit(const CorrelationMatrix& theta,
                                      const SpectralDecomposition& s, Real gamma, Real kBT) {
  const int L = static_cast<int>(theta.rows());
  if (s.u.rows() != L || s.u.cols() != L)
    throw ConfigError("dissipator_rhs_explicit: mode matrix size mismatch");
  const ComplexMatrix& u = s.u;
  ComplexMatrix out = ComplexMatrix::Zero(L, L);
  for (int e = 0; e < L; ++e) {
    const Real f = fermi(s.eps(e), kBT);
    for (int j = 0; j < L; ++j) {
      for (int k = 0; k < L; ++k) {
        Complex acc(0, 0);
        for (int r = 0; r < L; ++r) {
          acc += -(1.0 - f) * (u(e, r) * std::conj(u(e, j)) * theta(r, k) +
                               u(e, k) * std::conj(u(e, r)) * theta(j, r));
          acc += f * (std::conj(u(e, r)) * u(e, k) * ((r == j ? 1.0 : 0.0) - theta(j, r)) +
                      std::conj(u(e, j)) * u(e, r) * ((k == r ? 1.0 : 0.0) - theta(r, k)));
        }
        out(j, k) += 0.5 * gamma * acc;
      }
    }
  }
  return out;
}

ComplexMatrix rhs(const CorrelationMatrix& theta, const ModelParams& p, DissipatorMode mode,
                  const DisplacementField* sigma_override) {
  const DisplacementField sigma =
      sigma_override ? *sigma_override : self_consistent_sigma(theta, p);
  const RealMatrix h = build_hamiltonian(sigma, p);
  ComplexMatrix out = coherent_rhs_matrix(theta, h);
  if (p.gamma > 0) {
    const SpectralDecomposition s = diagonalize(h);
    if (mode == DissipatorMode::Matrix)
      out += dissipator_rhs_matrix(theta, thermal_theta(s, p.kBT), p.gamma);
    else
      out += dissipator_rhs_explicit(theta, s, p.gamma, p.kBT);
  }
  return out;
}

namespace {

// Integrator workspace.  The state is kept split into real and imaginary
// parts so every product in the hot loop is a real GEMM.
class Engine {
public:
  Engine(const CorrelationMatrix& theta0, const ModelParams& p, const EvolutionConfig& cfg)
      : p_(p), cfg_(cfg), L_(p.L) {
    if (theta0.rows() != L_ || theta0.cols() != L_)
      throw ConfigError("evolve: theta0 is not L x L");
    R_ = theta0.real();
    I_ = theta0.imag();
    hermitize();
    h_.setZero(L_, L_);
    sig_.resize(L_);
    Tth_.setZero(L_, L_);
    for (auto* m : {&k1R_, &k1I_, &k2R_, &k2I_, &k3R_, &k3I_, &k4R_, &k4I_, &aR_, &aI_, &tmp_})
      m->resize(L_, L_);
  }

  void rk4_step() {
    const Real dt = cfg_.dt;
    const bool each_stage = cfg_.rediag == RediagMode::PerStage;
    stage_rhs(R_, I_, true, k1R_, k1I_);
    aR_ = R_ + (0.5 * dt) * k1R_;
    aI_ = I_ + (0.5 * dt) * k1I_;
    stage_rhs(aR_, aI_, each_stage, k2R_, k2I_);
    aR_ = R_ + (0.5 * dt) * k2R_;
    aI_ = I_ + (0.5 * dt) * k2I_;
    stage_rhs(aR_, aI_, each_stage, k3R_, k3I_);
    aR_ = R_ + dt * k3R_;
    aI_ = I_ + dt * k3I_;
    stage_rhs(aR_, aI_, each_stage, k4R_, k4I_);
    R_ += (dt / 6.0) * (k1R_ + 2.0 * k2R_ + 2.0 * k3R_ + k4R_);
    I_ += (dt / 6.0) * (k1I_ + 2.0 * k2I_ + 2.0 * k3I_ + k4I_);
    hermitize();
  }

  DisplacementField sigma() const {
    DisplacementField s(L_);
    current_sigma(R_, s);
    return s;
  }

  CorrelationMatrix theta() const {
    CorrelationMatrix t(L_, L_);
    t.real() = R_;
    t.imag() = I_;
    return t;
  }

  void check_bounds(Real t) const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(theta(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw PhysicsError("evolve: occupation-bound eigensolve failed at t = " + std::to_string(t));
    const Real lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (lo < -cfg_.bounds_tol || hi > 1.0 + cfg_.bounds_tol)
      throw PhysicsError("evolve: occupation spectrum [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "] outside [0,1] at t = " + std::to_string(t) +
                         "; the step size is likely too large for these parameters");
  }

private:
  void current_sigma(const RealMatrix& Rs, DisplacementField& out) const {
    if (cfg_.frozen_sigma) {
      out = *cfg_.frozen_sigma;
      return;
    }
    const Real c = 2.0 * p_.g * p_.g;
    for (int j = 0; j < L_; ++j) out(j) = c * Rs(j, (j + 1) % L_);
  }

  void build_h() {
    for (int j = 0; j < L_; ++j) {
      h_(j, j) = -p_.mu;
      const int k = (j + 1) % L_;
      const Real t = -(p_.J + sig_(j));
      h_(j, k) = t;
      h_(k, j) = t;
    }
  }

  void refresh_thermal() {
    es_.compute(h_);
    if (es_.info() != Eigen::Success)
      throw PhysicsError("evolve: stage eigensolve did not converge");
    f_ = fermi(es_.eigenvalues(), p_.kBT);
    tmp_.noalias() = es_.eigenvectors() * f_.asDiagonal();
    Tth_.noalias() = tmp_ * es_.eigenvectors().transpose();
  }

  void stage_rhs(const RealMatrix& Rs, const RealMatrix& Is, bool refresh, RealMatrix& kR,
                 RealMatrix& kI) {
    current_sigma(Rs, sig_);
    if (cfg_.dissipator == DissipatorMode::ExplicitSum) {
      // Literal-formula path, used for validation runs; always rediagonalizes.
      CorrelationMatrix th(L_, L_);
      th.real() = Rs;
      th.imag() = Is;
      const ComplexMatrix k = rhs(th, p_, DissipatorMode::ExplicitSum, &sig_);
      kR = k.real();
      kI = k.imag();
      return;
    }
    build_h();
    if (p_.gamma > 0 && refresh) refresh_thermal();
    kR.noalias() = Is * h_;
    kR.noalias() -= h_ * Is;
    kI.noalias() = h_ * Rs;
    kI.noalias() -= Rs * h_;
    if (p_.gamma > 0) {
      kR -= p_.gamma * Rs;
      kR += p_.gamma * Tth_;
      kI -= p_.gamma * Is;
    }
  }

  void hermitize() {
    tmp_ = R_.transpose();
    R_ = 0.5 * (R_ + tmp_);
    tmp_ = I_.transpose();
    I_ = 0.5 * (I_ - tmp_);
  }

  const ModelParams& p_;
  const EvolutionConfig& cfg_;
  int L_;
  RealMatrix R_, I_, h_, Tth_;
  RealMatrix k1R_, k1I_, k2R_, k2I_, k3R_, k3I_, k4R_, k4I_, aR_, aI_, tmp_;
  DisplacementField sig_;
  RealVector f_;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es_;
};

} // namespace

CorrelationMatrix step(const CorrelationMatrix& theta, const ModelParams& p,
                       const EvolutionConfig& cfg) {
  p.validate();
  cfg.validate();
  Engine eng(theta, p, cfg);
  eng.rk4_step();
  return eng.theta();
}

TrajectoryRecord evolve(const CorrelationMatrix& theta0, const ModelParams& p,
                        const EvolutionConfig& cfg, const StopCallback& stop) {
  p.validate();
  cfg.validate();
  if (cfg.frozen_sigma && cfg.frozen_sigma->size() != p.L)
    throw ConfigError("evolve: frozen sigma has wrong length");

  Engine eng(theta0, p, cfg);
  TrajectoryRecord rec;

  const long n_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
  std::set<long> checkpoint_steps;
  for (Real t : cfg.checkpoint_times)
    checkpoint_steps.insert(std::llround(t / cfg.dt));
  const long last_checkpoint = checkpoint_steps.empty() ? -1 : *checkpoint_steps.rbegin();

  const long window_samples =
      (cfg.steady_window > 0 && cfg.steady_tol > 0)
          ? std::llround(cfg.steady_window / (cfg.dt * cfg.sample_stride))
          : 0;

  bool stopped = false;
  auto sample = [&](long istep) -> bool { // returns true when the run should stop
    const Real t = istep * cfg.dt;
    rec.times.push_back(t);
    rec.sigma_series.push_back(eng.sigma());
    const long isample = static_cast<long>(rec.times.size()) - 1;
    if (cfg.theta_stride > 0 && isample % cfg.theta_stride == 0) {
      rec.theta_times.push_back(t);
      rec.theta_series.push_back(eng.theta());
    }
    if (stop && stop(t, rec.sigma_series.back(), eng.theta())) return true;
    if (window_samples >= 1 && isample >= window_samples && t >= cfg.steady_min_time &&
        istep >= last_checkpoint) {
      const Real drift = (rec.sigma_series[isample] - rec.sigma_series[isample - window_samples])
                             .cwiseAbs()
                             .maxCoeff();
      if (drift < cfg.steady_tol) {
        rec.steady_reached = true;
        return true;
      }
    }
    return false;
  };

  if (checkpoint_steps.count(0)) rec.checkpoints[0.0] = eng.theta();
  stopped = sample(0);
  long istep = 0;
  while (!stopped && istep < n_steps) {
    ++istep;
    eng.rk4_step();
    if (cfg.bounds_check_stride > 0 && istep % cfg.bounds_check_stride == 0)
      eng.check_bounds(istep * cfg.dt);
    if (checkpoint_steps.count(istep)) rec.checkpoints[istep * cfg.dt] = eng.theta();
    if (istep % cfg.sample_stride == 0) stopped = sample(istep);
  }
  // The horizon may not be a multiple of the sample stride; always record the
  // end point so series (and any "state at t_final" consumer) include it.
  if (rec.times.empty() || rec.times.back() != istep * cfg.dt) sample(istep);
  if (cfg.theta_stride > 0 && (rec.theta_times.empty() || rec.theta_times.back() != rec.times.back())) {
    rec.theta_times.push_back(rec.times.back());
    rec.theta_series.push_back(eng.theta());
  }

  rec.theta_final = eng.theta();
  rec.t_final = istep * cfg.dt;
  return rec;
}

// ---------------------------------------------------------------------------
// checkpoint files

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

} // namespace

void write_checkpoint(const std::string& path, const CorrelationMatrix& theta, Real time) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("write_checkpoint: cannot open " + path);
  os.write("GNTH", 4);
  put_u32(os, 1u);
  put_u32(os, static_cast<std::uint32_t>(theta.rows()));
  put_f64(os, time);
  for (Eigen::Index j = 0; j < theta.rows(); ++j)
    for (Eigen::Index k = 0; k < theta.cols(); ++k) {
      put_f64(os, theta(j, k).real());
      put_f64(os, theta(j, k).imag());
    }
  if (!os) throw ConfigError("write_checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("read_checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "GNTH", 4) != 0)
    throw ConfigError("read_checkpoint: bad magic in " + path);
  const std::uint32_t version = get_u32(is);
  if (version != 1u)
    throw ConfigError("read_checkpoint: unsupported version " + std::to_string(version));
  const std::uint32_t L = get_u32(is);
  if (L == 0 || L > 100000) throw ConfigError("read_checkpoint: implausible L in " + path);
  Checkpoint cp;
  cp.time = get_f64(is);
  cp.theta.resize(L, L);
  for (std::uint32_t j = 0; j < L; ++j)
    for (std::uint32_t k = 0; k < L; ++k) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      cp.theta(j, k) = Complex(re, im);
    }
  if (!is) throw ConfigError("read_checkpoint: truncated file " + path);
  return cp;
}

} // namespace gn
