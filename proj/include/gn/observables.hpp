// Diagnostics on order-parameter profiles and correlation matrices: Fourier
// harmonics of the staggered field, distance measures between states, fidelity
// and trace distance, relaxation-time extraction, and the detector for
// dynamical phase transitions (metastable window + delayed ordering).
#pragma once

#include "gn/types.hpp"

#include <vector>

namespace gn {

// Fourier amplitudes of a real field m(j):
//   mhat(nu) = (1/L) sum_j exp(-2 pi i nu j / L) m(j),  nu = -L/2 .. L/2-1.
// Sites are indexed 0-based; a 1-based convention would change phases only,
// and every consumer below uses moduli.
struct HarmonicSpectrum {
  ComplexVector mhat; // entry i holds momentum index nu = i - L/2

  int L() const { return static_cast<int>(mhat.size()); }
  int nu_min() const { return -L() / 2; }
  int nu_max() const { return L() / 2 - 1; }
  Complex at(int nu) const { return mhat(nu - nu_min()); }
};

HarmonicSpectrum harmonics(const RealVector& m);

// |mhat(nu)| + |mhat(-nu)| for 1 <= nu < L/2; the self-paired indices nu = 0
// and nu = L/2 (stored as -L/2) contribute a single modulus.
Real folded_amplitude(const HarmonicSpectrum& s, int nu);

struct DominantHarmonic {
  int nu = 0;       // >= 0, ties resolved toward smaller nu
  Real amplitude = 0.0; // folded amplitude at nu
  Real max_abs = 0.0;   // max over all nu of |mhat(nu)|
};
DominantHarmonic dominant_harmonic(const HarmonicSpectrum& s);

// Euclidean distance between spectra:  sqrt( sum_nu |a(nu) - eq(nu)|^2 ).
Real order_distance(const HarmonicSpectrum& at_t, const HarmonicSpectrum& eq);
// Same, normalized by the distance of the t=0 spectrum: the denominator must
// be nonzero (ConfigError otherwise).
Real order_distance(const HarmonicSpectrum& at_t, const HarmonicSpectrum& eq,
                    const HarmonicSpectrum& at0);

Real euclidean_param_distance(const RealVector& a, const RealVector& b);

// Gaussian-state overlap det[ 1 - a - b + 2 a b ].  The determinant must be
// real within 1e-8 and inside [-1e-8, 1+1e-8] (PhysicsError otherwise); the
// returned value is clamped to [0, 1].
Real fidelity(const CorrelationMatrix& a, const CorrelationMatrix& b);

// (1/2) sum |eigenvalues(a - b)|.
Real trace_distance(const CorrelationMatrix& a, const CorrelationMatrix& b);

struct DistanceSeries {
  std::vector<Real> times;
  std::vector<Real> values;
};

// Upper envelope: env(t_i) = max over j >= i of values(j).  Nonincreasing.
DistanceSeries upper_envelope(const DistanceSeries& s);

struct RelaxationTime {
  bool relaxed = false;
  Real tau = 0.0; // meaningful only when relaxed
};

enum class Interp { Linear, SemiLog };

// First time the (nonincreasing) envelope reaches the threshold, interpolated
// between the bracketing samples.  SemiLog interpolates in log(value) and
// falls back to linear when a bracketing value is not positive.
RelaxationTime relaxation_time(const DistanceSeries& envelope, Real threshold,
                               Interp interp = Interp::Linear);

struct DptConfig {
  Real dp_threshold = 1e-3;   // "final state is ordered" gate on max |mhat|
  Real meta_fraction = 0.25;  // metastable window: max |mhat| below this fraction of final
  Real growth_fraction = 0.5; // t_star: dominant folded amplitude exceeds this fraction of final
};

struct DptReport {
  bool has_dpt = false;
  bool final_ordered = false;
  int dominant_nu_final = 0;
  Real final_amplitude = 0.0;  // max |mhat| at the last sample
  bool window_found = false;
  Real window_begin = 0.0;
  Real window_end = 0.0;
  Real t_star = 0.0;           // meaningful when has_dpt
  bool fbw_checked = false;
  Real fbw_jump_time = 0.0;    // midpoint of the largest single-sample jump
  Real fbw_jump_size = 0.0;
  bool ambiguous = false;      // backward-fidelity jump missing or outside [0.5, 1.5] * t_star
};

// Classify a quench trajectory from its harmonic-spectrum series.  A DPT
// requires an ordered final state, a maximal contiguous window where
// max |mhat| stays below meta_fraction * final amplitude, and a later time
// t_star where the final dominant harmonic first exceeds growth_fraction of
// its final value.  When a backward-fidelity series is supplied, its largest
// jump must fall within [0.5, 1.5] * t_star, else the report is ambiguous.
DptReport detect_dpt(const std::vector<Real>& times,
                     const std::vector<HarmonicSpectrum>& spectra,
                     const DistanceSeries* f_bw = nullptr,
                     const DptConfig& cfg = {});

} // namespace gn
