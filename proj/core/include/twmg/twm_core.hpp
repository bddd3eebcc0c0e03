#pragma once

#include <complex>

namespace twmg {

using complex = std::complex<double>;

/// Slowly varying seed (a1) and generated (a2) amplitudes. Dimensionless; the
/// coupling g carries every dimensional prefactor.
struct CoupledAmplitudes {
  complex a1{};
  complex a2{};
};

/// Parameters of the undepleted-pump coupled equations
///   p1 da1/ds = i g a3 conj(a2) exp(-i dk s)
///   p2 da2/ds = i g a3 conj(a1) exp(-i dk s)
/// integrated along the coordinate s in [0, r].
struct GainParams {
  double g{0};      // effective coupling, 1/(m * amplitude)
  complex a3{};     // non-evolving pump amplitude
  double dk{0};     // mismatch along the integration axis, rad/m
  double proj1{1};  // axis . k1_hat
  double proj2{1};  // axis . k2_hat
  double r{0};      // interaction length, m

  /// Throws InvalidArgument unless proj1, proj2 in (0, 1] and r >= 0.
  void validate() const;
};

/// Q = sqrt(4 g^2 |a3|^2 / (p1 p2) - dk^2); negative radicands return the
/// positive imaginary branch.
complex q_parameter(const GainParams& p);

/// Closed-form solution for arbitrary mismatch. Valid in both the hyperbolic
/// (gain) and oscillatory (mismatch-dominated) regimes.
CoupledAmplitudes evolve_mismatched(const CoupledAmplitudes& c0, const GainParams& p);

/// Phase-matched solution with hyperbolic argument g |a3| fgeo r. Only g, a3
/// and r are read from p. A zero pump takes the phase a3/|a3| as 1.
CoupledAmplitudes evolve_matched(const CoupledAmplitudes& c0, const GainParams& p, double fgeo);

/// g |a3| fgeo r, the small parameter of the weak-conversion expansion.
double weak_argument(const GainParams& p, double fgeo) noexcept;

/// First-order weak-conversion result: a1 unchanged, a2 = i g fgeo r conj(a1) a3.
/// Emits a warning through twmg::warn when weak_argument exceeds 0.1.
CoupledAmplitudes evolve_weak(const CoupledAmplitudes& c0, const GainParams& p, double fgeo);

/// Adaptive Dormand-Prince integration of the coupled equations (relative
/// tolerance 1e-10). `steps` sets the initial step r/steps. Test oracle only.
CoupledAmplitudes ode_oracle(const CoupledAmplitudes& c0, const GainParams& p, int steps);

}  // namespace twmg
