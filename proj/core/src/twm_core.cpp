#include "twmg/twm_core.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "twmg/diagnostics.hpp"
#include "twmg/error.hpp"

namespace twmg {
namespace {

constexpr complex kI{0.0, 1.0};
constexpr double kWeakLimit = 0.1;

// Real-valued propagators of the closed form: C = cosh(Q r / 2) and
// S = sinh(Q r / 2) / Q, continued analytically through Q^2 = 0.
struct Propagators {
  double c;
  double s;
};

Propagators propagators(double q_squared, double r) {
  const double half = 0.5 * r;
  if (q_squared > 0) {
    const double q = std::sqrt(q_squared);
    return {std::cosh(q * half), std::sinh(q * half) / q};
  }
  if (q_squared < 0) {
    const double q = std::sqrt(-q_squared);
    return {std::cos(q * half), std::sin(q * half) / q};
  }
  return {1.0, half};
}

double radicand(const GainParams& p) {
  return 4.0 * p.g * p.g * std::norm(p.a3) / (p.proj1 * p.proj2) - p.dk * p.dk;
}

complex pump_phase(complex a3) {
  const double mag = std::abs(a3);
  return mag > 0 ? a3 / mag : complex{1.0, 0.0};
}

}  // namespace

void GainParams::validate() const {
  if (!(proj1 > 0 && proj1 <= 1) || !(proj2 > 0 && proj2 <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "projections b.k1, b.k2 must lie in (0, 1]");
  }
  if (!(r >= 0)) throw Error(ErrorCode::InvalidArgument, "interaction length must be >= 0");
}

complex q_parameter(const GainParams& p) {
  const double q2 = radicand(p);
  return q2 >= 0 ? complex{std::sqrt(q2), 0.0} : complex{0.0, std::sqrt(-q2)};
}

CoupledAmplitudes evolve_mismatched(const CoupledAmplitudes& c0, const GainParams& p) {
  p.validate();
  const auto [c, s] = propagators(radicand(p), p.r);
  const complex diag = c + kI * p.dk * s;
  const complex cross1 = 2.0 * kI * p.g * p.a3 / p.proj1 * s;
  const complex cross2 = 2.0 * kI * p.g * p.a3 / p.proj2 * s;
  const complex carrier = std::exp(-kI * (0.5 * p.dk * p.r));
  return {(c0.a1 * diag + std::conj(c0.a2) * cross1) * carrier,
          (std::conj(c0.a1) * cross2 + c0.a2 * diag) * carrier};
}

CoupledAmplitudes evolve_matched(const CoupledAmplitudes& c0, const GainParams& p, double fgeo) {
  const double arg = p.g * std::abs(p.a3) * fgeo * p.r;
  const double ch = std::cosh(arg);
  const double sh = std::sinh(arg);
  const complex phase = pump_phase(p.a3);
  return {c0.a1 * ch + kI * phase * std::conj(c0.a2) * sh,
          kI * phase * std::conj(c0.a1) * sh + c0.a2 * ch};
}

double weak_argument(const GainParams& p, double fgeo) noexcept {
  return std::abs(p.g * std::abs(p.a3) * fgeo * p.r);
}

CoupledAmplitudes evolve_weak(const CoupledAmplitudes& c0, const GainParams& p, double fgeo) {
  if (const double arg = weak_argument(p, fgeo); arg > kWeakLimit) {
    std::ostringstream msg;
    msg << "WeakLimitViolated: g|a3|f r = " << arg << " exceeds " << kWeakLimit;
    warn(msg.str());
  }
  return {c0.a1, kI * p.g * fgeo * p.r * std::conj(c0.a1) * p.a3};
}

CoupledAmplitudes ode_oracle(const CoupledAmplitudes& c0, const GainParams& p, int steps) {
  namespace odeint = boost::numeric::odeint;
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "ode_oracle needs steps >= 1");
  p.validate();
  if (p.r == 0) return c0;

  using State = std::array<double, 4>;
  State state{c0.a1.real(), c0.a1.imag(), c0.a2.real(), c0.a2.imag()};

  const complex k1 = kI * p.g * p.a3 / p.proj1;
  const complex k2 = kI * p.g * p.a3 / p.proj2;
  auto rhs = [&](const State& x, State& dxds, double s) {
    const complex a1{x[0], x[1]};
    const complex a2{x[2], x[3]};
    const complex phase = std::exp(-kI * (p.dk * s));
    const complex d1 = k1 * std::conj(a2) * phase;
    const complex d2 = k2 * std::conj(a1) * phase;
    dxds = {d1.real(), d1.imag(), d2.real(), d2.imag()};
  };

  auto stepper = odeint::make_controlled(1e-14, 1e-10, odeint::runge_kutta_dopri5<State>{});
  odeint::integrate_adaptive(stepper, rhs, state, 0.0, p.r, p.r / steps);
  return {{state[0], state[1]}, {state[2], state[3]}};
}

}  // namespace twmg
