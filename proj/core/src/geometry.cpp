#include "twmg/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "twmg/error.hpp"

namespace twmg {
namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kDegenerateTolerance = 1e-12;
constexpr double kEnergyTolerance = 1e-9;
constexpr double kImagePlaneTolerance = 1e-9;

}  // namespace

Vec3 unit_vector(Direction d) noexcept {
  const double cb = std::cos(d.beta);
  return {std::sin(d.beta), cb * std::sin(d.theta), cb * std::cos(d.theta)};
}

Direction direction_of(Vec3 v) noexcept {
  const double len = norm(v);
  return {std::atan2(v.y, v.z), std::asin(std::clamp(v.x / len, -1.0, 1.0))};
}

WaveVector WaveVector::make(Direction d, double wavelength, double index) {
  if (!(wavelength > 0) || !(index > 0)) {
    throw Error(ErrorCode::InvalidConfig, "wavelength and refractive index must be positive");
  }
  return {d, 2.0 * std::numbers::pi * index / wavelength, wavelength, index};
}

double WaveVector::angular_frequency() const noexcept {
  return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength;
}

double WaveVector::vacuum_wavenumber() const noexcept { return 2.0 * std::numbers::pi / wavelength; }

WaveVector phase_matched_partner(const WaveVector& pump, const WaveVector& seed,
                                 double wavelength, double index) {
  const Vec3 difference = pump.vector() - seed.vector();
  return WaveVector::make(direction_of(difference), wavelength, index);
}

InteractionGeometry InteractionGeometry::default_setup() {
  InteractionGeometry g;
  g.k1 = WaveVector::make({}, 1064e-9);
  g.k3 = WaveVector::make({}, 532e-9);
  g.k2 = phase_matched_partner(g.k3, g.k1, 1064e-9, 1.0);
  return g;
}

void InteractionGeometry::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be positive and finite");
    }
  };
  positive(crystal_length, "crystal_length");
  positive(object_distance, "object_distance");
  positive(focal_length, "focal_length");
  positive(lens_to_crystal, "lens_to_crystal");
  positive(image_distance, "image_distance");
  positive(detector_distance, "detector_distance");
  positive(fourier_focal, "fourier_focal");
  positive(fourier_distance, "fourier_distance");
  for (const WaveVector* k : {&k1, &k2, &k3}) {
    positive(k->wavelength, "wavelength");
    positive(k->magnitude, "wavevector magnitude");
  }

  const double expected_d = 2.0 * focal_length - lens_to_crystal;
  if (std::abs(image_distance - expected_d) > kImagePlaneTolerance * focal_length) {
    std::ostringstream msg;
    msg << "image_distance " << image_distance << " m violates d = 2f - d_F = " << expected_d << " m";
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }

  const double inv3 = 1.0 / k3.wavelength;
  const double residual = std::abs(inv3 - 1.0 / k1.wavelength - 1.0 / k2.wavelength) / inv3;
  if (residual >= kEnergyTolerance) {
    std::ostringstream msg;
    msg << "energy matching violated: relative residual " << residual;
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }
}

double angle_between(Direction d1, Direction d2) noexcept {
  const double c = std::sin(d1.beta) * std::sin(d2.beta) +
                   std::cos(d1.beta) * std::cos(d2.beta) * std::cos(d1.theta - d2.theta);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

GeometricFactor geometric_factor(Direction d1, Direction d2) {
  const double c = std::sin(d1.beta) * std::sin(d2.beta) +
                   std::cos(d1.beta) * std::cos(d2.beta) * std::cos(d1.theta - d2.theta);
  // cos^2(psi/2) = (1 + cos psi) / 2
  const double half_cos_sq = 0.5 * (1.0 + c);
  if (half_cos_sq < kDegenerateTolerance) {
    throw Error(ErrorCode::DegenerateGeometry, "beams are counter-propagating (psi -> pi)");
  }
  const double numerator = std::sin(d1.beta) + std::sin(d2.beta) +
                           std::cos(d1.beta) * std::sin(d1.theta) +
                           std::cos(d2.beta) * std::sin(d2.theta) +
                           std::cos(d1.beta) * std::cos(d1.theta) +
                           std::cos(d2.beta) * std::cos(d2.theta);
  return {numerator / (2.0 * half_cos_sq), std::sqrt(half_cos_sq)};
}

PhaseMismatch phase_mismatch(const InteractionGeometry& g) {
  PhaseMismatch out;
  out.vector = g.k3.vector() - g.k2.vector() - g.k1.vector();
  out.magnitude = norm(out.vector);
  const Vec3 bisector = unit_vector(g.k1.direction) + unit_vector(g.k2.direction);
  const double blen = norm(bisector);
  out.along_bisector = blen > 0 ? dot(out.vector, bisector) / blen : 0.0;
  return out;
}

ImageOffset image_offset(double s2, Direction d2) {
  if (!(s2 > 0)) throw Error(ErrorCode::InvalidArgument, "image_offset requires s2 > 0");
  return {s2 * std::sin(d2.beta), s2 * std::cos(d2.beta) * std::sin(d2.theta)};
}

}  // namespace twmg
