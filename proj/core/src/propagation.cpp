#include "twmg/propagation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "twmg/error.hpp"

namespace twmg {
namespace {

using complex = std::complex<double>;
using detail::FftSign;
constexpr complex kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_square(const ScalarField& f, const char* op) {
  if (f.width() != f.height()) {
    throw Error(ErrorCode::InvalidArgument, std::string(op) + " requires a square grid");
  }
}

// Multiplies every sample by exp(i * coeff * (x^2 + y^2)).
void apply_quadratic_phase(ScalarField& f, double coeff) {
  for (std::size_t r = 0; r < f.height(); ++r) {
    const double y = f.y(r);
    for (std::size_t c = 0; c < f.width(); ++c) {
      const double x = f.x(c);
      f(r, c) *= std::polar(1.0, coeff * (x * x + y * y));
    }
  }
}

void scale(ScalarField& f, complex s) {
  for (auto& v : f.samples().values()) v *= s;
}

// Single transform with kernel exp(sign * 2 pi i x u) scaled by pitch^2;
// returns a field whose coordinates are u * length_scale.
ScalarField transform(const ScalarField& in, FftSign sign, double length_scale, double wavelength,
                      std::string label) {
  const double out_pitch = length_scale / (static_cast<double>(in.width()) * in.pitch());
  ScalarField out(in.width(), in.height(), out_pitch, wavelength, std::move(label));
  out.samples() = in.samples();
  detail::centered_dft(out.samples(), sign);
  scale(out, in.pitch() * in.pitch());
  return out;
}

ScalarField angular_spectrum(const ScalarField& field, double distance) {
  ScalarField spectrum = field;
  detail::centered_dft(spectrum.samples(), FftSign::Inverse);
  const double k = field.wavenumber();
  const double du = 1.0 / (static_cast<double>(field.width()) * field.pitch());
  const double dv = 1.0 / (static_cast<double>(field.height()) * field.pitch());
  const double half_w = static_cast<double>(field.width() / 2);
  const double half_h = static_cast<double>(field.height() / 2);
  for (std::size_t r = 0; r < field.height(); ++r) {
    const double ky = kTwoPi * (static_cast<double>(r) - half_h) * dv;
    for (std::size_t c = 0; c < field.width(); ++c) {
      const double kx = kTwoPi * (static_cast<double>(c) - half_w) * du;
      const double kz_sq = k * k - kx * kx - ky * ky;
      const complex transfer = kz_sq >= 0 ? std::polar(1.0, -std::sqrt(kz_sq) * distance)
                                          : complex{std::exp(-std::sqrt(-kz_sq) * distance), 0.0};
      spectrum(r, c) *= transfer;
    }
  }
  detail::centered_dft(spectrum.samples(), FftSign::Forward);
  scale(spectrum, 1.0 / static_cast<double>(field.width() * field.height()));
  return spectrum;
}

ScalarField single_fft_fresnel(const ScalarField& field, double distance) {
  require_square(field, "single-FFT Fresnel propagation");
  const double k = field.wavenumber();
  const double lz = field.wavelength() * distance;
  ScalarField work = field;
  apply_quadratic_phase(work, -k / (2.0 * distance));
  ScalarField out = transform(work, FftSign::Inverse, lz, field.wavelength(), field.label());
  apply_quadratic_phase(out, -k / (2.0 * distance));
  scale(out, kI / lz * std::polar(1.0, -k * distance));
  return out;
}

}  // namespace

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

ScalarField::ScalarField(std::size_t width, std::size_t height, double pitch, double wavelength,
                         std::string label)
    : samples_(width, height), pitch_(pitch), wavelength_(wavelength), label_(std::move(label)) {
  if (!is_power_of_two(width) || !is_power_of_two(height)) {
    throw Error(ErrorCode::InvalidArgument, "field dimensions must be powers of two");
  }
  if (!(pitch > 0) || !(wavelength > 0)) {
    throw Error(ErrorCode::InvalidArgument, "pitch and wavelength must be positive");
  }
}

double ScalarField::wavenumber() const noexcept { return kTwoPi / wavelength_; }

double ScalarField::x(std::size_t col) const noexcept {
  return (static_cast<double>(col) - static_cast<double>(width() / 2)) * pitch_;
}

double ScalarField::y(std::size_t row) const noexcept {
  return (static_cast<double>(row) - static_cast<double>(height() / 2)) * pitch_;
}

double ScalarField::total_power() const noexcept {
  double sum = 0.0;
  for (const auto& v : samples_.values()) sum += std::norm(v);
  return sum * pitch_ * pitch_;
}

RealGrid ScalarField::intensity() const {
  RealGrid out(width(), height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(samples_[i]);
  return out;
}

double critical_distance(const ScalarField& field) noexcept {
  const auto n = static_cast<double>(std::max(field.width(), field.height()));
  return n * field.pitch() * field.pitch() / field.wavelength();
}

ScalarField lens_image_2f2f(const ScalarField& object, const InteractionGeometry& g) {
  require_square(object, "lens_image_2f2f");
  const double lambda = g.k3.wavelength;
  const double f = g.focal_length;
  const double d = g.image_distance;
  if (std::abs(object.wavelength() - lambda) > 1e-9 * lambda) {
    throw Error(ErrorCode::InvalidArgument, "object field must be sampled at the pump wavelength");
  }
  if (std::abs(g.object_distance - 2.0 * f) > 1e-9 * f) {
    throw Error(ErrorCode::InvalidArgument, "lens_image_2f2f assumes d_O = 2f");
  }
  const double n = static_cast<double>(object.width());
  if (object.pitch() * object.pitch() * n > lambda * d) {
    std::ostringstream msg;
    msg << "object pitch " << object.pitch() << " m too coarse: W pitch^2 = "
        << n * object.pitch() * object.pitch() << " exceeds lambda d = " << lambda * d;
    throw Error(ErrorCode::SamplingViolation, msg.str());
  }

  const double k = kTwoPi / lambda;
  ScalarField work = object;
  apply_quadratic_phase(work, k * (f - d) / (2.0 * d * f));
  ScalarField out = transform(work, FftSign::Inverse, lambda * d, lambda, "crystal-entrance");
  apply_quadratic_phase(out, k / (2.0 * d));
  scale(out, 1.0 / (kI * lambda * d));
  return out;
}

ScalarField free_propagate(const ScalarField& field, double distance, PropagationMethod method) {
  if (!(distance >= 0)) throw Error(ErrorCode::InvalidArgument, "distance must be >= 0");
  if (distance == 0) return field;
  const double critical = critical_distance(field);
  if (method == PropagationMethod::Auto) {
    method = distance <= critical ? PropagationMethod::AngularSpectrum : PropagationMethod::SingleFft;
  }
  if (method == PropagationMethod::AngularSpectrum) {
    if (distance > critical) {
      std::ostringstream msg;
      msg << "angular spectrum over " << distance << " m exceeds critical distance " << critical
          << " m";
      throw Error(ErrorCode::SamplingViolation, msg.str());
    }
    return angular_spectrum(field, distance);
  }
  return single_fft_fresnel(field, distance);
}

ScalarField fourier_plane(const ScalarField& field, double focal, double distance) {
  require_square(field, "fourier_plane");
  if (!(focal > 0)) throw Error(ErrorCode::InvalidArgument, "focal length must be positive");
  const double k = field.wavenumber();
  const double lf = field.wavelength() * focal;
  ScalarField out = transform(field, FftSign::Inverse, lf, field.wavelength(), "fourier-plane");
  const double residual = 1.0 - distance / focal;
  if (residual != 0.0) apply_quadratic_phase(out, -k * residual / (2.0 * focal));
  scale(out, 1.0 / (kI * lf));
  return out;
}

ScalarField inverse_fourier_plane(const ScalarField& field, double focal, double distance) {
  require_square(field, "inverse_fourier_plane");
  if (!(focal > 0)) throw Error(ErrorCode::InvalidArgument, "focal length must be positive");
  const double k = field.wavenumber();
  const double lf = field.wavelength() * focal;
  ScalarField work = field;
  const double residual = 1.0 - distance / focal;
  if (residual != 0.0) apply_quadratic_phase(work, k * residual / (2.0 * focal));
  scale(work, kI * lf);
  // Input samples sit at x1 = lambda f u, so du = pitch / (lambda f).
  const double du = field.pitch() / lf;
  ScalarField out = transform(work, FftSign::Forward, 1.0, field.wavelength(), "fourier-inverse");
  // transform() scaled by pitch^2 and produced coordinates 1/(W pitch); fix both.
  const double pitch_out = 1.0 / (static_cast<double>(field.width()) * du);
  ScalarField result(field.width(), field.height(), pitch_out, field.wavelength(), out.label());
  result.samples() = std::move(out.samples());
  scale(result, du * du / (field.pitch() * field.pitch()));
  return result;
}

}  // namespace twmg
