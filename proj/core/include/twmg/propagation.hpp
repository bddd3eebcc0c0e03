#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include "twmg/geometry.hpp"
#include "twmg/grid.hpp"

namespace twmg {

/// Sampled complex amplitude on a transverse plane. Sample (row, col) sits at
/// x = (col - W/2) * pitch, y = (row - H/2) * pitch; W and H are powers of two.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::size_t width, std::size_t height, double pitch, double wavelength,
              std::string label = {});

  std::size_t width() const noexcept { return samples_.width(); }
  std::size_t height() const noexcept { return samples_.height(); }
  double pitch() const noexcept { return pitch_; }
  double wavelength() const noexcept { return wavelength_; }
  double wavenumber() const noexcept;
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  double x(std::size_t col) const noexcept;
  double y(std::size_t row) const noexcept;

  std::complex<double>& operator()(std::size_t row, std::size_t col) { return samples_(row, col); }
  const std::complex<double>& operator()(std::size_t row, std::size_t col) const {
    return samples_(row, col);
  }
  Grid2D<std::complex<double>>& samples() noexcept { return samples_; }
  const Grid2D<std::complex<double>>& samples() const noexcept { return samples_; }

  /// sum |a|^2 pitch^2
  double total_power() const noexcept;
  RealGrid intensity() const;

 private:
  Grid2D<std::complex<double>> samples_;
  double pitch_{0};
  double wavelength_{0};
  std::string label_;
};

bool is_power_of_two(std::size_t n) noexcept;

enum class PropagationMethod {
  Auto,             // angular spectrum up to the critical distance, single FFT beyond
  AngularSpectrum,  // pitch preserved
  SingleFft,        // output pitch lambda z / (W pitch)
};

/// W pitch^2 / lambda: the distance at which the single-FFT output pitch equals
/// the input pitch.
double critical_distance(const ScalarField& field) noexcept;

/// Pump field at the crystal entrance for an object at d_O = 2f in front of
/// the imaging lens. Single Fourier transform with both quadratic phase
/// factors; output pitch lambda3 d / (W pitch). Throws SamplingViolation
/// when W pitch^2 > lambda3 d and InvalidArgument for non-square grids or
/// d_O != 2f.
ScalarField lens_image_2f2f(const ScalarField& object, const InteractionGeometry& g);

/// Fresnel propagation along the field's own axis (fields vary as exp(-i k z)).
/// Forcing AngularSpectrum beyond the critical distance throws
/// SamplingViolation. Forcing SingleFft is allowed at any distance; the caller
/// is then responsible for a compensating wavefront curvature.
ScalarField free_propagate(const ScalarField& field, double distance,
                           PropagationMethod method = PropagationMethod::Auto);

/// Back focal plane of a lens of focal length `focal` placed `distance` after
/// the field plane. Output pitch lambda focal / (W pitch).
ScalarField fourier_plane(const ScalarField& field, double focal, double distance);

/// Exact inverse of fourier_plane, including removal of the residual
/// quadratic phase.
ScalarField inverse_fourier_plane(const ScalarField& field, double focal, double distance);

}  // namespace twmg
