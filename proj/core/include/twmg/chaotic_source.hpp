#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "twmg/geometry.hpp"
#include "twmg/grid.hpp"
#include "twmg/propagation.hpp"

namespace twmg {

struct PlaneWaveMode {
  Direction direction;
  std::complex<double> amplitude{};
};

enum class AmplitudeLaw {
  Thermal,       // circular complex Gaussian, E|a|^2 = amplitude_scale^2
  FixedModulus,  // |a| = amplitude_scale exactly, random quadrature phase (zero intensity variance)
};

struct SourceSpec {
  std::size_t mode_count{200};
  double angular_spread{5e-3};  // radius of the (theta, beta) disc, rad
  double amplitude_scale{1.0};
  /// Directions drawn once (from shot 0) and reused for every shot.
  bool fixed_directions{true};
  /// When > 0, directions are drawn without replacement from the lattice
  /// sin(beta) = i * step, cos(beta) sin(theta) = j * step, so that distinct
  /// modes land on distinct Fourier-plane pixels when step = pitch / f.
  double direction_lattice{0.0};
  AmplitudeLaw law{AmplitudeLaw::Thermal};

  /// Throws InvalidSpec.
  void validate() const;
};

struct ModeSet {
  std::vector<PlaneWaveMode> modes;
  std::uint64_t shot_index{0};
  std::uint64_t master_seed{0};
};

/// Deterministic function of (spec, master_seed, shot_index).
ModeSet sample_modes(const SourceSpec& spec, std::uint64_t master_seed, std::uint64_t shot_index);

/// Directions only, as sample_modes would draw them for this shot.
std::vector<Direction> sample_directions(const SourceSpec& spec, std::uint64_t master_seed,
                                         std::uint64_t shot_index);

/// Coherent sum of the modes exp(-i k_n . r) on the template plane (z = 0),
/// using the template's wavelength and grid.
ScalarField field_from_modes(const ModeSet& modes, const ScalarField& grid_template);

/// Fourier-plane pixel hit by a mode through a lens of focal length `focal`,
/// or nothing when it falls outside the grid. x1 = f sin b, y1 = f cos b sin t.
struct FourierBin {
  bool inside{false};
  PixelIndex pixel;
};
FourierBin fourier_bin(Direction d, double focal, std::size_t width, std::size_t height,
                       double pitch) noexcept;

/// Seed-arm Fourier-plane intensity: each mode deposits |a_n|^2 into its pixel.
/// The grid (width, height, pitch) is the detector's.
RealGrid fourier_intensity(const ModeSet& modes, const InteractionGeometry& g, std::size_t width,
                           std::size_t height, double pitch);

}  // namespace twmg
