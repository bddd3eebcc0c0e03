#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "twmg/chaotic_source.hpp"
#include "twmg/geometry.hpp"
#include "twmg/grid.hpp"
#include "twmg/propagation.hpp"

namespace twmg {

/// Amplitude transmission of the pump-arm object, sampled on the detector grid.
struct ObjectMask {
  RealGrid transmission;  // values in [0, 1]
  double pitch{16e-6};

  void validate() const;
};

/// Centers (x, y) in metres of the default three-hole object.
std::vector<std::pair<double, double>> three_hole_centers();

/// Opaque sheet with three circular holes at three_hole_centers().
ObjectMask three_hole_mask(std::size_t width, std::size_t height, double pitch,
                           double hole_diameter = 256e-6);

struct DetectorSpec {
  int bit_depth{0};             // 0 disables quantization; otherwise 8, 12 or 16
  double saturation_level{0};   // 0 disables clipping
  std::size_t pixel_binning{1};

  void validate() const;
};

/// One laser shot: seed Fourier-plane map and generated image-plane map.
struct ShotRecord {
  std::uint64_t shot_index{0};
  RealGrid i1;
  RealGrid i2;
};

enum class FilterKind { Sinc2, HardCutoff, None };

struct MixingOptions {
  double coupling{1.0};  // effective g, 1/(m * amplitude)
  FilterKind filter{FilterKind::Sinc2};
  /// Debug mode: |sum_n E2_n|^2 instead of the incoherent sum of mode images.
  bool coherent_sum{false};
};

/// Generated wavevector for a seed along `seed`: direction of k3 - k1.
WaveVector generated_wavevector(const InteractionGeometry& g, Direction seed);

/// sinc^2(|dk| L / 2) for the triplet (k3, k1_n, k2_n), or the hard cutoff
/// (1 when |dk| L / 2 < pi).
double phase_matching_filter(const PlaneWaveMode& mode, const InteractionGeometry& g,
                             FilterKind kind = FilterKind::Sinc2);

/// Binning, saturation clip and uniform quantization, in that order.
RealGrid apply_detector(const RealGrid& intensity, const DetectorSpec& det);

/// Holographic imaging chain for one mask: pump through the 2f-2f arm, weak
/// conversion at the crystal, Fresnel propagation over s2 to the detector.
/// The crystal-plane pump field is computed once; per-direction images are
/// cached by prepare() and then shared read-only across threads.
class ChaoticImager {
 public:
  ChaoticImager(const ObjectMask& mask, const InteractionGeometry& g, MixingOptions opts = {});

  const ScalarField& crystal_field() const noexcept { return crystal_field_; }
  const InteractionGeometry& geometry() const noexcept { return geometry_; }
  const MixingOptions& options() const noexcept { return options_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  double pitch() const noexcept { return pitch_; }

  /// Complex generated field on the detector grid for one seed plane wave,
  /// acceptance weight included as an amplitude factor.
  ScalarField generated_field(Direction seed, std::complex<double> seed_amplitude) const;

  /// |generated_field(seed, 1)|^2.
  RealGrid mode_image(Direction seed) const;

  /// Caches mode_image for each direction. Not thread-safe; call before
  /// sharing the imager.
  void prepare(std::span<const Direction> directions);
  std::size_t cached_images() const noexcept { return cache_.size(); }

  ShotRecord shot(const ModeSet& modes, const DetectorSpec& det) const;

 private:
  ScalarField crystal_side_field(Direction seed, std::complex<double> seed_amplitude) const;
  ScalarField to_detector(const ScalarField& crystal_side) const;
  void check_focus_spread(std::span<const Direction> directions) const;

  InteractionGeometry geometry_;
  MixingOptions options_;
  std::size_t width_{0};
  std::size_t height_{0};
  double pitch_{0};
  ScalarField crystal_field_;
  double max_pump_{0};
  std::map<std::pair<double, double>, RealGrid> cache_;
};

/// Coherent (plane-wave seed along g.k1) holographic image intensity.
RealGrid coherent_image(const ObjectMask& mask, const InteractionGeometry& g,
                        std::complex<double> seed_amplitude, const MixingOptions& opts = {});

/// One chaotic shot; builds a throwaway imager. Use ChaoticImager for ensembles.
ShotRecord chaotic_shot(const ObjectMask& mask, const InteractionGeometry& g, const ModeSet& modes,
                        const DetectorSpec& det, const MixingOptions& opts = {});

}  // namespace twmg
