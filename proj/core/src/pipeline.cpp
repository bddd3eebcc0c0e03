#include "twmg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "twmg/diagnostics.hpp"
#include "twmg/error.hpp"
#include "twmg/twm_core.hpp"

namespace twmg {
namespace {

using complex = std::complex<double>;

std::pair<double, double> key_of(Direction d) { return {d.theta, d.beta}; }

// Bilinear resampling of a centered field onto a centered grid of another pitch.
ScalarField resample(const ScalarField& src, std::size_t width, std::size_t height, double pitch) {
  ScalarField out(width, height, pitch, src.wavelength(), src.label());
  const double half_w = static_cast<double>(src.width() / 2);
  const double half_h = static_cast<double>(src.height() / 2);
  for (std::size_t r = 0; r < height; ++r) {
    const double fy = out.y(r) / src.pitch() + half_h;
    const double y0 = std::floor(fy);
    const double ty = fy - y0;
    for (std::size_t c = 0; c < width; ++c) {
      const double fx = out.x(c) / src.pitch() + half_w;
      const double x0 = std::floor(fx);
      const double tx = fx - x0;
      complex acc{};
      for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
          const double sx = x0 + dx;
          const double sy = y0 + dy;
          if (sx < 0 || sy < 0 || sx >= static_cast<double>(src.width()) ||
              sy >= static_cast<double>(src.height())) {
            continue;
          }
          const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty);
          acc += w * src(static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

void ObjectMask::validate() const {
  if (!(pitch > 0)) throw Error(ErrorCode::InvalidConfig, "mask pitch must be positive");
  for (double v : transmission.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "mask transmission values must lie in [0, 1]");
    }
  }
}

std::vector<std::pair<double, double>> three_hole_centers() {
  return {{-0.55e-3, -0.45e-3}, {0.55e-3, -0.45e-3}, {-0.15e-3, 0.55e-3}};
}

ObjectMask three_hole_mask(std::size_t width, std::size_t height, double pitch,
                           double hole_diameter) {
  ObjectMask mask{RealGrid(width, height), pitch};
  const double r2 = 0.25 * hole_diameter * hole_diameter;
  const auto centers = three_hole_centers();
  for (std::size_t row = 0; row < height; ++row) {
    const double y = (static_cast<double>(row) - static_cast<double>(height / 2)) * pitch;
    for (std::size_t col = 0; col < width; ++col) {
      const double x = (static_cast<double>(col) - static_cast<double>(width / 2)) * pitch;
      for (const auto& [cx, cy] : centers) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2) mask.transmission(row, col) = 1.0;
      }
    }
  }
  return mask;
}

void DetectorSpec::validate() const {
  if (bit_depth != 0 && bit_depth != 8 && bit_depth != 12 && bit_depth != 16) {
    throw Error(ErrorCode::InvalidConfig, "bit_depth must be 0, 8, 12 or 16");
  }
  if (bit_depth != 0 && !(saturation_level > 0)) {
    throw Error(ErrorCode::InvalidConfig, "quantization needs a positive saturation_level");
  }
  if (saturation_level < 0) throw Error(ErrorCode::InvalidConfig, "saturation_level must be >= 0");
  if (pixel_binning < 1) throw Error(ErrorCode::InvalidConfig, "pixel_binning must be >= 1");
}

WaveVector generated_wavevector(const InteractionGeometry& g, Direction seed) {
  const WaveVector k1 = WaveVector::make(seed, g.k1.wavelength, g.k1.index);
  return phase_matched_partner(g.k3, k1, g.k2.wavelength, g.k2.index);
}

double phase_matching_filter(const PlaneWaveMode& mode, const InteractionGeometry& g,
                             FilterKind kind) {
  if (kind == FilterKind::None) return 1.0;
  const WaveVector k1 = WaveVector::make(mode.direction, g.k1.wavelength, g.k1.index);
  const double mismatch = norm(g.k3.vector() - k1.vector()) - g.k2.magnitude;
  const double half_phase = 0.5 * std::abs(mismatch) * g.crystal_length;
  if (kind == FilterKind::HardCutoff) return half_phase < std::numbers::pi ? 1.0 : 0.0;
  const double s = sinc(half_phase);
  return s * s;
}

RealGrid apply_detector(const RealGrid& intensity, const DetectorSpec& det) {
  det.validate();
  RealGrid out;
  if (det.pixel_binning == 1) {
    out = intensity;
  } else {
    const std::size_t b = det.pixel_binning;
    if (intensity.width() % b != 0 || intensity.height() % b != 0) {
      throw Error(ErrorCode::InvalidConfig, "pixel_binning must divide the grid dimensions");
    }
    out = RealGrid(intensity.width() / b, intensity.height() / b);
    for (std::size_t r = 0; r < intensity.height(); ++r) {
      for (std::size_t c = 0; c < intensity.width(); ++c) out(r / b, c / b) += intensity(r, c);
    }
  }
  if (det.saturation_level > 0) {
    for (double& v : out.values()) v = std::min(v, det.saturation_level);
  }
  if (det.bit_depth > 0) {
    const double levels = std::ldexp(1.0, det.bit_depth) - 1.0;
    const double step = det.saturation_level / levels;
    for (double& v : out.values()) v = std::round(std::max(v, 0.0) / step) * step;
  }
  return out;
}

ChaoticImager::ChaoticImager(const ObjectMask& mask, const InteractionGeometry& g,
                             MixingOptions opts)
    : geometry_(g),
      options_(opts),
      width_(mask.transmission.width()),
      height_(mask.transmission.height()),
      pitch_(mask.pitch) {
  mask.validate();
  g.validate();
  ScalarField object(width_, height_, pitch_, g.k3.wavelength, "object");
  for (std::size_t i = 0; i < mask.transmission.size(); ++i) {
    object.samples()[i] = mask.transmission[i];
  }
  crystal_field_ = lens_image_2f2f(object, g);
  for (const auto& v : crystal_field_.samples().values()) max_pump_ = std::max(max_pump_, std::abs(v));
}

ScalarField ChaoticImager::crystal_side_field(Direction seed, complex seed_amplitude) const {
  const WaveVector k2 = generated_wavevector(geometry_, seed);
  const GeometricFactor geo = geometric_factor(seed, k2.direction);
  const double weight = phase_matching_filter({seed, seed_amplitude}, geometry_, options_.filter);

  GainParams unit_pump;
  unit_pump.g = options_.coupling;
  unit_pump.a3 = 1.0;
  unit_pump.r = geometry_.crystal_length;
  GainParams peak = unit_pump;
  peak.a3 = max_pump_;
  if (weak_argument(peak, geo.f) > 0.1) {
    evolve_weak({seed_amplitude, 0.0}, peak, geo.f);  // routes the WeakLimitViolated warning
  }
  // Generated amplitude is linear in the pump: a2(x) = transfer * a3(x).
  const complex transfer =
      evolve_weak({seed_amplitude, 0.0}, unit_pump, geo.f).a2 * std::sqrt(weight);

  const double kt = k2.vacuum_wavenumber();
  const Vec3 u = unit_vector(k2.direction);
  ScalarField out(crystal_field_.width(), crystal_field_.height(), crystal_field_.pitch(),
                  geometry_.k2.wavelength, "crystal-exit");
  for (std::size_t r = 0; r < out.height(); ++r) {
    const double y = out.y(r);
    for (std::size_t c = 0; c < out.width(); ++c) {
      const double x = out.x(c);
      out(r, c) = transfer * crystal_field_(r, c) * std::polar(1.0, -kt * (u.x * x + u.y * y));
    }
  }
  return out;
}

ScalarField ChaoticImager::to_detector(const ScalarField& crystal_side) const {
  // The pump's converging curvature cancels the single-FFT input chirp exactly
  // on the holographic image plane, so the single-FFT form is used at any s2.
  ScalarField at_detector =
      free_propagate(crystal_side, geometry_.detector_distance, PropagationMethod::SingleFft);
  at_detector.set_label("detector");
  if (std::abs(at_detector.pitch() - pitch_) > 1e-9 * pitch_) {
    return resample(at_detector, width_, height_, pitch_);
  }
  ScalarField out(width_, height_, pitch_, at_detector.wavelength(), "detector");
  out.samples() = std::move(at_detector.samples());
  return out;
}

ScalarField ChaoticImager::generated_field(Direction seed, complex seed_amplitude) const {
  return to_detector(crystal_side_field(seed, seed_amplitude));
}

RealGrid ChaoticImager::mode_image(Direction seed) const {
  if (auto it = cache_.find(key_of(seed)); it != cache_.end()) return it->second;
  return generated_field(seed, 1.0).intensity();
}

void ChaoticImager::check_focus_spread(std::span<const Direction> directions) const {
  const double s2 = geometry_.detector_distance;
  const double aperture = 0.5 * static_cast<double>(crystal_field_.width()) * crystal_field_.pitch();
  const double na = aperture / s2;
  const double depth_of_focus = geometry_.k2.wavelength / (na * na);
  double worst = 0.0;
  for (const Direction& d : directions) {
    const Direction d2 = generated_wavevector(geometry_, d).direction;
    const double path = s2 / (std::cos(d2.theta) * std::cos(d2.beta));
    worst = std::max(worst, std::abs(path - s2));
  }
  if (worst > depth_of_focus) {
    std::ostringstream msg;
    msg << "mode image planes spread by " << worst << " m, beyond the depth of focus "
        << depth_of_focus << " m";
    warn(msg.str());
  }
}

void ChaoticImager::prepare(std::span<const Direction> directions) {
  check_focus_spread(directions);
  for (const Direction& d : directions) {
    const auto key = key_of(d);
    if (!cache_.contains(key)) cache_.emplace(key, generated_field(d, 1.0).intensity());
  }
}

ShotRecord ChaoticImager::shot(const ModeSet& modes, const DetectorSpec& det) const {
  det.validate();
  ShotRecord record;
  record.shot_index = modes.shot_index;
  RealGrid i1 = fourier_intensity(modes, geometry_, width_, height_, pitch_);
  RealGrid i2(width_, height_);

  if (options_.coherent_sum) {
    ScalarField total;
    for (const PlaneWaveMode& mode : modes.modes) {
      ScalarField part = crystal_side_field(mode.direction, mode.amplitude);
      if (total.samples().empty()) {
        total = std::move(part);
      } else {
        for (std::size_t i = 0; i < part.samples().size(); ++i) total.samples()[i] += part.samples()[i];
      }
    }
    if (!total.samples().empty()) i2 = to_detector(total).intensity();
  } else {
    for (const PlaneWaveMode& mode : modes.modes) {
      const double power = std::norm(mode.amplitude);
      if (power == 0.0) continue;
      const RealGrid* image = nullptr;
      RealGrid scratch;
      if (auto it = cache_.find(key_of(mode.direction)); it != cache_.end()) {
        image = &it->second;
      } else {
        scratch = generated_field(mode.direction, 1.0).intensity();
        image = &scratch;
      }
      const double* src = image->data();
      double* dst = i2.data();
      for (std::size_t i = 0; i < i2.size(); ++i) dst[i] += power * src[i];
    }
  }

  record.i1 = apply_detector(i1, det);
  record.i2 = apply_detector(i2, det);
  return record;
}

RealGrid coherent_image(const ObjectMask& mask, const InteractionGeometry& g,
                        complex seed_amplitude, const MixingOptions& opts) {
  ChaoticImager imager(mask, g, opts);
  return imager.generated_field(g.k1.direction, seed_amplitude).intensity();
}

ShotRecord chaotic_shot(const ObjectMask& mask, const InteractionGeometry& g, const ModeSet& modes,
                        const DetectorSpec& det, const MixingOptions& opts) {
  ChaoticImager imager(mask, g, opts);
  return imager.shot(modes, det);
}

}  // namespace twmg
