#include "twmg/chaotic_source.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "twmg/error.hpp"
#include "twmg/random.hpp"

namespace twmg {
namespace {

constexpr std::uint64_t kDirectionStream = 1;
constexpr std::uint64_t kAmplitudeStream = 2;

std::vector<Direction> lattice_points(double spread, double step) {
  std::vector<Direction> points;
  const auto reach = static_cast<long>(std::floor(std::sin(spread) / step));
  for (long i = -reach; i <= reach; ++i) {
    const double sin_beta = static_cast<double>(i) * step;
    const double beta = std::asin(sin_beta);
    const double cos_beta = std::cos(beta);
    for (long j = -reach; j <= reach; ++j) {
      const double s = static_cast<double>(j) * step / cos_beta;
      if (std::abs(s) > 1.0) continue;
      const double theta = std::asin(s);
      if (theta * theta + beta * beta <= spread * spread) points.push_back({theta, beta});
    }
  }
  return points;
}

}  // namespace

void SourceSpec::validate() const {
  if (mode_count < 1) throw Error(ErrorCode::InvalidSpec, "mode_count must be >= 1");
  if (!(angular_spread > 0) || !std::isfinite(angular_spread)) {
    throw Error(ErrorCode::InvalidSpec, "angular_spread must be positive");
  }
  if (!(amplitude_scale >= 0) || !std::isfinite(amplitude_scale)) {
    throw Error(ErrorCode::InvalidSpec, "amplitude_scale must be >= 0");
  }
  if (!(direction_lattice >= 0)) throw Error(ErrorCode::InvalidSpec, "direction_lattice must be >= 0");
}

std::vector<Direction> sample_directions(const SourceSpec& spec, std::uint64_t master_seed,
                                         std::uint64_t shot_index) {
  spec.validate();
  const std::uint64_t index = spec.fixed_directions ? 0 : shot_index;
  auto rng = Xoshiro256::for_stream(master_seed, kDirectionStream, index);
  std::vector<Direction> dirs;
  dirs.reserve(spec.mode_count);

  if (spec.direction_lattice > 0) {
    std::vector<Direction> points = lattice_points(spec.angular_spread, spec.direction_lattice);
    if (points.size() < spec.mode_count) {
      throw Error(ErrorCode::InvalidSpec,
                  "direction lattice has " + std::to_string(points.size()) +
                      " points inside the angular spread, fewer than mode_count");
    }
    // Partial Fisher-Yates: the first mode_count entries become the sample.
    for (std::size_t i = 0; i < spec.mode_count; ++i) {
      const std::size_t j = i + rng.below(points.size() - i);
      std::swap(points[i], points[j]);
      dirs.push_back(points[i]);
    }
    return dirs;
  }

  for (std::size_t n = 0; n < spec.mode_count; ++n) {
    const double radius = spec.angular_spread * std::sqrt(rng.uniform());
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    dirs.push_back({radius * std::cos(angle), radius * std::sin(angle)});
  }
  return dirs;
}

ModeSet sample_modes(const SourceSpec& spec, std::uint64_t master_seed, std::uint64_t shot_index) {
  ModeSet set;
  set.shot_index = shot_index;
  set.master_seed = master_seed;
  const std::vector<Direction> dirs = sample_directions(spec, master_seed, shot_index);
  auto rng = Xoshiro256::for_stream(master_seed, kAmplitudeStream, shot_index);
  const double variance = spec.amplitude_scale * spec.amplitude_scale;
  set.modes.reserve(dirs.size());
  for (const Direction& d : dirs) {
    std::complex<double> a;
    if (spec.law == AmplitudeLaw::Thermal) {
      a = rng.complex_normal(variance);
    } else {
      // Quadrature phases keep |a|^2 exactly equal to scale^2; polar() would
      // leave one-ulp intensity jitter, i.e. a tiny but nonzero variance.
      static constexpr std::complex<double> kQuadrature[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      a = spec.amplitude_scale * kQuadrature[rng.below(4)];
    }
    set.modes.push_back({d, a});
  }
  return set;
}

ScalarField field_from_modes(const ModeSet& modes, const ScalarField& grid_template) {
  ScalarField out(grid_template.width(), grid_template.height(), grid_template.pitch(),
                  grid_template.wavelength(), "seed");
  const double k = grid_template.wavenumber();
  std::vector<double> xs(out.width());
  std::vector<double> ys(out.height());
  for (std::size_t c = 0; c < out.width(); ++c) xs[c] = out.x(c);
  for (std::size_t r = 0; r < out.height(); ++r) ys[r] = out.y(r);

  for (const PlaneWaveMode& mode : modes.modes) {
    const Vec3 u = unit_vector(mode.direction);
    const double kx = k * u.x;
    const double ky = k * u.y;
    for (std::size_t r = 0; r < out.height(); ++r) {
      for (std::size_t c = 0; c < out.width(); ++c) {
        out(r, c) += mode.amplitude * std::polar(1.0, -(kx * xs[c] + ky * ys[r]));
      }
    }
  }
  return out;
}

FourierBin fourier_bin(Direction d, double focal, std::size_t width, std::size_t height,
                       double pitch) noexcept {
  const double x1 = focal * std::sin(d.beta);
  const double y1 = focal * std::cos(d.beta) * std::sin(d.theta);
  const double col = std::round(x1 / pitch) + static_cast<double>(width / 2);
  const double row = std::round(y1 / pitch) + static_cast<double>(height / 2);
  if (col < 0 || row < 0 || col >= static_cast<double>(width) || row >= static_cast<double>(height)) {
    return {};
  }
  return {true, {static_cast<std::size_t>(row), static_cast<std::size_t>(col)}};
}

RealGrid fourier_intensity(const ModeSet& modes, const InteractionGeometry& g, std::size_t width,
                           std::size_t height, double pitch) {
  RealGrid out(width, height);
  for (const PlaneWaveMode& mode : modes.modes) {
    const FourierBin bin = fourier_bin(mode.direction, g.fourier_focal, width, height, pitch);
    if (bin.inside) out(bin.pixel.row, bin.pixel.col) += std::norm(mode.amplitude);
  }
  return out;
}

}  // namespace twmg
