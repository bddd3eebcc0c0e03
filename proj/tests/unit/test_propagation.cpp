#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "twmg/error.hpp"
#include "twmg/pipeline.hpp"
#include "twmg/propagation.hpp"
#include "twmg/random.hpp"

using namespace twmg;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField gaussian(std::size_t n, double pitch, double lambda, double waist, double x0 = 0,
                     double y0 = 0) {
  ScalarField f(n, n, pitch, lambda);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double dx = f.x(c) - x0, dy = f.y(r) - y0;
      f(r, c) = std::exp(-(dx * dx + dy * dy) / (waist * waist));
    }
  }
  return f;
}

// 1/e^2 intensity radius from the second moment along x: <x^2> = w^2 / 4.
double second_moment_waist(const ScalarField& f) {
  double sum = 0, sxx = 0, sx = 0;
  for (std::size_t r = 0; r < f.height(); ++r) {
    for (std::size_t c = 0; c < f.width(); ++c) {
      const double i = std::norm(f(r, c));
      sum += i;
      sx += i * f.x(c);
      sxx += i * f.x(c) * f.x(c);
    }
  }
  const double mean = sx / sum;
  return 2.0 * std::sqrt(sxx / sum - mean * mean);
}

double analytic_waist(double w0, double lambda, double z) {
  const double zr = kPi * w0 * w0 / lambda;
  return w0 * std::sqrt(1 + (z / zr) * (z / zr));
}

}  // namespace

TEST(ScalarField, RejectsNonPowerOfTwo) {
  EXPECT_THROW(ScalarField(100, 128, 1e-5, 1e-6), Error);
  EXPECT_THROW(ScalarField(128, 128, 0.0, 1e-6), Error);
  EXPECT_NO_THROW(ScalarField(64, 128, 1e-5, 1e-6));
}

TEST(ScalarField, CoordinatesAreCentered) {
  const ScalarField f(8, 8, 2.0, 1.0);
  EXPECT_EQ(f.x(4), 0.0);
  EXPECT_EQ(f.x(0), -8.0);
  EXPECT_EQ(f.y(7), 6.0);
}

TEST(FreePropagate, ZeroDistanceIsIdentity) {
  const ScalarField g = gaussian(64, 10e-6, 1e-6, 100e-6);
  const ScalarField out = free_propagate(g, 0.0);
  EXPECT_EQ(out.samples(), g.samples());
}

TEST(FreePropagate, PlaneWaveGetsGlobalPhaseOnly) {
  ScalarField f(64, 64, 10e-6, 1064e-9);
  for (auto& v : f.samples().values()) v = cplx{0.6, 0.8};
  const double z = 0.005;
  const ScalarField out = free_propagate(f, z, PropagationMethod::AngularSpectrum);
  const cplx expected = cplx{0.6, 0.8} * std::polar(1.0, -2 * kPi / 1064e-9 * z);
  for (const auto& v : out.samples().values()) EXPECT_LT(std::abs(v - expected), 1e-9);
}

TEST(FreePropagate, AngularSpectrumConservesPower) {
  auto rng = Xoshiro256::for_stream(3, 1, 0);
  ScalarField f(64, 64, 10e-6, 1064e-9);
  for (auto& v : f.samples().values()) v = rng.complex_normal(1.0);
  // pitch > lambda / 2, so the grid carries no evanescent components.
  const ScalarField out = free_propagate(f, 0.5 * critical_distance(f));
  EXPECT_NEAR(out.total_power() / f.total_power(), 1.0, 1e-9);
}

TEST(FreePropagate, SingleFftConservesPower) {
  const ScalarField g = gaussian(128, 10e-6, 1064e-9, 60e-6);
  const ScalarField out = free_propagate(g, 3.0 * critical_distance(g));
  EXPECT_NEAR(out.total_power() / g.total_power(), 1.0, 1e-9);
}

TEST(FreePropagate, GaussianWaistMatchesAnalyticAngularSpectrum) {
  const double lambda = 1064e-9, w0 = 150e-6;
  const ScalarField g = gaussian(256, 10e-6, lambda, w0);
  const double z = 0.9 * critical_distance(g);
  const ScalarField out = free_propagate(g, z);
  EXPECT_NEAR(second_moment_waist(out) / analytic_waist(w0, lambda, z), 1.0, 1e-3);
}

TEST(FreePropagate, GaussianFieldMatchesAnalyticSingleFft) {
  const double lambda = 1064e-9, w0 = 80e-6;
  const ScalarField g = gaussian(256, 10e-6, lambda, w0);
  const double z = 0.5;
  const ScalarField out = free_propagate(g, z);
  // Complex Gaussian beam solution for fields ~ exp(-i k z):
  // E = q0/q(z) exp(-i k z) exp(-i k r^2 / (2 q)), q = z + i zR.
  const double k = 2 * kPi / lambda, zr = kPi * w0 * w0 / lambda;
  const cplx q0{0, zr}, q{z, zr};
  double worst = 0, peak = 0;
  for (std::size_t r = 0; r < out.height(); r += 7) {
    for (std::size_t c = 0; c < out.width(); c += 7) {
      const double rr = out.x(c) * out.x(c) + out.y(r) * out.y(r);
      const cplx e = q0 / q * std::exp(cplx{0, -k * z}) * std::exp(cplx{0, -k * rr / 2.0} / q);
      worst = std::max(worst, std::abs(out(r, c) - e));
      peak = std::max(peak, std::abs(e));
    }
  }
  EXPECT_LT(worst / peak, 1e-6);
}

TEST(FreePropagate, AiryFirstNull) {
  const std::size_t n = 512;
  const double pitch = 16e-6, lambda = 1064e-9, diameter = 16 * pitch, z = 3.0;
  const auto cover = oracle::render_disks(n, n, pitch, {{0.0, 0.0}}, diameter / 2);
  ScalarField f(n, n, pitch, lambda);
  for (std::size_t i = 0; i < cover.v.size(); ++i) f.samples()[i] = cover.v[i];
  const ScalarField out = free_propagate(f, z);
  // Radial profile along the central row, first local minimum with parabolic refinement.
  const std::size_t row = n / 2;
  std::size_t k = n / 2 + 1;
  while (k + 1 < n && !(std::norm(out(row, k)) < std::norm(out(row, k - 1)) &&
                        std::norm(out(row, k)) <= std::norm(out(row, k + 1)))) {
    ++k;
  }
  const double a = std::norm(out(row, k - 1)), b = std::norm(out(row, k)), c = std::norm(out(row, k + 1));
  const double offset = 0.5 * (a - c) / (a - 2 * b + c);
  const double radius = (static_cast<double>(k - n / 2) + offset) * out.pitch();
  EXPECT_NEAR(radius / (1.22 * lambda * z / diameter), 1.0, 0.05);
}

TEST(FreePropagate, ForcedAngularSpectrumBeyondCriticalThrows) {
  const ScalarField g = gaussian(64, 10e-6, 1064e-9, 50e-6);
  try {
    free_propagate(g, 2 * critical_distance(g), PropagationMethod::AngularSpectrum);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SamplingViolation);
  }
  EXPECT_THROW(free_propagate(g, -1.0), Error);
}

TEST(LensImage, ConservesPower) {
  ScalarField f(256, 256, 16e-6, 532e-9);
  for (auto& v : f.samples().values()) v = 1.0;
  const ScalarField out = lens_image_2f2f(f, InteractionGeometry::default_setup());
  EXPECT_NEAR(out.total_power() / f.total_power(), 1.0, 1e-6);
  EXPECT_NEAR(out.pitch(), 532e-9 * 0.4 / (256 * 16e-6), 1e-18);
}

TEST(LensImage, GaussianWaistMatchesClosedForm) {
  // Transform of exp(-x^2 / w0^2) under a chirp c = k (f - d) / (2 d f) and
  // kernel exp(i k x xf / d): w = (2 d / (k w0)) sqrt(1 + c^2 w0^4).
  const double w0 = 100e-6, lambda = 532e-9;
  const InteractionGeometry g = InteractionGeometry::default_setup();
  const ScalarField obj = gaussian(256, 16e-6, lambda, w0);
  const ScalarField out = lens_image_2f2f(obj, g);
  const double k = 2 * kPi / lambda, d = g.image_distance, f = g.focal_length;
  const double c = k * (f - d) / (2 * d * f);
  const double expected = 2 * d / (k * w0) * std::sqrt(1 + c * c * std::pow(w0, 4));
  EXPECT_NEAR(second_moment_waist(out) / expected, 1.0, 1e-3);
  // The image-plane curvature makes this narrower than free diffraction over d.
  EXPECT_LT(expected, analytic_waist(w0, lambda, d));
}

TEST(LensImage, ThreeHoleMaskMatchesDirectQuadrature) {
  const std::size_t n = 256;
  const double pitch = 16e-6, lambda = 532e-9;
  const InteractionGeometry g = InteractionGeometry::default_setup();
  const ObjectMask mask = three_hole_mask(n, n, pitch);
  ScalarField obj(n, n, pitch, lambda);
  for (std::size_t i = 0; i < mask.transmission.size(); ++i) obj.samples()[i] = mask.transmission[i];
  const ScalarField out = lens_image_2f2f(obj, g);

  // Direct summation of the simplified Fresnel integral on a 64x64 probe block.
  const double k = 2 * kPi / lambda, f = g.focal_length, d = g.image_distance;
  std::vector<std::pair<double, double>> pts;
  std::vector<cplx> vals;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (mask.transmission(r, c) == 0) continue;
      const double x = obj.x(c), y = obj.y(r);
      pts.push_back({x, y});
      vals.push_back(mask.transmission(r, c) * std::polar(1.0, k * (f - d) / (2 * d * f) * (x * x + y * y)));
    }
  }
  double worst = 0, peak = 0;
  for (std::size_t r = n / 2 - 32; r < n / 2 + 32; ++r) {
    for (std::size_t c = n / 2 - 32; c < n / 2 + 32; ++c) {
      const double xf = out.x(c), yf = out.y(r);
      cplx sum = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        sum += vals[i] * std::polar(1.0, 2 * kPi * (xf * pts[i].first + yf * pts[i].second) / (lambda * d));
      }
      const double direct = std::norm(sum * pitch * pitch / (lambda * d));
      worst = std::max(worst, std::abs(direct - std::norm(out(r, c))));
      peak = std::max(peak, direct);
    }
  }
  EXPECT_LT(worst / peak, 1e-3);
}

TEST(LensImage, SamplingAndGeometryChecks) {
  const InteractionGeometry g = InteractionGeometry::default_setup();
  EXPECT_THROW(lens_image_2f2f(ScalarField(512, 512, 40e-6, 532e-9), g), Error);
  EXPECT_THROW(lens_image_2f2f(ScalarField(64, 64, 16e-6, 1064e-9), g), Error);
  EXPECT_THROW(lens_image_2f2f(ScalarField(64, 32, 16e-6, 532e-9), g), Error);
  try {
    lens_image_2f2f(ScalarField(512, 512, 40e-6, 532e-9), g);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SamplingViolation);
  }
}

TEST(FourierPlane, TiltedPlaneWaveLandsInOnePixel) {
  const std::size_t n = 64;
  const double pitch = 20e-6, lambda = 1064e-9, focal = 0.15;
  const int m = 5;
  const double sin_beta = m * lambda / (n * pitch);
  ScalarField f(n, n, pitch, lambda);
  const double k = 2 * kPi / lambda;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) f(r, c) = std::polar(1.0, -k * sin_beta * f.x(c));
  }
  const ScalarField out = fourier_plane(f, focal, focal);
  const RealGrid i = out.intensity();
  double total = 0;
  for (double v : i.values()) total += v;
  EXPECT_NEAR(i(n / 2, n / 2 + m) / total, 1.0, 1e-12);
  EXPECT_NEAR(out.x(n / 2 + m), focal * sin_beta, 1e-15);
}

TEST(FourierPlane, TwoPlaneWavesGiveIntensityRatio) {
  const std::size_t n = 64;
  const double pitch = 20e-6, lambda = 1064e-9, focal = 0.15;
  ScalarField f(n, n, pitch, lambda);
  const double k = 2 * kPi / lambda, s = lambda / (n * pitch);
  const cplx a{0.3, 0.4}, b{-1.2, 0.1};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      f(r, c) = a * std::polar(1.0, -k * 3 * s * f.x(c)) + b * std::polar(1.0, -k * -7 * s * f.y(r));
    }
  }
  const RealGrid i = fourier_plane(f, focal, 0.05).intensity();
  EXPECT_NEAR(i(n / 2, n / 2 + 3) / i(n / 2 - 7, n / 2), std::norm(a) / std::norm(b), 1e-10);
}

TEST(FourierPlane, TwoFocalLengthsLeaveNoResidualPhase) {
  const ScalarField g = gaussian(64, 20e-6, 1064e-9, 200e-6);
  const ScalarField out = fourier_plane(g, 0.15, 0.15);
  // A real symmetric input gives a transform with a constant phase.
  const cplx ref = out(32, 32) / std::abs(out(32, 32));
  for (std::size_t c = 26; c < 38; ++c) {
    EXPECT_LT(std::abs(out(32, c) / std::abs(out(32, c)) - ref), 1e-9);
  }
}

TEST(FourierPlane, RoundTripRecoversInput) {
  auto rng = Xoshiro256::for_stream(3, 2, 0);
  ScalarField f(64, 64, 20e-6, 1064e-9);
  for (auto& v : f.samples().values()) v = rng.complex_normal(1.0);
  const ScalarField back = inverse_fourier_plane(fourier_plane(f, 0.15, 0.07), 0.15, 0.07);
  EXPECT_NEAR(back.pitch(), f.pitch(), 1e-18);
  for (std::size_t i = 0; i < f.samples().size(); ++i) {
    EXPECT_LT(std::abs(back.samples()[i] - f.samples()[i]), 1e-9);
  }
}
