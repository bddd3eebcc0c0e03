#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "twmg/chaotic_source.hpp"
#include "twmg/error.hpp"
#include "twmg/random.hpp"
#include "twmg/statistics.hpp"

using namespace twmg;

TEST(Random, FrozenReferenceOutputs) {
  // Values from an independent reimplementation of splitmix64 seeding and xoshiro256**.
  Xoshiro256 rng(12345);
  EXPECT_EQ(rng(), 0xbe6a36374160d49bULL);
  EXPECT_EQ(rng(), 0x214aaa0637a688c6ULL);
  EXPECT_EQ(rng(), 0xf69d16de9954d388ULL);

  auto stream = Xoshiro256::for_stream(1, 2, 3);
  EXPECT_EQ(stream(), 0x22737e6836b9d2d8ULL);
  EXPECT_EQ(stream(), 0xd373838085b169abULL);
}

TEST(Random, UniformAndBelowRanges) {
  Xoshiro256 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
  }
}

TEST(Random, StreamsAreIndependentOfEachOther) {
  auto a = Xoshiro256::for_stream(5, 1, 0);
  auto b = Xoshiro256::for_stream(5, 2, 0);
  auto c = Xoshiro256::for_stream(5, 1, 1);
  const auto va = a(), vb = b(), vc = c();
  EXPECT_NE(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(vb, vc);
}

TEST(Source, SameSeedSameModes) {
  SourceSpec spec;
  const ModeSet a = sample_modes(spec, 99, 17);
  const ModeSet b = sample_modes(spec, 99, 17);
  ASSERT_EQ(a.modes.size(), spec.mode_count);
  for (std::size_t i = 0; i < a.modes.size(); ++i) {
    EXPECT_EQ(a.modes[i].amplitude, b.modes[i].amplitude);
    EXPECT_EQ(a.modes[i].direction.theta, b.modes[i].direction.theta);
  }
  const ModeSet c = sample_modes(spec, 100, 17);
  EXPECT_NE(a.modes[0].amplitude, c.modes[0].amplitude);
}

TEST(Source, ThermalIntensityMoments) {
  SourceSpec spec;
  spec.mode_count = 1;
  spec.amplitude_scale = 1.7;
  double s1 = 0, s2 = 0;
  std::size_t n = 0;
  for (std::uint64_t shot = 0; shot < 100000; ++shot) {
    const double i = std::norm(sample_modes(spec, 11, shot).modes[0].amplitude);
    s1 += i;
    s2 += i * i;
    ++n;
  }
  const double mean = s1 / static_cast<double>(n);
  const double second = s2 / static_cast<double>(n);
  const double scale2 = 1.7 * 1.7;
  EXPECT_NEAR(mean / scale2, 1.0, 0.03);
  EXPECT_NEAR((second - mean * mean) / (scale2 * scale2), 1.0, 0.03);
  EXPECT_NEAR(second / (mean * mean), 2.0, 0.05);
}

TEST(Source, DirectionsStayInsideTheSpread) {
  SourceSpec spec;
  spec.angular_spread = 2e-3;
  spec.fixed_directions = false;
  for (std::uint64_t shot = 0; shot < 20; ++shot) {
    for (const auto& d : sample_directions(spec, 3, shot)) {
      EXPECT_LE(std::hypot(d.theta, d.beta), 2e-3);
    }
  }
}

TEST(Source, FixedDirectionsRepeatAcrossShots) {
  SourceSpec spec;
  const auto a = sample_directions(spec, 3, 0);
  const auto b = sample_directions(spec, 3, 41);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].beta, b[i].beta);

  spec.fixed_directions = false;
  EXPECT_NE(sample_directions(spec, 3, 0)[0].beta, sample_directions(spec, 3, 41)[0].beta);
}

TEST(Source, LatticeDirectionsHitDistinctFourierPixels) {
  const double pitch = 16e-6, focal = 0.15;
  SourceSpec spec;
  spec.direction_lattice = pitch / focal;
  const auto dirs = sample_directions(spec, 8, 0);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& d : dirs) {
    const FourierBin bin = fourier_bin(d, focal, 256, 256, pitch);
    ASSERT_TRUE(bin.inside);
    EXPECT_TRUE(seen.insert({bin.pixel.row, bin.pixel.col}).second);
  }
  EXPECT_EQ(seen.size(), spec.mode_count);
}

TEST(Source, SparseLatticeIsRejected) {
  SourceSpec spec;
  spec.direction_lattice = 1e-3;  // about 80 points inside a 5 mrad disc
  try {
    sample_directions(spec, 1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
}

TEST(Source, SpecValidation) {
  SourceSpec spec;
  spec.mode_count = 0;
  EXPECT_THROW(spec.validate(), Error);
  spec = {};
  spec.angular_spread = 0;
  EXPECT_THROW(spec.validate(), Error);
  spec = {};
  spec.amplitude_scale = -1;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Source, FixedModulusHasExactIntensity) {
  SourceSpec spec;
  spec.law = AmplitudeLaw::FixedModulus;
  spec.amplitude_scale = 0.3;
  for (std::uint64_t shot = 0; shot < 5; ++shot) {
    for (const auto& m : sample_modes(spec, 2, shot).modes) EXPECT_EQ(std::norm(m.amplitude), 0.09);
  }
}

TEST(Field, SingleModeHasUniformIntensity) {
  ModeSet set;
  set.modes.push_back({{1e-3, -2e-3}, {0.6, -0.8}});
  const ScalarField tmpl(32, 32, 10e-6, 1064e-9);
  const RealGrid i = field_from_modes(set, tmpl).intensity();
  for (double v : i.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Field, TwoModesFormCosineFringes) {
  const double t = 2e-3, lambda = 1064e-9;
  ModeSet set;
  set.modes.push_back({{t, 0}, 1.0});
  set.modes.push_back({{-t, 0}, 1.0});
  const ScalarField tmpl(64, 64, 10e-6, lambda);
  const ScalarField f = field_from_modes(set, tmpl);
  const double k = 2 * std::numbers::pi / lambda;
  for (std::size_t r = 0; r < 64; ++r) {
    const double expected = 2 + 2 * std::cos(2 * k * std::sin(t) * f.y(r));
    EXPECT_NEAR(std::norm(f(r, 5)), expected, 1e-10);
  }
}

TEST(Field, IsLinearInAmplitudes) {
  SourceSpec spec;
  spec.mode_count = 10;
  ModeSet a = sample_modes(spec, 4, 0);
  ModeSet b = a;
  for (auto& m : b.modes) m.amplitude *= std::complex<double>{0, 2};
  const ScalarField tmpl(16, 16, 10e-6, 1064e-9);
  const ScalarField fa = field_from_modes(a, tmpl);
  const ScalarField fb = field_from_modes(b, tmpl);
  for (std::size_t i = 0; i < fa.samples().size(); ++i) {
    EXPECT_LT(std::abs(fb.samples()[i] - std::complex<double>{0, 2} * fa.samples()[i]), 1e-12);
  }
}

TEST(Field, SpeckleIntensityIsExponential) {
  SourceSpec spec;
  spec.fixed_directions = false;
  const ScalarField tmpl(16, 16, 10e-6, 1064e-9);
  std::vector<double> samples;
  for (std::uint64_t shot = 0; shot < 400; ++shot) {
    samples.push_back(std::norm(field_from_modes(sample_modes(spec, 21, shot), tmpl)(3, 11)));
  }
  EXPECT_TRUE(thermal_test(samples).passes(0.01));
}

TEST(Field, SpatialSpeckleIsExponential) {
  // Pixel pitch near the speckle size keeps neighbouring samples nearly independent.
  SourceSpec spec;
  const ScalarField tmpl(64, 64, 100e-6, 1064e-9);
  const RealGrid i = field_from_modes(sample_modes(spec, 31, 0), tmpl).intensity();
  const std::vector<double> samples(i.values().begin(), i.values().end());
  const HistogramFit fit = thermal_test(samples);
  EXPECT_LT(fit.ks_statistic, 1.36 / std::sqrt(static_cast<double>(samples.size())));
}

TEST(Field, SingleModeLightsOneFourierPixel) {
  const InteractionGeometry g = InteractionGeometry::default_setup();
  ModeSet set;
  set.modes.push_back({{1e-3, 2e-3}, {0.0, 1.5}});
  const RealGrid i = fourier_intensity(set, g, 64, 64, 16e-6);
  std::size_t lit = 0;
  for (double v : i.values()) lit += v != 0;
  EXPECT_EQ(lit, 1u);
  const FourierBin bin = fourier_bin(set.modes[0].direction, g.fourier_focal, 64, 64, 16e-6);
  EXPECT_EQ(i(bin.pixel.row, bin.pixel.col), 2.25);
}

TEST(Field, TemporalFourierPixelIsExponential) {
  const InteractionGeometry g = InteractionGeometry::default_setup();
  SourceSpec spec;
  spec.direction_lattice = 16e-6 / g.fourier_focal;
  const FourierBin bin = fourier_bin(sample_directions(spec, 5, 0)[7], g.fourier_focal, 256, 256, 16e-6);
  std::vector<double> samples;
  for (std::uint64_t shot = 0; shot < 10000; ++shot) {
    const RealGrid i = fourier_intensity(sample_modes(spec, 5, shot), g, 256, 256, 16e-6);
    samples.push_back(i(bin.pixel.row, bin.pixel.col));
  }
  EXPECT_TRUE(thermal_test(samples).passes(0.01));
}

TEST(Field, FourierIntensityMatchesTransformedField) {
  // Lattice directions land exactly on DFT bins, so the per-mode deposit map
  // equals the lens transform of the summed field up to a constant factor.
  const std::size_t n = 64;
  const double seed_pitch = 20e-6, lambda = 1064e-9;
  InteractionGeometry g = InteractionGeometry::default_setup();
  const double det_pitch = lambda * g.fourier_focal / (n * seed_pitch);
  SourceSpec spec;
  spec.mode_count = 40;
  spec.direction_lattice = det_pitch / g.fourier_focal;
  spec.angular_spread = 20 * spec.direction_lattice;
  const ModeSet modes = sample_modes(spec, 6, 2);

  const RealGrid deposit = fourier_intensity(modes, g, n, n, det_pitch);
  const ScalarField field = field_from_modes(modes, ScalarField(n, n, seed_pitch, lambda));
  const RealGrid lens = fourier_plane(field, g.fourier_focal, g.fourier_focal).intensity();
  const double scale = std::pow(seed_pitch * seed_pitch * n * n / (lambda * g.fourier_focal), 2);
  for (std::size_t i = 0; i < deposit.size(); ++i) {
    EXPECT_NEAR(lens[i] / scale, deposit[i], 1e-9 * (1 + deposit[i]));
  }
}
