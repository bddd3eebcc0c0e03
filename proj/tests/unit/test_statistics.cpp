#include <gtest/gtest.h>

#include <cmath>

#include "twmg/error.hpp"
#include "twmg/random.hpp"
#include "twmg/statistics.hpp"

using namespace twmg;

namespace {

// Two-pixel-wide ensemble: I1 thermal at the reference, I2 = c * I1(ref) at
// pixel 0 and independent noise at pixel 1.
std::vector<ShotRecord> linked_ensemble(std::size_t n, double c, std::uint64_t seed) {
  auto rng = Xoshiro256::for_stream(seed, 7, 0);
  std::vector<ShotRecord> shots;
  for (std::size_t i = 0; i < n; ++i) {
    ShotRecord s{i, RealGrid(2, 1), RealGrid(2, 1)};
    const double x = -std::log(1 - rng.uniform());
    s.i1(0, 0) = x;
    s.i1(0, 1) = 0.5;
    s.i2(0, 0) = c * x;
    s.i2(0, 1) = -std::log(1 - rng.uniform());
    shots.push_back(std::move(s));
  }
  return shots;
}

std::vector<ShotRecord> random_ensemble(std::size_t n, std::size_t w, std::size_t h, std::uint64_t seed) {
  auto rng = Xoshiro256::for_stream(seed, 8, 0);
  std::vector<ShotRecord> shots;
  for (std::size_t i = 0; i < n; ++i) {
    ShotRecord s{i, RealGrid(w, h), RealGrid(w, h)};
    for (double& v : s.i1.values()) v = rng.uniform() * 3;
    for (double& v : s.i2.values()) v = rng.standard_normal() + 0.2 * s.i1(0, 0);
    shots.push_back(std::move(s));
  }
  return shots;
}

// Two-pass reference covariance with 1/n normalization.
double brute_covariance(const std::vector<ShotRecord>& shots, PixelIndex ref, std::size_t pixel,
                        std::size_t skip = SIZE_MAX) {
  long double mx = 0, my = 0;
  double n = 0;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    if (i == skip) continue;
    mx += shots[i].i1(ref.row, ref.col);
    my += shots[i].i2[pixel];
    n += 1;
  }
  mx /= n;
  my /= n;
  long double s = 0;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    if (i == skip) continue;
    s += (shots[i].i1(ref.row, ref.col) - mx) * (shots[i].i2[pixel] - my);
  }
  return static_cast<double>(s / n);
}

class VectorSource final : public ShotSource {
 public:
  explicit VectorSource(std::vector<ShotRecord> v) : v_(std::move(v)) {}
  std::size_t size() const override { return v_.size(); }
  std::size_t width() const override { return v_.front().i1.width(); }
  std::size_t height() const override { return v_.front().i1.height(); }
  ShotRecord shot(std::size_t i) const override { return v_[i]; }

 private:
  std::vector<ShotRecord> v_;
};

}  // namespace

TEST(Covariance, MatchesTwoPassReference) {
  const auto shots = random_ensemble(300, 4, 3, 1);
  const CorrelationMap m = correlate(shots, PixelIndex{1, 2});
  for (std::size_t p = 0; p < 12; ++p) {
    EXPECT_NEAR(m.g_map[p], brute_covariance(shots, {1, 2}, p), 1e-12);
  }
  EXPECT_EQ(m.n_shots, 300u);
  EXPECT_EQ(m.ref_pixel, (PixelIndex{1, 2}));
}

TEST(Covariance, IsBilinear) {
  auto shots = random_ensemble(150, 3, 3, 2);
  const CorrelationMap base = correlate(shots, PixelIndex{0, 0});
  for (auto& s : shots) {
    for (double& v : s.i1.values()) v = 2.5 * v + 4;
    for (double& v : s.i2.values()) v = -3 * v + 1;
  }
  const CorrelationMap scaled = correlate(shots, PixelIndex{0, 0});
  for (std::size_t p = 0; p < 9; ++p) {
    EXPECT_NEAR(scaled.g_map[p], -7.5 * base.g_map[p], 1e-11);
  }
}

TEST(Covariance, ReplicatedSignalGivesVariance) {
  const auto shots = linked_ensemble(500, 1.0, 3);
  CovarianceAccumulator acc(2, 1);
  for (const auto& s : shots) acc.add(s.i1(0, 0), s.i2.values());
  EXPECT_NEAR(correlate(shots, PixelIndex{0, 0}).g_map[0], acc.variance_x(), 1e-12);
}

TEST(Covariance, IndependentPixelStaysWithinNoise) {
  const auto shots = linked_ensemble(1000, 2.0, 4);
  const CorrelationMap m = correlate(shots, PixelIndex{0, 0});
  const RealGrid se = jackknife_error(shots, PixelIndex{0, 0});
  EXPECT_LT(std::abs(m.g_map[1]), 5 * se[1]);
  EXPECT_GT(m.g_map[0], 5 * se[0]);
}

TEST(Covariance, ChanMergeEqualsSequential) {
  const auto shots = random_ensemble(100, 2, 2, 5);
  CovarianceAccumulator all(2, 2), first(2, 2), second(2, 2);
  for (std::size_t i = 0; i < shots.size(); ++i) {
    all.add(shots[i].i1(0, 0), shots[i].i2.values());
    (i < 37 ? first : second).add(shots[i].i1(0, 0), shots[i].i2.values());
  }
  first.merge(second);
  EXPECT_EQ(first.count(), 100u);
  const RealGrid a = all.covariance(), b = first.covariance();
  for (std::size_t p = 0; p < 4; ++p) EXPECT_NEAR(a[p], b[p], 1e-13);
}

TEST(Covariance, ThreadCountDoesNotChangeBits) {
  const VectorSource src(random_ensemble(1000, 8, 8, 6));
  const CorrelationMap one = correlate(src, PixelIndex{3, 3}, 1);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(correlate(src, PixelIndex{3, 3}, t).g_map, one.g_map);
}

TEST(Covariance, ConstantInputIsExactlyZero) {
  std::vector<ShotRecord> shots(50, ShotRecord{0, RealGrid(3, 3, 0.7), RealGrid(3, 3, 1.3)});
  const CorrelationMap m = correlate(shots, PixelIndex{1, 1});
  for (double v : m.g_map.values()) EXPECT_EQ(v, 0.0);
  const RealGrid se = jackknife_error(shots, PixelIndex{1, 1});
  for (double v : se.values()) EXPECT_EQ(v, 0.0);
}

TEST(Covariance, DefaultReferenceIsBrightestMean) {
  auto shots = random_ensemble(20, 4, 4, 7);
  for (auto& s : shots) s.i1(2, 1) += 10;
  const VectorSource src(shots);
  EXPECT_EQ(brightest_mean_pixel(src), (PixelIndex{2, 1}));
  EXPECT_EQ(correlate(src).ref_pixel, (PixelIndex{2, 1}));
}

TEST(Covariance, ErrorCases) {
  const auto one = random_ensemble(1, 2, 2, 8);
  try {
    correlate(one, PixelIndex{0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyEnsemble);
  }
  auto shots = random_ensemble(5, 2, 2, 8);
  try {
    correlate(shots, PixelIndex{2, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  shots[3].i2 = RealGrid(3, 2);
  try {
    correlate(shots, PixelIndex{0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
  try {
    jackknife_error(random_ensemble(9, 2, 2, 8), PixelIndex{0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
  }
}

TEST(Jackknife, MatchesExplicitLeaveOneOut) {
  const auto shots = random_ensemble(40, 2, 2, 9);
  const PixelIndex ref{0, 1};
  const RealGrid se = jackknife_error(shots, ref);
  const double n = static_cast<double>(shots.size());
  for (std::size_t p = 0; p < 4; ++p) {
    std::vector<double> loo;
    for (std::size_t i = 0; i < shots.size(); ++i) loo.push_back(brute_covariance(shots, ref, p, i));
    double mean = 0;
    for (double v : loo) mean += v / n;
    double ss = 0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(se[p], std::sqrt((n - 1) / n * ss), 1e-12);
  }
}

TEST(Jackknife, AgreesWithAnalyticErrorForIndependentSpeckle) {
  // x, y independent thermal intensities (|complex normal|^2 with means 1 and 2):
  // Var[(x - mx)(y - my)] = var(x) var(y), so SE(G) = sd(x) sd(y) / sqrt(n).
  auto rng = Xoshiro256::for_stream(14, 1, 0);
  const std::size_t n = 5000;
  std::vector<ShotRecord> shots;
  for (std::size_t i = 0; i < n; ++i) {
    ShotRecord s{i, RealGrid(1, 1), RealGrid(1, 1)};
    s.i1[0] = std::norm(rng.complex_normal(1.0));
    s.i2[0] = std::norm(rng.complex_normal(2.0));
    shots.push_back(std::move(s));
  }
  const double analytic = 1.0 * 2.0 / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(jackknife_error(shots, PixelIndex{0, 0})[0] / analytic, 1.0, 0.2);
}

TEST(Jackknife, DuplicatedEnsembleShrinksByRootTwo) {
  const auto once = linked_ensemble(2000, 1.0, 10);
  auto twice = once;
  twice.insert(twice.end(), once.begin(), once.end());
  const RealGrid a = jackknife_error(once, PixelIndex{0, 0});
  const RealGrid b = jackknife_error(twice, PixelIndex{0, 0});
  for (std::size_t p = 0; p < 2; ++p) EXPECT_NEAR(b[p] / a[p], 1 / std::sqrt(2.0), 1e-3);
}

TEST(Kolmogorov, FrozenSurvivalValues) {
  // Reference values of the limiting Kolmogorov distribution's survival function.
  EXPECT_NEAR(kolmogorov_survival(0.3), 0.9999906941986655, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.18), 0.1234538094297657, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.049485876755377876, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(2.0), 0.0006709252557796953, 1e-12);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(ThermalTest, ExponentialSamplesPassAtNominalRate) {
  int passed = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    auto rng = Xoshiro256::for_stream(12, 9, run);
    std::vector<double> x(10000);
    for (double& v : x) v = -2.0 * std::log(1 - rng.uniform());
    passed += thermal_test(x).passes(0.01);
  }
  EXPECT_GE(passed, 95);
}

TEST(ThermalTest, UniformSamplesAreRejected) {
  auto rng = Xoshiro256::for_stream(12, 10, 0);
  std::vector<double> x(1000);
  for (double& v : x) v = rng.uniform();
  EXPECT_FALSE(thermal_test(x).passes(0.01));
}

TEST(ThermalTest, ConstantSamplesAreRejected) {
  const std::vector<double> x(500, 3.0);
  const HistogramFit fit = thermal_test(x);
  EXPECT_NEAR(fit.ks_statistic, 1 - std::exp(-1.0), 1e-12);
  EXPECT_FALSE(fit.passes(0.01));
}

TEST(ThermalTest, HistogramBookkeeping) {
  auto rng = Xoshiro256::for_stream(12, 11, 0);
  std::vector<double> x(2000);
  for (double& v : x) v = -std::log(1 - rng.uniform());
  const HistogramFit fit = thermal_test(x, 20);
  ASSERT_EQ(fit.counts.size(), 20u);
  ASSERT_EQ(fit.bin_edges.size(), 21u);
  std::size_t total = 0;
  for (auto c : fit.counts) total += c;
  EXPECT_EQ(total, 2000u);
  EXPECT_EQ(fit.n_samples, 2000u);
  const double center = 0.5 * (fit.bin_edges[0] + fit.bin_edges[1]);
  EXPECT_NEAR(fit.fitted_density(0), std::exp(-center / fit.fitted_mean) / fit.fitted_mean, 1e-12);
}

TEST(ThermalTest, InputValidation) {
  EXPECT_THROW(thermal_test(std::vector<double>(99, 1.0)), Error);
  std::vector<double> x(200, 1.0);
  x[5] = -1;
  EXPECT_THROW(thermal_test(x), Error);
}

TEST(Snr, DefinitionOnHandMadeMap) {
  RealGrid g(4, 1);
  g[0] = 10;
  g[1] = 1;
  g[2] = 2;
  g[3] = 3;
  Grid2D<unsigned char> support(4, 1, 0);
  support[0] = 1;
  // Outside: mean 2, population sd sqrt(2/3).
  EXPECT_NEAR(snr_of(g, support), 8 / std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_EQ(snr_of(g, Grid2D<unsigned char>(4, 1, 0)), 0.0);
  EXPECT_EQ(snr_of(RealGrid(4, 1), support), 0.0);
}

TEST(Snr, GrowsLikeRootN) {
  // 64 pixels: the first 8 carry I2 = I1(ref) + noise, the rest noise only.
  auto rng = Xoshiro256::for_stream(13, 1, 0);
  std::vector<ShotRecord> shots;
  for (std::size_t i = 0; i < 4096; ++i) {
    ShotRecord s{i, RealGrid(8, 8), RealGrid(8, 8)};
    s.i1(0, 0) = -std::log(1 - rng.uniform());
    for (std::size_t p = 0; p < 64; ++p) s.i2[p] = 3 * rng.standard_normal() + (p < 8 ? s.i1(0, 0) : 0);
    shots.push_back(std::move(s));
  }
  Grid2D<unsigned char> support(8, 8, 0);
  for (std::size_t p = 0; p < 8; ++p) support[p] = 1;
  const VectorSource src(shots);
  const std::vector<std::size_t> checkpoints{2, 16, 256, 512, 2048, 4096};
  const auto report = snr_report(src, PixelIndex{0, 0}, support, checkpoints);
  ASSERT_EQ(report.size(), 6u);
  EXPECT_TRUE(report[0].low_confidence);
  EXPECT_TRUE(report[1].low_confidence);
  EXPECT_FALSE(report[2].low_confidence);
  EXPECT_NEAR(report[3].snr / report[2].snr, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
  EXPECT_NEAR(report[5].snr / report[4].snr, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
  EXPECT_NEAR(report[5].snr / report[2].snr, 4.0, 1.2);
}

TEST(Snr, GeometricCheckpoints) {
  EXPECT_EQ(geometric_checkpoints(1000, 4), (std::vector<std::size_t>{125, 250, 500, 1000}));
  EXPECT_EQ(geometric_checkpoints(4, 5), (std::vector<std::size_t>{2, 4}));
}

TEST(Pearson, KnownValues) {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1};
  EXPECT_NEAR(pearson_correlation(a, b), 1.0, 1e-15);
  EXPECT_NEAR(pearson_correlation(a, c), -1.0, 1e-15);
}
