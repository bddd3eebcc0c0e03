#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "twmg/grid.hpp"
#include "twmg/pipeline.hpp"

namespace twmg {

/// Random access to an ordered ensemble of shots. Implementations must allow
/// concurrent calls to shot().
class ShotSource {
 public:
  virtual ~ShotSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t width() const = 0;
  virtual std::size_t height() const = 0;
  virtual ShotRecord shot(std::size_t index) const = 0;
};

class SpanShotSource final : public ShotSource {
 public:
  explicit SpanShotSource(std::span<const ShotRecord> shots);
  std::size_t size() const override { return shots_.size(); }
  std::size_t width() const override;
  std::size_t height() const override;
  ShotRecord shot(std::size_t index) const override { return shots_[index]; }

 private:
  std::span<const ShotRecord> shots_;
};

/// Sample covariance G(p) = <I1(ref) I2(p)> - <I1(ref)><I2(p)> with 1/n
/// normalization, plus the means it was built from.
struct CorrelationMap {
  RealGrid g_map;
  PixelIndex ref_pixel;
  std::size_t n_shots{0};
  double mean_i1{0};
  RealGrid mean_i2;
};

/// Streaming co-moment of a scalar x against a map y (Welford updates, Chan
/// merges). Exact zero for constant inputs.
class CovarianceAccumulator {
 public:
  CovarianceAccumulator() = default;
  CovarianceAccumulator(std::size_t width, std::size_t height);

  void add(double x, std::span<const double> y);
  /// Appends `later`, whose samples follow this accumulator's in shot order.
  void merge(const CovarianceAccumulator& later);

  std::size_t count() const noexcept { return n_; }
  double mean_x() const noexcept { return mean_x_; }
  double variance_x() const noexcept { return n_ ? m2_x_ / static_cast<double>(n_) : 0.0; }
  const RealGrid& mean_y() const noexcept { return mean_y_; }
  RealGrid covariance() const;

 private:
  std::size_t n_{0};
  double mean_x_{0};
  double m2_x_{0};
  RealGrid mean_y_;
  RealGrid comoment_;
};

/// Shots are fed in index order and grouped into fixed-size leaves; leaves
/// merge pairwise like a binary counter. The reduction tree depends only on
/// the shot count, so results are bit-identical for any thread count.
class CorrelationEstimator {
 public:
  static constexpr std::size_t kLeafShots = 64;

  CorrelationEstimator(std::size_t width, std::size_t height, PixelIndex ref);

  void push(const ShotRecord& shot);
  /// Adds a fully accumulated leaf of exactly kLeafShots shots. Only valid
  /// when no partial leaf is pending.
  void push_leaf(const CovarianceAccumulator& leaf);

  std::size_t count() const noexcept;
  CorrelationMap result() const;

 private:
  void carry(CovarianceAccumulator node, unsigned level);

  std::size_t width_;
  std::size_t height_;
  PixelIndex ref_;
  struct Node {
    CovarianceAccumulator acc;
    unsigned level;
  };
  std::vector<Node> stack_;
  CovarianceAccumulator pending_;
};

/// Brightest time-averaged I1 pixel (first in row-major order on ties).
PixelIndex brightest_mean_pixel(const ShotSource& shots);

/// Throws EmptyEnsemble for fewer than two shots, ShapeMismatch for
/// inconsistent maps and InvalidArgument for a reference outside the grid.
CorrelationMap correlate(const ShotSource& shots, std::optional<PixelIndex> ref = std::nullopt,
                         unsigned threads = 1);
CorrelationMap correlate(std::span<const ShotRecord> shots,
                         std::optional<PixelIndex> ref = std::nullopt);

/// Leave-one-out standard error of G per pixel. Requires at least 10 shots.
RealGrid jackknife_error(const ShotSource& shots, PixelIndex ref);
RealGrid jackknife_error(std::span<const ShotRecord> shots, PixelIndex ref);

struct HistogramFit {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  double fitted_mean{0};
  double ks_statistic{0};
  double p_value{0};
  std::size_t n_samples{0};

  bool passes(double alpha) const noexcept { return p_value > alpha; }
  /// exp(-I/<I>)/<I> at the center of bin i.
  double fitted_density(std::size_t bin) const;
};

/// Kolmogorov-Smirnov test against the exponential law with the sample mean.
/// Throws InsufficientSamples below 100 samples.
HistogramFit thermal_test(std::span<const double> samples, std::size_t bins = 50);

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda) noexcept;

struct SnrPoint {
  std::size_t n_shots{0};
  double snr{0};
  bool low_confidence{false};
};

/// (mean G inside support - mean G outside) / std of G outside, 0 when
/// undefined.
double snr_of(const RealGrid& g_map, const Grid2D<unsigned char>& support);

/// SNR of the correlation map evaluated at each checkpoint (ascending shot
/// counts, at least two). Fewer than 30 shots are flagged low-confidence.
std::vector<SnrPoint> snr_report(const ShotSource& shots, PixelIndex ref,
                                 const Grid2D<unsigned char>& support,
                                 std::span<const std::size_t> checkpoints);

/// Powers-of-two spaced checkpoints ending at n (n, n/2, ... >= 2), ascending.
std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t count);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace twmg
