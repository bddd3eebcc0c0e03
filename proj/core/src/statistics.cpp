#include "twmg/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parallel.hpp"
#include "twmg/error.hpp"

namespace twmg {
namespace {

void check_shot(const ShotRecord& s, std::size_t width, std::size_t height) {
  if (s.i1.width() != width || s.i1.height() != height || s.i2.width() != width ||
      s.i2.height() != height) {
    throw Error(ErrorCode::ShapeMismatch,
                "shot " + std::to_string(s.shot_index) + " has inconsistent map dimensions");
  }
}

void require_ensemble(const ShotSource& shots) {
  if (shots.size() < 2) {
    throw Error(ErrorCode::EmptyEnsemble, "correlation needs at least two shots, got " +
                                              std::to_string(shots.size()));
  }
}

PixelIndex resolve_ref(const ShotSource& shots, std::optional<PixelIndex> ref) {
  if (!ref) return brightest_mean_pixel(shots);
  if (ref->row >= shots.height() || ref->col >= shots.width()) {
    throw Error(ErrorCode::InvalidArgument, "reference pixel outside the detector grid");
  }
  return *ref;
}

}  // namespace

SpanShotSource::SpanShotSource(std::span<const ShotRecord> shots) : shots_(shots) {}

std::size_t SpanShotSource::width() const { return shots_.empty() ? 0 : shots_.front().i1.width(); }
std::size_t SpanShotSource::height() const {
  return shots_.empty() ? 0 : shots_.front().i1.height();
}

CovarianceAccumulator::CovarianceAccumulator(std::size_t width, std::size_t height)
    : mean_y_(width, height), comoment_(width, height) {}

void CovarianceAccumulator::add(double x, std::span<const double> y) {
  if (y.size() != mean_y_.size()) throw Error(ErrorCode::ShapeMismatch, "accumulator map size");
  ++n_;
  const double inv_n = 1.0 / static_cast<double>(n_);
  const double dx = x - mean_x_;
  mean_x_ += dx * inv_n;
  m2_x_ += dx * (x - mean_x_);
  double* my = mean_y_.data();
  double* cm = comoment_.data();
  for (std::size_t i = 0; i < y.size(); ++i) {
    my[i] += (y[i] - my[i]) * inv_n;
    cm[i] += dx * (y[i] - my[i]);
  }
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& later) {
  if (later.n_ == 0) return;
  if (n_ == 0) {
    *this = later;
    return;
  }
  require_same_shape(mean_y_, later.mean_y_, "accumulator merge");
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(later.n_);
  const double n = na + nb;
  const double dx = later.mean_x_ - mean_x_;
  mean_x_ += dx * nb / n;
  m2_x_ += later.m2_x_ + dx * dx * na * nb / n;
  const double w = na * nb / n;
  double* my = mean_y_.data();
  double* cm = comoment_.data();
  const double* oy = later.mean_y_.data();
  const double* oc = later.comoment_.data();
  for (std::size_t i = 0; i < mean_y_.size(); ++i) {
    const double dy = oy[i] - my[i];
    my[i] += dy * nb / n;
    cm[i] += oc[i] + dx * dy * w;
  }
  n_ += later.n_;
}

RealGrid CovarianceAccumulator::covariance() const {
  RealGrid out(comoment_.width(), comoment_.height());
  if (n_ == 0) return out;
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = comoment_[i] * inv;
  return out;
}

CorrelationEstimator::CorrelationEstimator(std::size_t width, std::size_t height, PixelIndex ref)
    : width_(width), height_(height), ref_(ref), pending_(width, height) {
  if (ref.row >= height || ref.col >= width) {
    throw Error(ErrorCode::InvalidArgument, "reference pixel outside the detector grid");
  }
}

void CorrelationEstimator::push(const ShotRecord& shot) {
  check_shot(shot, width_, height_);
  pending_.add(shot.i1(ref_.row, ref_.col), shot.i2.values());
  if (pending_.count() == kLeafShots) {
    carry(std::move(pending_), 0);
    pending_ = CovarianceAccumulator(width_, height_);
  }
}

void CorrelationEstimator::push_leaf(const CovarianceAccumulator& leaf) {
  if (pending_.count() != 0 || leaf.count() != kLeafShots) {
    throw Error(ErrorCode::InvalidArgument, "push_leaf needs a full leaf and no pending shots");
  }
  carry(leaf, 0);
}

void CorrelationEstimator::carry(CovarianceAccumulator node, unsigned level) {
  while (!stack_.empty() && stack_.back().level == level) {
    CovarianceAccumulator left = std::move(stack_.back().acc);
    stack_.pop_back();
    left.merge(node);
    node = std::move(left);
    ++level;
  }
  stack_.push_back({std::move(node), level});
}

std::size_t CorrelationEstimator::count() const noexcept {
  std::size_t n = pending_.count();
  for (const Node& node : stack_) n += node.acc.count();
  return n;
}

CorrelationMap CorrelationEstimator::result() const {
  // Fold right to left so every merge appends later shots to earlier ones.
  CovarianceAccumulator acc = pending_;
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
    CovarianceAccumulator left = it->acc;
    left.merge(acc);
    acc = std::move(left);
  }
  if (acc.count() < 2) {
    throw Error(ErrorCode::EmptyEnsemble, "correlation needs at least two shots");
  }
  CorrelationMap map;
  map.g_map = acc.covariance();
  map.ref_pixel = ref_;
  map.n_shots = acc.count();
  map.mean_i1 = acc.mean_x();
  map.mean_i2 = acc.mean_y();
  return map;
}

PixelIndex brightest_mean_pixel(const ShotSource& shots) {
  require_ensemble(shots);
  const std::size_t w = shots.width();
  const std::size_t h = shots.height();
  RealGrid sum(w, h);
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const ShotRecord s = shots.shot(i);
    check_shot(s, w, h);
    for (std::size_t p = 0; p < sum.size(); ++p) sum[p] += s.i1[p];
  }
  const auto it = std::max_element(sum.values().begin(), sum.values().end());
  const auto idx = static_cast<std::size_t>(it - sum.values().begin());
  return {idx / w, idx % w};
}

CorrelationMap correlate(const ShotSource& shots, std::optional<PixelIndex> ref,
                         unsigned threads) {
  require_ensemble(shots);
  const PixelIndex pixel = resolve_ref(shots, ref);
  const std::size_t w = shots.width();
  const std::size_t h = shots.height();
  CorrelationEstimator est(w, h, pixel);

  const std::size_t leaf = CorrelationEstimator::kLeafShots;
  const std::size_t full_leaves = shots.size() / leaf;
  // Bounded batches keep memory at a few leaves per worker.
  const std::size_t batch = std::max<std::size_t>(1, threads) * 2;
  for (std::size_t first = 0; first < full_leaves; first += batch) {
    const std::size_t count = std::min(batch, full_leaves - first);
    std::vector<CovarianceAccumulator> leaves(count, CovarianceAccumulator(w, h));
    detail::parallel_for(count, threads, [&](std::size_t j) {
      const std::size_t base = (first + j) * leaf;
      for (std::size_t i = base; i < base + leaf; ++i) {
        const ShotRecord s = shots.shot(i);
        check_shot(s, w, h);
        leaves[j].add(s.i1(pixel.row, pixel.col), s.i2.values());
      }
    });
    for (const auto& l : leaves) est.push_leaf(l);
  }
  for (std::size_t i = full_leaves * leaf; i < shots.size(); ++i) est.push(shots.shot(i));
  return est.result();
}

CorrelationMap correlate(std::span<const ShotRecord> shots, std::optional<PixelIndex> ref) {
  return correlate(SpanShotSource(shots), ref, 1);
}

RealGrid jackknife_error(const ShotSource& shots, PixelIndex ref) {
  const std::size_t n = shots.size();
  if (n < 10) {
    throw Error(ErrorCode::InsufficientSamples,
                "jackknife needs at least 10 shots, got " + std::to_string(n));
  }
  const CorrelationMap base = correlate(shots, ref, 1);
  const std::size_t w = shots.width();
  const std::size_t h = shots.height();

  // Leave-one-out G_(i) - mean = -n/(n-1)^2 (d_i - mean d), with
  // d_i = (x_i - mx)(y_i - my); accumulate the spread of d with Welford.
  RealGrid mean_d(w, h);
  RealGrid m2_d(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    const ShotRecord s = shots.shot(i);
    check_shot(s, w, h);
    const double dx = s.i1(ref.row, ref.col) - base.mean_i1;
    const double inv = 1.0 / static_cast<double>(i + 1);
    for (std::size_t p = 0; p < mean_d.size(); ++p) {
      const double d = dx * (s.i2[p] - base.mean_i2[p]);
      const double delta = d - mean_d[p];
      mean_d[p] += delta * inv;
      m2_d[p] += delta * (d - mean_d[p]);
    }
  }
  const double nn = static_cast<double>(n);
  const double scale = nn / ((nn - 1) * (nn - 1) * (nn - 1));
  RealGrid out(w, h);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::sqrt(scale * m2_d[p]);
  return out;
}

RealGrid jackknife_error(std::span<const ShotRecord> shots, PixelIndex ref) {
  return jackknife_error(SpanShotSource(shots), ref);
}

double HistogramFit::fitted_density(std::size_t bin) const {
  if (bin + 1 >= bin_edges.size() || !(fitted_mean > 0)) return 0.0;
  const double center = 0.5 * (bin_edges[bin] + bin_edges[bin + 1]);
  return std::exp(-center / fitted_mean) / fitted_mean;
}

double kolmogorov_survival(double lambda) noexcept {
  if (!(lambda > 0)) return 1.0;
  if (lambda < 1.18) {
    // Dual series, fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0;
    for (int k = 1; k <= 41; k += 2) s += std::exp(-k * k * pi2 / (8 * lambda * lambda));
    return std::clamp(1.0 - std::sqrt(2 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double q = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

HistogramFit thermal_test(std::span<const double> samples, std::size_t bins) {
  const std::size_t n = samples.size();
  if (n < 100) {
    throw Error(ErrorCode::InsufficientSamples,
                "thermal test needs at least 100 samples, got " + std::to_string(n));
  }
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (!std::isfinite(v) || v < 0) {
      throw Error(ErrorCode::InvalidArgument, "intensity samples must be finite and >= 0");
    }
  }
  std::sort(sorted.begin(), sorted.end());

  HistogramFit fit;
  fit.n_samples = n;
  double sum = 0;
  for (double v : sorted) sum += v;
  fit.fitted_mean = sum / static_cast<double>(n);

  const double top = sorted.back() > 0 ? sorted.back() : 1.0;
  fit.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    fit.bin_edges[b] = top * static_cast<double>(b) / static_cast<double>(bins);
  }
  fit.counts.assign(bins, 0);
  for (double v : sorted) {
    auto b = static_cast<std::size_t>(v / top * static_cast<double>(bins));
    fit.counts[std::min(b, bins - 1)]++;
  }

  const double nn = static_cast<double>(n);
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = fit.fitted_mean > 0 ? 1.0 - std::exp(-sorted[i] / fit.fitted_mean) : 1.0;
    d = std::max({d, cdf - static_cast<double>(i) / nn, static_cast<double>(i + 1) / nn - cdf});
  }
  fit.ks_statistic = d;
  const double root = std::sqrt(nn);
  fit.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
  return fit;
}

double snr_of(const RealGrid& g_map, const Grid2D<unsigned char>& support) {
  require_same_shape(g_map, support, "support mask must match the correlation map");
  double sum_in = 0, sum_out = 0;
  std::size_t n_in = 0, n_out = 0;
  for (std::size_t p = 0; p < g_map.size(); ++p) {
    if (support[p]) {
      sum_in += g_map[p];
      ++n_in;
    } else {
      sum_out += g_map[p];
      ++n_out;
    }
  }
  if (n_in == 0 || n_out == 0) return 0.0;
  const double mean_in = sum_in / static_cast<double>(n_in);
  const double mean_out = sum_out / static_cast<double>(n_out);
  double var = 0;
  for (std::size_t p = 0; p < g_map.size(); ++p) {
    if (!support[p]) var += (g_map[p] - mean_out) * (g_map[p] - mean_out);
  }
  const double sd = std::sqrt(var / static_cast<double>(n_out));
  if (!(sd > 0)) return 0.0;
  return (mean_in - mean_out) / sd;
}

std::vector<SnrPoint> snr_report(const ShotSource& shots, PixelIndex ref,
                                 const Grid2D<unsigned char>& support,
                                 std::span<const std::size_t> checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorCode::InvalidArgument, "no SNR checkpoints");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() < 2 ||
      checkpoints.back() > shots.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "checkpoints must be ascending, >= 2 and within the ensemble size");
  }
  if (support.width() != shots.width() || support.height() != shots.height()) {
    throw Error(ErrorCode::ShapeMismatch, "support mask must match the detector grid");
  }
  CorrelationEstimator est(shots.width(), shots.height(), ref);
  std::vector<SnrPoint> out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < checkpoints.back(); ++i) {
    est.push(shots.shot(i));
    while (next < checkpoints.size() && checkpoints[next] == i + 1) {
      const CorrelationMap map = est.result();
      out.push_back({i + 1, snr_of(map.g_map, support), i + 1 < 30});
      ++next;
    }
  }
  return out;
}

std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t count) {
  std::vector<std::size_t> out;
  std::size_t v = n;
  while (out.size() < count && v >= 2) {
    out.push_back(v);
    v /= 2;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "pearson inputs differ in size");
  if (a.size() < 2) throw Error(ErrorCode::InsufficientSamples, "pearson needs two samples");
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0) || !(sbb > 0)) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace twmg
