#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "twmg/config.hpp"
#include "twmg/pipeline.hpp"
#include "twmg/statistics.hpp"

namespace twmg {

std::string_view library_version() noexcept;

/// Builtin three-hole object or a graymap file, checked against the grid.
ObjectMask resolve_mask(const RunConfig& cfg);

/// The configured chaotic ensemble as a lazily evaluated shot source. Shot i
/// depends only on (config, i), so any evaluation order gives the same data.
class EnsembleSimulator final : public ShotSource {
 public:
  explicit EnsembleSimulator(const RunConfig& cfg);

  std::size_t size() const override { return shots_; }
  std::size_t width() const override { return imager_.width(); }
  std::size_t height() const override { return imager_.height(); }
  ShotRecord shot(std::size_t index) const override;

  const ChaoticImager& imager() const noexcept { return imager_; }
  const SourceSpec& source() const noexcept { return source_; }

 private:
  SourceSpec source_;
  DetectorSpec detector_;
  std::uint64_t seed_;
  std::size_t shots_;
  ChaoticImager imager_;
};

struct RunOutput {
  std::vector<std::filesystem::path> files;
  std::string report;
};

/// Coherent image, its normalization sidecar and the mask, under output_dir.
RunOutput run_simulate_coherent(const RunConfig& cfg);

/// frames.twmg plus manifest.ini under output_dir. Shots are computed on
/// cfg.threads workers and written in index order.
RunOutput run_simulate_chaotic(const RunConfig& cfg);

struct ReconstructOptions {
  std::optional<PixelIndex> ref;  // brightest mean I1 pixel when empty
  std::filesystem::path output_dir{"."};
  unsigned threads{1};
};

/// g_map.pgm (16-bit, min-max normalized), g_map_normalization.csv and the
/// raw g_map.csv.
RunOutput run_reconstruct(const std::filesystem::path& stack, const ReconstructOptions& opts);

enum class StatsMode { Spatial, Temporal };
enum class StatsChannel { I1, I2 };

struct StatsOptions {
  StatsMode mode{StatsMode::Temporal};
  StatsChannel channel{StatsChannel::I1};
  std::size_t shot{0};              // spatial mode
  std::optional<PixelIndex> pixel;  // temporal mode; brightest mean I1 pixel when empty
  std::size_t bins{50};
  double alpha{0.01};
  std::filesystem::path output_dir{"."};
};

struct StatsOutcome {
  RunOutput output;
  HistogramFit fit;
  bool passed{false};
};

/// Histogram with the exponential overlay (histogram.csv) and a KS report
/// (fit_report.txt). Spatial I1 statistics use the pixels that carry a mode
/// somewhere in the stack; every other pixel of the binned map is zero.
StatsOutcome run_stats(const std::filesystem::path& stack, const StatsOptions& opts);

struct SelftestCheck {
  std::string name;
  bool passed{false};
  std::string detail;
};

/// Fast oracle checks of the numerical core.
std::vector<SelftestCheck> run_selftest();

}  // namespace twmg
