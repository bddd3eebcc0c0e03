#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twmg/chaotic_source.hpp"
#include "twmg/geometry.hpp"
#include "twmg/pipeline.hpp"

namespace twmg {

struct GridSpec {
  std::size_t width{256};
  std::size_t height{256};
  double pitch{16e-6};
};

/// Everything a run needs. Serialized as INI text:
///
///   [section]
///   key = value   ; comments start with ';' or '#'
///
/// Any key can be overridden from the environment as TWMG_<SECTION>_<KEY>
/// in upper case, e.g. TWMG_RUN_SHOTS=200.
struct RunConfig {
  GridSpec grid;

  double lambda1{1064e-9};
  double lambda2{1064e-9};
  double lambda3{532e-9};
  double index1{1.0};
  double index2{1.0};
  double index3{1.0};
  Direction pump_direction{};
  Direction seed_direction{};
  double crystal_length{4e-3};
  double object_distance{0.6};
  double focal_length{0.3};
  double lens_to_crystal{0.2};
  double image_distance{0.4};
  double detector_distance{0.2};
  double fourier_focal{0.15};
  double fourier_distance{0.15};

  SourceSpec source;
  /// "auto" (grid pitch / fourier_focal), "off", or an explicit step.
  std::string direction_lattice{"auto"};
  std::uint64_t master_seed{1};

  DetectorSpec detector;
  MixingOptions mixing;

  std::size_t shots{1000};
  std::string mask{"builtin:three-holes"};
  double hole_diameter{256e-6};
  std::filesystem::path output_dir{"twmg-out"};
  unsigned threads{1};

  /// Generated beam from phase_matched_partner(k3, k1).
  InteractionGeometry build_geometry() const;
  SourceSpec build_source() const;

  /// Throws InvalidConfig (or the upstream validation error).
  void validate() const;
};

inline constexpr std::string_view kBuiltinThreeHoles = "builtin:three-holes";

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Looks up TWMG_<SECTION>_<KEY> through `lookup` (getenv by default).
void apply_env_overrides(RunConfig& cfg,
                         const std::function<const char*(const char*)>& lookup = nullptr);

/// Sets one key; throws InvalidConfig for unknown keys or unparsable values.
void set_config_value(RunConfig& cfg, std::string_view section, std::string_view key,
                      std::string_view value);

/// Round-trips through parse_config exactly (17 significant digits).
std::string to_ini(const RunConfig& cfg);

/// "section.key" for every recognized key, in serialization order.
std::vector<std::string> config_keys();

std::string format_double(double v);

}  // namespace twmg
