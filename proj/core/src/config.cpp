#include "twmg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "twmg/error.hpp"

namespace twmg {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + std::string(value) + "' for " +
                                            std::string(key) + " (expected " + expected + ")");
}

double parse_real(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) bad_value(key, v, "a real");
  return out;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, v, "true or false");
}

struct Entry {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

#define TWMG_REAL(sec, name, member)                                                   \
  Entry {                                                                              \
    sec, name, [](const RunConfig& c) { return format_double(c.member); },             \
        [](RunConfig& c, std::string_view v) { c.member = parse_real(name, v); }       \
  }
#define TWMG_SIZE(sec, name, member)                                                   \
  Entry {                                                                              \
    sec, name, [](const RunConfig& c) { return std::to_string(c.member); },            \
        [](RunConfig& c, std::string_view v) {                                         \
          c.member = parse_int<std::decay_t<decltype(c.member)>>(name, v);             \
        }                                                                              \
  }
#define TWMG_BOOL(sec, name, member)                                                   \
  Entry {                                                                              \
    sec, name, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](RunConfig& c, std::string_view v) { c.member = parse_bool(name, v); }       \
  }
#define TWMG_TEXT(sec, name, member)                                                   \
  Entry {                                                                              \
    sec, name, [](const RunConfig& c) { return std::string(c.member); },               \
        [](RunConfig& c, std::string_view v) { c.member = std::string(v); }            \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      TWMG_SIZE("grid", "width", grid.width),
      TWMG_SIZE("grid", "height", grid.height),
      TWMG_REAL("grid", "pitch", grid.pitch),

      TWMG_REAL("geometry", "lambda1", lambda1),
      TWMG_REAL("geometry", "lambda2", lambda2),
      TWMG_REAL("geometry", "lambda3", lambda3),
      TWMG_REAL("geometry", "index1", index1),
      TWMG_REAL("geometry", "index2", index2),
      TWMG_REAL("geometry", "index3", index3),
      TWMG_REAL("geometry", "pump_theta", pump_direction.theta),
      TWMG_REAL("geometry", "pump_beta", pump_direction.beta),
      TWMG_REAL("geometry", "seed_theta", seed_direction.theta),
      TWMG_REAL("geometry", "seed_beta", seed_direction.beta),
      TWMG_REAL("geometry", "crystal_length", crystal_length),
      TWMG_REAL("geometry", "object_distance", object_distance),
      TWMG_REAL("geometry", "focal_length", focal_length),
      TWMG_REAL("geometry", "lens_to_crystal", lens_to_crystal),
      TWMG_REAL("geometry", "image_distance", image_distance),
      TWMG_REAL("geometry", "detector_distance", detector_distance),
      TWMG_REAL("geometry", "fourier_focal", fourier_focal),
      TWMG_REAL("geometry", "fourier_distance", fourier_distance),

      TWMG_SIZE("source", "modes", source.mode_count),
      TWMG_REAL("source", "angular_spread", source.angular_spread),
      TWMG_REAL("source", "amplitude_scale", source.amplitude_scale),
      TWMG_BOOL("source", "fixed_directions", source.fixed_directions),
      TWMG_TEXT("source", "direction_lattice", direction_lattice),
      Entry{"source", "amplitude_law",
            [](const RunConfig& c) {
              return std::string(c.source.law == AmplitudeLaw::Thermal ? "thermal"
                                                                       : "fixed-modulus");
            },
            [](RunConfig& c, std::string_view v) {
              const std::string s = lower(v);
              if (s == "thermal") {
                c.source.law = AmplitudeLaw::Thermal;
              } else if (s == "fixed-modulus") {
                c.source.law = AmplitudeLaw::FixedModulus;
              } else {
                bad_value("amplitude_law", v, "thermal or fixed-modulus");
              }
            }},
      TWMG_SIZE("source", "master_seed", master_seed),

      Entry{"detector", "bit_depth", [](const RunConfig& c) { return std::to_string(c.detector.bit_depth); },
            [](RunConfig& c, std::string_view v) { c.detector.bit_depth = parse_int<int>("bit_depth", v); }},
      TWMG_REAL("detector", "saturation_level", detector.saturation_level),
      TWMG_SIZE("detector", "pixel_binning", detector.pixel_binning),

      Entry{"filter", "kind",
            [](const RunConfig& c) {
              switch (c.mixing.filter) {
                case FilterKind::Sinc2: return std::string("sinc2");
                case FilterKind::HardCutoff: return std::string("hard");
                case FilterKind::None: break;
              }
              return std::string("none");
            },
            [](RunConfig& c, std::string_view v) {
              const std::string s = lower(v);
              if (s == "sinc2") {
                c.mixing.filter = FilterKind::Sinc2;
              } else if (s == "hard") {
                c.mixing.filter = FilterKind::HardCutoff;
              } else if (s == "none") {
                c.mixing.filter = FilterKind::None;
              } else {
                bad_value("kind", v, "sinc2, hard or none");
              }
            }},
      TWMG_REAL("filter", "coupling", mixing.coupling),
      TWMG_BOOL("filter", "coherent_sum", mixing.coherent_sum),

      TWMG_SIZE("run", "shots", shots),
      TWMG_TEXT("run", "mask", mask),
      TWMG_REAL("run", "hole_diameter", hole_diameter),
      Entry{"run", "output", [](const RunConfig& c) { return c.output_dir.string(); },
            [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); }},
      TWMG_SIZE("run", "threads", threads),
  };
  return table;
}

#undef TWMG_REAL
#undef TWMG_SIZE
#undef TWMG_BOOL
#undef TWMG_TEXT

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

InteractionGeometry RunConfig::build_geometry() const {
  InteractionGeometry g;
  g.k1 = WaveVector::make(seed_direction, lambda1, index1);
  g.k3 = WaveVector::make(pump_direction, lambda3, index3);
  g.k2 = phase_matched_partner(g.k3, g.k1, lambda2, index2);
  g.crystal_length = crystal_length;
  g.object_distance = object_distance;
  g.focal_length = focal_length;
  g.lens_to_crystal = lens_to_crystal;
  g.image_distance = image_distance;
  g.detector_distance = detector_distance;
  g.fourier_focal = fourier_focal;
  g.fourier_distance = fourier_distance;
  return g;
}

SourceSpec RunConfig::build_source() const {
  SourceSpec spec = source;
  const std::string mode = lower(trim(direction_lattice));
  if (mode == "auto") {
    spec.direction_lattice = grid.pitch / fourier_focal;
  } else if (mode == "off" || mode.empty()) {
    spec.direction_lattice = 0.0;
  } else {
    spec.direction_lattice = parse_real("direction_lattice", mode);
  }
  return spec;
}

void RunConfig::validate() const {
  if (grid.width == 0 || grid.height == 0) {
    throw Error(ErrorCode::InvalidConfig, "grid dimensions must be positive");
  }
  if (!is_power_of_two(grid.width) || !is_power_of_two(grid.height)) {
    throw Error(ErrorCode::InvalidConfig, "grid dimensions must be powers of two");
  }
  if (!(grid.pitch > 0)) throw Error(ErrorCode::InvalidConfig, "grid pitch must be positive");
  if (shots < 1) throw Error(ErrorCode::InvalidConfig, "shots must be >= 1");
  if (threads < 1) throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
  if (!(hole_diameter > 0)) throw Error(ErrorCode::InvalidConfig, "hole_diameter must be positive");
  if (mask != kBuiltinThreeHoles && !std::filesystem::exists(mask)) {
    throw Error(ErrorCode::InvalidConfig, "mask file does not exist: " + mask);
  }
  if (!(mixing.coupling >= 0)) throw Error(ErrorCode::InvalidConfig, "coupling must be >= 0");
  build_geometry().validate();
  build_source().validate();
  detector.validate();
}

void set_config_value(RunConfig& cfg, std::string_view section, std::string_view key,
                      std::string_view value) {
  const std::string s = lower(section);
  const std::string k = lower(key);
  for (const Entry& e : entries()) {
    if (s == e.section && k == e.key) {
      e.set(cfg, trim(value));
      return;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown config key [" + s + "] " + k);
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto c = line.find_first_of(";#"); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::InvalidConfig,
                    "line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": key outside a section");
    }
    set_config_value(cfg, section, trim(std::string_view(line).substr(0, eq)),
                     std::string_view(line).substr(eq + 1));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_env_overrides(RunConfig& cfg, const std::function<const char*(const char*)>& lookup) {
  for (const Entry& e : entries()) {
    const std::string name = "TWMG_" + upper(e.section) + "_" + upper(e.key);
    const char* value = lookup ? lookup(name.c_str()) : std::getenv(name.c_str());
    if (value) e.set(cfg, trim(value));
  }
}

std::string to_ini(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Entry& e : entries()) {
    if (section != e.section) {
      section = e.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(e.key) + " = " + e.get(cfg) + "\n";
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Entry& e : entries()) keys.push_back(std::string(e.section) + "." + e.key);
  return keys;
}

}  // namespace twmg
