// twmg: holographic imaging with chaotic light, command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data or config error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "twmg/config.hpp"
#include "twmg/error.hpp"
#include "twmg/runs.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> shots;
  std::string out;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "INI run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--shots", f.shots, "number of shots")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);
}

// Defaults, then the config file, then TWMG_* environment variables, then flags.
twmg::RunConfig build_config(const CommonFlags& f) {
  twmg::RunConfig cfg = f.config.empty() ? twmg::RunConfig{} : twmg::load_config(f.config);
  twmg::apply_env_overrides(cfg);
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.shots) cfg.shots = *f.shots;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.threads) cfg.threads = *f.threads;
  return cfg;
}

std::optional<twmg::PixelIndex> parse_pixel(const std::string& text) {
  if (text.empty() || text == "auto") return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw twmg::Error(twmg::ErrorCode::InvalidArgument, "pixel must be ROW,COL or auto");
  }
  try {
    std::size_t used = 0;
    const std::string row = text.substr(0, comma);
    const std::string col = text.substr(comma + 1);
    const unsigned long r = std::stoul(row, &used);
    if (used != row.size()) throw std::invalid_argument(row);
    const unsigned long c = std::stoul(col, &used);
    if (used != col.size()) throw std::invalid_argument(col);
    return twmg::PixelIndex{r, c};
  } catch (const std::logic_error&) {
    throw twmg::Error(twmg::ErrorCode::InvalidArgument, "pixel must be ROW,COL or auto");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holographic imaging with chaotic light: simulation and correlation analysis"};
  app.set_version_flag("--version", std::string(twmg::library_version()));
  app.require_subcommand(1);

  CommonFlags coherent_flags;
  auto* coherent = app.add_subcommand("simulate-coherent", "coherent holographic image of the mask");
  add_common(coherent, coherent_flags);

  CommonFlags chaotic_flags;
  auto* chaotic = app.add_subcommand("simulate-chaotic", "chaotic-seed ensemble to a frame stack");
  add_common(chaotic, chaotic_flags);

  CommonFlags recon_flags;
  std::string recon_stack;
  std::string recon_ref = "auto";
  auto* recon = app.add_subcommand("reconstruct", "intensity-correlation map from a frame stack");
  add_common(recon, recon_flags);
  recon->add_option("stack", recon_stack, "frame stack file")->required();
  recon->add_option("--ref", recon_ref, "reference pixel ROW,COL or auto");

  CommonFlags stats_flags;
  std::string stats_stack;
  std::string stats_mode = "temporal";
  std::string stats_channel = "i1";
  std::size_t stats_shot = 0;
  std::string stats_pixel = "auto";
  std::size_t stats_bins = 50;
  double stats_alpha = 0.01;
  auto* stats = app.add_subcommand("stats", "intensity histogram and exponential KS test");
  add_common(stats, stats_flags);
  stats->add_option("stack", stats_stack, "frame stack file")->required();
  stats->add_option("--mode", stats_mode, "spatial (one shot) or temporal (one pixel)")
      ->check(CLI::IsMember({"spatial", "temporal"}));
  stats->add_option("--channel", stats_channel, "i1 or i2")->check(CLI::IsMember({"i1", "i2"}));
  stats->add_option("--shot", stats_shot, "shot index for spatial mode");
  stats->add_option("--pixel", stats_pixel, "ROW,COL or auto for temporal mode");
  stats->add_option("--bins", stats_bins, "histogram bins")->check(CLI::PositiveNumber);
  stats->add_option("--alpha", stats_alpha, "significance level")->check(CLI::Range(0.0, 1.0));

  CommonFlags self_flags;
  auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
  add_common(selftest, self_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (coherent->parsed()) {
      std::cout << twmg::run_simulate_coherent(build_config(coherent_flags)).report << "\n";
    } else if (chaotic->parsed()) {
      std::cout << twmg::run_simulate_chaotic(build_config(chaotic_flags)).report << "\n";
    } else if (recon->parsed()) {
      twmg::ReconstructOptions opts;
      opts.ref = parse_pixel(recon_ref);
      opts.output_dir = recon_flags.out.empty() ? std::filesystem::path(".") : std::filesystem::path(recon_flags.out);
      opts.threads = recon_flags.threads.value_or(1);
      std::cout << twmg::run_reconstruct(recon_stack, opts).report << "\n";
    } else if (stats->parsed()) {
      twmg::StatsOptions opts;
      opts.mode = stats_mode == "spatial" ? twmg::StatsMode::Spatial : twmg::StatsMode::Temporal;
      opts.channel = stats_channel == "i2" ? twmg::StatsChannel::I2 : twmg::StatsChannel::I1;
      opts.shot = stats_shot;
      opts.pixel = parse_pixel(stats_pixel);
      opts.bins = stats_bins;
      opts.alpha = stats_alpha;
      opts.output_dir = stats_flags.out.empty() ? std::filesystem::path(".") : std::filesystem::path(stats_flags.out);
      std::cout << twmg::run_stats(stats_stack, opts).output.report;
    } else if (selftest->parsed()) {
      bool ok = true;
      for (const auto& check : twmg::run_selftest()) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << "\n";
        ok = ok && check.passed;
      }
      return ok ? 0 : 3;
    }
  } catch (const twmg::Error& e) {
    std::cerr << "twmg: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "twmg: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    std::cerr << "twmg: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "twmg: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
