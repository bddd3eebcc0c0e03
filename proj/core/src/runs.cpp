#include "twmg/runs.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "parallel.hpp"
#include "twmg/error.hpp"
#include "twmg/frame_stack.hpp"
#include "twmg/image_io.hpp"
#include "twmg/random.hpp"
#include "twmg/twm_core.hpp"

namespace twmg {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::UnreadableFile, "failed writing " + path.string());
}

void write_normalization(const std::filesystem::path& path, const Normalization& n,
                         std::vector<std::string> extra_header = {},
                         std::vector<double> extra = {}) {
  std::vector<std::string> header = {"min", "max"};
  header.insert(header.end(), extra_header.begin(), extra_header.end());
  std::vector<double> row = {n.min, n.max};
  row.insert(row.end(), extra.begin(), extra.end());
  write_table_csv(path, header, {row});
}

RealGrid mask_intensity(const ObjectMask& mask) {
  RealGrid out = mask.transmission;
  for (double& v : out.values()) v *= v;
  return out;
}

}  // namespace

std::string_view library_version() noexcept { return TWMG_VERSION; }

ObjectMask resolve_mask(const RunConfig& cfg) {
  ObjectMask mask = cfg.mask == kBuiltinThreeHoles
                        ? three_hole_mask(cfg.grid.width, cfg.grid.height, cfg.grid.pitch,
                                          cfg.hole_diameter)
                        : load_mask(cfg.mask, cfg.grid.pitch);
  if (mask.transmission.width() != cfg.grid.width ||
      mask.transmission.height() != cfg.grid.height) {
    throw Error(ErrorCode::ShapeMismatch,
                "mask is " + std::to_string(mask.transmission.width()) + "x" +
                    std::to_string(mask.transmission.height()) + " but the grid is " +
                    std::to_string(cfg.grid.width) + "x" + std::to_string(cfg.grid.height));
  }
  return mask;
}

EnsembleSimulator::EnsembleSimulator(const RunConfig& cfg)
    : source_(cfg.build_source()),
      detector_(cfg.detector),
      seed_(cfg.master_seed),
      shots_(cfg.shots),
      imager_(resolve_mask(cfg), cfg.build_geometry(), cfg.mixing) {
  source_.validate();
  detector_.validate();
  if (source_.fixed_directions && !cfg.mixing.coherent_sum) {
    const std::vector<Direction> dirs = sample_directions(source_, seed_, 0);
    imager_.prepare(dirs);
  }
}

ShotRecord EnsembleSimulator::shot(std::size_t index) const {
  return imager_.shot(sample_modes(source_, seed_, index), detector_);
}

RunOutput run_simulate_coherent(const RunConfig& cfg) {
  cfg.validate();
  const ObjectMask mask = resolve_mask(cfg);
  const InteractionGeometry g = cfg.build_geometry();
  const RealGrid image = apply_detector(
      coherent_image(mask, g, cfg.source.amplitude_scale, cfg.mixing), cfg.detector);

  RunOutput out;
  const auto dir = cfg.output_dir;
  const Normalization n = write_normalized_pgm16(dir / "coherent_image.pgm", image);
  write_normalization(dir / "coherent_image_normalization.csv", n);
  write_grid_csv(dir / "coherent_image.csv", image);
  write_normalized_pgm16(dir / "mask.pgm", mask_intensity(mask));
  write_text(dir / "manifest.ini", "; twmg " + std::string(library_version()) + "\n" + to_ini(cfg));
  out.files = {dir / "coherent_image.pgm", dir / "coherent_image_normalization.csv",
               dir / "coherent_image.csv", dir / "mask.pgm", dir / "manifest.ini"};
  std::ostringstream report;
  report << "coherent image " << image.width() << "x" << image.height() << ", range ["
         << format_double(n.min) << ", " << format_double(n.max) << "]";
  out.report = report.str();
  return out;
}

RunOutput run_simulate_chaotic(const RunConfig& cfg) {
  cfg.validate();
  const EnsembleSimulator sim(cfg);

  FrameStackHeader header;
  header.width = static_cast<std::uint32_t>(sim.width());
  header.height = static_cast<std::uint32_t>(sim.height());
  header.n_shots = cfg.shots;
  header.master_seed = cfg.master_seed;
  header.rng_algorithm = std::string(kRngAlgorithm);

  const auto dir = cfg.output_dir;
  const auto stack_path = dir / "frames.twmg";
  FrameStackWriter writer(stack_path, header);

  // Compute a chunk in parallel, then write it in shot order.
  const std::size_t chunk = std::max<std::size_t>(1, cfg.threads) * 4;
  std::vector<ShotRecord> buffer;
  for (std::size_t first = 0; first < cfg.shots; first += chunk) {
    const std::size_t count = std::min(chunk, cfg.shots - first);
    buffer.assign(count, {});
    detail::parallel_for(count, cfg.threads,
                         [&](std::size_t j) { buffer[j] = sim.shot(first + j); });
    for (const ShotRecord& s : buffer) writer.append(s);
  }
  writer.close();

  std::ostringstream manifest;
  manifest << "; twmg " << library_version() << "\n"
           << "; rng " << kRngAlgorithm << ", master seed " << cfg.master_seed << "\n"
           << "; frames.twmg: " << cfg.shots << " shots of " << sim.width() << "x" << sim.height()
           << "\n"
           << to_ini(cfg);
  write_text(dir / "manifest.ini", manifest.str());

  RunOutput out;
  out.files = {stack_path, dir / "manifest.ini"};
  out.report = "wrote " + std::to_string(cfg.shots) + " shots to " + stack_path.string();
  return out;
}

RunOutput run_reconstruct(const std::filesystem::path& stack, const ReconstructOptions& opts) {
  const FrameStackReader reader(stack);
  const CorrelationMap map = correlate(reader, opts.ref, opts.threads);
  const auto dir = opts.output_dir;
  const Normalization n = write_normalized_pgm16(dir / "g_map.pgm", map.g_map);
  write_normalization(dir / "g_map_normalization.csv", n, {"ref_row", "ref_col", "n_shots"},
                      {static_cast<double>(map.ref_pixel.row),
                       static_cast<double>(map.ref_pixel.col),
                       static_cast<double>(map.n_shots)});
  write_grid_csv(dir / "g_map.csv", map.g_map);

  RunOutput out;
  out.files = {dir / "g_map.pgm", dir / "g_map_normalization.csv", dir / "g_map.csv"};
  std::ostringstream report;
  report << "correlated " << map.n_shots << " shots against reference pixel (" << map.ref_pixel.row
         << ", " << map.ref_pixel.col << "), G range [" << format_double(n.min) << ", "
         << format_double(n.max) << "]";
  out.report = report.str();
  return out;
}

StatsOutcome run_stats(const std::filesystem::path& stack, const StatsOptions& opts) {
  const FrameStackReader reader(stack);
  if (reader.size() == 0) throw Error(ErrorCode::EmptyEnsemble, "frame stack holds no shots");
  const auto pick = [&](const ShotRecord& s) -> const RealGrid& {
    return opts.channel == StatsChannel::I1 ? s.i1 : s.i2;
  };

  std::vector<double> samples;
  std::string population;
  if (opts.mode == StatsMode::Spatial) {
    if (opts.shot >= reader.size()) {
      throw Error(ErrorCode::InvalidArgument, "shot index outside the stack");
    }
    const ShotRecord s = reader.shot(opts.shot);
    const RealGrid& map = pick(s);
    if (opts.channel == StatsChannel::I1) {
      Grid2D<unsigned char> carries(reader.width(), reader.height());
      for (std::size_t i = 0; i < reader.size(); ++i) {
        const ShotRecord other = reader.shot(i);
        for (std::size_t p = 0; p < carries.size(); ++p) carries[p] |= other.i1[p] != 0.0;
      }
      for (std::size_t p = 0; p < map.size(); ++p) {
        if (carries[p]) samples.push_back(map[p]);
      }
      population = "mode-carrying I1 pixels of shot " + std::to_string(opts.shot);
    } else {
      samples.assign(map.values().begin(), map.values().end());
      population = "all I2 pixels of shot " + std::to_string(opts.shot);
    }
  } else {
    PixelIndex px;
    if (opts.pixel) {
      px = *opts.pixel;
      if (px.row >= reader.height() || px.col >= reader.width()) {
        throw Error(ErrorCode::InvalidArgument, "pixel outside the detector grid");
      }
    } else {
      px = brightest_mean_pixel(reader);
    }
    samples.reserve(reader.size());
    for (std::size_t i = 0; i < reader.size(); ++i) samples.push_back(pick(reader.shot(i))(px.row, px.col));
    population = "pixel (" + std::to_string(px.row) + ", " + std::to_string(px.col) + ") across " +
                 std::to_string(reader.size()) + " shots";
  }

  StatsOutcome result;
  result.fit = thermal_test(samples, opts.bins);
  result.passed = result.fit.passes(opts.alpha);

  const HistogramFit& fit = result.fit;
  std::vector<std::vector<double>> rows;
  const double n = static_cast<double>(fit.n_samples);
  for (std::size_t b = 0; b < fit.counts.size(); ++b) {
    const double lo = fit.bin_edges[b];
    const double hi = fit.bin_edges[b + 1];
    const double width = hi - lo;
    const double density = width > 0 ? static_cast<double>(fit.counts[b]) / (n * width) : 0.0;
    rows.push_back({lo, hi, static_cast<double>(fit.counts[b]), density, fit.fitted_density(b)});
  }
  const auto dir = opts.output_dir;
  write_table_csv(dir / "histogram.csv", {"bin_low", "bin_high", "count", "density", "exponential_fit"},
                  rows);

  std::ostringstream report;
  report << "population: " << population << "\n"
         << "samples: " << fit.n_samples << "\n"
         << "fitted_mean: " << format_double(fit.fitted_mean) << "\n"
         << "ks_statistic: " << format_double(fit.ks_statistic) << "\n"
         << "p_value: " << format_double(fit.p_value) << "\n"
         << "alpha: " << format_double(opts.alpha) << "\n"
         << "verdict: "
         << (result.passed ? "consistent with exponential (thermal) statistics"
                           : "REJECTED: not consistent with exponential (thermal) statistics")
         << "\n";
  write_text(dir / "fit_report.txt", report.str());
  result.output.files = {dir / "histogram.csv", dir / "fit_report.txt"};
  result.output.report = report.str();
  return result;
}

std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> checks;
  const auto record = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };

  {
    auto rng = Xoshiro256::for_stream(7, 90, 0);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
      GainParams p;
      p.r = 4e-3;
      p.g = 250.0 * rng.uniform();
      p.a3 = std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
      p.dk = 5000.0 * rng.uniform();
      const CoupledAmplitudes c0{rng.complex_normal(1.0), rng.complex_normal(1.0)};
      const CoupledAmplitudes exact = evolve_mismatched(c0, p);
      const CoupledAmplitudes ode = ode_oracle(c0, p, 200);
      const double scale = std::max(std::abs(ode.a1) + std::abs(ode.a2), 1e-300);
      worst = std::max(worst, (std::abs(exact.a1 - ode.a1) + std::abs(exact.a2 - ode.a2)) / scale);
    }
    record("closed form vs ODE", worst <= 1e-8, "max relative error " + format_double(worst));
  }

  {
    auto rng = Xoshiro256::for_stream(7, 91, 0);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      GainParams p;
      p.r = 1.0;
      p.g = 2.0 * rng.uniform();
      p.a3 = rng.complex_normal(1.0);
      const CoupledAmplitudes c0{rng.complex_normal(1.0), rng.complex_normal(1.0)};
      const CoupledAmplitudes c = evolve_matched(c0, p, 1.0);
      const double before = std::norm(c0.a1) - std::norm(c0.a2);
      const double after = std::norm(c.a1) - std::norm(c.a2);
      const double scale = std::norm(c.a1) + std::norm(c.a2);
      worst = std::max(worst, std::abs(after - before) / scale);
    }
    record("Manley-Rowe invariant", worst <= 1e-10, "max relative drift " + format_double(worst));
  }

  {
    const std::size_t n = 64;
    const double pitch = 16e-6;
    ObjectMask mask{RealGrid(n, n), pitch};
    const long r0 = 20, c0 = 44;
    for (long dr = -2; dr <= 2; ++dr) {
      for (long dc = -2; dc <= 2; ++dc) mask.transmission(r0 + dr, c0 + dc) = 1.0;
    }
    const RealGrid img = coherent_image(mask, InteractionGeometry::default_setup(), 1.0);
    double sum = 0, sr = 0, sc = 0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        sum += img(r, c);
        sr += img(r, c) * static_cast<double>(r);
        sc += img(r, c) * static_cast<double>(c);
      }
    }
    const double half = static_cast<double>(n / 2);
    const double er = sum > 0 ? sr / sum - (2 * half - r0) : 1e9;
    const double ec = sum > 0 ? sc / sum - (2 * half - c0) : 1e9;
    const double err = std::hypot(er, ec);
    record("inverted unit-magnification image", err <= 1.0,
           "centroid error " + format_double(err) + " px");
  }

  {
    const std::size_t n = 32;
    ScalarField f(n, n, 20e-6, 1064e-9);
    auto rng = Xoshiro256::for_stream(7, 92, 0);
    for (auto& v : f.samples().values()) v = rng.complex_normal(1.0);
    const ScalarField back = inverse_fourier_plane(fourier_plane(f, 0.15, 0.1), 0.15, 0.1);
    double err = 0;
    for (std::size_t i = 0; i < f.samples().size(); ++i) {
      err = std::max(err, std::abs(back.samples()[i] - f.samples()[i]));
    }
    record("Fourier plane round trip", err <= 1e-10, "max abs error " + format_double(err));
  }

  {
    auto rng = Xoshiro256::for_stream(7, 93, 0);
    std::vector<double> samples(10000);
    for (double& s : samples) s = -std::log1p(-rng.uniform());
    const HistogramFit fit = thermal_test(samples);
    record("exponential KS calibration", fit.passes(0.01), "p = " + format_double(fit.p_value));
  }
  return checks;
}

}  // namespace twmg
