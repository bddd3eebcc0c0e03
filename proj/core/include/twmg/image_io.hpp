#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "twmg/grid.hpp"
#include "twmg/pipeline.hpp"

namespace twmg {

struct GrayImage {
  Grid2D<unsigned> pixels;
  unsigned max_value{255};
};

/// Binary (P5) or ASCII (P2) graymap with maxval up to 65535. Throws
/// UnreadableFile or UnsupportedFormat.
GrayImage read_pgm(const std::filesystem::path& path);

/// P5 output; 16-bit samples are big-endian.
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Linear map of pixel values onto [0, 1]. The image must match the grid;
/// pitch is supplied by the caller.
ObjectMask load_mask(const std::filesystem::path& path, double pitch);

struct Normalization {
  double min{0};
  double max{0};
};

/// Min-max normalized 16-bit graymap. A constant map writes all zeros.
Normalization write_normalized_pgm16(const std::filesystem::path& path, const RealGrid& values);

/// One row per grid row, header c0..c{W-1}, 17 significant digits.
void write_grid_csv(const std::filesystem::path& path, const RealGrid& values);
RealGrid read_grid_csv(const std::filesystem::path& path);

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace twmg
