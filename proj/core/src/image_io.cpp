#include "twmg/image_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "twmg/config.hpp"
#include "twmg/error.hpp"

namespace twmg {
namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

unsigned header_number(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = header_token(in);
  char* end = nullptr;
  const unsigned long v = std::strtoul(tok.c_str(), &end, 10);
  if (tok.empty() || *end != '\0') {
    throw Error(ErrorCode::UnsupportedFormat, "malformed graymap header in " + path.string());
  }
  return static_cast<unsigned>(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  return out;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P2") {
    throw Error(ErrorCode::UnsupportedFormat,
                path.string() + " is not a grayscale P2/P5 graymap (magic '" + magic + "')");
  }
  const unsigned w = header_number(in, path);
  const unsigned h = header_number(in, path);
  const unsigned maxval = header_number(in, path);
  if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) {
    throw Error(ErrorCode::UnsupportedFormat, "unsupported graymap dimensions or maxval in " + path.string());
  }
  GrayImage img{Grid2D<unsigned>(w, h), maxval};
  if (magic == "P5") {
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(img.pixels.size() * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw Error(ErrorCode::UnreadableFile, "truncated graymap " + path.string());
    }
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      img.pixels[i] = bytes == 2 ? (unsigned{buf[2 * i]} << 8) | buf[2 * i + 1] : buf[i];
    }
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      if (!(in >> img.pixels[i])) throw Error(ErrorCode::UnreadableFile, "truncated graymap " + path.string());
    }
  }
  for (unsigned v : img.pixels.values()) {
    if (v > maxval) throw Error(ErrorCode::UnsupportedFormat, "pixel above maxval in " + path.string());
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out = open_out(path);
  out << "P5\n" << image.pixels.width() << ' ' << image.pixels.height() << '\n'
      << image.max_value << '\n';
  const bool wide = image.max_value > 255;
  std::vector<unsigned char> buf;
  buf.reserve(image.pixels.size() * (wide ? 2 : 1));
  for (unsigned v : image.pixels.values()) {
    if (wide) buf.push_back(static_cast<unsigned char>(v >> 8));
    buf.push_back(static_cast<unsigned char>(v & 0xff));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::UnreadableFile, "failed writing " + path.string());
}

ObjectMask load_mask(const std::filesystem::path& path, double pitch) {
  const GrayImage img = read_pgm(path);
  ObjectMask mask{RealGrid(img.pixels.width(), img.pixels.height()), pitch};
  const double scale = 1.0 / img.max_value;
  for (std::size_t i = 0; i < mask.transmission.size(); ++i) {
    mask.transmission[i] = img.pixels[i] * scale;
  }
  mask.validate();
  return mask;
}

Normalization write_normalized_pgm16(const std::filesystem::path& path, const RealGrid& values) {
  Normalization norm;
  if (!values.empty()) {
    norm.min = norm.max = values[0];
    for (double v : values.values()) {
      norm.min = std::min(norm.min, v);
      norm.max = std::max(norm.max, v);
    }
  }
  GrayImage img{Grid2D<unsigned>(values.width(), values.height()), 65535};
  const double span = norm.max - norm.min;
  if (span > 0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      img.pixels[i] = static_cast<unsigned>(std::lround((values[i] - norm.min) / span * 65535.0));
    }
  }
  write_pgm(path, img);
  return norm;
}

void write_grid_csv(const std::filesystem::path& path, const RealGrid& values) {
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < values.width(); ++c) out << (c ? ",c" : "c") << c;
  out << '\n';
  for (std::size_t r = 0; r < values.height(); ++r) {
    for (std::size_t c = 0; c < values.width(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::UnreadableFile, "failed writing " + path.string());
}

RealGrid read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> data;
  std::size_t width = 0, height = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      data.push_back(std::strtod(cell.c_str(), nullptr));
      ++cols;
    }
    if (height == 0) width = cols;
    if (cols != width) throw Error(ErrorCode::UnsupportedFormat, "ragged CSV " + path.string());
    ++height;
  }
  RealGrid grid(width, height);
  std::copy(data.begin(), data.end(), grid.values().begin());
  return grid;
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::UnreadableFile, "failed writing " + path.string());
}

}  // namespace twmg
