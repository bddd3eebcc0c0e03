#include "twmg/frame_stack.hpp"

#include <bit>
#include <cstring>
#include <vector>

#include "twmg/error.hpp"

namespace twmg {
namespace {

constexpr char kMagic[4] = {'T', 'W', 'M', 'G'};
constexpr std::size_t kRngField = 32;

template <class T>
void put_le(unsigned char* dst, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<unsigned char>(v >> (8 * i));
}

template <class T>
T get_le(const unsigned char* src) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(src[i]) << (8 * i);
  return v;
}

void encode_doubles(const RealGrid& grid, std::vector<unsigned char>& buf) {
  buf.resize(grid.size() * 8);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(buf.data(), grid.data(), buf.size());
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      put_le(buf.data() + 8 * i, std::bit_cast<std::uint64_t>(grid[i]));
    }
  }
}

void decode_doubles(const unsigned char* src, RealGrid& grid) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(grid.data(), src, grid.size() * 8);
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = std::bit_cast<double>(get_le<std::uint64_t>(src + 8 * i));
    }
  }
}

}  // namespace

FrameStackWriter::FrameStackWriter(const std::filesystem::path& path, const FrameStackHeader& header)
    : path_(path), header_(header) {
  if (header.width == 0 || header.height == 0) {
    throw Error(ErrorCode::InvalidArgument, "frame stack dimensions must be positive");
  }
  if (header.rng_algorithm.size() > kRngField) {
    throw Error(ErrorCode::InvalidArgument, "rng algorithm name longer than 32 bytes");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());

  unsigned char raw[FrameStackHeader::kBytes] = {};
  std::memcpy(raw, kMagic, 4);
  put_le(raw + 4, header.version);
  put_le(raw + 8, header.width);
  put_le(raw + 12, header.height);
  put_le(raw + 16, header.n_shots);
  put_le(raw + 24, header.master_seed);
  std::memcpy(raw + 32, header.rng_algorithm.data(), header.rng_algorithm.size());
  out_.write(reinterpret_cast<const char*>(raw), sizeof raw);
}

FrameStackWriter::~FrameStackWriter() {
  if (!closed_) out_.close();
}

void FrameStackWriter::append(const ShotRecord& shot) {
  if (closed_) throw Error(ErrorCode::InvalidArgument, "append after close");
  for (const RealGrid* g : {&shot.i1, &shot.i2}) {
    if (g->width() != header_.width || g->height() != header_.height) {
      throw Error(ErrorCode::ShapeMismatch, "shot does not match the frame stack dimensions");
    }
  }
  if (written_ >= header_.n_shots) {
    throw Error(ErrorCode::CorruptStack, "more shots appended than the header declares");
  }
  std::vector<unsigned char> buf;
  for (const RealGrid* g : {&shot.i1, &shot.i2}) {
    encode_doubles(*g, buf);
    out_.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out_) throw Error(ErrorCode::UnreadableFile, "failed writing " + path_.string());
  ++written_;
}

void FrameStackWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.close();
  if (!out_) throw Error(ErrorCode::UnreadableFile, "failed closing " + path_.string());
  if (written_ != header_.n_shots) {
    throw Error(ErrorCode::CorruptStack, "frame stack " + path_.string() + " holds " +
                                             std::to_string(written_) + " shots, header declares " +
                                             std::to_string(header_.n_shots));
  }
}

FrameStackReader::FrameStackReader(const std::filesystem::path& path) : path_(path) {
  in_.open(path, std::ios::binary);
  if (!in_) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  unsigned char raw[FrameStackHeader::kBytes];
  in_.read(reinterpret_cast<char*>(raw), sizeof raw);
  if (in_.gcount() != static_cast<std::streamsize>(sizeof raw)) {
    throw Error(ErrorCode::CorruptStack, path.string() + " is shorter than a frame stack header");
  }
  if (std::memcmp(raw, kMagic, 4) != 0) {
    throw Error(ErrorCode::CorruptStack, path.string() + " has no TWMG magic");
  }
  header_.version = get_le<std::uint32_t>(raw + 4);
  if (header_.version != FrameStackHeader::kVersion) {
    throw Error(ErrorCode::CorruptStack,
                "unsupported frame stack version " + std::to_string(header_.version));
  }
  header_.width = get_le<std::uint32_t>(raw + 8);
  header_.height = get_le<std::uint32_t>(raw + 12);
  header_.n_shots = get_le<std::uint64_t>(raw + 16);
  header_.master_seed = get_le<std::uint64_t>(raw + 24);
  const char* name = reinterpret_cast<const char*>(raw + 32);
  header_.rng_algorithm.assign(name, strnlen(name, kRngField));
  if (header_.width == 0 || header_.height == 0) {
    throw Error(ErrorCode::CorruptStack, "frame stack has zero dimensions");
  }
  const auto actual = std::filesystem::file_size(path);
  if (actual != header_.file_bytes()) {
    throw Error(ErrorCode::CorruptStack,
                path.string() + " payload length " + std::to_string(actual) +
                    " bytes does not match the header (" + std::to_string(header_.file_bytes()) + ")");
  }
}

ShotRecord FrameStackReader::shot(std::size_t index) const {
  if (index >= header_.n_shots) throw Error(ErrorCode::InvalidArgument, "shot index out of range");
  const std::uint64_t frame = header_.frame_bytes();
  std::vector<unsigned char> buf(2 * frame);
  {
    std::lock_guard lock(mutex_);
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(FrameStackHeader::kBytes + index * 2 * frame));
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in_.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw Error(ErrorCode::CorruptStack, "short read in " + path_.string());
    }
  }
  ShotRecord rec;
  rec.shot_index = index;
  rec.i1 = RealGrid(header_.width, header_.height);
  rec.i2 = RealGrid(header_.width, header_.height);
  decode_doubles(buf.data(), rec.i1);
  decode_doubles(buf.data() + frame, rec.i2);
  return rec;
}

}  // namespace twmg
