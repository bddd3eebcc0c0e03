#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>

#include "twmg/statistics.hpp"

namespace twmg {

/// 64-byte little-endian header:
///   0  char[4]  magic "TWMG"
///   4  u32      format version
///   8  u32      width
///   12 u32      height
///   16 u64      n_shots
///   24 u64      master_seed
///   32 char[32] rng algorithm name, zero padded
/// followed by n_shots * (I1, I2), each width*height f64 in row-major order.
struct FrameStackHeader {
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kBytes = 64;

  std::uint32_t version{kVersion};
  std::uint32_t width{0};
  std::uint32_t height{0};
  std::uint64_t n_shots{0};
  std::uint64_t master_seed{0};
  std::string rng_algorithm;

  std::uint64_t frame_bytes() const noexcept { return std::uint64_t{width} * height * 8; }
  std::uint64_t file_bytes() const noexcept { return kBytes + n_shots * 2 * frame_bytes(); }
};

/// Sequential writer. The header's n_shots is the promised count; close()
/// throws CorruptStack if a different number of shots was appended.
class FrameStackWriter {
 public:
  FrameStackWriter(const std::filesystem::path& path, const FrameStackHeader& header);
  ~FrameStackWriter();
  FrameStackWriter(const FrameStackWriter&) = delete;
  FrameStackWriter& operator=(const FrameStackWriter&) = delete;

  void append(const ShotRecord& shot);
  void close();
  std::uint64_t written() const noexcept { return written_; }

 private:
  std::filesystem::path path_;
  FrameStackHeader header_;
  std::ofstream out_;
  std::uint64_t written_{0};
  bool closed_{false};
};

/// Validates magic, version and payload length on open. shot() may be called
/// concurrently.
class FrameStackReader final : public ShotSource {
 public:
  explicit FrameStackReader(const std::filesystem::path& path);

  const FrameStackHeader& header() const noexcept { return header_; }
  std::size_t size() const override { return header_.n_shots; }
  std::size_t width() const override { return header_.width; }
  std::size_t height() const override { return header_.height; }
  ShotRecord shot(std::size_t index) const override;

 private:
  std::filesystem::path path_;
  FrameStackHeader header_;
  mutable std::ifstream in_;
  mutable std::mutex mutex_;
};

}  // namespace twmg
