// Copyright (c) 2026, the svault authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sealed, immutable day bucket of one sensor's compressed points.
//
// On-disk layout, little-endian:
//   magic "SVLT" | u32 version | u64 sensor | i64 day (epoch days)
//   | u32 count | u32 gap_count
//   | count x u32 offsets (seconds in day, strictly increasing)
//   | count x f64 values
//   | gap_count x (u32 start, u32 end) half-open gap spans in day seconds
//   | u32 crc32 of everything before it

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "svault/errors.hpp"
#include "svault/io.hpp"
#include "svault/types.hpp"

namespace svault {

inline constexpr std::array<char, 4> kSegmentMagic{'S', 'V', 'L', 'T'};
inline constexpr std::uint32_t kSegmentVersion = 1;

/// Standard CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
inline std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = ~seed;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
  return ~crc;
}

struct Segment {
  SensorId sensor;
  std::int64_t day = 0;  // epoch days, UTC
  std::vector<std::uint32_t> offsets;
  std::vector<double> values;
  /// Half-open [start, end) spans in day seconds (end may be 86400) inside
  /// which no data exists and queries must not interpolate.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> gaps;

  std::size_t count() const { return offsets.size(); }
  Timestamp timestamp_at(std::size_t i) const { return day_start(day) + offsets[i]; }
};

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_le(buf, bits);
}

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get_le() {
    if (pos_ + sizeof(T) > size_) throw CorruptionError("segment truncated");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  double get_f64() {
    const std::uint64_t bits = get_le<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode_segment(const Segment& seg) {
  std::vector<std::uint8_t> buf;
  buf.reserve(24 + seg.count() * 12 + seg.gaps.size() * 8 + 4);
  for (const char c : kSegmentMagic) buf.push_back(static_cast<std::uint8_t>(c));
  detail::put_le(buf, kSegmentVersion);
  detail::put_le(buf, seg.sensor.value);
  detail::put_le(buf, static_cast<std::uint64_t>(seg.day));
  detail::put_le(buf, static_cast<std::uint32_t>(seg.count()));
  detail::put_le(buf, static_cast<std::uint32_t>(seg.gaps.size()));
  for (const std::uint32_t o : seg.offsets) detail::put_le(buf, o);
  for (const double v : seg.values) detail::put_f64(buf, v);
  for (const auto& [a, b] : seg.gaps) {
    detail::put_le(buf, a);
    detail::put_le(buf, b);
  }
  detail::put_le(buf, crc32(buf.data(), buf.size()));
  return buf;
}

inline Segment decode_segment(const std::uint8_t* data, std::size_t size) {
  if (size < 32) throw CorruptionError("segment too small");
  if (std::memcmp(data, kSegmentMagic.data(), 4) != 0)
    throw CorruptionError("bad segment magic");

  const std::uint32_t stored_crc =
      static_cast<std::uint32_t>(data[size - 4]) | (static_cast<std::uint32_t>(data[size - 3]) << 8) |
      (static_cast<std::uint32_t>(data[size - 2]) << 16) |
      (static_cast<std::uint32_t>(data[size - 1]) << 24);
  if (crc32(data, size - 4) != stored_crc) throw CorruptionError("segment checksum mismatch");

  detail::ByteReader r(data, size - 4);
  r.get_le<std::uint32_t>();  // magic, verified above
  const std::uint32_t version = r.get_le<std::uint32_t>();
  if (version != kSegmentVersion)
    throw CorruptionError("unsupported segment version " + std::to_string(version));

  Segment seg;
  seg.sensor = SensorId{r.get_le<std::uint64_t>()};
  seg.day = static_cast<std::int64_t>(r.get_le<std::uint64_t>());
  const std::uint32_t count = r.get_le<std::uint32_t>();
  const std::uint32_t gap_count = r.get_le<std::uint32_t>();

  seg.offsets.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t o = r.get_le<std::uint32_t>();
    if (o >= kSecondsPerDay || (i > 0 && o <= seg.offsets.back()))
      throw CorruptionError("segment offsets not strictly increasing within the day");
    seg.offsets.push_back(o);
  }
  seg.values.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) seg.values.push_back(r.get_f64());
  seg.gaps.reserve(gap_count);
  for (std::uint32_t i = 0; i < gap_count; ++i) {
    const std::uint32_t a = r.get_le<std::uint32_t>();
    const std::uint32_t b = r.get_le<std::uint32_t>();
    if (a >= b || b > kSecondsPerDay) throw CorruptionError("invalid gap span in segment");
    seg.gaps.emplace_back(a, b);
  }
  if (r.pos() != size - 4) throw CorruptionError("segment has trailing bytes");
  return seg;
}

inline void write_segment_file(const std::filesystem::path& path, const Segment& seg) {
  atomic_write_file(path, encode_segment(seg));
}

inline Segment read_segment_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_segment(bytes.data(), bytes.size());
  } catch (const CorruptionError& e) {
    throw CorruptionError(std::string(e.what()) + " (" + path.string() + ")");
  }
}

}  // namespace svault
