/*
 * Copyright 2026 The Hotspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Explicit little-endian encoding for the model files. Every file starts
// with a four-byte magic tag followed by a uint32 format version.

#ifndef HOTSPOT_BINARY_IO_H_
#define HOTSPOT_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hotspot/common.h"

namespace hotspot::io {

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void header(const std::string& magic, std::uint32_t version) {
    out_.write(magic.data(), 4);
    u32(version);
  }

 private:
  void put(std::uint64_t v, int bytes) {
    char buf[8];
    for (int b = 0; b < bytes; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
    out_.write(buf, bytes);
    if (!out_) throw DataError("write failed");
  }
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::vector<double> f64s(std::uint64_t max_len = 1ULL << 32) {
    const std::uint64_t n = u64();
    if (n > max_len) throw DataError("corrupt array length");
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  // Checks magic and returns the version.
  std::uint32_t header(const std::string& magic) {
    char buf[4];
    in_.read(buf, 4);
    if (!in_ || std::string(buf, 4) != magic) {
      throw DataError("bad file magic, expected '" + magic + "'");
    }
    return u32();
  }

 private:
  std::uint64_t get(int bytes) {
    unsigned char buf[8];
    in_.read(reinterpret_cast<char*>(buf), bytes);
    if (!in_) throw DataError("unexpected end of file");
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
    return v;
  }
  std::istream& in_;
};

}  // namespace hotspot::io

#endif  // HOTSPOT_BINARY_IO_H_
