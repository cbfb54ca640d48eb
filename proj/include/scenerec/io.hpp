// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace scenerec {

std::string read_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to a temp file in the same directory and renames into place, so
// partially written artifacts are never observed.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

uint64_t file_digest(const std::filesystem::path& path);

// Little-endian binary cursor helpers for checkpoint/cache formats.
struct ByteWriter {
  std::string buf;
  void u8(uint8_t v) { buf.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void bytes(const void* data, size_t len) {
    buf.append(static_cast<const char*>(data), len);
  }
  void str(std::string_view s) {
    u32(static_cast<uint32_t>(s.size()));
    buf.append(s);
  }
};

struct ByteReader {
  const std::string& buf;
  size_t pos = 0;
  explicit ByteReader(const std::string& b) : buf(b) {}
  bool eof() const { return pos >= buf.size(); }
  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  void bytes(void* out, size_t len);
  std::string str();
};

}  // namespace scenerec
