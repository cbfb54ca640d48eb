// Copyright 2026 the scenerec authors
// SPDX-License-Identifier: Apache-2.0
#include "scenerec/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "scenerec/common.hpp"
#include "scenerec/digest.hpp"

namespace scenerec {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingUpstreamError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    lines.emplace_back(content.substr(start, end - start));
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ContractError("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

uint64_t file_digest(const std::filesystem::path& path) {
  std::string content = read_file(path);
  return fnv1a64(content.data(), content.size());
}

uint8_t ByteReader::u8() {
  if (pos + 1 > buf.size()) throw ContractError("byte reader: truncated input");
  return static_cast<uint8_t>(buf[pos++]);
}

uint32_t ByteReader::u32() {
  if (pos + 4 > buf.size()) throw ContractError("byte reader: truncated input");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
  return v;
}

uint64_t ByteReader::u64() {
  if (pos + 8 > buf.size()) throw ContractError("byte reader: truncated input");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos++])) << (8 * i);
  return v;
}

void ByteReader::bytes(void* out, size_t len) {
  if (pos + len > buf.size()) throw ContractError("byte reader: truncated input");
  std::memcpy(out, buf.data() + pos, len);
  pos += len;
}

std::string ByteReader::str() {
  uint32_t len = u32();
  if (pos + len > buf.size()) throw ContractError("byte reader: truncated input");
  std::string s = buf.substr(pos, len);
  pos += len;
  return s;
}

}  // namespace scenerec
