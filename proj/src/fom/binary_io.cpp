// SPDX-License-Identifier: Apache-2.0
#include "hrom/binary_io.hpp"

#include <cstring>

#include "hrom/error.hpp"

namespace hrom::io {

namespace {

template <typename T>
void to_le(T value, unsigned char* out) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(bits >> (8 * i));
}

template <typename T>
T from_le(const unsigned char* in) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path, std::string_view magic)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  raw(reinterpret_cast<const unsigned char*>(magic.data()), magic.size());
}

void BinaryWriter::raw(const unsigned char* bytes, std::size_t n) {
  out_.write(reinterpret_cast<const char*>(bytes), static_cast<std::streamsize>(n));
  if (!out_) throw IoError("write failed on " + path_.string());
}

void BinaryWriter::u64(std::uint64_t value) {
  unsigned char buf[8];
  to_le(value, buf);
  raw(buf, 8);
}

void BinaryWriter::f64(double value) {
  unsigned char buf[8];
  to_le(value, buf);
  raw(buf, 8);
}

void BinaryWriter::f64s(std::span<const double> values) {
  std::vector<unsigned char> buf(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) to_le(values[i], buf.data() + 8 * i);
  raw(buf.data(), buf.size());
}

void BinaryWriter::c128s(std::span<const std::complex<double>> values) {
  std::vector<unsigned char> buf(values.size() * 16);
  for (std::size_t i = 0; i < values.size(); ++i) {
    to_le(values[i].real(), buf.data() + 16 * i);
    to_le(values[i].imag(), buf.data() + 16 * i + 8);
  }
  raw(buf.data(), buf.size());
}

void BinaryWriter::close() {
  out_.close();
  if (!out_) throw IoError("closing " + path_.string() + " failed");
}

BinaryReader::BinaryReader(const std::filesystem::path& path, std::string_view magic)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw IoError("cannot open " + path.string());
  std::string got(magic.size(), '\0');
  raw(reinterpret_cast<unsigned char*>(got.data()), got.size());
  if (got != magic)
    throw IoError(path.string() + ": expected magic '" + std::string(magic) + "'");
}

void BinaryReader::raw(unsigned char* bytes, std::size_t n) {
  in_.read(reinterpret_cast<char*>(bytes), static_cast<std::streamsize>(n));
  if (in_.gcount() != static_cast<std::streamsize>(n)) throw IoError(path_.string() + ": truncated file");
}

std::uint64_t BinaryReader::u64() {
  unsigned char buf[8];
  raw(buf, 8);
  return from_le<std::uint64_t>(buf);
}

double BinaryReader::f64() {
  unsigned char buf[8];
  raw(buf, 8);
  return from_le<double>(buf);
}

std::vector<double> BinaryReader::f64s(std::size_t n) {
  std::vector<unsigned char> buf(n * 8);
  raw(buf.data(), buf.size());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = from_le<double>(buf.data() + 8 * i);
  return out;
}

std::vector<std::complex<double>> BinaryReader::c128s(std::size_t n) {
  std::vector<unsigned char> buf(n * 16);
  raw(buf.data(), buf.size());
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {from_le<double>(buf.data() + 16 * i), from_le<double>(buf.data() + 16 * i + 8)};
  return out;
}

void BinaryReader::expect_end() {
  if (in_.peek() != std::char_traits<char>::eof()) throw IoError(path_.string() + ": trailing bytes");
}

}  // namespace hrom::io
