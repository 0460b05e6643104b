// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hrom::io {

/// Little-endian writer for the HROM1/HPOD1/HDMD1 containers.
class BinaryWriter {
 public:
  BinaryWriter(const std::filesystem::path& path, std::string_view magic);
  void u64(std::uint64_t value);
  void f64(double value);
  void f64s(std::span<const double> values);
  void c128s(std::span<const std::complex<double>> values);  // re, im interleaved
  void close();

 private:
  void raw(const unsigned char* bytes, std::size_t n);
  std::ofstream out_;
  std::filesystem::path path_;
};

class BinaryReader {
 public:
  BinaryReader(const std::filesystem::path& path, std::string_view magic);
  std::uint64_t u64();
  double f64();
  std::vector<double> f64s(std::size_t n);
  std::vector<std::complex<double>> c128s(std::size_t n);
  /// Throws IoError unless the whole file has been consumed.
  void expect_end();

 private:
  void raw(unsigned char* bytes, std::size_t n);
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace hrom::io
