// Copyright 2026 The Stampede Authors
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

#include <bit>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stampede::util {

// Little-endian binary stream helpers shared by the scene snapshot and
// checkpoint formats.

static_assert(std::endian::native == std::endian::little,
              "binary formats are written little-endian natively");

class BinWriter {
 public:
  explicit BinWriter(std::ostream& os) : os_(os) {}

  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i32(std::int32_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    if (!v.empty()) raw(v.data(), v.size() * sizeof(double));
  }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }

 private:
  void raw(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  std::ostream& os_;
};

class BinReader {
 public:
  explicit BinReader(std::istream& is) : is_(is) {}

  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  std::int32_t i32() { return get<std::int32_t>(); }
  double f64() { return get<double>(); }
  std::vector<double> f64s() {
    auto n = u64();
    std::vector<double> v(n);
    if (n) raw(v.data(), n * sizeof(double));
    return v;
  }
  std::string str() {
    auto n = u64();
    std::string s(n, '\0');
    if (n) raw(s.data(), n);
    return s;
  }

 private:
  template <typename T>
  T get() {
    T v;
    raw(&v, sizeof v);
    return v;
  }
  void raw(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is_) throw std::runtime_error("truncated binary stream");
  }
  std::istream& is_;
};

}  // namespace stampede::util
