//
// Copyright 2026 The Orbis Authors
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
//

#include "orbis/serialization.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orbis::io {

namespace {

constexpr std::array<char, 4> kTokensMagic{'O', 'R', 'B', 'T'};
constexpr std::array<char, 4> kPairsMagic{'O', 'R', 'B', 'P'};
constexpr std::array<char, 4> kQuantMagic{'O', 'R', 'B', 'Q'};
constexpr std::uint8_t kDtypeReal32 = 0;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

void read_exact(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw std::invalid_argument("truncated container");
  }
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

void expect_header(std::istream& in, const std::array<char, 4>& magic) {
  std::array<char, 4> got{};
  read_exact(in, got.data(), 4);
  if (got != magic) {
    throw std::invalid_argument("bad magic: expected " + std::string(magic.data(), 4));
  }
  const std::uint32_t version = get_u32(in);
  if (version != kFormatVersion) {
    throw std::invalid_argument("unsupported container version " + std::to_string(version));
  }
}

std::uint32_t checked_u32(Index v, const char* what) {
  if (v < 0 || v > Index(UINT32_MAX)) throw std::invalid_argument(std::string(what) + " out of u32 range");
  return static_cast<std::uint32_t>(v);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

template <typename WriteFn>
void save_with(const std::filesystem::path& path, WriteFn&& fn) {
  std::ostringstream buf(std::ios::binary);
  fn(buf);
  write_file_atomically(path, buf.str());
}

}  // namespace

void write_tokens(std::ostream& out, const TokenMatrix& x) {
  validate_tokens(x);
  out.write(kTokensMagic.data(), 4);
  put_u32(out, kFormatVersion);
  put_u32(out, checked_u32(x.rows(), "n_tokens"));
  put_u32(out, checked_u32(x.cols(), "n_channels"));
  out.put(static_cast<char>(kDtypeReal32));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index c = 0; c < x.cols(); ++c) put_f32(out, x(i, c));
}

TokenMatrix read_tokens(std::istream& in) {
  expect_header(in, kTokensMagic);
  const std::uint32_t n = get_u32(in);
  const std::uint32_t d = get_u32(in);
  char dtype = 0;
  read_exact(in, &dtype, 1);
  if (static_cast<std::uint8_t>(dtype) != kDtypeReal32) {
    throw std::invalid_argument("unsupported dtype tag");
  }
  if (n == 0 || d == 0) throw std::invalid_argument("token container has zero extent");
  TokenMatrix x(n, d);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index c = 0; c < x.cols(); ++c) x(i, c) = get_f32(in);
  validate_tokens(x);
  return x;
}

void write_pairs(std::ostream& out, const TokenPairSet& pairs) {
  pairs.validate();
  out.write(kPairsMagic.data(), 4);
  put_u32(out, kFormatVersion);
  put_u32(out, checked_u32(pairs.n_tokens, "n_tokens"));
  put_u32(out, checked_u32(static_cast<Index>(pairs.pairs.size()), "pair_count"));
  for (const TokenPair& p : pairs.pairs) {
    put_u32(out, checked_u32(p.src, "src"));
    put_u32(out, checked_u32(p.dst, "dst"));
    put_f32(out, p.loss);
  }
}

TokenPairSet read_pairs(std::istream& in) {
  expect_header(in, kPairsMagic);
  TokenPairSet out;
  out.n_tokens = get_u32(in);
  const std::uint32_t count = get_u32(in);
  out.pairs.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    TokenPair p;
    p.src = get_u32(in);
    p.dst = get_u32(in);
    p.loss = get_f32(in);
    out.pairs.push_back(p);
    out.dst_set.push_back(p.dst);
  }
  std::sort(out.dst_set.begin(), out.dst_set.end());
  out.dst_set.erase(std::unique(out.dst_set.begin(), out.dst_set.end()), out.dst_set.end());
  out.reduced_count = count;
  out.realized_ratio = out.n_tokens > 0 ? double(count) / double(out.n_tokens) : 0.0;
  out.validate();
  return out;
}

void write_quantized(std::ostream& out, const QuantizedActivation& q) {
  q.validate();
  out.write(kQuantMagic.data(), 4);
  put_u32(out, kFormatVersion);
  put_u32(out, checked_u32(q.n_tokens(), "n_tokens"));
  put_u32(out, checked_u32(q.n_channels(), "n_channels"));
  for (Index c = 0; c < q.n_channels(); ++c) put_f32(out, q.scales(c));
  const Index total = q.codes.size();
  const std::int8_t* codes = q.codes.data();
  for (Index k = 0; k < total; k += 2) {
    const auto lo = static_cast<std::uint8_t>(codes[k] & 0x0f);
    const auto hi = k + 1 < total ? static_cast<std::uint8_t>(codes[k + 1] & 0x0f) : std::uint8_t{0};
    out.put(static_cast<char>(lo | (hi << 4)));
  }
}

QuantizedActivation read_quantized(std::istream& in) {
  expect_header(in, kQuantMagic);
  const std::uint32_t n = get_u32(in);
  const std::uint32_t d = get_u32(in);
  if (n == 0 || d == 0) throw std::invalid_argument("quantized container has zero extent");
  QuantizedActivation q;
  q.scales.resize(d);
  for (Index c = 0; c < Index(d); ++c) q.scales(c) = get_f32(in);
  q.codes.resize(n, d);
  const Index total = q.codes.size();
  std::int8_t* codes = q.codes.data();
  auto sign_extend = [](std::uint8_t nib) { return static_cast<std::int8_t>((nib ^ 0x8) - 0x8); };
  for (Index k = 0; k < total; k += 2) {
    char byte = 0;
    read_exact(in, &byte, 1);
    const auto b = static_cast<std::uint8_t>(byte);
    codes[k] = sign_extend(b & 0x0f);
    if (k + 1 < total) codes[k + 1] = sign_extend(b >> 4);
  }
  q.validate();
  return q;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_tokens(const std::filesystem::path& path, const TokenMatrix& x) {
  save_with(path, [&](std::ostream& o) { write_tokens(o, x); });
}
TokenMatrix load_tokens(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_tokens(in);
}
void save_pairs(const std::filesystem::path& path, const TokenPairSet& pairs) {
  save_with(path, [&](std::ostream& o) { write_pairs(o, pairs); });
}
TokenPairSet load_pairs(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pairs(in);
}
void save_quantized(const std::filesystem::path& path, const QuantizedActivation& q) {
  save_with(path, [&](std::ostream& o) { write_quantized(o, q); });
}
QuantizedActivation load_quantized(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_quantized(in);
}

}  // namespace orbis::io
