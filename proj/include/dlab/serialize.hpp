// Copyright 2026 The dlab authors
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
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlab/qcore.hpp"

namespace dlab::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Deterministic JSON dump: fixed field order (ordered_json) and floats
// printed with 17 significant digits so reports are byte-reproducible.
// ---------------------------------------------------------------------------

namespace detail {

inline void dump_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline void dump_value(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        dump_string(it.key(), out);
        out += ':';
        dump_value(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump_value(v, out);
      }
      out += ']';
      break;
    }
    case json::value_t::string:
      dump_string(j.get<std::string>(), out);
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += "null";
  }
}

}  // namespace detail

inline std::string dump(const json& j) {
  std::string out;
  detail::dump_value(j, out);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Matrix / vector JSON schema
// {"shape":[r,c],"factor_dims":[...],"re":[row-major],"im":[row-major]}
// ---------------------------------------------------------------------------

inline json matrix_to_json(const Mat& m, const std::vector<int>& factor_dims) {
  json j;
  j["shape"] = {m.rows(), m.cols()};
  j["factor_dims"] = factor_dims;
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (long i = 0; i < m.rows(); ++i)
    for (long k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

inline json vector_to_json(const Vec& v) {
  Mat m = v;
  return matrix_to_json(m, {static_cast<int>(v.size())});
}

inline Mat matrix_from_json(const json& j, std::vector<int>* factor_dims = nullptr) {
  auto shape = j.at("shape").get<std::vector<long>>();
  if (shape.size() != 2) throw std::invalid_argument("bad matrix shape");
  auto re = j.at("re").get<std::vector<double>>();
  auto im = j.at("im").get<std::vector<double>>();
  if (long(re.size()) != shape[0] * shape[1] || im.size() != re.size())
    throw std::invalid_argument("matrix payload size mismatch");
  Mat m(shape[0], shape[1]);
  long p = 0;
  for (long i = 0; i < shape[0]; ++i)
    for (long k = 0; k < shape[1]; ++k, ++p) m(i, k) = cxd(re[p], im[p]);
  if (factor_dims && j.contains("factor_dims"))
    *factor_dims = j.at("factor_dims").get<std::vector<int>>();
  return m;
}

inline Vec vector_from_json(const json& j) {
  Mat m = matrix_from_json(j);
  if (m.cols() != 1) throw std::invalid_argument("expected a column vector");
  return Vec(m.col(0));
}

// ---------------------------------------------------------------------------
// QMX1 binary format: 4-byte magic "QMX1", u32 LE rank, u32 LE dims,
// then interleaved f64 LE (re,im) row-major.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void put_le(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<char*>(buf), sizeof(T));
}

template <typename T>
T get_le(const std::string& in, size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::invalid_argument("truncated QMX1");
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(buf, buf + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace detail

inline std::string qmx_encode(const Mat& m) {
  std::string out = "QMX1";
  detail::put_le<std::uint32_t>(out, 2);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
  for (long i = 0; i < m.rows(); ++i)
    for (long k = 0; k < m.cols(); ++k) {
      detail::put_le<double>(out, m(i, k).real());
      detail::put_le<double>(out, m(i, k).imag());
    }
  return out;
}

inline std::string qmx_encode(const Vec& v) {
  std::string out = "QMX1";
  detail::put_le<std::uint32_t>(out, 1);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
  for (long i = 0; i < v.size(); ++i) {
    detail::put_le<double>(out, v[i].real());
    detail::put_le<double>(out, v[i].imag());
  }
  return out;
}

/// Decodes a QMX1 payload as a matrix; rank-1 payloads become columns.
inline Mat qmx_decode(const std::string& in) {
  if (in.size() < 8 || in.compare(0, 4, "QMX1") != 0)
    throw std::invalid_argument("missing QMX1 magic");
  size_t pos = 4;
  auto rank = detail::get_le<std::uint32_t>(in, pos);
  if (rank < 1 || rank > 2) throw std::invalid_argument("unsupported QMX1 rank");
  long rows = detail::get_le<std::uint32_t>(in, pos);
  long cols = rank == 2 ? detail::get_le<std::uint32_t>(in, pos) : 1;
  Mat m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long k = 0; k < cols; ++k) {
      double re = detail::get_le<double>(in, pos);
      double im = detail::get_le<double>(in, pos);
      m(i, k) = cxd(re, im);
    }
  return m;
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(bytes.data(), static_cast<long>(bytes.size()));
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Loads a matrix from either format, sniffing the QMX1 magic.
inline Mat load_matrix(const std::string& path,
                       std::vector<int>* factor_dims = nullptr) {
  std::string bytes = read_file(path);
  if (bytes.size() >= 4 && bytes.compare(0, 4, "QMX1") == 0)
    return qmx_decode(bytes);
  return matrix_from_json(json::parse(bytes), factor_dims);
}

}  // namespace dlab::io
