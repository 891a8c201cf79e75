#pragma once

// Text file formats. Reals are written with 17 significant digits so they
// read back bit-exactly; complex samples are "re,im", one per line.
//
//   # ctvs-signal v1 N=<int>
//   # ctvs-measurement v1 m=<int> dictionary=<id> sigma=<real>
//   # ctvs-ensemble v1 T=<int> N=<int>
//
// The header may be followed by "# key=value" metadata lines.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ctvs/dictionary.hpp"

namespace ctvs {

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_index_set(const IndexSet& s, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(s[i]);
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline double parse_real(std::string_view text, std::size_t line) {
  const std::string s(detail::trim(text));
  if (s.empty()) throw ParseError(line, "expected a number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError(line, "malformed number '" + s + "'");
  if (errno == ERANGE && std::isinf(v)) throw ParseError(line, "number out of range '" + s + "'");
  return v;
}

inline std::size_t parse_count(std::string_view text, std::size_t line) {
  const std::string s(detail::trim(text));
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(line, "expected a non-negative integer, got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw ParseError(line, "integer out of range '" + s + "'");
  }
}

inline IndexSet parse_index_set(std::string_view text, std::size_t line, char sep = ',') {
  IndexSet out;
  text = detail::trim(text);
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(sep, pos), text.size());
    out.push_back(parse_count(text.substr(pos, end - pos), line));
    pos = end + 1;
  }
  return out;
}

using Metadata = std::map<std::string, std::string>;

namespace detail {

inline void write_sample(std::ostream& os, Complex v) { os << format_real(v.real()) << ',' << format_real(v.imag()) << '\n'; }

inline void write_metadata(std::ostream& os, const Metadata& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
}

// Splits "tag v1 k=v k=v" after the leading "# ".
inline Metadata parse_header(const std::string& line, std::string_view tag) {
  const std::string prefix = "# " + std::string(tag) + " v1";
  if (line.rfind(prefix, 0) != 0) throw ParseError(1, "expected header '" + prefix + " ...'");
  Metadata out;
  std::istringstream is(line.substr(prefix.size()));
  std::string field;
  while (is >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(1, "malformed header field '" + field + "'");
    out[field.substr(0, eq)] = field.substr(eq + 1);
  }
  return out;
}

inline const std::string& require(const Metadata& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw ParseError(1, "header is missing '" + key + "'");
  return it->second;
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  bool next(std::string& line) {
    if (!std::getline(is_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::size_t number() const noexcept { return number_; }

 private:
  std::istream& is_;
  std::size_t number_ = 0;
};

// Reads "# key=value" lines until the first data line, which is left in `line`.
inline bool read_metadata(LineReader& reader, std::string& line, Metadata& meta) {
  while (reader.next(line)) {
    if (line.rfind('#', 0) != 0) return true;
    const std::string_view body = trim(std::string_view(line).substr(1));
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(reader.number(), "malformed metadata line");
    meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
  }
  return false;
}

inline Complex parse_sample(std::string_view text, std::size_t line) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw ParseError(line, "expected 're,im'");
  return {parse_real(text.substr(0, comma), line), parse_real(text.substr(comma + 1), line)};
}

inline CVector read_samples(LineReader& reader, std::string& line, bool have_line, std::size_t count) {
  CVector out(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0 || !have_line) {
      if (!reader.next(line)) throw ParseError(reader.number() + 1, "expected " + std::to_string(count) + " samples, got " + std::to_string(i));
    }
    const Complex v = parse_sample(line, reader.number());
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ParseError(reader.number(), "non-finite sample");
    out[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

inline void expect_end(LineReader& reader, std::string& line) {
  while (reader.next(line)) {
    if (!trim(line).empty()) throw ParseError(reader.number(), "unexpected trailing data");
  }
}

}  // namespace detail

struct SignalFile {
  Signal signal;
  Metadata metadata;
};

inline void write_signal(std::ostream& os, const Signal& x, const Metadata& meta = {}) {
  os << "# ctvs-signal v1 N=" << x.size() << '\n';
  detail::write_metadata(os, meta);
  for (Eigen::Index i = 0; i < x.values.size(); ++i) detail::write_sample(os, x.values[i]);
}

inline SignalFile read_signal(std::istream& is) {
  detail::LineReader reader(is);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty file");
  const Metadata header = detail::parse_header(line, "ctvs-signal");
  const std::size_t n = parse_count(detail::require(header, "N"), 1);
  if (n == 0) throw ParseError(1, "N must be >= 1");
  SignalFile out;
  const bool have = detail::read_metadata(reader, line, out.metadata);
  out.signal.values = detail::read_samples(reader, line, have, n);
  if (auto it = out.metadata.find("label"); it != out.metadata.end()) out.signal.label = it->second;
  detail::expect_end(reader, line);
  return out;
}

struct MeasurementFile {
  Measurement measurement;
  Metadata metadata;
};

inline void write_measurement(std::ostream& os, const Measurement& y, const Metadata& meta = {}) {
  os << "# ctvs-measurement v1 m=" << y.size() << " dictionary=" << y.dictionary_ref
     << " sigma=" << format_real(y.noise_sigma) << '\n';
  detail::write_metadata(os, meta);
  for (Eigen::Index i = 0; i < y.values.size(); ++i) detail::write_sample(os, y.values[i]);
}

inline MeasurementFile read_measurement(std::istream& is) {
  detail::LineReader reader(is);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty file");
  const Metadata header = detail::parse_header(line, "ctvs-measurement");
  const std::size_t m = parse_count(detail::require(header, "m"), 1);
  if (m == 0) throw ParseError(1, "m must be >= 1");
  MeasurementFile out;
  out.measurement.dictionary_ref = detail::require(header, "dictionary");
  out.measurement.noise_sigma = parse_real(detail::require(header, "sigma"), 1);
  const bool have = detail::read_metadata(reader, line, out.metadata);
  out.measurement.values = detail::read_samples(reader, line, have, m);
  detail::expect_end(reader, line);
  return out;
}

inline void write_ensemble(std::ostream& os, std::span<const Signal> samples, const Metadata& meta = {}) {
  const std::size_t n = samples.empty() ? 0 : samples.front().size();
  os << "# ctvs-ensemble v1 T=" << samples.size() << " N=" << n << '\n';
  detail::write_metadata(os, meta);
  for (const auto& s : samples) {
    if (s.size() != n) throw InvalidArgument("samples must have equal length");
    for (Eigen::Index i = 0; i < s.values.size(); ++i) detail::write_sample(os, s.values[i]);
  }
}

inline std::vector<Signal> read_ensemble(std::istream& is) {
  detail::LineReader reader(is);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty file");
  const Metadata header = detail::parse_header(line, "ctvs-ensemble");
  const std::size_t t = parse_count(detail::require(header, "T"), 1);
  const std::size_t n = parse_count(detail::require(header, "N"), 1);
  if (t == 0 || n == 0) throw ParseError(1, "T and N must be >= 1");
  Metadata meta;
  bool have = detail::read_metadata(reader, line, meta);
  std::vector<Signal> out;
  for (std::size_t i = 0; i < t; ++i) {
    out.emplace_back(detail::read_samples(reader, line, have, n));
    have = false;
  }
  detail::expect_end(reader, line);
  return out;
}

template <class Reader>
auto read_file(const std::string& path, Reader reader) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return reader(is);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), std::string(e.what()).substr(std::string(e.what()).find(": ") + 2) + " in '" + path + "'");
  }
}

template <class Writer>
void write_file(const std::string& path, Writer writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  writer(os);
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace ctvs
