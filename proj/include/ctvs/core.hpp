#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ctvs {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using IndexSet = std::vector<std::size_t>;

// Precondition / input validation failures.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures that arise from the numerics themselves (rank loss, conditioning).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public InvalidArgument {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InvalidArgument("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A finite sequence of complex samples. Real data is embedded with zero
/// imaginary part.
struct Signal {
  CVector values;
  std::string label;

  Signal() = default;
  explicit Signal(CVector v, std::string l = {}) : values(std::move(v)), label(std::move(l)) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
  std::span<const Complex> view() const noexcept { return {values.data(), size()}; }
};

inline Signal make_signal(const std::vector<Complex>& v, std::string label = {}) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return Signal(std::move(out), std::move(label));
}

inline Signal make_real_signal(const std::vector<double>& v, std::string label = {}) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = Complex(v[i], 0.0);
  return Signal(std::move(out), std::move(label));
}

inline void validate(const Signal& x) {
  if (x.size() == 0) throw InvalidArgument("empty input");
  for (std::size_t j = 0; j < x.size(); ++j) {
    const Complex v = x.values[static_cast<Eigen::Index>(j)];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("non-finite sample at index " + std::to_string(j));
  }
}

// splitmix64 finalizer; turns (base, stream) into an independent seed so
// per-trial streams stay fixed regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ctvs
