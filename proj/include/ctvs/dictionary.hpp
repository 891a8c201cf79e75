#pragma once

// The sampling operator: an m x N array whose columns are atoms.

#include <optional>
#include <sstream>
#include <string_view>

#include "ctvs/core.hpp"

namespace ctvs {

enum class DictionaryKind { Gaussian, Dft, Gabor, Identity, Custom };

inline std::string_view to_string(DictionaryKind k) {
  switch (k) {
    case DictionaryKind::Gaussian: return "gaussian";
    case DictionaryKind::Dft: return "dft";
    case DictionaryKind::Gabor: return "gabor";
    case DictionaryKind::Identity: return "identity";
    case DictionaryKind::Custom: return "custom";
  }
  return "custom";
}

inline DictionaryKind parse_dictionary_kind(std::string_view s) {
  if (s == "gaussian") return DictionaryKind::Gaussian;
  if (s == "dft") return DictionaryKind::Dft;
  if (s == "gabor") return DictionaryKind::Gabor;
  if (s == "identity") return DictionaryKind::Identity;
  if (s == "custom") return DictionaryKind::Custom;
  throw InvalidArgument("unknown dictionary kind '" + std::string(s) + "'");
}

// Generator parameters; fields irrelevant to a kind are ignored.
struct DictionaryParams {
  // dft: +1 gives synthesis atoms exp(+2 pi i r c / N) (Fourier columns),
  // -1 gives the analysis DFT matrix. Rows 0..m-1 unless random_rows.
  int dft_sign = -1;
  bool dft_random_rows = false;
  // gabor: Gaussian window standard deviation in samples and the number of
  // frequency bins per time position. 0 bins means m bins.
  double gabor_width = 4.0;
  std::size_t gabor_freq_bins = 0;

  bool operator==(const DictionaryParams&) const = default;
};

class Dictionary {
 public:
  Dictionary() = default;

  // Rejects zero-norm atoms with "degenerate atom j".
  Dictionary(CMatrix atoms, DictionaryKind kind, std::optional<std::uint64_t> seed = std::nullopt,
             DictionaryParams params = {})
      : atoms_(std::move(atoms)), kind_(kind), seed_(seed), params_(params) {
    if (atoms_.rows() < 1 || atoms_.cols() < 1) throw InvalidArgument("dictionary must be non-empty");
    norms_ = atoms_.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < norms_.size(); ++j) {
      if (!(norms_[j] > 0.0) || !std::isfinite(norms_[j]))
        throw InvalidArgument("degenerate atom " + std::to_string(j));
    }
  }

  const CMatrix& atoms() const noexcept { return atoms_; }
  const Eigen::VectorXd& column_norms() const noexcept { return norms_; }
  DictionaryKind kind() const noexcept { return kind_; }
  const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }
  const DictionaryParams& params() const noexcept { return params_; }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(atoms_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(atoms_.cols()); }

  // Text identifier from which generated dictionaries can be rebuilt, e.g.
  // "gaussian:m=40:N=128:seed=7".
  std::string id() const {
    std::ostringstream os;
    os << to_string(kind_) << ":m=" << rows() << ":N=" << cols();
    if (seed_) os << ":seed=" << *seed_;
    if (kind_ == DictionaryKind::Dft) {
      os << ":sign=" << params_.dft_sign << ":random_rows=" << (params_.dft_random_rows ? 1 : 0);
    } else if (kind_ == DictionaryKind::Gabor) {
      os.precision(17);
      os << ":width=" << params_.gabor_width << ":bins=" << params_.gabor_freq_bins;
    }
    return os.str();
  }

 private:
  CMatrix atoms_;
  Eigen::VectorXd norms_;
  DictionaryKind kind_ = DictionaryKind::Custom;
  std::optional<std::uint64_t> seed_;
  DictionaryParams params_;
};

/// y = Gamma x + w, tagged with the dictionary that produced it.
struct Measurement {
  CVector values;
  std::string dictionary_ref;
  double noise_sigma = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

}  // namespace ctvs
