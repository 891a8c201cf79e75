#pragma once

// Generators for the three experiment regimes (finite sparse, truncated
// power law, sampled chirps) and dictionary constructors.

#include <numbers>
#include <random>

#include "ctvs/dictionary.hpp"

namespace ctvs {

struct SparseSignal {
  Signal signal;
  IndexSet support;  // ascending
};

/// k distinct positions, magnitudes uniform in [1, 2], phases uniform.
inline SparseSignal gen_sparse(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("N must be >= 1");
  if (k == 0 || k > n) throw InvalidArgument("k must satisfy 1 <= k <= N");
  std::mt19937_64 rng(seed);
  IndexSet positions(n);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  std::shuffle(positions.begin(), positions.end(), rng);
  positions.resize(k);
  std::sort(positions.begin(), positions.end());

  std::uniform_real_distribution<double> magnitude(1.0, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  CVector x = CVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j : positions) {
    const double a = magnitude(rng);
    x[static_cast<Eigen::Index>(j)] = std::polar(a, phase(rng));
  }
  return {Signal(std::move(x), "sparse"), std::move(positions)};
}

struct PowerLawSignal {
  Signal signal;
  // positions[j - 1] holds the sample of magnitude j^-alpha.
  IndexSet positions;
  // sum_{j > N} j^-alpha <= N^(1 - alpha) / (alpha - 1).
  double tail_bound = 0.0;
};

/// Magnitudes j^-alpha, j = 1..N, at seeded random positions. Phases are
/// drawn from {1, i, -1, -i} so the moduli stay exactly j^-alpha.
inline PowerLawSignal gen_powerlaw(std::size_t n, double alpha, std::uint64_t seed, bool permute = true) {
  if (n == 0) throw InvalidArgument("N must be >= 1");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw InvalidArgument("non-compressible tail");
  std::mt19937_64 rng(seed);
  PowerLawSignal out;
  out.positions.resize(n);
  std::iota(out.positions.begin(), out.positions.end(), std::size_t{0});
  if (permute) std::shuffle(out.positions.begin(), out.positions.end(), rng);

  static const Complex kQuarterTurns[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  std::uniform_int_distribution<int> quarter(0, 3);
  CVector x(static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j <= n; ++j) {
    const double a = std::pow(static_cast<double>(j), -alpha);
    x[static_cast<Eigen::Index>(out.positions[j - 1])] = a * kQuarterTurns[quarter(rng)];
  }
  out.signal = Signal(std::move(x), "powerlaw");
  out.tail_bound = std::pow(static_cast<double>(n), 1.0 - alpha) / (alpha - 1.0);
  return out;
}

/// One linear chirp a * exp(2 pi i (f t + c t^2 / 2)); f in cycles per unit
/// time, c in cycles per unit time squared.
struct ChirpComponent {
  double amplitude = 1.0;
  double start_freq = 0.0;
  double chirp_rate = 0.0;

  bool operator==(const ChirpComponent&) const = default;
};

namespace detail {

inline void check_nyquist(std::span<const ChirpComponent> components, std::size_t n, double sample_rate) {
  if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
  const double nyquist = 0.5 * sample_rate;
  const double t_end = static_cast<double>(n - 1) / sample_rate;
  for (const auto& c : components) {
    const double f0 = c.start_freq;
    const double f1 = c.start_freq + c.chirp_rate * t_end;
    if (!(std::abs(f0) < nyquist) || !(std::abs(f1) < nyquist))
      throw InvalidArgument("aliasing: instantaneous frequency reaches Nyquist");
  }
}

inline CVector chirp_samples(std::span<const ChirpComponent> components, std::span<const Complex> weights,
                             std::size_t n, double sample_rate) {
  CVector x = CVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    for (std::size_t s = 0; s < n; ++s) {
      const double t = static_cast<double>(s) / sample_rate;
      const double cycles = c.start_freq * t + 0.5 * c.chirp_rate * t * t;
      x[static_cast<Eigen::Index>(s)] += weights[i] * std::polar(1.0, 2.0 * std::numbers::pi * cycles);
    }
  }
  return x;
}

}  // namespace detail

inline Signal gen_chirp(std::span<const ChirpComponent> components, std::size_t n, double sample_rate = 1.0) {
  if (n == 0) throw InvalidArgument("N must be >= 1");
  detail::check_nyquist(components, n, sample_rate);
  std::vector<Complex> weights;
  for (const auto& c : components) weights.emplace_back(c.amplitude, 0.0);
  return Signal(detail::chirp_samples(components, weights, n, sample_rate), "chirp");
}

/// T realizations, each component rotated by an independent uniform phase.
inline std::vector<Signal> ensemble_chirp(std::span<const ChirpComponent> components, std::size_t n,
                                          std::size_t trials, std::uint64_t jitter_seed, double sample_rate = 1.0) {
  if (n == 0) throw InvalidArgument("N must be >= 1");
  if (trials == 0) throw InvalidArgument("trials must be >= 1");
  detail::check_nyquist(components, n, sample_rate);
  std::mt19937_64 rng(jitter_seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<Signal> out;
  out.reserve(trials);
  std::vector<Complex> weights(components.size());
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < components.size(); ++i) weights[i] = std::polar(components[i].amplitude, phase(rng));
    out.emplace_back(detail::chirp_samples(components, weights, n, sample_rate), "chirp");
  }
  return out;
}

/// Everything needed to rebuild a generated dictionary.
struct DictionarySpec {
  DictionaryKind kind = DictionaryKind::Identity;
  std::size_t m = 1;
  std::size_t n = 1;
  DictionaryParams params;
  std::uint64_t seed = 0;

  bool operator==(const DictionarySpec&) const = default;
};

/// gaussian: i.i.d. real N(0, 1/m) entries.
/// dft: entries exp(sign 2 pi i r c / N) / sqrt(N) on rows 0..m-1, or on m
///      seeded random rows; m = N gives the unitary DFT.
/// gabor: unit-norm atoms exp(-(t - tau_p)^2 / (2 w^2)) exp(2 pi i q t / B),
///      atom index p * B + q, tau_p = p m / P with P = N / B time positions.
/// identity: m = N.
inline Dictionary make_dictionary(DictionaryKind kind, std::size_t m, std::size_t n, const DictionaryParams& params,
                                  std::uint64_t seed) {
  if (m == 0 || n == 0) throw InvalidArgument("dictionary dimensions must be >= 1");
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(n);
  switch (kind) {
    case DictionaryKind::Gaussian: {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
      CMatrix a(rows, cols);
      for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) a(r, c) = Complex(normal(rng), 0.0);
      return Dictionary(std::move(a), kind, seed, params);
    }
    case DictionaryKind::Dft: {
      if (m > n) throw InvalidArgument("dft dictionary requires m <= N");
      if (params.dft_sign != 1 && params.dft_sign != -1) throw InvalidArgument("dft sign must be +1 or -1");
      IndexSet row_ids(n);
      std::iota(row_ids.begin(), row_ids.end(), std::size_t{0});
      if (params.dft_random_rows) {
        std::mt19937_64 rng(seed);
        std::shuffle(row_ids.begin(), row_ids.end(), rng);
      }
      row_ids.resize(m);
      if (params.dft_random_rows) std::sort(row_ids.begin(), row_ids.end());
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      CMatrix a(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
          const std::size_t phase_index = (row_ids[static_cast<std::size_t>(r)] * static_cast<std::size_t>(c)) % n;
          const double angle = params.dft_sign * 2.0 * std::numbers::pi * static_cast<double>(phase_index) / static_cast<double>(n);
          a(r, c) = std::polar(scale, angle);
        }
      std::optional<std::uint64_t> used_seed;
      if (params.dft_random_rows) used_seed = seed;
      return Dictionary(std::move(a), kind, used_seed, params);
    }
    case DictionaryKind::Gabor: {
      if (!(params.gabor_width > 0.0)) throw InvalidArgument("gabor window width must be positive");
      const std::size_t bins = params.gabor_freq_bins == 0 ? m : params.gabor_freq_bins;
      if (n % bins != 0) throw InvalidArgument("gabor dictionary requires N divisible by the frequency bins");
      const std::size_t positions = n / bins;
      const double w = params.gabor_width;
      CMatrix a(rows, cols);
      for (std::size_t p = 0; p < positions; ++p) {
        const double tau = static_cast<double>(p) * static_cast<double>(m) / static_cast<double>(positions);
        for (std::size_t q = 0; q < bins; ++q) {
          const auto c = static_cast<Eigen::Index>(p * bins + q);
          for (Eigen::Index t = 0; t < rows; ++t) {
            const double dt = static_cast<double>(t) - tau;
            const double env = std::exp(-dt * dt / (2.0 * w * w));
            const std::size_t phase_index = (q * static_cast<std::size_t>(t)) % bins;
            a(t, c) = std::polar(env, 2.0 * std::numbers::pi * static_cast<double>(phase_index) / static_cast<double>(bins));
          }
          const double norm = a.col(c).norm();
          if (norm > 0.0) a.col(c) /= norm;
        }
      }
      DictionaryParams stored = params;
      stored.gabor_freq_bins = bins;
      return Dictionary(std::move(a), kind, std::nullopt, stored);
    }
    case DictionaryKind::Identity: {
      if (m != n) throw InvalidArgument("identity dictionary requires m == N");
      return Dictionary(CMatrix::Identity(rows, cols), kind);
    }
    case DictionaryKind::Custom:
      break;
  }
  throw InvalidArgument("custom dictionaries are built from an explicit matrix");
}

inline Dictionary make_dictionary(const DictionarySpec& spec) {
  return make_dictionary(spec.kind, spec.m, spec.n, spec.params, spec.seed);
}

/// Inverse of Dictionary::id() for generated kinds.
inline DictionarySpec parse_dictionary_id(std::string_view id) {
  DictionarySpec spec;
  std::size_t pos = 0;
  bool first = true;
  bool have_m = false, have_n = false;
  while (pos <= id.size()) {
    const std::size_t end = std::min(id.find(':', pos), id.size());
    const std::string_view field = id.substr(pos, end - pos);
    pos = end + 1;
    if (first) {
      spec.kind = parse_dictionary_kind(field);
      if (spec.kind == DictionaryKind::Custom) throw InvalidArgument("custom dictionary cannot be regenerated from its id");
      first = false;
      continue;
    }
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("malformed dictionary id field '" + std::string(field) + "'");
    const std::string key(field.substr(0, eq));
    const std::string value(field.substr(eq + 1));
    try {
      if (key == "m") {
        spec.m = std::stoull(value);
        have_m = true;
      } else if (key == "N") {
        spec.n = std::stoull(value);
        have_n = true;
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "sign") {
        spec.params.dft_sign = std::stoi(value);
      } else if (key == "random_rows") {
        spec.params.dft_random_rows = value == "1";
      } else if (key == "width") {
        spec.params.gabor_width = std::stod(value);
      } else if (key == "bins") {
        spec.params.gabor_freq_bins = std::stoull(value);
      } else {
        throw InvalidArgument("unknown dictionary id key '" + key + "'");
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const InvalidArgument*>(&e)) throw;
      throw InvalidArgument("bad value for dictionary id key '" + key + "'");
    }
  }
  if (first || !have_m || !have_n) throw InvalidArgument("dictionary id must name kind, m and N");
  return spec;
}

}  // namespace ctvs
