#pragma once

// Forward map (compressed representation), inverse maps (OMP and CS-KLE
// recovery) and the round-trip check that closes the loop back to the signal.

#include <random>
#include <variant>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ctvs/frechet.hpp"

namespace ctvs {

/// y = Gamma x + w with w circular Gaussian, E|w_i|^2 = sigma^2.
inline Measurement forward(const Signal& x, const Dictionary& dict, double noise_sigma, std::uint64_t seed) {
  validate(x);
  if (x.size() != dict.cols()) throw InvalidArgument("dimension mismatch");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("noise sigma must be >= 0");

  Measurement y;
  y.values = dict.atoms() * x.values;
  y.dictionary_ref = dict.id();
  y.noise_sigma = noise_sigma;
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_sigma / std::sqrt(2.0));
    for (Eigen::Index i = 0; i < y.values.size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      y.values[i] += Complex(re, im);
    }
  }
  return y;
}

enum class RecoveryMethod { Omp, Cskle, Oracle };

inline std::string_view to_string(RecoveryMethod m) {
  switch (m) {
    case RecoveryMethod::Omp: return "omp";
    case RecoveryMethod::Cskle: return "cskle";
    case RecoveryMethod::Oracle: return "oracle";
  }
  return "omp";
}

inline RecoveryMethod parse_method(std::string_view s) {
  if (s == "omp") return RecoveryMethod::Omp;
  if (s == "cskle") return RecoveryMethod::Cskle;
  if (s == "oracle") return RecoveryMethod::Oracle;
  throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

struct RecoveryResult {
  IndexSet support;
  CVector coefficients;
  Signal reconstruction;
  // Residual l2 norm before the first iteration and after each one.
  std::vector<double> residual_norms;
  RecoveryMethod method = RecoveryMethod::Omp;
  std::size_t iterations = 0;
};

/// OMP stopping rules. When several are set the precedence is
/// dimension > residual > max_iter; only the highest one present applies.
/// With none set OMP runs until min(m, N) atoms or a zero residual.
struct StopRule {
  std::optional<std::size_t> dimension;
  std::optional<double> residual;
  std::optional<std::size_t> max_iter;

  static StopRule at_dimension(std::size_t n) { return {n, std::nullopt, std::nullopt}; }
  static StopRule at_residual(double eps) { return {std::nullopt, eps, std::nullopt}; }
  static StopRule at_iterations(std::size_t it) { return {std::nullopt, std::nullopt, it}; }
};

// Gram matrices with a larger condition estimate count as singular.
inline constexpr double kMaxGramCondition = 1e12;

namespace detail {

inline Signal synthesize(std::size_t length, const IndexSet& support, const CVector& coefficients) {
  CVector x = CVector::Zero(static_cast<Eigen::Index>(length));
  for (std::size_t i = 0; i < support.size(); ++i)
    x[static_cast<Eigen::Index>(support[i])] = coefficients[static_cast<Eigen::Index>(i)];
  return Signal(std::move(x));
}

inline void check_measurement(const Measurement& y, const Dictionary& dict) {
  if (y.size() == 0) throw InvalidArgument("empty input");
  if (y.size() != dict.rows()) throw InvalidArgument("dimension mismatch");
  if (!y.values.allFinite()) throw InvalidArgument("measurement has non-finite values");
}

}  // namespace detail

/// Orthogonal matching pursuit. The selected span is kept as an incremental
/// QR factorization (classical Gram-Schmidt with one reorthogonalization
/// pass), so each step costs O(m k) beyond the correlation sweep.
inline RecoveryResult omp_recover(const Measurement& y, const Dictionary& dict, const StopRule& stop) {
  detail::check_measurement(y, dict);
  const std::size_t m = dict.rows();
  const std::size_t n_atoms = dict.cols();
  const std::size_t limit = std::min(m, n_atoms);

  std::size_t target = limit;
  bool use_residual = false;
  double residual_eps = 0.0;
  if (stop.dimension) {
    if (*stop.dimension > limit) throw InvalidArgument("stop dimension exceeds min(m, N)");
    target = *stop.dimension;
  } else if (stop.residual) {
    if (!(*stop.residual > 0.0)) throw InvalidArgument("residual tolerance must be positive");
    use_residual = true;
    residual_eps = *stop.residual;
  } else if (stop.max_iter) {
    target = std::min(*stop.max_iter, limit);
  }

  const CMatrix& atoms = dict.atoms();
  const Eigen::VectorXd& norms = dict.column_norms();
  const auto rows = static_cast<Eigen::Index>(m);

  RecoveryResult out;
  out.method = RecoveryMethod::Omp;
  CMatrix q(rows, 0);
  CMatrix r_factor(0, 0);
  std::vector<double> pivots;  // |R_ii| / ||a_i||
  std::vector<bool> selected(n_atoms, false);

  CVector residual = y.values;
  double rnorm = residual.norm();
  out.residual_norms.push_back(rnorm);

  while (out.support.size() < target) {
    if (rnorm == 0.0 || (use_residual && rnorm < residual_eps)) break;

    const CVector corr = atoms.adjoint() * residual;
    std::size_t best = n_atoms;
    double best_score = 0.0;
    for (std::size_t j = 0; j < n_atoms; ++j) {
      if (selected[j]) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      const double score = std::abs(corr[jj]) / norms[jj];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best == n_atoms) break;

    const auto col = static_cast<Eigen::Index>(best);
    const auto k = q.cols();
    CVector v = atoms.col(col);
    CVector h = CVector::Zero(k);
    for (int pass = 0; pass < 2; ++pass) {
      const CVector hp = q.adjoint() * v;
      v -= q * hp;
      h += hp;
    }
    const double rho = v.norm();
    const double pivot = rho / norms[col];
    pivots.push_back(pivot);
    const auto [lo, hi] = std::minmax_element(pivots.begin(), pivots.end());
    const double cond = *lo > 0.0 ? (*hi / *lo) * (*hi / *lo) : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxGramCondition)) throw NumericalError("degenerate support");

    q.conservativeResize(rows, k + 1);
    q.col(k) = v / rho;
    r_factor.conservativeResize(k + 1, k + 1);
    r_factor.row(k).setZero();
    r_factor.col(k).head(k) = h;
    r_factor(k, k) = rho;

    selected[best] = true;
    out.support.push_back(best);

    residual -= q * (q.adjoint() * residual);
    rnorm = residual.norm();
    out.residual_norms.push_back(rnorm);
  }

  out.iterations = out.support.size();
  if (out.support.empty()) {
    out.coefficients = CVector(0);
  } else {
    const CVector z = q.adjoint() * y.values;
    out.coefficients = r_factor.triangularView<Eigen::Upper>().solve(z);
  }
  out.reconstruction = detail::synthesize(n_atoms, out.support, out.coefficients);
  return out;
}

namespace detail {

// Least squares with column-pivoted QR; throws `failure` on rank loss.
inline CVector solve_full_rank(const CMatrix& a, const CVector& b, const char* failure) {
  Eigen::ColPivHouseholderQR<CMatrix> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < a.cols()) throw NumericalError(failure);
  return qr.solve(b);
}

}  // namespace detail

/// Least squares restricted to a known support.
inline RecoveryResult oracle_recover(const Measurement& y, const Dictionary& dict, const IndexSet& support) {
  detail::check_measurement(y, dict);
  RecoveryResult out;
  out.method = RecoveryMethod::Oracle;
  out.support = support;
  out.residual_norms.push_back(y.values.norm());
  if (support.empty()) {
    out.coefficients = CVector(0);
  } else {
    if (support.size() > dict.rows()) throw NumericalError("degenerate support");
    CMatrix sub(static_cast<Eigen::Index>(dict.rows()), static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i] >= dict.cols()) throw InvalidArgument("support index out of range");
      sub.col(static_cast<Eigen::Index>(i)) = dict.atoms().col(static_cast<Eigen::Index>(support[i]));
    }
    out.coefficients = detail::solve_full_rank(sub, y.values, "degenerate support");
    out.residual_norms.push_back((y.values - sub * out.coefficients).norm());
    out.iterations = 1;
  }
  out.reconstruction = detail::synthesize(dict.cols(), out.support, out.coefficients);
  return out;
}

/// Discrete Karhunen-Loeve basis: eigenpairs of the empirical covariance,
/// eigenvalues non-increasing.
struct KleBasis {
  Eigen::VectorXd eigenvalues;
  CMatrix eigenvectors;
  CMatrix covariance;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }

  // Number of eigenvalues above rel * lambda_1.
  std::size_t effective_rank(double rel = 1e-6) const {
    if (eigenvalues.size() == 0 || !(eigenvalues[0] > 0.0)) return 0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
      if (eigenvalues[i] > rel * eigenvalues[0]) ++count;
    return count;
  }
};

/// C = (1/T) sum_t x_t x_t^H (raw second moment; center = true subtracts the
/// sample mean first).
inline KleBasis cskle_basis(std::span<const Signal> samples, bool center = false) {
  if (samples.empty()) throw InvalidArgument("at least one sample is required");
  const auto n = static_cast<Eigen::Index>(samples.front().size());
  if (n == 0) throw InvalidArgument("empty input");
  CMatrix data(n, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t t = 0; t < samples.size(); ++t) {
    if (static_cast<Eigen::Index>(samples[t].size()) != n) throw InvalidArgument("samples must have equal length");
    validate(samples[t]);
    data.col(static_cast<Eigen::Index>(t)) = samples[t].values;
  }
  if (center) data.colwise() -= data.rowwise().mean();

  KleBasis out;
  out.covariance = (data * data.adjoint()) / static_cast<double>(samples.size());
  // Enforce exact Hermitian symmetry before the solver reads one triangle.
  out.covariance = (0.5 * (out.covariance + out.covariance.adjoint())).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(out.covariance);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  out.eigenvalues = eig.eigenvalues().reverse();
  out.eigenvectors = eig.eigenvectors().rowwise().reverse();
  // Roundoff can push null eigenvalues slightly below zero.
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) out.eigenvalues[i] = std::max(out.eigenvalues[i], 0.0);
  return out;
}

/// Least squares for y ~ (Gamma Phi_n) c, x_hat = Phi_n c, where Phi_n are the
/// leading n columns of `basis`.
inline RecoveryResult cskle_recover(const Measurement& y, const Dictionary& dict, const CMatrix& basis, std::size_t n) {
  detail::check_measurement(y, dict);
  const auto length = static_cast<Eigen::Index>(dict.cols());
  if (basis.rows() != length) throw InvalidArgument("dimension mismatch");
  if (n == 0 || n > static_cast<std::size_t>(basis.cols())) throw InvalidArgument("n must be in [1, N]");

  const CMatrix phi = basis.leftCols(static_cast<Eigen::Index>(n));
  const CMatrix gram = phi.adjoint() * phi;
  if (!gram.isIdentity(1e-8)) throw InvalidArgument("basis is not orthonormal");

  const CMatrix a = dict.atoms() * phi;
  RecoveryResult out;
  out.method = RecoveryMethod::Cskle;
  out.residual_norms.push_back(y.values.norm());
  out.coefficients = detail::solve_full_rank(a, y.values, "unidentifiable subspace");
  out.residual_norms.push_back((y.values - a * out.coefficients).norm());
  out.support.resize(n);
  std::iota(out.support.begin(), out.support.end(), std::size_t{0});
  out.reconstruction = Signal(phi * out.coefficients);
  out.iterations = 1;
  return out;
}

inline RecoveryResult cskle_recover(const Measurement& y, const Dictionary& dict, const KleBasis& basis, std::size_t n) {
  return cskle_recover(y, dict, basis.eigenvectors, n);
}

struct OmpPipeline {
  StopRule stop;
};

struct CsklePipeline {
  CMatrix basis;
  std::size_t n = 0;
};

using Pipeline = std::variant<OmpPipeline, CsklePipeline>;

struct ReflexiveReport {
  double rel_err_l2 = 0.0;
  double rel_err_frechet = 0.0;
  RecoveryResult recovery;
};

/// Noiseless forward map followed by the chosen inverse. Errors are
/// ||x_hat - x|| / ||x|| and d(x_hat, x); both are 0 for the zero signal.
inline ReflexiveReport reflexive_check(const Signal& x, const Dictionary& dict, const Pipeline& pipeline,
                                       std::size_t metric_order = 0) {
  const Measurement y = forward(x, dict, 0.0, 0);
  ReflexiveReport report;
  report.recovery = std::visit(
      [&](const auto& p) -> RecoveryResult {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, OmpPipeline>)
          return omp_recover(y, dict, p.stop);
        else
          return cskle_recover(y, dict, p.basis, p.n);
      },
      pipeline);

  const double xnorm = x.values.norm();
  if (xnorm == 0.0) return report;
  const std::size_t order = metric_order == 0 ? default_metric_order(x.size()) : metric_order;
  report.rel_err_l2 = (report.recovery.reconstruction.values - x.values).norm() / xnorm;
  report.rel_err_frechet = frechet_metric(report.recovery.reconstruction, x, order);
  return report;
}

}  // namespace ctvs
