#include "vnkf/entropy.hpp"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "vnkf/error.hpp"

namespace vnkf {

std::string_view to_string(EntropyMethod method) noexcept {
  switch (method) {
    case EntropyMethod::exact: return "exact";
    case EntropyMethod::taylor_dense: return "taylor-dense";
    case EntropyMethod::taylor_stochastic: return "taylor-stochastic";
  }
  return "exact";
}

EntropyMethod parse_entropy_method(std::string_view name) {
  if (name == "exact") return EntropyMethod::exact;
  if (name == "taylor-dense") return EntropyMethod::taylor_dense;
  if (name == "taylor-stochastic") return EntropyMethod::taylor_stochastic;
  throw Error(Errc::invalid_argument, "unknown entropy method '" + std::string(name) + "'");
}

void EntropyConfig::validate() const {
  if (taylor_terms < 3) throw Error(Errc::invalid_argument, "taylor truncation index must be >= 3");
  if (probes < 1) throw Error(Errc::invalid_argument, "probe count must be >= 1");
  if (!(eig_clamp >= 0.0)) throw Error(Errc::invalid_argument, "eigenvalue clamp must be >= 0");
}

DensityMatrix::DensityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols() || values_.rows() == 0) {
    throw Error(Errc::invalid_argument, "density matrix must be square and non-empty");
  }
  if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(Errc::invalid_argument, "density matrix must be symmetric");
  }
  if (std::abs(values_.trace() - 1.0) > 1e-9) {
    throw Error(Errc::invalid_argument, "density matrix must have unit trace");
  }
}

DensityMatrix normalize(const Eigen::MatrixXd& similarity) {
  const double trace = similarity.trace();
  if (!(trace > 0.0)) throw Error(Errc::invalid_argument, "similarity trace must be positive");
  return DensityMatrix(similarity / trace);
}

DensityMatrix normalize(const SimilarityMatrix& m) { return normalize(m.dense()); }

ExactEntropy von_neumann_exact(const DensityMatrix& rho, const EntropyConfig& cfg) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho.values(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::eigen_failure, "symmetric eigensolver did not converge");
  }
  ExactEntropy result;
  // Ascending order; summing in a fixed order keeps the value bit-stable.
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()[i];
    if (lambda < -cfg.eig_clamp) ++result.negative_eigenvalues;
    if (lambda > cfg.eig_clamp) result.value -= lambda * std::log(lambda);
  }
  return result;
}

double xlnx_taylor(double x, int c) {
  if (c < 3) throw Error(Errc::domain_error, "truncation index must be >= 3");
  if (!(x >= 0.0 && x <= 2.0)) throw Error(Errc::domain_error, "x ln x expansion needs 0 <= x <= 2");
  // Same polynomial with -(1 - x) spread over the terms using
  // sum_{k=2}^{c-1} 1/(k(k-1)) + 1/(c-1) = 1, so x = 0 and x = 1 evaluate
  // to exactly zero.
  const double y = 1.0 - x;
  double power = y;
  double sum = 0.0;
  for (int k = 2; k < c; ++k) {
    power *= y;
    sum += (power - y) / (static_cast<double>(k) * (k - 1));
  }
  power *= y;
  sum += (power - y) / (c - 1);
  return sum;
}

std::vector<double> trace_powers_dense(const Eigen::MatrixXd& a, int c) {
  std::vector<double> traces;
  if (c < 2) return traces;
  traces.reserve(static_cast<std::size_t>(c - 1));
  Eigen::MatrixXd power = a;
  for (int k = 2; k <= c; ++k) {
    power = power * a;
    traces.push_back(power.trace());
  }
  return traces;
}

std::vector<double> trace_powers_stochastic(const Eigen::MatrixXd& a, int c, int probes,
                                            std::uint64_t seed) {
  if (probes < 1) throw Error(Errc::invalid_argument, "probe count must be >= 1");
  std::vector<double> estimates;
  if (c < 2) return estimates;
  const Eigen::Index n = a.rows();

  // Rademacher probes stored as rows, one random bit per entry, filled probe by probe.
  // For symmetric a, row blocks times a equal the transposed column products
  // and keep Eigen's product kernel efficient at large n.
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd probe(probes, n);
  std::uint64_t bits = 0;
  int available = 0;
  for (Eigen::Index j = 0; j < probes; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (available == 0) {
        bits = rng();
        available = 64;
      }
      probe(j, i) = (bits & 1U) ? 1.0 : -1.0;
      bits >>= 1;
      --available;
    }
  }

  estimates.reserve(static_cast<std::size_t>(c - 1));
  Eigen::MatrixXd y = probe * a;
  Eigen::MatrixXd next(probes, n);
  for (int k = 2; k <= c; ++k) {
    next.noalias() = y * a;
    y.swap(next);
    estimates.push_back(probe.cwiseProduct(y).sum() / probes);
  }
  return estimates;
}

ApproxEntropy von_neumann_approx(const DensityMatrix& rho, const EntropyConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(rho.size());
  const int c = cfg.taylor_terms;
  const Eigen::MatrixXd shifted = Eigen::MatrixXd::Identity(n, n) - rho.values();

  ApproxEntropy result;
  std::vector<double> traces;
  if (cfg.method == EntropyMethod::taylor_stochastic) {
    traces = trace_powers_stochastic(shifted, c, cfg.probes, cfg.seed);
  } else {
    // Unit trace plus positive semidefinite puts the spectrum in [0, 1],
    // inside the expansion's convergence interval.
    Eigen::LLT<Eigen::MatrixXd> llt(rho.values() + 1e-9 * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success) {
      throw Error(Errc::domain_error, "density matrix is not positive semidefinite");
    }
    result.domain_checked = true;
    traces = trace_powers_dense(shifted, c);
  }

  // tr(I - rho) is n - 1 exactly; it is never estimated.
  const double first = static_cast<double>(n) - rho.values().trace();
  double sum = 0.0;
  for (int k = 2; k < c; ++k) {
    sum += (traces[static_cast<std::size_t>(k - 2)] - first) / (static_cast<double>(k) * (k - 1));
  }
  sum += (traces[static_cast<std::size_t>(c - 2)] - first) / (c - 1);
  result.value = -sum;
  return result;
}

double von_neumann_entropy(const DensityMatrix& rho, const EntropyConfig& cfg) {
  if (cfg.method == EntropyMethod::exact || rho.size() <= kExactCutoff) {
    return von_neumann_exact(rho, cfg).value;
  }
  return von_neumann_approx(rho, cfg).value;
}

}  // namespace vnkf
