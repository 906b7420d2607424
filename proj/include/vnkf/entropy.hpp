#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vnkf/simmatrix.hpp"

namespace vnkf {

enum class EntropyMethod { exact, taylor_dense, taylor_stochastic };

std::string_view to_string(EntropyMethod method) noexcept;
// Accepts "exact", "taylor-dense", "taylor-stochastic".
EntropyMethod parse_entropy_method(std::string_view name);

struct EntropyConfig {
  EntropyMethod method = EntropyMethod::exact;
  int taylor_terms = 64;  // truncation index c
  int probes = 32;
  std::uint64_t seed = 0;
  double eig_clamp = 1e-12;

  void validate() const;
};

// Inputs at or below this size always use the eigenvalue backend.
inline constexpr std::size_t kExactCutoff = 32;

// Symmetric matrix with unit trace.
class DensityMatrix {
 public:
  // Throws Error{invalid_argument} unless values is square, symmetric and
  // has trace 1 within 1e-9.
  explicit DensityMatrix(Eigen::MatrixXd values);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

 private:
  Eigen::MatrixXd values_;
};

// Divides by the trace. For a similarity matrix the trace is n.
DensityMatrix normalize(const SimilarityMatrix& m);
DensityMatrix normalize(const Eigen::MatrixXd& similarity);

struct ExactEntropy {
  double value = 0.0;
  // Eigenvalues below -eig_clamp (round-off on a PSD input).
  std::size_t negative_eigenvalues = 0;
};

// -sum lambda ln lambda over eigenvalues above eig_clamp.
// Throws Error{eigen_failure}.
ExactEntropy von_neumann_exact(const DensityMatrix& rho, const EntropyConfig& cfg = {});

// Truncated expansion of x ln x about x = 1:
//   x - 1 + sum_{k=2}^{c-1} (1-x)^k / (k(k-1)) + (1-x)^c / (c-1)
// Throws Error{domain_error} outside [0, 2] or for c < 3.
double xlnx_taylor(double x, int c);

// [tr(a^2), ..., tr(a^c)] by repeated dense products.
std::vector<double> trace_powers_dense(const Eigen::MatrixXd& a, int c);

// Hutchinson estimates of [tr(a^2), ..., tr(a^c)] from `probes` Rademacher
// vectors. a must be symmetric. Each power costs one product of the
// probes x n block with a. Deterministic for a given seed.
std::vector<double> trace_powers_stochastic(const Eigen::MatrixXd& a, int c, int probes,
                                            std::uint64_t seed);

struct ApproxEntropy {
  double value = 0.0;
  // False for the stochastic backend, which does not check the spectrum.
  bool domain_checked = false;
};

// Applies the truncated polynomial spectrally through traces of (I - rho)^k
// using the dense or stochastic trace backend (cfg.method). The dense backend
// throws Error{domain_error} when rho is not positive semidefinite.
ApproxEntropy von_neumann_approx(const DensityMatrix& rho, const EntropyConfig& cfg);

// Backend dispatch; sizes <= kExactCutoff always go to the exact backend.
double von_neumann_entropy(const DensityMatrix& rho, const EntropyConfig& cfg);

}  // namespace vnkf
