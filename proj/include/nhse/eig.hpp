#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "nhse/model.hpp"

namespace nhse {

/// Largest matrix handed to the dense solver unless overridden.
inline constexpr std::size_t kDefaultEigenCapacity = 12000;

struct EigenOptions {
  double tol = 1e-9;  ///< residual bound relative to the infinity norm
  bool compute_vectors = true;
  std::size_t capacity = kDefaultEigenCapacity;
};

/// Full spectrum of a (generally non-normal) matrix. Column k of
/// `right_eigenvectors` is the unit-norm right eigenvector for
/// eigenvalue k; `residuals[k]` is ||H v - lambda v||_2. Both are empty when
/// the decomposition was requested without vectors.
struct SpectrumResult {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right_eigenvectors;
  std::vector<double> residuals;
  double matrix_norm = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  bool has_vectors() const noexcept { return right_eigenvectors.cols() > 0; }
};

/// Decoupled blocks (connected components of the sparsity pattern) are
/// solved independently; eigenpairs are listed block by block.
/// Balancing, Hessenberg reduction and shifted QR (LAPACK xGEEV), followed
/// by residual verification of every returned eigenpair. Real input goes
/// through the real driver, so complex eigenvalues come in exact conjugate
/// pairs.
///
/// Throws ErrorKind::Capacity above `options.capacity` and
/// ErrorKind::Convergence when QR fails or a residual exceeds
/// tol * ||H||_inf (the message lists the offending indices).
SpectrumResult eigendecompose(const SparseOperator& matrix, const EigenOptions& options = {});

/// max_k Im(lambda_k).
double max_imag(const SpectrumResult& result);

/// max(1e-9, 1e-12 * ||H||_inf).
double default_eps_im(double matrix_norm) noexcept;

bool is_spectrum_real(const SpectrumResult& result, double eps_im);

}  // namespace nhse
