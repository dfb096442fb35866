#include "nhse/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <lapacke.h>

#include "nhse/errors.hpp"

namespace nhse {

namespace {

void decompose_real(const SparseOperator& matrix, bool vectors, SpectrumResult& out) {
  const auto n = static_cast<lapack_int>(matrix.dimension());
  Eigen::MatrixXd a = matrix.to_dense_real();
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr;
  if (vectors) vr.resize(n, n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, a.data(), n, wr.data(),
                    wi.data(), nullptr, 1, vectors ? vr.data() : nullptr, vectors ? n : 1);
  if (info < 0) throw Error(ErrorKind::InvalidArgument, "dgeev: illegal argument");
  if (info > 0) {
    std::ostringstream msg;
    msg << "QR iteration failed; eigenvalues 0.." << info - 1 << " did not converge";
    throw Error(ErrorKind::Convergence, msg.str());
  }
  out.eigenvalues.resize(n);
  for (lapack_int k = 0; k < n; ++k) out.eigenvalues(k) = {wr(k), wi(k)};
  if (!vectors) return;
  out.right_eigenvectors.resize(n, n);
  for (lapack_int k = 0; k < n; ++k) {
    if (wi(k) == 0.0) {
      out.right_eigenvectors.col(k) = vr.col(k).cast<std::complex<double>>();
    } else {
      // dgeev stores a conjugate pair as (re, im) in columns k and k+1.
      for (lapack_int r = 0; r < n; ++r) {
        out.right_eigenvectors(r, k) = {vr(r, k), vr(r, k + 1)};
        out.right_eigenvectors(r, k + 1) = {vr(r, k), -vr(r, k + 1)};
      }
      ++k;
    }
  }
}

void decompose_complex(const SparseOperator& matrix, bool vectors, SpectrumResult& out) {
  const auto n = static_cast<lapack_int>(matrix.dimension());
  Eigen::MatrixXcd a = matrix.to_dense();
  Eigen::VectorXcd w(n);
  Eigen::MatrixXcd vr;
  if (vectors) vr.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
      vectors ? reinterpret_cast<lapack_complex_double*>(vr.data()) : nullptr, vectors ? n : 1);
  if (info < 0) throw Error(ErrorKind::InvalidArgument, "zgeev: illegal argument");
  if (info > 0) {
    std::ostringstream msg;
    msg << "QR iteration failed; eigenvalues 0.." << info - 1 << " did not converge";
    throw Error(ErrorKind::Convergence, msg.str());
  }
  out.eigenvalues = std::move(w);
  if (vectors) out.right_eigenvectors = std::move(vr);
}

constexpr int kBalanceSweeps = 20000;
constexpr double kBalanceTolerance = 1e-6;

// Diagonal d minimising the Frobenius norm of D^-1 A D (Osborne iteration in
// the 2-norm). Unlike xGEBAL, which equalises 1-norms and leaves a
// non-reciprocal chain untouched, this drives such chains to symmetric form
// and removes most of their eigenvalue ill-conditioning.
Eigen::VectorXd frobenius_scaling(const SparseOperator& matrix) {
  const std::size_t n = matrix.dimension();
  struct Link {
    std::size_t other;
    double weight;
  };
  std::vector<std::vector<Link>> rows(n), cols(n);
  for (const auto& e : matrix.entries()) {
    if (e.row == e.col || e.value == 0.0) continue;
    const double w = std::norm(e.value);
    rows[e.row].push_back({e.col, w});
    cols[e.col].push_back({e.row, w});
  }
  Eigen::VectorXd d = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (int sweep = 0; sweep < kBalanceSweeps; ++sweep) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double di = d(static_cast<Eigen::Index>(i));
      double r = 0.0;
      double c = 0.0;
      for (const auto& l : rows[i]) {
        const double q = d(static_cast<Eigen::Index>(l.other)) / di;
        r += l.weight * q * q;
      }
      for (const auto& l : cols[i]) {
        const double q = di / d(static_cast<Eigen::Index>(l.other));
        c += l.weight * q * q;
      }
      if (r == 0.0 || c == 0.0) continue;
      const double f = std::sqrt(std::sqrt(r / c));
      d(static_cast<Eigen::Index>(i)) = di * f;
      worst = std::max(worst, std::abs(f - 1.0));
    }
    if (worst < kBalanceTolerance) break;
  }
  return d / std::sqrt(d.minCoeff() * d.maxCoeff());
}

// Index sets of the connected components of the sparsity graph, each sorted
// and ordered by their smallest index. Decoupled blocks are diagonalised
// separately: cheaper, and rounding in one block cannot leak into another.
std::vector<std::vector<std::size_t>> components(const SparseOperator& matrix) {
  const std::size_t n = matrix.dimension();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : matrix.entries()) {
    if (e.value == 0.0) continue;
    const std::size_t a = find(e.row);
    const std::size_t b = find(e.col);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == n) {
      slot[root] = out.size();
      out.emplace_back();
    }
    out[slot[root]].push_back(i);
  }
  return out;
}

void decompose(const SparseOperator& matrix, bool vectors, SpectrumResult& out) {
  const Eigen::VectorXd d = frobenius_scaling(matrix);
  std::vector<MatrixEntry> entries(matrix.entries().begin(), matrix.entries().end());
  for (auto& e : entries) {
    e.value *= d(static_cast<Eigen::Index>(e.col)) / d(static_cast<Eigen::Index>(e.row));
  }
  const SparseOperator scaled(matrix.dimension(), std::move(entries));
  if (scaled.is_real()) {
    decompose_real(scaled, vectors, out);
  } else {
    decompose_complex(scaled, vectors, out);
  }
  if (vectors) out.right_eigenvectors = d.cast<std::complex<double>>().asDiagonal() * out.right_eigenvectors;
}

void decompose_blocks(const SparseOperator& matrix, bool vectors, SpectrumResult& out) {
  const auto blocks = components(matrix);
  if (blocks.size() == 1) {
    decompose(matrix, vectors, out);
    return;
  }
  const std::size_t n = matrix.dimension();
  std::vector<std::size_t> local(n);
  std::vector<std::size_t> owner(n);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t k = 0; k < blocks[b].size(); ++k) {
      local[blocks[b][k]] = k;
      owner[blocks[b][k]] = b;
    }
  }
  std::vector<std::vector<MatrixEntry>> entries(blocks.size());
  for (const auto& e : matrix.entries()) {
    if (e.value == 0.0) continue;
    entries[owner[e.row]].push_back({local[e.row], local[e.col], e.value});
  }

  const auto dim = static_cast<Eigen::Index>(n);
  out.eigenvalues.resize(dim);
  if (vectors) out.right_eigenvectors = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::Index next = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    SpectrumResult part;
    decompose(SparseOperator(blocks[b].size(), std::move(entries[b])), vectors, part);
    const auto m = static_cast<Eigen::Index>(blocks[b].size());
    out.eigenvalues.segment(next, m) = part.eigenvalues;
    if (vectors) {
      for (Eigen::Index r = 0; r < m; ++r) {
        out.right_eigenvectors.block(static_cast<Eigen::Index>(blocks[b][static_cast<std::size_t>(r)]),
                                     next, 1, m) = part.right_eigenvectors.row(r);
      }
    }
    next += m;
  }
}

}  // namespace

SpectrumResult eigendecompose(const SparseOperator& matrix, const EigenOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  const std::size_t n = matrix.dimension();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty matrix");
  if (n > options.capacity) {
    throw Error(ErrorKind::Capacity, "dimension " + std::to_string(n) +
                                         " exceeds dense eigensolver capacity " +
                                         std::to_string(options.capacity));
  }

  SpectrumResult out;
  out.matrix_norm = matrix.inf_norm();
  decompose_blocks(matrix, options.compute_vectors, out);
  if (!options.compute_vectors) return out;

  out.residuals.resize(n);
  std::vector<std::size_t> failed;
  const double bound = options.tol * std::max(out.matrix_norm, 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    auto v = out.right_eigenvectors.col(static_cast<Eigen::Index>(k));
    const double norm = v.norm();
    if (norm == 0.0) {
      failed.push_back(k);
      out.residuals[k] = INFINITY;
      continue;
    }
    v /= norm;
    const Eigen::VectorXcd r = matrix.apply(v) - out.eigenvalues(k) * v;
    out.residuals[k] = r.norm();
    if (!(out.residuals[k] <= bound)) failed.push_back(k);
  }
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << "residual check failed for " << failed.size() << " eigenpair(s):";
    for (std::size_t i = 0; i < std::min<std::size_t>(failed.size(), 20); ++i) {
      msg << ' ' << failed[i];
    }
    if (failed.size() > 20) msg << " ...";
    throw Error(ErrorKind::Convergence, msg.str());
  }
  return out;
}

double max_imag(const SpectrumResult& result) {
  if (result.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty spectrum");
  return result.eigenvalues.imag().maxCoeff();
}

double default_eps_im(double matrix_norm) noexcept {
  return std::max(1e-9, 1e-12 * matrix_norm);
}

bool is_spectrum_real(const SpectrumResult& result, double eps_im) {
  if (!(eps_im > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps_im must be positive");
  if (result.size() == 0) return true;
  return result.eigenvalues.imag().cwiseAbs().maxCoeff() <= eps_im;
}

}  // namespace nhse
