#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nhse/fock.hpp"

namespace nhse {

/// Couplings of the non-reciprocal two-leg ladder.
///
/// Intra-leg hopping is stored as four independent amplitudes:
///   -j_left_s  a^dag_{x,s} a_{x+1,s}   (particle moves left)
///   -j_right_s a^dag_{x+1,s} a_{x,s}   (particle moves right)
/// The defaults are J e^{alpha} = 1 and J e^{-alpha} = 0.5 with opposite
/// non-reciprocity on the two legs. `j_p` couples (x,A) <-> (x,B) with a
/// plus sign, `mu` is +mu on A and -mu on B. Bosons use the onsite `u`,
/// fermions the nearest-neighbour `u_nn`.
struct ModelParams {
  std::size_t cells = 1;
  std::size_t particles = 1;
  Statistics statistics = Statistics::Boson;
  double j_left_a = 1.0;
  double j_right_a = 0.5;
  double j_left_b = 0.5;
  double j_right_b = 1.0;
  double j_p = 0.0;
  double mu = 0.0;
  double u = 0.0;
  double u_nn = 0.0;

  /// Sets the four amplitudes from J and alpha, with alpha_A = -alpha_B = alpha.
  void set_j_alpha(double j, double alpha);

  /// Sets leg A to (left, right) and mirrors it onto leg B.
  void set_mirrored_hopping(double left, double right);

  /// Throws ErrorKind::InvalidArgument when the invariants do not hold.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct MatrixEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  std::complex<double> value;
};

/// Triplet matrix. Construction canonicalises the entries: sorted by
/// (row, col), duplicates summed.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t dimension, std::vector<MatrixEntry> entries);

  std::size_t dimension() const noexcept { return dimension_; }
  std::span<const MatrixEntry> entries() const noexcept { return entries_; }
  std::size_t nonzeros() const noexcept { return entries_.size(); }

  /// Element lookup (zero when absent).
  std::complex<double> at(std::size_t row, std::size_t col) const;

  bool is_real() const noexcept;
  /// Maximum absolute row sum.
  double inf_norm() const;
  std::complex<double> trace() const;

  Eigen::MatrixXcd to_dense() const;
  Eigen::MatrixXd to_dense_real() const;
  Eigen::VectorXcd apply(const Eigen::Ref<const Eigen::VectorXcd>& x) const;

  friend bool operator==(const SparseOperator& a, const SparseOperator& b);

 private:
  std::size_t dimension_ = 0;
  std::vector<MatrixEntry> entries_;
};

/// Many-body Hamiltonian on `basis` (open boundaries). OpenMP-parallel over
/// basis columns; the result is identical to build_hamiltonian_serial.
SparseOperator build_hamiltonian(const ModelParams& params, const Basis& basis, int workers = 0);

/// Reference single-threaded assembly.
SparseOperator build_hamiltonian_serial(const ModelParams& params, const Basis& basis);

/// Interaction plus chemical-potential energy of one configuration.
double onsite_energy(const FockState& state, const ModelParams& params);
double onsite_energy(std::span<const Occupation> occupations, const ModelParams& params);

/// First-quantised 2L x 2L hopping matrix (site order of combined_site).
SparseOperator build_single_particle_matrix(const ModelParams& params);

}  // namespace nhse
