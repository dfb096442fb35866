#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhse/eig.hpp"
#include "nhse/fock.hpp"
#include "nhse/model.hpp"

namespace nhse {

using StateRef = Eigen::Ref<const Eigen::VectorXcd>;

// Every expectation value below uses the right eigenvector with weights
// |psi|^2 / ||psi||^2. A zero vector raises ErrorKind::InvalidArgument.

/// <n_x> for every combined site; sums to N.
std::vector<double> site_density(StateRef state, const Basis& basis);

/// (N_A - N_B) / (N_A + N_B).
double polarization(StateRef state, const Basis& basis);

/// rho(x1, x2) = <n_x1 n_x2>; requires N >= 2.
Eigen::MatrixXd pair_density(StateRef state, const Basis& basis);

/// Gamma(x1, x2) = <b^dag_x1 b^dag_x2 b_x2 b_x1> = <n_x1 n_x2> - delta <n_x1>.
Eigen::MatrixXd pair_correlation(StateRef state, const Basis& basis);

/// sum_{x1,x2} Gamma_11 Gamma_22 - Gamma_12^2 evaluated on a Gamma matrix.
double ncor_from_gamma(const Eigen::MatrixXd& gamma);

/// Pair-correlation diagnostic; defined for N = 2 only.
double correlation_ncor(StateRef state, const Basis& basis);

/// Probability weight on bound configurations: some site multiply occupied
/// (bosons) or two nearest neighbours on one leg occupied (fermions).
double pair_weight(StateRef state, const Basis& basis);

std::vector<SiteIndex> leg_sites(std::size_t cells, Leg leg);
/// Cells 1..floor(L/2) on both legs.
std::vector<SiteIndex> left_half_sites(std::size_t cells);

/// Von Neumann entropy of the reduced state on `subset` (eigenvalues of the
/// reduced density matrix below 1e-14 are dropped). For fermions the modes
/// are reordered subset-first with the matching Jordan-Wigner signs.
double entanglement_entropy(StateRef state, const Basis& basis, std::span<const SiteIndex> subset);

struct StateObservables {
  double polarization = 0.0;
  double ncor = 0.0;  ///< NaN unless N == 2
  bool is_max_imag = false;
  std::vector<double> density;
  Eigen::MatrixXd pair_density;  ///< empty when N < 2
  double entropy_ab = 0.0;
  double entropy_leftright = 0.0;
  double leg_a_fraction = 0.0;      ///< rho_A / N
  double left_half_fraction = 0.0;  ///< rho_left / N
};

StateObservables compute_state_observables(StateRef state, const Basis& basis);

/// Cheap per-eigenstate numbers used for colouring and clustering.
struct StateSummary {
  double polarization = 0.0;
  double ncor = 0.0;  ///< NaN unless N == 2
  double pair_weight = 0.0;
  double leg_a_fraction = 0.0;
  double left_half_fraction = 0.0;
  double left_edge_fraction = 0.0;   ///< density share in the left 25% of cells
  double right_edge_fraction = 0.0;  ///< density share in the right 25% of cells
};

StateSummary summarize_state(StateRef state, const Basis& basis);

/// One summary per eigenvector, OpenMP-parallel over eigenstates.
std::vector<StateSummary> summarize_states(const SpectrumResult& result, const Basis& basis,
                                           int workers = 0);
std::vector<StateSummary> summarize_states_serial(const SpectrumResult& result,
                                                  const Basis& basis);

enum class ClusterLabel { RS, BiS, LS, RB, BiB, LB, Mixed, Unclassified };

const char* to_string(ClusterLabel label) noexcept;

struct Cluster {
  std::vector<std::size_t> members;  ///< eigenpair indices, ascending in Re E
  double re_min = 0.0;
  double re_max = 0.0;
  double max_im = 0.0;
  std::size_t max_im_member = 0;
  ClusterLabel label = ClusterLabel::Unclassified;

  double centroid(const Eigen::VectorXcd& eigenvalues) const;
};

struct ClusterOptions {
  double gap_factor = 10.0;
  double min_gap = 0.1;

  /// min_gap = 0.1 * max(|J_left_A|, |J_right_A|).
  static ClusterOptions for_params(const ModelParams& params);
};

/// Sorts by Re E and splits wherever the adjacent gap exceeds
/// max(min_gap, gap_factor * median gap). Clusters come out in ascending Re E.
std::vector<Cluster> cluster_spectrum(const Eigen::VectorXcd& eigenvalues, double gap_factor,
                                      double min_gap);
inline std::vector<Cluster> cluster_spectrum(const SpectrumResult& result,
                                             const ClusterOptions& options = {}) {
  return cluster_spectrum(result.eigenvalues, options.gap_factor, options.min_gap);
}

struct ClassifyOptions {
  double dead_zone = 0.02;
  double edge_fraction = 0.25;
  double single_edge_share = 0.6;
  double bipolar_edge_share = 0.3;
  double eps_im = 1e-9;
};

/// Character from N_cor (bound > 2, scattering < 0, mixed in (0, 2), dead
/// zones around 0 and 2 are unclassified) and localisation prefix from the
/// edge shares. The representative is the max-Im member when the cluster is
/// complex, otherwise the member average.
ClusterLabel classify_cluster(const Cluster& cluster, std::span<const StateSummary> summaries,
                              const ClassifyOptions& options = {});

}  // namespace nhse
