#include "nhse/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <omp.h>

#include "nhse/errors.hpp"

namespace nhse {

namespace {

void check_state(StateRef state, const Basis& basis) {
  if (static_cast<std::size_t>(state.size()) != basis.dimension()) {
    throw Error(ErrorKind::Mismatch, "state vector length does not match basis dimension");
  }
}

// |psi_i|^2 normalised to unit total weight.
Eigen::VectorXd weights(StateRef state, const Basis& basis) {
  check_state(state, basis);
  Eigen::VectorXd w = state.cwiseAbs2();
  const double total = w.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero state vector");
  return w / total;
}

bool has_bound_pair(std::span<const Occupation> occ, Statistics statistics) {
  if (statistics == Statistics::Boson) {
    return std::any_of(occ.begin(), occ.end(), [](Occupation n) { return n >= 2; });
  }
  const std::size_t cells = occ.size() / 2;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    for (std::size_t x = 0; x + 1 < cells; ++x) {
      if (occ[leg * cells + x] && occ[leg * cells + x + 1]) return true;
    }
  }
  return false;
}

std::size_t edge_cells(std::size_t cells, double fraction) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * cells)));
}

}  // namespace

std::vector<double> site_density(StateRef state, const Basis& basis) {
  const Eigen::VectorXd w = weights(state, basis);
  std::vector<double> density(basis.sites(), 0.0);
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(i);
    for (std::size_t s = 0; s < occ.size(); ++s) density[s] += w(i) * occ[s];
  }
  return density;
}

double polarization(StateRef state, const Basis& basis) {
  const auto density = site_density(state, basis);
  const std::size_t cells = basis.cells();
  const double na = std::accumulate(density.begin(), density.begin() + cells, 0.0);
  const double nb = std::accumulate(density.begin() + cells, density.end(), 0.0);
  return (na - nb) / (na + nb);
}

Eigen::MatrixXd pair_density(StateRef state, const Basis& basis) {
  if (basis.particles() < 2) throw Error(ErrorKind::InvalidArgument, "pair density needs N >= 2");
  const Eigen::VectorXd w = weights(state, basis);
  const auto m = static_cast<Eigen::Index>(basis.sites());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(m, m);
  std::vector<std::size_t> occupied;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    if (w(i) == 0.0) continue;
    const auto occ = basis.occupations(i);
    occupied.clear();
    for (std::size_t s = 0; s < occ.size(); ++s) {
      if (occ[s]) occupied.push_back(s);
    }
    for (std::size_t a : occupied) {
      for (std::size_t b : occupied) {
        rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            w(i) * static_cast<double>(occ[a]) * occ[b];
      }
    }
  }
  return rho;
}

Eigen::MatrixXd pair_correlation(StateRef state, const Basis& basis) {
  Eigen::MatrixXd gamma = pair_density(state, basis);
  const auto density = site_density(state, basis);
  for (std::size_t s = 0; s < density.size(); ++s) {
    gamma(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) -= density[s];
  }
  return gamma;
}

double ncor_from_gamma(const Eigen::MatrixXd& gamma) {
  const double diagonal = gamma.diagonal().sum();
  return diagonal * diagonal - gamma.squaredNorm();
}

double correlation_ncor(StateRef state, const Basis& basis) {
  if (basis.particles() != 2) {
    throw Error(ErrorKind::InvalidArgument, "N_cor is defined for N = 2 only");
  }
  return ncor_from_gamma(pair_correlation(state, basis));
}

double pair_weight(StateRef state, const Basis& basis) {
  const Eigen::VectorXd w = weights(state, basis);
  double total = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    if (has_bound_pair(basis.occupations(i), basis.statistics())) total += w(i);
  }
  return total;
}

std::vector<SiteIndex> leg_sites(std::size_t cells, Leg leg) {
  std::vector<SiteIndex> out;
  for (std::size_t x = 1; x <= cells; ++x) out.push_back(combined_site(x, leg, cells));
  return out;
}

std::vector<SiteIndex> left_half_sites(std::size_t cells) {
  std::vector<SiteIndex> out;
  for (std::size_t x = 1; x <= cells / 2; ++x) out.push_back(combined_site(x, Leg::A, cells));
  for (std::size_t x = 1; x <= cells / 2; ++x) out.push_back(combined_site(x, Leg::B, cells));
  return out;
}

double entanglement_entropy(StateRef state, const Basis& basis,
                            std::span<const SiteIndex> subset) {
  check_state(state, basis);
  const std::size_t m = basis.sites();
  std::vector<char> in_subset(m, 0);
  for (SiteIndex s : subset) {
    if (s.value >= m) throw Error(ErrorKind::InvalidArgument, "subset site out of range");
    if (in_subset[s.value]) throw Error(ErrorKind::InvalidArgument, "duplicate subset site");
    in_subset[s.value] = 1;
  }
  if (subset.empty() || subset.size() == m) {
    throw Error(ErrorKind::InvalidArgument, "subset must be nonempty and proper");
  }
  const double norm = state.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero state vector");

  // Schmidt matrix per subset particle number: rows index subset
  // configurations, columns complement configurations.
  struct Block {
    std::map<std::vector<Occupation>, Eigen::Index> rows;
    std::map<std::vector<Occupation>, Eigen::Index> cols;
    std::vector<std::tuple<Eigen::Index, Eigen::Index, std::complex<double>>> entries;
  };
  std::map<std::size_t, Block> blocks;
  const bool fermions = basis.statistics() == Statistics::Fermion;
  std::vector<Occupation> sub, comp;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const std::complex<double> amp = state(static_cast<Eigen::Index>(i));
    if (amp == 0.0) continue;
    const auto occ = basis.occupations(i);
    sub.clear();
    comp.clear();
    std::size_t n_sub = 0;
    int crossings = 0;
    int comp_seen = 0;
    for (std::size_t s = 0; s < m; ++s) {
      if (in_subset[s]) {
        sub.push_back(occ[s]);
        n_sub += occ[s];
        if (occ[s]) crossings += comp_seen;
      } else {
        comp.push_back(occ[s]);
        comp_seen += occ[s];
      }
    }
    const double sign = (fermions && (crossings % 2)) ? -1.0 : 1.0;
    Block& block = blocks[n_sub];
    const auto r = block.rows.try_emplace(sub, static_cast<Eigen::Index>(block.rows.size()));
    const auto c = block.cols.try_emplace(comp, static_cast<Eigen::Index>(block.cols.size()));
    block.entries.emplace_back(r.first->second, c.first->second, sign * amp / norm);
  }

  double entropy = 0.0;
  for (auto& [n_sub, block] : blocks) {
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(block.rows.size()),
                                                  static_cast<Eigen::Index>(block.cols.size()));
    for (const auto& [r, c, v] : block.entries) psi(r, c) += v;
    const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXcd>(psi).singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      const double p = sv(k) * sv(k);
      if (p > 1e-14) entropy -= p * std::log(p);
    }
  }
  return std::max(entropy, 0.0);
}

StateObservables compute_state_observables(StateRef state, const Basis& basis) {
  StateObservables out;
  out.density = site_density(state, basis);
  const std::size_t cells = basis.cells();
  const double n = static_cast<double>(basis.particles());
  const double na = std::accumulate(out.density.begin(), out.density.begin() + cells, 0.0);
  out.polarization = (2.0 * na - n) / n;
  out.leg_a_fraction = na / n;
  double left = 0.0;
  for (std::size_t x = 0; x < cells / 2; ++x) left += out.density[x] + out.density[cells + x];
  out.left_half_fraction = left / n;
  out.ncor = std::numeric_limits<double>::quiet_NaN();
  if (basis.particles() >= 2) out.pair_density = pair_density(state, basis);
  if (basis.particles() == 2) out.ncor = correlation_ncor(state, basis);
  const auto leg_a = leg_sites(cells, Leg::A);
  out.entropy_ab = entanglement_entropy(state, basis, leg_a);
  if (cells >= 2) {
    const auto left_sites = left_half_sites(cells);
    out.entropy_leftright = entanglement_entropy(state, basis, left_sites);
  }
  return out;
}

StateSummary summarize_state(StateRef state, const Basis& basis) {
  const Eigen::VectorXd w = weights(state, basis);
  const std::size_t cells = basis.cells();
  const std::size_t m = basis.sites();
  const double n = static_cast<double>(basis.particles());
  const std::size_t edge = edge_cells(cells, 0.25);
  std::vector<double> density(m, 0.0);
  Eigen::MatrixXd gamma;
  const bool two = basis.particles() == 2;
  if (two) gamma = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  double bound = 0.0;
  std::size_t occupied[2];
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const double wi = w(i);
    if (wi == 0.0) continue;
    const auto occ = basis.occupations(i);
    std::size_t k = 0;
    for (std::size_t s = 0; s < m; ++s) {
      if (!occ[s]) continue;
      density[s] += wi * occ[s];
      if (two) occupied[k++] = s;
    }
    if (two) {
      if (k == 1) {
        const auto s = static_cast<Eigen::Index>(occupied[0]);
        gamma(s, s) += 2.0 * wi;  // n (n - 1) with n = 2
      } else {
        const auto a = static_cast<Eigen::Index>(occupied[0]);
        const auto b = static_cast<Eigen::Index>(occupied[1]);
        gamma(a, b) += wi;
        gamma(b, a) += wi;
      }
    }
    if (has_bound_pair(occ, basis.statistics())) bound += wi;
  }
  StateSummary out;
  double na = 0.0, left = 0.0, left_edge = 0.0, right_edge = 0.0;
  for (std::size_t x = 0; x < cells; ++x) {
    const double cell = density[x] + density[cells + x];
    na += density[x];
    if (x < cells / 2) left += cell;
    if (x < edge) left_edge += cell;
    if (x >= cells - edge) right_edge += cell;
  }
  out.polarization = (2.0 * na - n) / n;
  out.leg_a_fraction = na / n;
  out.left_half_fraction = left / n;
  out.left_edge_fraction = left_edge / n;
  out.right_edge_fraction = right_edge / n;
  out.pair_weight = bound;
  out.ncor = two ? ncor_from_gamma(gamma) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::vector<StateSummary> summarize_states_serial(const SpectrumResult& result,
                                                  const Basis& basis) {
  if (!result.has_vectors()) throw Error(ErrorKind::InvalidArgument, "spectrum has no vectors");
  std::vector<StateSummary> out(result.size());
  for (std::size_t k = 0; k < result.size(); ++k) {
    out[k] = summarize_state(result.right_eigenvectors.col(static_cast<Eigen::Index>(k)), basis);
  }
  return out;
}

std::vector<StateSummary> summarize_states(const SpectrumResult& result, const Basis& basis,
                                           int workers) {
  if (!result.has_vectors()) throw Error(ErrorKind::InvalidArgument, "spectrum has no vectors");
  const auto count = static_cast<std::ptrdiff_t>(result.size());
  std::vector<StateSummary> out(result.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] =
        summarize_state(result.right_eigenvectors.col(static_cast<Eigen::Index>(k)), basis);
  }
  return out;
}

const char* to_string(ClusterLabel label) noexcept {
  switch (label) {
    case ClusterLabel::RS: return "RS";
    case ClusterLabel::BiS: return "BiS";
    case ClusterLabel::LS: return "LS";
    case ClusterLabel::RB: return "RB";
    case ClusterLabel::BiB: return "BiB";
    case ClusterLabel::LB: return "LB";
    case ClusterLabel::Mixed: return "mixed";
    case ClusterLabel::Unclassified: return "unclassified";
  }
  return "unclassified";
}

double Cluster::centroid(const Eigen::VectorXcd& eigenvalues) const {
  double sum = 0.0;
  for (std::size_t k : members) sum += eigenvalues(static_cast<Eigen::Index>(k)).real();
  return members.empty() ? 0.0 : sum / static_cast<double>(members.size());
}

ClusterOptions ClusterOptions::for_params(const ModelParams& params) {
  ClusterOptions options;
  options.min_gap = 0.1 * std::max(std::abs(params.j_left_a), std::abs(params.j_right_a));
  return options;
}

std::vector<Cluster> cluster_spectrum(const Eigen::VectorXcd& eigenvalues, double gap_factor,
                                      double min_gap) {
  const auto n = static_cast<std::size_t>(eigenvalues.size());
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty spectrum");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ea = eigenvalues(static_cast<Eigen::Index>(a));
    const auto eb = eigenvalues(static_cast<Eigen::Index>(b));
    return ea.real() != eb.real() ? ea.real() < eb.real() : ea.imag() < eb.imag();
  });
  auto re = [&](std::size_t k) { return eigenvalues(static_cast<Eigen::Index>(order[k])).real(); };

  double threshold = min_gap;
  if (n > 1) {
    std::vector<double> gaps(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) gaps[k] = re(k + 1) - re(k);
    std::vector<double> sorted = gaps;
    const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    double median = *mid;
    if (sorted.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(sorted.begin(), mid));
    }
    threshold = std::max(min_gap, gap_factor * median);
  }

  std::vector<Cluster> clusters;
  Cluster current;
  auto close = [&]() {
    const auto& mem = current.members;
    current.re_min = eigenvalues(static_cast<Eigen::Index>(mem.front())).real();
    current.re_max = eigenvalues(static_cast<Eigen::Index>(mem.back())).real();
    current.max_im = -std::numeric_limits<double>::infinity();
    for (std::size_t k : mem) {
      const double im = eigenvalues(static_cast<Eigen::Index>(k)).imag();
      if (im > current.max_im) {
        current.max_im = im;
        current.max_im_member = k;
      }
    }
    clusters.push_back(std::move(current));
    current = Cluster{};
  };
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && re(k) - re(k - 1) > threshold) close();
    current.members.push_back(order[k]);
  }
  close();
  return clusters;
}

ClusterLabel classify_cluster(const Cluster& cluster, std::span<const StateSummary> summaries,
                              const ClassifyOptions& options) {
  if (cluster.members.empty()) return ClusterLabel::Unclassified;
  for (std::size_t k : cluster.members) {
    if (k >= summaries.size()) throw Error(ErrorKind::Mismatch, "cluster member without summary");
  }
  double ncor = 0.0, left = 0.0, right = 0.0;
  if (cluster.max_im > options.eps_im) {
    const auto& s = summaries[cluster.max_im_member];
    ncor = s.ncor;
    left = s.left_edge_fraction;
    right = s.right_edge_fraction;
  } else {
    for (std::size_t k : cluster.members) {
      ncor += summaries[k].ncor;
      left += summaries[k].left_edge_fraction;
      right += summaries[k].right_edge_fraction;
    }
    const auto count = static_cast<double>(cluster.members.size());
    ncor /= count;
    left /= count;
    right /= count;
  }
  if (!std::isfinite(ncor)) return ClusterLabel::Unclassified;

  const double eps = options.dead_zone;
  enum class Character { Scattering, Bound } character;
  if (ncor < -eps) {
    character = Character::Scattering;
  } else if (ncor > 2.0 + eps) {
    character = Character::Bound;
  } else if (ncor > 0.0 && ncor < 2.0 - eps) {
    return ClusterLabel::Mixed;
  } else {
    return ClusterLabel::Unclassified;
  }

  const bool scattering = character == Character::Scattering;
  if (left >= options.bipolar_edge_share && right >= options.bipolar_edge_share) {
    return scattering ? ClusterLabel::BiS : ClusterLabel::BiB;
  }
  if (left >= options.single_edge_share) return scattering ? ClusterLabel::LS : ClusterLabel::LB;
  if (right >= options.single_edge_share) return scattering ? ClusterLabel::RS : ClusterLabel::RB;
  return ClusterLabel::Unclassified;
}

}  // namespace nhse
