#include "nhse/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nhse/eig.hpp"
#include "nhse/errors.hpp"
#include "nhse/fock.hpp"
#include "nhse/observables.hpp"

namespace nhse {

namespace {

constexpr double kResonanceTolerance = 1e-6;

void check_effective_params(const ModelParams& params) {
  params.validate();
  if (params.statistics != Statistics::Boson) {
    throw Error(ErrorKind::InvalidArgument, "effective pair model is bosonic");
  }
  if (params.u == 0.0) throw Error(ErrorKind::InvalidArgument, "effective pair model needs U != 0");
  const double scale = kResonanceTolerance * std::abs(params.u);
  if (std::abs(params.u - 2.0 * params.mu) < scale || std::abs(params.u + 2.0 * params.mu) < scale) {
    throw Error(ErrorKind::Resonance, "U -+ 2mu vanishes; second-order denominators diverge");
  }
}

ModelParams pair_sector(ModelParams params) {
  params.particles = 2;
  return params;
}

double interleg_coupling(const ModelParams& p) {
  return std::sqrt(2.0) * p.j_p * p.j_p * (1.0 / (p.u + 2.0 * p.mu) + 1.0 / (p.u - 2.0 * p.mu));
}

SparseOperator printed_matrix(const ModelParams& p) {
  const std::size_t cells = p.cells;
  const double s2 = std::sqrt(2.0);
  const double jl[2] = {p.j_left_a, p.j_left_b};
  const double jr[2] = {p.j_right_a, p.j_right_b};
  const double leg_shift[2] = {2.0 * p.mu, -2.0 * p.mu};
  const double tp = interleg_coupling(p);
  std::vector<MatrixEntry> entries;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const std::size_t off = leg * cells;
    const double diag =
        p.u + leg_shift[leg] + s2 * p.j_p * p.j_p / p.u + 2.0 * s2 * jl[leg] * jr[leg] / p.u;
    for (std::size_t x = 0; x < cells; ++x) {
      entries.push_back({off + x, off + x, diag});
      if (x + 1 < cells) {
        entries.push_back({off + x, off + x + 1, s2 * jl[leg] * jl[leg] / p.u});
        entries.push_back({off + x + 1, off + x, s2 * jr[leg] * jr[leg] / p.u});
      }
    }
  }
  for (std::size_t x = 0; x < cells; ++x) {
    entries.push_back({x, cells + x, tp});
    entries.push_back({cells + x, x, tp});
  }
  std::erase_if(entries, [](const MatrixEntry& e) { return e.value == 0.0; });
  return SparseOperator(2 * cells, std::move(entries));
}

// H_eff(i,j) = E_i delta_ij + sum_m V_im V_mj (1/(E_i-E_m) + 1/(E_j-E_m)) / 2
// over non-doublon states m, with V the off-diagonal part of H.
SparseOperator second_order_matrix(const ModelParams& p) {
  const ModelParams params = pair_sector(p);
  const Basis basis = Basis::enumerate(params.cells, 2, Statistics::Boson);
  const SparseOperator h = build_hamiltonian_serial(params, basis);
  const Eigen::MatrixXd dense = h.to_dense_real();
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  const std::size_t sites = basis.sites();

  std::vector<Eigen::Index> pair_state(sites);
  std::vector<char> is_pair(basis.dimension(), 0);
  for (std::size_t s = 0; s < sites; ++s) {
    std::vector<Occupation> occ(sites, 0);
    occ[s] = 2;
    pair_state[s] = static_cast<Eigen::Index>(basis.index_of(std::span<const Occupation>(occ)));
    is_pair[static_cast<std::size_t>(pair_state[s])] = 1;
  }

  for (std::size_t a = 0; a < sites; ++a) {
    for (std::size_t b = 0; b < sites; ++b) {
      if (a != b && dense(pair_state[a], pair_state[b]) != 0.0) {
        throw Error(ErrorKind::InvalidArgument, "first-order coupling inside the pair subspace");
      }
    }
  }

  const double guard = kResonanceTolerance * std::abs(p.u);
  Eigen::MatrixXd eff = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sites),
                                              static_cast<Eigen::Index>(sites));
  for (std::size_t a = 0; a < sites; ++a) {
    const Eigen::Index i = pair_state[a];
    const double ei = dense(i, i);
    eff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += ei;
    for (Eigen::Index m = 0; m < dim; ++m) {
      if (is_pair[static_cast<std::size_t>(m)] || dense(i, m) == 0.0) continue;
      const double em = dense(m, m);
      if (std::abs(ei - em) < guard) {
        throw Error(ErrorKind::Resonance, "intermediate state degenerate with a pair state");
      }
      for (std::size_t b = 0; b < sites; ++b) {
        const Eigen::Index j = pair_state[b];
        const double vmj = dense(m, j);
        if (vmj == 0.0) continue;
        const double ej = dense(j, j);
        if (std::abs(ej - em) < guard) {
          throw Error(ErrorKind::Resonance, "intermediate state degenerate with a pair state");
        }
        eff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            dense(i, m) * vmj * 0.5 * (1.0 / (ei - em) + 1.0 / (ej - em));
      }
    }
  }

  std::vector<MatrixEntry> entries;
  for (Eigen::Index r = 0; r < eff.rows(); ++r) {
    for (Eigen::Index c = 0; c < eff.cols(); ++c) {
      if (eff(r, c) != 0.0) {
        entries.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), eff(r, c)});
      }
    }
  }
  return SparseOperator(sites, std::move(entries));
}

std::vector<std::complex<double>> sorted_lex(std::vector<std::complex<double>> values) {
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return values;
}

}  // namespace

const char* to_string(PairCoefficients c) noexcept {
  return c == PairCoefficients::Printed ? "printed" : "second-order";
}

PairCoefficients parse_pair_coefficients(const std::string& text) {
  if (text == "printed") return PairCoefficients::Printed;
  if (text == "second-order") return PairCoefficients::SecondOrder;
  throw Error(ErrorKind::InvalidArgument,
              "unknown coefficient set '" + text + "' (expected printed or second-order)");
}

EffectivePairModel build_effective_pair_model(const ModelParams& params,
                                              PairCoefficients coefficients) {
  check_effective_params(pair_sector(params));
  EffectivePairModel model;
  model.shift = params.u;
  if (coefficients == PairCoefficients::Printed) {
    model.matrix = printed_matrix(params);
  } else {
    model.matrix = second_order_matrix(params);
  }
  model.interleg = model.matrix.at(0, params.cells).real();
  return model;
}

DeviationReport compare_bound_cluster(const ModelParams& params, PairCoefficients coefficients) {
  const ModelParams full_params = pair_sector(params);
  const EffectivePairModel eff = build_effective_pair_model(full_params, coefficients);

  const Basis basis = Basis::enumerate(full_params.cells, 2, Statistics::Boson);
  const SpectrumResult full = eigendecompose(build_hamiltonian(full_params, basis));
  const auto summaries = summarize_states(full, basis);
  const auto clusters = cluster_spectrum(full, ClusterOptions::for_params(full_params));

  DeviationReport report;
  report.params = full_params;
  report.coefficients = coefficients;
  for (const auto& cluster : clusters) {
    double weight = 0.0;
    for (std::size_t k : cluster.members) weight += summaries[k].pair_weight;
    if (weight / static_cast<double>(cluster.members.size()) < 0.5) continue;
    for (std::size_t k : cluster.members) {
      report.full_eigs.push_back(full.eigenvalues(static_cast<Eigen::Index>(k)));
    }
  }
  const std::size_t expected = 2 * full_params.cells;
  if (report.full_eigs.size() != expected) {
    throw Error(ErrorKind::NotIsolable,
                "bound clusters hold " + std::to_string(report.full_eigs.size()) +
                    " states, expected " + std::to_string(expected));
  }

  const SpectrumResult eff_spectrum = eigendecompose(eff.matrix, {.compute_vectors = false});
  for (Eigen::Index k = 0; k < eff_spectrum.eigenvalues.size(); ++k) {
    report.eff_eigs.push_back(eff_spectrum.eigenvalues(k));
  }
  report.full_eigs = sorted_lex(std::move(report.full_eigs));
  report.eff_eigs = sorted_lex(std::move(report.eff_eigs));
  for (std::size_t k = 0; k < expected; ++k) {
    report.max_dev = std::max(report.max_dev, std::abs(report.full_eigs[k] - report.eff_eigs[k]));
  }
  return report;
}

DeviationReport validate_effective_model(const ModelParams& params,
                                         PairCoefficients coefficients) {
  DeviationReport report = compare_bound_cluster(params, coefficients);
  ModelParams doubled = params;
  doubled.u *= 2.0;
  report.max_dev_doubled = compare_bound_cluster(doubled, coefficients).max_dev;
  report.ratio = report.max_dev_doubled > 0.0 ? report.max_dev / report.max_dev_doubled
                                              : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace nhse
