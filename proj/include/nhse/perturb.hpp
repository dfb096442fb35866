#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nhse/model.hpp"

namespace nhse {

/// How the 2L x 2L pair Hamiltonian is filled.
///
/// Printed: closed-form coefficients with the sqrt(2) prefactors
///   diagonal     U +- 2mu + sqrt2 Jp^2/U + 2 sqrt2 JL JR/U
///   intra-leg    sqrt2 JL^2/U (pair moves left), sqrt2 JR^2/U (moves right)
///   inter-leg    sqrt2 Jp^2 [1/(U+2mu) + 1/(U-2mu)]
/// SecondOrder: Schrieffer-Wolff projection of the full N = 2 Hamiltonian
/// onto the doubly occupied sites, evaluated numerically.
enum class PairCoefficients { Printed, SecondOrder };

const char* to_string(PairCoefficients c) noexcept;
PairCoefficients parse_pair_coefficients(const std::string& text);

struct EffectivePairModel {
  SparseOperator matrix;    ///< pair on cell x of leg A is row x-1, leg B is L+x-1
  double interleg = 0.0;    ///< (x,A) <-> (x,B) element
  double shift = 0.0;       ///< E0 = U
};

/// Requires bosons, U != 0 and |U -+ 2mu| >= 1e-6 |U| (ErrorKind::Resonance).
EffectivePairModel build_effective_pair_model(const ModelParams& params,
                                              PairCoefficients coefficients =
                                                  PairCoefficients::Printed);

struct DeviationReport {
  ModelParams params;
  PairCoefficients coefficients = PairCoefficients::Printed;
  std::vector<std::complex<double>> full_eigs;  ///< bound clusters of the full model
  std::vector<std::complex<double>> eff_eigs;
  double max_dev = 0.0;
  double max_dev_doubled = 0.0;  ///< same comparison at 2U
  double ratio = 0.0;            ///< max_dev / max_dev_doubled
};

/// Full N = 2 bound-cluster spectrum vs the effective model, both sorted
/// lexicographically by (Re, Im). Clusters with mean pair weight >= 0.5 count
/// as bound; they must hold exactly 2L states or ErrorKind::NotIsolable is
/// raised. Only max_dev, full_eigs and eff_eigs are filled.
DeviationReport compare_bound_cluster(const ModelParams& params, PairCoefficients coefficients);

/// compare_bound_cluster at U and at 2U, with the ratio of the two deviations.
DeviationReport validate_effective_model(const ModelParams& params,
                                         PairCoefficients coefficients =
                                             PairCoefficients::Printed);

}  // namespace nhse
