#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nhse/eig.hpp"
#include "nhse/model.hpp"
#include "nhse/observables.hpp"

namespace nhse {

enum class SweepParameter { Jp, Mu, U, Unn, Cells, JLeft, JRight, Alpha, J };

const char* to_string(SweepParameter p) noexcept;
SweepParameter parse_sweep_parameter(const std::string& name);

/// Sets one parameter on `params`. jl/jr set leg A and mirror it onto leg B;
/// alpha keeps J = sqrt(jl jr) of leg A fixed, j keeps alpha fixed.
void apply_parameter(ModelParams& params, SweepParameter parameter, double value);

/// Linearly spaced axis, endpoints included.
struct SweepAxis {
  SweepParameter parameter = SweepParameter::Jp;
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 2;

  std::vector<double> values() const;
};

/// "name:min:max:points", e.g. "jp:0:0.05:11".
SweepAxis parse_axis(const std::string& text);
std::string to_string(const SweepAxis& axis);

/// Which eigenvalues a Im E diagnostic looks at.
///   All          whole spectrum
///   Scattering   clusters whose mean pair weight is below 0.5
///   Bound        clusters whose mean pair weight is at least 0.5
///   Index        k-th cluster in ascending Re E
///   Near         cluster holding the eigenvalue closest to `energy`
///   Window       eigenvalues with lo <= Re E <= hi
struct ClusterSelector {
  enum class Kind { All, Scattering, Bound, Index, Near, Window };
  Kind kind = Kind::All;
  std::size_t index = 0;
  double energy = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  bool needs_vectors() const noexcept { return kind == Kind::Scattering || kind == Kind::Bound; }
};

/// "all", "scattering", "bound", "index:K", "near:E", "window:LO:HI".
ClusterSelector parse_selector(const std::string& text);
std::string to_string(const ClusterSelector& selector);

/// Eigenpair indices picked by the selector. Throws ErrorKind::NoState when
/// nothing matches. `summaries` may be empty unless the selector needs them.
std::vector<std::size_t> select_members(const ClusterSelector& selector,
                                        const Eigen::VectorXcd& eigenvalues,
                                        const std::vector<Cluster>& clusters,
                                        std::span<const StateSummary> summaries);

/// Member with the largest Im E (lowest index on ties).
std::size_t max_imag_member(const Eigen::VectorXcd& eigenvalues,
                            std::span<const std::size_t> members);

struct SelectedImag {
  double max_im = 0.0;
  double matrix_norm = 0.0;
  std::size_t dimension = 0;
};

/// Assembles, diagonalises and returns the largest Im E among selected states.
SelectedImag selected_max_imag(const ModelParams& params, const ClusterSelector& selector,
                               const EigenOptions& eig = {});

struct ThresholdOptions {
  double lo = 0.0;
  double hi = 1.0;
  double resolution = 1e-4;
  double eps_im = 0.0;  ///< 0 selects default_eps_im of ||H|| at hi
  std::size_t scan_points = 5;
  std::size_t fallback_points = 33;
  int workers = 0;
  EigenOptions eig{.compute_vectors = false};
};

struct ThresholdResult {
  double jp_star = 0.0;  ///< upper end of the final bracket
  double lo = 0.0;
  double hi = 0.0;
  double eps_im = 0.0;
  std::size_t evaluations = 0;
  bool used_fallback = false;  ///< coarse scan was not monotone
};

/// Smallest J_p with selected max Im E > eps_im, to within `resolution`.
/// A coarse scan checks monotonicity before bisection; when it fails the
/// first crossing of a finer scan is bisected instead. Throws
/// ErrorKind::BracketInvalid when the end points do not straddle eps_im.
ThresholdResult find_threshold_jp(const ModelParams& params, const ClusterSelector& selector,
                                  const ThresholdOptions& options);

enum class SweepObservable {
  MaxImGlobal,
  MaxImPerCluster,
  NcorOfMaxIm,
  Polarization,
  Entropies,
  Threshold
};

const char* to_string(SweepObservable o) noexcept;
SweepObservable parse_sweep_observable(const std::string& name);

struct SweepSpec {
  ModelParams base;
  std::vector<SweepAxis> axes;  ///< one or two; the last varies fastest
  std::vector<SweepObservable> observables{SweepObservable::MaxImGlobal};
  ClusterSelector selector;
  double gap_factor = 10.0;
  double min_gap = 0.0;  ///< 0 selects ClusterOptions::for_params
  double eps_im = 0.0;   ///< 0 selects default_eps_im per point
  EigenOptions eig;
  ThresholdOptions threshold;

  bool wants(SweepObservable o) const;
  void validate() const;
};

struct ClusterTrace {
  int track = -1;  ///< stable id across rows, assigned by tracking
  double centroid = 0.0;
  double max_im = 0.0;
  std::size_t size = 0;
  ClusterLabel label = ClusterLabel::Unclassified;
};

/// One grid point. Quantities that were not requested or not computable are
/// NaN; a failed point carries its error tag and NaN everywhere.
struct SweepRow {
  std::vector<double> coords;
  std::size_t dimension = 0;
  double eps_im = 0.0;
  double max_im_global = 0.0;
  double selected_max_im = 0.0;
  double ncor = 0.0;
  double polarization = 0.0;
  double entropy_ab = 0.0;
  double entropy_left = 0.0;
  double threshold = 0.0;
  std::vector<ClusterTrace> clusters;
  std::string error;
};

struct SweepTable {
  std::vector<SweepRow> rows;  ///< row-major over the axes
};

/// Grid points evaluated OpenMP-parallel, then clusters tracked serially.
SweepTable run_sweep(const SweepSpec& spec, int workers = 0);
/// Single-threaded reference; identical output to run_sweep.
SweepTable run_sweep_serial(const SweepSpec& spec);

/// Evaluates one point (used by both sweep drivers).
SweepRow evaluate_point(const SweepSpec& spec, const std::vector<double>& coords);

/// Links clusters of consecutive rows by nearest centroid in Re E.
void track_clusters(SweepTable& table);

struct OnsiteClass {
  int interactions = 0;  ///< sum n(n-1)/2, or occupied same-leg neighbour pairs for fermions
  int imbalance = 0;     ///< N_A - N_B
  std::size_t population = 0;
  std::string example;   ///< lowest-index configuration in the class

  /// coupling * interactions + mu * imbalance.
  double energy(double mu, double coupling) const {
    return coupling * interactions + mu * imbalance;
  }
};

struct OnsiteCrossing {
  std::size_t first = 0;   ///< indices into OnsiteTable::classes
  std::size_t second = 0;
  double mu = 0.0;
  double energy = 0.0;
  int order = 0;  ///< particles that must change leg, |delta imbalance| / 2
};

struct OnsiteTable {
  double coupling = 0.0;  ///< U for bosons, U_NN for fermions
  std::vector<OnsiteClass> classes;
  std::vector<OnsiteCrossing> crossings;  ///< sorted by mu, then class indices
};

/// Diagonal-energy classes of the basis and their pairwise crossings with
/// mu_min <= mu <= mu_max. Requires N <= 4.
OnsiteTable eonsite_table(const ModelParams& params, double mu_min, double mu_max);

}  // namespace nhse
