#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nhse/cli/config.hpp"
#include "nhse/errors.hpp"

namespace nhse::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,   ///< anything not listed below
  kExitConfig = 2,    ///< bad config file, flag or parameter
  kExitCapacity = 3,  ///< basis or dense-solver size cap exceeded
  kExitSolver = 4,    ///< eigensolver did not converge or failed verification
  kExitAnalysis = 5,  ///< no matching state, invalid bracket, resonance, bound cluster not isolable
};

int exit_code_for(ErrorKind kind) noexcept;

const std::vector<std::string>& command_names();

/// Runs one subcommand. Data files go under `config.out` (created if
/// needed), each run also writing `<command>.json` with the canonical
/// config and run metadata. `summary` receives a short human-readable report.
///
///   spectrum   spectrum.csv  index,re_e,im_e,polarization,ncor,cluster_id,cluster_label,residual
///   density    density.csv   site,cell,leg,value; pair_density.csv x1,x2,value (N >= 2)
///   ncor       gamma.csv     x1,x2,value (N = 2)
///   entropy    entropy.json  only
///   sweep      sweep.csv; clusters.csv with max_im_per_cluster
///   threshold  threshold.json only
///   effective  effective_matrix.csv row,col,value
///   eonsite    onsite_classes.csv, onsite_crossings.csv
///
/// Throws nhse::Error; map it with exit_code_for.
void run_command(const std::string& name, const RunConfig& config, std::ostream& summary);

}  // namespace nhse::cli
