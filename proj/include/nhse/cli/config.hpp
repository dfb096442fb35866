#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhse/model.hpp"

namespace nhse::cli {

/// Everything one invocation needs. JSON keys (all optional):
///
///   model     cells, particles, stats ("boson" | "fermion"), jp, mu, u, unn
///   hopping   one of: j + alpha | jl + jr (leg B mirrored) |
///             j_left_a + j_right_a + j_left_b + j_right_b
///   run       out, workers, eps_im, tol, gap_factor, min_gap
///   state     selector, index
///   sweep     axes (["jp:0:0.05:11", ...]), observables ([...])
///   threshold lo, hi, resolution, scan_points, fallback_points
///   effective coefficients ("printed" | "second-order"), validate
///   eonsite   mu_min, mu_max
///
/// Unknown keys are rejected. A provenance sidecar ({"config": ...,
/// "metadata": ...}) is accepted in place of a bare config.
struct RunConfig {
  ModelParams params;
  std::filesystem::path out = ".";
  int workers = 0;
  double eps_im = 0.0;  ///< 0 means max(1e-9, 1e-12 ||H||)
  double tol = 1e-9;
  double gap_factor = 10.0;
  double min_gap = 0.0;  ///< 0 means 0.1 max(|jl_A|, |jr_A|)
  std::string selector = "all";
  std::optional<std::size_t> index;
  std::vector<std::string> axes;
  std::vector<std::string> observables{"max_im_global"};
  double lo = 0.0;
  double hi = 1.0;
  double resolution = 1e-4;
  std::size_t scan_points = 5;
  std::size_t fallback_points = 33;
  std::string coefficients = "printed";
  bool validate = true;
  double mu_min = -10.0;
  double mu_max = 10.0;
};

/// Throws Error(ErrorKind::Config) on unknown keys, bad types, conflicting
/// hopping forms or parameters that fail ModelParams::validate.
RunConfig config_from_json(const nlohmann::json& json);

/// Canonical form (four hopping amplitudes); config_from_json inverts it.
nlohmann::json config_to_json(const RunConfig& config);

/// Reads a config or sidecar file.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Overlays `overrides` on `base`. A hopping key in the overrides drops the
/// base's keys of the other hopping forms, so the forms never mix.
nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overrides);

}  // namespace nhse::cli
