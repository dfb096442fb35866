// Command-line front end: nhse <command> [--config file] [overrides...]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhse/cli/commands.hpp"
#include "nhse/cli/config.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::size_t> cells, particles, index, scan_points, fallback_points;
  std::optional<std::string> stats, out, selector, coefficients;
  std::optional<double> jl, jr, j, alpha, jp, mu, u, unn, eps_im, tol, gap_factor, min_gap;
  std::optional<double> lo, hi, resolution, mu_min, mu_max;
  std::optional<int> workers;
  std::vector<std::string> axes, observables;
  bool no_validate = false;
};

void add_model_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON run config or provenance sidecar");
  app.add_option("--cells", f.cells, "Number of cells L per leg");
  app.add_option("--particles", f.particles, "Particle number N");
  app.add_option("--stats", f.stats, "boson or fermion");
  app.add_option("--jl", f.jl, "Leftward hopping on leg A (mirrored onto leg B)");
  app.add_option("--jr", f.jr, "Rightward hopping on leg A (mirrored onto leg B)");
  app.add_option("--j", f.j, "Hopping scale J (with --alpha)");
  app.add_option("--alpha", f.alpha, "Non-reciprocity alpha (with --j)");
  app.add_option("--jp", f.jp, "Inter-leg coupling");
  app.add_option("--mu", f.mu, "Leg potential (+mu on A, -mu on B)");
  app.add_option("--u", f.u, "Onsite interaction (bosons)");
  app.add_option("--unn", f.unn, "Nearest-neighbour interaction (fermions)");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--workers", f.workers, "Thread cap (0 = all cores)");
  app.add_option("--eps-im", f.eps_im, "Reality threshold for Im E (default scales with ||H||)");
  app.add_option("--tol", f.tol, "Eigen-residual tolerance relative to ||H||");
  app.add_option("--gap-factor", f.gap_factor, "Cluster split: gap > factor * median gap");
  app.add_option("--min-gap", f.min_gap, "Cluster split: minimum absolute gap");
}

void add_state_flags(CLI::App& app, Flags& f) {
  app.add_option("--selector", f.selector,
                 "all | scattering | bound | index:K | near:E | window:LO:HI");
  app.add_option("--index", f.index, "Eigenpair index (as in spectrum.csv)");
}

void add_threshold_flags(CLI::App& app, Flags& f) {
  app.add_option("--lo", f.lo, "Lower end of the J_p bracket");
  app.add_option("--hi", f.hi, "Upper end of the J_p bracket");
  app.add_option("--resolution", f.resolution, "Bracket width at which bisection stops");
  app.add_option("--scan-points", f.scan_points, "Monotonicity scan points");
  app.add_option("--fallback-points", f.fallback_points, "Fine scan points when not monotone");
}

json overrides(const Flags& f) {
  json o = json::object();
  auto put = [&](const char* key, const auto& value) {
    if (value) o[key] = *value;
  };
  put("cells", f.cells);
  put("particles", f.particles);
  put("stats", f.stats);
  put("jl", f.jl);
  put("jr", f.jr);
  put("j", f.j);
  put("alpha", f.alpha);
  put("jp", f.jp);
  put("mu", f.mu);
  put("u", f.u);
  put("unn", f.unn);
  put("out", f.out);
  put("workers", f.workers);
  put("eps_im", f.eps_im);
  put("tol", f.tol);
  put("gap_factor", f.gap_factor);
  put("min_gap", f.min_gap);
  put("selector", f.selector);
  put("index", f.index);
  put("lo", f.lo);
  put("hi", f.hi);
  put("resolution", f.resolution);
  put("scan_points", f.scan_points);
  put("fallback_points", f.fallback_points);
  put("coefficients", f.coefficients);
  put("mu_min", f.mu_min);
  put("mu_max", f.mu_max);
  if (!f.axes.empty()) o["axes"] = f.axes;
  if (!f.observables.empty()) o["observables"] = f.observables;
  if (f.no_validate) o["validate"] = false;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = nhse::cli;
  CLI::App app{"Exact diagonalisation of the interacting non-reciprocal two-leg ladder"};
  app.require_subcommand(1);
  Flags flags;

  const std::map<std::string, std::string> help = {
      {"spectrum", "Full spectrum with polarisation, N_cor and cluster labels"},
      {"density", "Site and pair density of one eigenstate"},
      {"ncor", "Pair correlation matrix and N_cor of one eigenstate (N = 2)"},
      {"entropy", "Leg and left-right entanglement entropies of one eigenstate"},
      {"sweep", "Grid over one or two parameters"},
      {"threshold", "Smallest J_p with complex eigenvalues in the selected states"},
      {"effective", "Effective bound-pair model and its deviation from the full model"},
      {"eonsite", "Diagonal-energy classes and their crossings in mu"},
  };
  for (const auto& name : cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_model_flags(*sub, flags);
    if (name == "density" || name == "ncor" || name == "entropy") add_state_flags(*sub, flags);
    if (name == "sweep") {
      sub->add_option("--axis", flags.axes, "name:min:max:points (repeat for a second axis)");
      sub->add_option("--observables", flags.observables,
                      "max_im_global max_im_per_cluster ncor_of_max_im_state polarization "
                      "entropies threshold")
          ->delimiter(',');
      sub->add_option("--selector", flags.selector, "Selector for the selected_max_im column");
      add_threshold_flags(*sub, flags);
    }
    if (name == "threshold") {
      sub->add_option("--selector", flags.selector, "Which eigenvalues must turn complex");
      add_threshold_flags(*sub, flags);
    }
    if (name == "effective") {
      sub->add_option("--coefficients", flags.coefficients, "printed | second-order");
      sub->add_flag("--no-validate", flags.no_validate, "Skip the comparison with the full model");
    }
    if (name == "eonsite") {
      sub->add_option("--mu-min", flags.mu_min, "Lower end of the mu range");
      sub->add_option("--mu-max", flags.mu_max, "Upper end of the mu range");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    json base = flags.config.empty() ? json::object() : cli::read_config_file(flags.config);
    const cli::RunConfig config = cli::config_from_json(cli::merge_config(base, overrides(flags)));
    cli::run_command(command, config, std::cout);
  } catch (const nhse::Error& e) {
    std::cerr << "nhse " << command << ": " << nhse::to_string(e.kind()) << ": " << e.what()
              << "\n";
    return cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "nhse " << command << ": " << e.what() << "\n";
    return cli::kExitFailure;
  }
  return cli::kExitOk;
}
