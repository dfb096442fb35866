#include "nhse/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

#include "nhse/cli/output.hpp"
#include "nhse/eig.hpp"
#include "nhse/observables.hpp"
#include "nhse/perturb.hpp"
#include "nhse/sweep.hpp"

namespace nhse::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Solved {
  Basis basis;
  SpectrumResult spectrum;
  std::vector<Cluster> clusters;
  std::vector<StateSummary> summaries;
  double eps_im = 0.0;
  json timings;
};

ClusterOptions cluster_options(const RunConfig& c) {
  ClusterOptions options = ClusterOptions::for_params(c.params);
  options.gap_factor = c.gap_factor;
  if (c.min_gap > 0.0) options.min_gap = c.min_gap;
  return options;
}

Solved solve(const RunConfig& c) {
  const auto& p = c.params;
  auto t0 = Clock::now();
  Basis basis = Basis::enumerate(p.cells, p.particles, p.statistics, basis_capacity_from_env());
  const double t_basis = seconds_since(t0);
  t0 = Clock::now();
  const SparseOperator h = build_hamiltonian(p, basis, c.workers);
  const double t_assembly = seconds_since(t0);
  t0 = Clock::now();
  EigenOptions eig;
  eig.tol = c.tol;
  SpectrumResult spectrum = eigendecompose(h, eig);
  const double t_eig = seconds_since(t0);
  t0 = Clock::now();
  auto summaries = summarize_states(spectrum, basis, c.workers);
  auto clusters = cluster_spectrum(spectrum, cluster_options(c));
  const double eps = c.eps_im > 0.0 ? c.eps_im : default_eps_im(spectrum.matrix_norm);
  ClassifyOptions classify;
  classify.eps_im = eps;
  for (auto& cluster : clusters) cluster.label = classify_cluster(cluster, summaries, classify);
  const double t_obs = seconds_since(t0);
  return Solved{std::move(basis), std::move(spectrum), std::move(clusters), std::move(summaries),
                eps,
                json{{"basis_s", t_basis},
                     {"assembly_s", t_assembly},
                     {"eigensolver_s", t_eig},
                     {"observables_s", t_obs}}};
}

std::size_t pick_state(const RunConfig& c, const Solved& s) {
  if (c.index) {
    if (*c.index >= s.spectrum.size()) {
      throw Error(ErrorKind::NoState, "state index " + std::to_string(*c.index) +
                                          " out of range (dimension " +
                                          std::to_string(s.spectrum.size()) + ")");
    }
    return *c.index;
  }
  const auto members = select_members(parse_selector(c.selector), s.spectrum.eigenvalues,
                                      s.clusters, s.summaries);
  return max_imag_member(s.spectrum.eigenvalues, members);
}

json state_metadata(const Solved& s, std::size_t k) {
  const auto e = s.spectrum.eigenvalues(static_cast<Eigen::Index>(k));
  return {{"index", k}, {"re_e", e.real()}, {"im_e", e.imag()}, {"residual", s.spectrum.residuals[k]}};
}

json base_metadata(const Solved& s) {
  return {{"dimension", s.basis.dimension()},
          {"matrix_norm", s.spectrum.matrix_norm},
          {"eps_im", s.eps_im},
          {"max_im", max_imag(s.spectrum)},
          {"is_real", is_spectrum_real(s.spectrum, s.eps_im)},
          {"timings", s.timings}};
}

std::filesystem::path prepare_out(const RunConfig& c) {
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create output directory " + c.out.string());
  return c.out;
}

std::string leg_name(std::size_t site, std::size_t cells) { return site < cells ? "A" : "B"; }

void cmd_spectrum(const RunConfig& c, std::ostream& summary) {
  const auto out = prepare_out(c);
  const Solved s = solve(c);
  std::vector<long long> cluster_of(s.spectrum.size(), -1);
  for (std::size_t id = 0; id < s.clusters.size(); ++id) {
    for (std::size_t k : s.clusters[id].members) cluster_of[k] = static_cast<long long>(id);
  }
  CsvWriter csv(out / "spectrum.csv", {"index", "re_e", "im_e", "polarization", "ncor",
                                        "cluster_id", "cluster_label", "residual"});
  for (std::size_t k = 0; k < s.spectrum.size(); ++k) {
    const auto e = s.spectrum.eigenvalues(static_cast<Eigen::Index>(k));
    csv.field(k).field(e.real()).field(e.imag()).field(s.summaries[k].polarization);
    csv.field(s.summaries[k].ncor).field(cluster_of[k]);
    csv.field(std::string(to_string(s.clusters[static_cast<std::size_t>(cluster_of[k])].label)));
    csv.field(s.spectrum.residuals[k]).end_row();
  }
  json clusters = json::array();
  for (std::size_t id = 0; id < s.clusters.size(); ++id) {
    const auto& cl = s.clusters[id];
    clusters.push_back({{"id", id},
                        {"label", to_string(cl.label)},
                        {"size", cl.members.size()},
                        {"re_min", cl.re_min},
                        {"re_max", cl.re_max},
                        {"max_im", cl.max_im},
                        {"max_im_index", cl.max_im_member}});
  }
  json meta = base_metadata(s);
  meta["clusters"] = clusters;
  write_sidecar(out / "spectrum.json", config_to_json(c), meta);
  summary << "spectrum: dimension " << s.basis.dimension() << ", max Im E "
          << format_number(max_imag(s.spectrum)) << " (eps_im " << format_number(s.eps_im)
          << "), " << s.clusters.size() << " clusters\n";
  for (std::size_t id = 0; id < s.clusters.size(); ++id) {
    const auto& cl = s.clusters[id];
    summary << "  cluster " << id << " [" << format_number(cl.re_min) << ", "
            << format_number(cl.re_max) << "] size " << cl.members.size() << " max Im "
            << format_number(cl.max_im) << " " << to_string(cl.label) << "\n";
  }
}

void cmd_density(const RunConfig& c, std::ostream& summary) {
  const auto out = prepare_out(c);
  const Solved s = solve(c);
  const std::size_t k = pick_state(c, s);
  const auto v = s.spectrum.right_eigenvectors.col(static_cast<Eigen::Index>(k));
  const std::size_t cells = s.basis.cells();
  const auto density = site_density(v, s.basis);
  {
    CsvWriter csv(out / "density.csv", {"site", "cell", "leg", "value"});
    for (std::size_t site = 0; site < density.size(); ++site) {
      csv.field(site).field(site % cells + 1).field(leg_name(site, cells)).field(density[site]);
      csv.end_row();
    }
  }
  if (s.basis.particles() >= 2) {
    const Eigen::MatrixXd rho = pair_density(v, s.basis);
    CsvWriter csv(out / "pair_density.csv", {"x1", "x2", "value"});
    for (Eigen::Index a = 0; a < rho.rows(); ++a) {
      for (Eigen::Index b = 0; b < rho.cols(); ++b) {
        csv.field(static_cast<long long>(a)).field(static_cast<long long>(b)).field(rho(a, b));
        csv.end_row();
      }
    }
  }
  json meta = base_metadata(s);
  meta["state"] = state_metadata(s, k);
  meta["polarization"] = s.summaries[k].polarization;
  write_sidecar(out / "density.json", config_to_json(c), meta);
  summary << "density: state " << k << " E = " << format_number(meta["state"]["re_e"].get<double>())
          << " + " << format_number(meta["state"]["im_e"].get<double>()) << "i, P = "
          << format_number(s.summaries[k].polarization) << "\n";
}

void cmd_ncor(const RunConfig& c, std::ostream& summary) {
  if (c.params.particles != 2) {
    throw Error(ErrorKind::Config, "ncor is defined for particles = 2 only");
  }
  const auto out = prepare_out(c);
  const Solved s = solve(c);
  const std::size_t k = pick_state(c, s);
  const auto v = s.spectrum.right_eigenvectors.col(static_cast<Eigen::Index>(k));
  const Eigen::MatrixXd gamma = pair_correlation(v, s.basis);
  {
    CsvWriter csv(out / "gamma.csv", {"x1", "x2", "value"});
    for (Eigen::Index a = 0; a < gamma.rows(); ++a) {
      for (Eigen::Index b = 0; b < gamma.cols(); ++b) {
        csv.field(static_cast<long long>(a)).field(static_cast<long long>(b)).field(gamma(a, b));
        csv.end_row();
      }
    }
  }
  const double ncor = ncor_from_gamma(gamma);
  json meta = base_metadata(s);
  meta["state"] = state_metadata(s, k);
  meta["ncor"] = ncor;
  meta["ncor_bound"] = 4.0 * (1.0 - 1.0 / static_cast<double>(c.params.cells));
  write_sidecar(out / "ncor.json", config_to_json(c), meta);
  summary << "ncor: state " << k << " N_cor = " << format_number(ncor) << "\n";
}

void cmd_entropy(const RunConfig& c, std::ostream& summary) {
  const auto out = prepare_out(c);
  const Solved s = solve(c);
  const std::size_t k = pick_state(c, s);
  const auto v = s.spectrum.right_eigenvectors.col(static_cast<Eigen::Index>(k));
  const auto obs = compute_state_observables(v, s.basis);
  json meta = base_metadata(s);
  meta["state"] = state_metadata(s, k);
  meta["entropy_ab"] = obs.entropy_ab;
  meta["entropy_left"] = json_number(c.params.cells >= 2 ? obs.entropy_leftright : NAN);
  meta["rho_a_over_n"] = obs.leg_a_fraction;
  meta["rho_left_over_n"] = obs.left_half_fraction;
  meta["n_a"] = obs.leg_a_fraction * static_cast<double>(c.params.particles);
  meta["n_b"] = (1.0 - obs.leg_a_fraction) * static_cast<double>(c.params.particles);
  write_sidecar(out / "entropy.json", config_to_json(c), meta);
  summary << "entropy: state " << k << " S_A = " << format_number(obs.entropy_ab)
          << " S_left = " << format_number(obs.entropy_leftright)
          << " rho_left/N = " << format_number(obs.left_half_fraction) << "\n";
}

SweepSpec sweep_spec(const RunConfig& c) {
  SweepSpec spec;
  spec.base = c.params;
  if (c.axes.empty()) throw Error(ErrorKind::Config, "sweep needs at least one --axis");
  for (const auto& a : c.axes) spec.axes.push_back(parse_axis(a));
  spec.observables.clear();
  for (const auto& o : c.observables) spec.observables.push_back(parse_sweep_observable(o));
  spec.selector = parse_selector(c.selector);
  spec.gap_factor = c.gap_factor;
  spec.min_gap = c.min_gap;
  spec.eps_im = c.eps_im;
  spec.eig.tol = c.tol;
  spec.threshold.lo = c.lo;
  spec.threshold.hi = c.hi;
  spec.threshold.resolution = c.resolution;
  spec.threshold.eps_im = c.eps_im;
  spec.threshold.scan_points = c.scan_points;
  spec.threshold.fallback_points = c.fallback_points;
  spec.threshold.eig.tol = c.tol;
  spec.validate();
  return spec;
}

void cmd_sweep(const RunConfig& c, std::ostream& summary) {
  SweepSpec spec;
  try {
    spec = sweep_spec(c);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  const auto out = prepare_out(c);
  const auto t0 = Clock::now();
  const SweepTable table = run_sweep(spec, c.workers);
  const double elapsed = seconds_since(t0);

  std::vector<std::string> header;
  for (const auto& axis : spec.axes) header.push_back(to_string(axis.parameter));
  for (const char* name : {"dimension", "eps_im", "max_im_global", "selected_max_im"}) {
    header.push_back(name);
  }
  using O = SweepObservable;
  if (spec.wants(O::NcorOfMaxIm)) header.push_back("ncor");
  if (spec.wants(O::Polarization)) header.push_back("polarization");
  if (spec.wants(O::Entropies)) {
    header.push_back("entropy_ab");
    header.push_back("entropy_left");
  }
  if (spec.wants(O::Threshold)) header.push_back("threshold_jp");
  header.push_back("error");

  std::size_t failures = 0;
  {
    CsvWriter csv(out / "sweep.csv", header);
    for (const auto& row : table.rows) {
      for (double x : row.coords) csv.field(x);
      csv.field(row.dimension).field(row.eps_im).field(row.max_im_global).field(row.selected_max_im);
      if (spec.wants(O::NcorOfMaxIm)) csv.field(row.ncor);
      if (spec.wants(O::Polarization)) csv.field(row.polarization);
      if (spec.wants(O::Entropies)) csv.field(row.entropy_ab).field(row.entropy_left);
      if (spec.wants(O::Threshold)) csv.field(row.threshold);
      std::string tag = row.error;
      for (char& ch : tag) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      csv.field(tag).end_row();
      if (!row.error.empty()) ++failures;
    }
  }
  if (spec.wants(O::MaxImPerCluster)) {
    std::vector<std::string> cheader{"row"};
    for (const auto& axis : spec.axes) cheader.push_back(to_string(axis.parameter));
    for (const char* name : {"track", "centroid", "max_im", "size", "label"}) cheader.push_back(name);
    CsvWriter csv(out / "clusters.csv", cheader);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      for (const auto& trace : table.rows[r].clusters) {
        csv.field(r);
        for (double x : table.rows[r].coords) csv.field(x);
        csv.field(trace.track).field(trace.centroid).field(trace.max_im).field(trace.size);
        csv.field(std::string(to_string(trace.label))).end_row();
      }
    }
  }
  json axes = json::array();
  for (const auto& axis : spec.axes) axes.push_back(to_string(axis));
  write_sidecar(out / "sweep.json", config_to_json(c),
                {{"rows", table.rows.size()},
                 {"failed_rows", failures},
                 {"axes", axes},
                 {"selector", to_string(spec.selector)},
                 {"timings", {{"sweep_s", elapsed}}}});
  summary << "sweep: " << table.rows.size() << " points, " << failures << " failed\n";
}

void cmd_threshold(const RunConfig& c, std::ostream& summary) {
  const auto out = prepare_out(c);
  ThresholdOptions options;
  options.lo = c.lo;
  options.hi = c.hi;
  options.resolution = c.resolution;
  options.eps_im = c.eps_im;
  options.scan_points = c.scan_points;
  options.fallback_points = c.fallback_points;
  options.workers = c.workers;
  options.eig.tol = c.tol;
  const auto selector = parse_selector(c.selector);
  const auto t0 = Clock::now();
  const ThresholdResult r = find_threshold_jp(c.params, selector, options);
  write_sidecar(out / "threshold.json", config_to_json(c),
                {{"jp_star", r.jp_star},
                 {"bracket", {r.lo, r.hi}},
                 {"eps_im", r.eps_im},
                 {"evaluations", r.evaluations},
                 {"used_fallback", r.used_fallback},
                 {"selector", to_string(selector)},
                 {"timings", {{"threshold_s", seconds_since(t0)}}}});
  summary << "threshold: J_p* = " << format_number(r.jp_star) << " in [" << format_number(r.lo)
          << ", " << format_number(r.hi) << "] after " << r.evaluations << " evaluations"
          << (r.used_fallback ? " (fine-scan fallback)" : "") << "\n";
}

json complex_list(const std::vector<std::complex<double>>& values) {
  json list = json::array();
  for (const auto& z : values) list.push_back({z.real(), z.imag()});
  return list;
}

void cmd_effective(const RunConfig& c, std::ostream& summary) {
  const auto out = prepare_out(c);
  PairCoefficients coefficients;
  try {
    coefficients = parse_pair_coefficients(c.coefficients);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  const EffectivePairModel model = build_effective_pair_model(c.params, coefficients);
  {
    CsvWriter csv(out / "effective_matrix.csv", {"row", "col", "value"});
    for (const auto& e : model.matrix.entries()) {
      csv.field(e.row).field(e.col).field(e.value.real()).end_row();
    }
  }
  json meta = {{"coefficients", to_string(coefficients)},
               {"interleg", model.interleg},
               {"shift", model.shift},
               {"dimension", model.matrix.dimension()}};
  summary << "effective: " << to_string(coefficients) << " pair model, inter-leg coupling "
          << format_number(model.interleg) << "\n";
  if (c.validate) {
    const DeviationReport report = validate_effective_model(c.params, coefficients);
    meta["full_eigs"] = complex_list(report.full_eigs);
    meta["eff_eigs"] = complex_list(report.eff_eigs);
    meta["max_dev"] = report.max_dev;
    meta["max_dev_doubled_u"] = report.max_dev_doubled;
    meta["ratio"] = json_number(report.ratio);
    summary << "  max deviation " << format_number(report.max_dev) << " at U, "
            << format_number(report.max_dev_doubled) << " at 2U, ratio "
            << format_number(report.ratio) << "\n";
  }
  write_sidecar(out / "effective.json", config_to_json(c), meta);
}

void cmd_eonsite(const RunConfig& c, std::ostream& summary) {
  const auto out = prepare_out(c);
  const OnsiteTable table = eonsite_table(c.params, c.mu_min, c.mu_max);
  {
    CsvWriter csv(out / "onsite_classes.csv",
                  {"class", "interactions", "imbalance", "population", "intercept", "slope",
                   "example"});
    for (std::size_t i = 0; i < table.classes.size(); ++i) {
      const auto& cl = table.classes[i];
      std::string example = cl.example;
      for (char& ch : example) {
        if (ch == ',') ch = ' ';
      }
      csv.field(i).field(cl.interactions).field(cl.imbalance).field(cl.population);
      csv.field(table.coupling * cl.interactions).field(static_cast<double>(cl.imbalance));
      csv.field(example).end_row();
    }
  }
  {
    CsvWriter csv(out / "onsite_crossings.csv", {"first", "second", "mu", "energy", "order"});
    for (const auto& x : table.crossings) {
      csv.field(x.first).field(x.second).field(x.mu).field(x.energy).field(x.order).end_row();
    }
  }
  write_sidecar(out / "eonsite.json", config_to_json(c),
                {{"classes", table.classes.size()},
                 {"crossings", table.crossings.size()},
                 {"coupling", table.coupling}});
  summary << "eonsite: " << table.classes.size() << " classes, " << table.crossings.size()
          << " crossings in [" << format_number(c.mu_min) << ", " << format_number(c.mu_max)
          << "]\n";
  for (const auto& x : table.crossings) {
    summary << "  mu = " << format_number(x.mu) << " order " << x.order << "  "
            << table.classes[x.first].example << " / " << table.classes[x.second].example << "\n";
  }
}

using Command = std::function<void(const RunConfig&, std::ostream&)>;

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"spectrum", cmd_spectrum}, {"density", cmd_density},     {"ncor", cmd_ncor},
      {"entropy", cmd_entropy},   {"sweep", cmd_sweep},         {"threshold", cmd_threshold},
      {"effective", cmd_effective}, {"eonsite", cmd_eonsite}};
  return table;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument: return kExitConfig;
    case ErrorKind::Capacity: return kExitCapacity;
    case ErrorKind::Convergence: return kExitSolver;
    case ErrorKind::NoState:
    case ErrorKind::BracketInvalid:
    case ErrorKind::Resonance:
    case ErrorKind::NotIsolable: return kExitAnalysis;
    case ErrorKind::NotInBasis:
    case ErrorKind::Mismatch: return kExitFailure;
  }
  return kExitFailure;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum", "density",   "ncor",      "entropy",
                                                 "sweep",    "threshold", "effective", "eonsite"};
  return names;
}

void run_command(const std::string& name, const RunConfig& config, std::ostream& summary) {
  const auto it = commands().find(name);
  if (it == commands().end()) throw Error(ErrorKind::Config, "unknown command '" + name + "'");
  it->second(config, summary);
}

}  // namespace nhse::cli
