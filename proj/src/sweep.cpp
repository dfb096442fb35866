#include "nhse/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <omp.h>

#include "nhse/errors.hpp"

namespace nhse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidArgument, "bad number '" + text + "' in " + what);
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

int run_threads(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

SweepRow failed_row(const SweepRow& partial, std::string tag) {
  SweepRow row;
  row.coords = partial.coords;
  row.dimension = partial.dimension;
  row.eps_im = row.max_im_global = row.selected_max_im = kNaN;
  row.ncor = row.polarization = row.entropy_ab = row.entropy_left = row.threshold = kNaN;
  row.error = std::move(tag);
  return row;
}

}  // namespace

const char* to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::Jp: return "jp";
    case SweepParameter::Mu: return "mu";
    case SweepParameter::U: return "u";
    case SweepParameter::Unn: return "unn";
    case SweepParameter::Cells: return "cells";
    case SweepParameter::JLeft: return "jl";
    case SweepParameter::JRight: return "jr";
    case SweepParameter::Alpha: return "alpha";
    case SweepParameter::J: return "j";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  for (auto p : {SweepParameter::Jp, SweepParameter::Mu, SweepParameter::U, SweepParameter::Unn,
                 SweepParameter::Cells, SweepParameter::JLeft, SweepParameter::JRight,
                 SweepParameter::Alpha, SweepParameter::J}) {
    if (name == to_string(p)) return p;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown sweep parameter '" + name + "'");
}

void apply_parameter(ModelParams& params, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::Jp: params.j_p = value; break;
    case SweepParameter::Mu: params.mu = value; break;
    case SweepParameter::U: params.u = value; break;
    case SweepParameter::Unn: params.u_nn = value; break;
    case SweepParameter::Cells: {
      const double rounded = std::round(value);
      if (rounded < 1.0 || std::abs(rounded - value) > 1e-9) {
        throw Error(ErrorKind::InvalidArgument, "cells must be a positive integer");
      }
      params.cells = static_cast<std::size_t>(rounded);
      break;
    }
    case SweepParameter::JLeft: params.set_mirrored_hopping(value, params.j_right_a); break;
    case SweepParameter::JRight: params.set_mirrored_hopping(params.j_left_a, value); break;
    case SweepParameter::Alpha:
    case SweepParameter::J: {
      const double product = params.j_left_a * params.j_right_a;
      if (!(product > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "j/alpha axes need positive leg-A hoppings");
      }
      const double j = std::sqrt(product);
      const double alpha = 0.5 * std::log(params.j_left_a / params.j_right_a);
      if (parameter == SweepParameter::Alpha) {
        params.set_j_alpha(j, value);
      } else {
        params.set_j_alpha(value, alpha);
      }
      break;
    }
  }
}

std::vector<double> SweepAxis::values() const {
  if (points < 1) throw Error(ErrorKind::InvalidArgument, "axis needs at least one point");
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k) {
    out[k] = points == 1 ? min
                         : min + (max - min) * static_cast<double>(k) /
                                     static_cast<double>(points - 1);
  }
  if (points > 1) out.back() = max;
  return out;
}

SweepAxis parse_axis(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4) {
    throw Error(ErrorKind::InvalidArgument, "axis must be name:min:max:points, got '" + text + "'");
  }
  SweepAxis axis;
  axis.parameter = parse_sweep_parameter(parts[0]);
  axis.min = parse_double(parts[1], "axis");
  axis.max = parse_double(parts[2], "axis");
  const double points = parse_double(parts[3], "axis");
  if (points < 1.0 || std::floor(points) != points) {
    throw Error(ErrorKind::InvalidArgument, "axis point count must be a positive integer");
  }
  axis.points = static_cast<std::size_t>(points);
  return axis;
}

std::string to_string(const SweepAxis& axis) {
  return std::string(to_string(axis.parameter)) + ":" + fmt(axis.min) + ":" + fmt(axis.max) +
         ":" + std::to_string(axis.points);
}

ClusterSelector parse_selector(const std::string& text) {
  const auto parts = split(text, ':');
  ClusterSelector s;
  const std::string& kind = parts.empty() ? text : parts[0];
  auto expect = [&](std::size_t n) {
    if (parts.size() != n) throw Error(ErrorKind::InvalidArgument, "bad selector '" + text + "'");
  };
  if (kind == "all") {
    expect(1);
  } else if (kind == "scattering") {
    expect(1);
    s.kind = ClusterSelector::Kind::Scattering;
  } else if (kind == "bound") {
    expect(1);
    s.kind = ClusterSelector::Kind::Bound;
  } else if (kind == "index") {
    expect(2);
    s.kind = ClusterSelector::Kind::Index;
    const double k = parse_double(parts[1], "selector");
    if (k < 0.0 || std::floor(k) != k) {
      throw Error(ErrorKind::InvalidArgument, "cluster index must be a non-negative integer");
    }
    s.index = static_cast<std::size_t>(k);
  } else if (kind == "near") {
    expect(2);
    s.kind = ClusterSelector::Kind::Near;
    s.energy = parse_double(parts[1], "selector");
  } else if (kind == "window") {
    expect(3);
    s.kind = ClusterSelector::Kind::Window;
    s.lo = parse_double(parts[1], "selector");
    s.hi = parse_double(parts[2], "selector");
    if (!(s.lo <= s.hi)) throw Error(ErrorKind::InvalidArgument, "window needs lo <= hi");
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown selector '" + text + "'");
  }
  return s;
}

std::string to_string(const ClusterSelector& s) {
  switch (s.kind) {
    case ClusterSelector::Kind::All: return "all";
    case ClusterSelector::Kind::Scattering: return "scattering";
    case ClusterSelector::Kind::Bound: return "bound";
    case ClusterSelector::Kind::Index: return "index:" + std::to_string(s.index);
    case ClusterSelector::Kind::Near: return "near:" + fmt(s.energy);
    case ClusterSelector::Kind::Window: return "window:" + fmt(s.lo) + ":" + fmt(s.hi);
  }
  return "all";
}

std::vector<std::size_t> select_members(const ClusterSelector& selector,
                                        const Eigen::VectorXcd& eigenvalues,
                                        const std::vector<Cluster>& clusters,
                                        std::span<const StateSummary> summaries) {
  using Kind = ClusterSelector::Kind;
  const auto n = static_cast<std::size_t>(eigenvalues.size());
  std::vector<std::size_t> out;
  switch (selector.kind) {
    case Kind::All:
      out.resize(n);
      for (std::size_t k = 0; k < n; ++k) out[k] = k;
      break;
    case Kind::Scattering:
    case Kind::Bound: {
      if (summaries.size() != n) {
        throw Error(ErrorKind::InvalidArgument, "pair-weight selectors need eigenvectors");
      }
      const bool bound = selector.kind == Kind::Bound;
      for (const auto& c : clusters) {
        double weight = 0.0;
        for (std::size_t k : c.members) weight += summaries[k].pair_weight;
        weight /= static_cast<double>(c.members.size());
        if ((weight >= 0.5) == bound) out.insert(out.end(), c.members.begin(), c.members.end());
      }
      break;
    }
    case Kind::Index:
      if (selector.index < clusters.size()) out = clusters[selector.index].members;
      break;
    case Kind::Near: {
      if (n == 0) break;
      std::size_t best = 0;
      for (std::size_t k = 1; k < n; ++k) {
        const auto target = std::complex<double>(selector.energy, 0.0);
        if (std::abs(eigenvalues(static_cast<Eigen::Index>(k)) - target) <
            std::abs(eigenvalues(static_cast<Eigen::Index>(best)) - target)) {
          best = k;
        }
      }
      for (const auto& c : clusters) {
        if (std::find(c.members.begin(), c.members.end(), best) != c.members.end()) out = c.members;
      }
      break;
    }
    case Kind::Window:
      for (std::size_t k = 0; k < n; ++k) {
        const double re = eigenvalues(static_cast<Eigen::Index>(k)).real();
        if (re >= selector.lo && re <= selector.hi) out.push_back(k);
      }
      break;
  }
  if (out.empty()) {
    throw Error(ErrorKind::NoState, "selector '" + to_string(selector) + "' matches no state");
  }
  return out;
}

std::size_t max_imag_member(const Eigen::VectorXcd& eigenvalues,
                            std::span<const std::size_t> members) {
  if (members.empty()) throw Error(ErrorKind::NoState, "no members");
  std::size_t best = members[0];
  for (std::size_t k : members) {
    const double im = eigenvalues(static_cast<Eigen::Index>(k)).imag();
    const double best_im = eigenvalues(static_cast<Eigen::Index>(best)).imag();
    if (im > best_im || (im == best_im && k < best)) best = k;
  }
  return best;
}

SelectedImag selected_max_imag(const ModelParams& params, const ClusterSelector& selector,
                               const EigenOptions& eig) {
  const Basis basis = Basis::enumerate(params.cells, params.particles, params.statistics,
                                       basis_capacity_from_env());
  EigenOptions options = eig;
  options.compute_vectors = options.compute_vectors || selector.needs_vectors();
  const SpectrumResult result = eigendecompose(build_hamiltonian(params, basis, 1), options);
  const auto clusters = cluster_spectrum(result, ClusterOptions::for_params(params));
  std::vector<StateSummary> summaries;
  if (selector.needs_vectors()) summaries = summarize_states_serial(result, basis);
  const auto members = select_members(selector, result.eigenvalues, clusters, summaries);
  SelectedImag out;
  out.matrix_norm = result.matrix_norm;
  out.dimension = basis.dimension();
  out.max_im = result.eigenvalues(static_cast<Eigen::Index>(
                                      max_imag_member(result.eigenvalues, members)))
                   .imag();
  return out;
}

ThresholdResult find_threshold_jp(const ModelParams& params, const ClusterSelector& selector,
                                  const ThresholdOptions& options) {
  if (!(options.lo < options.hi)) throw Error(ErrorKind::InvalidArgument, "threshold needs lo < hi");
  if (!(options.resolution > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "threshold resolution must be positive");
  }
  if (options.scan_points < 2 || options.fallback_points < 2) {
    throw Error(ErrorKind::InvalidArgument, "threshold scans need at least two points");
  }
  params.validate();

  ThresholdResult result;
  auto evaluate = [&](double jp) {
    ModelParams p = params;
    p.j_p = jp;
    return selected_max_imag(p, selector, options.eig);
  };
  auto scan = [&](std::size_t points, double lo, double hi) {
    const auto grid = SweepAxis{SweepParameter::Jp, lo, hi, points}.values();
    std::vector<SelectedImag> values(points);
    const auto count = static_cast<std::ptrdiff_t>(points);
#pragma omp parallel for schedule(dynamic) num_threads(run_threads(options.workers))
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      values[static_cast<std::size_t>(k)] = evaluate(grid[static_cast<std::size_t>(k)]);
    }
    result.evaluations += points;
    return std::pair{grid, values};
  };

  auto [grid, values] = scan(options.scan_points, options.lo, options.hi);
  result.eps_im = options.eps_im > 0.0 ? options.eps_im : default_eps_im(values.back().matrix_norm);
  auto above = [&](const SelectedImag& v) { return v.max_im > result.eps_im; };

  if (above(values.front()) || !above(values.back())) {
    std::ostringstream msg;
    msg << "bracket [" << fmt(options.lo) << ", " << fmt(options.hi)
        << "] does not straddle eps_im " << fmt(result.eps_im) << ": max Im E = "
        << fmt(values.front().max_im) << " at lo, " << fmt(values.back().max_im) << " at hi";
    throw Error(ErrorKind::BracketInvalid, msg.str());
  }

  auto first_crossing = [&](const std::vector<SelectedImag>& v) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      if (!above(v[k]) && above(v[k + 1])) return k;
    }
    return v.size() - 1;  // unreachable given the end points
  };
  auto monotone = [&](const std::vector<SelectedImag>& v) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      if (above(v[k]) && !above(v[k + 1])) return false;
    }
    return true;
  };

  if (!monotone(values)) {
    result.used_fallback = true;
    std::tie(grid, values) = scan(options.fallback_points, options.lo, options.hi);
  }
  const std::size_t k = first_crossing(values);
  double lo = grid[k];
  double hi = grid[k + 1];
  while (hi - lo > options.resolution) {
    const double mid = 0.5 * (lo + hi);
    ++result.evaluations;
    if (above(evaluate(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.lo = lo;
  result.hi = hi;
  result.jp_star = hi;
  return result;
}

const char* to_string(SweepObservable o) noexcept {
  switch (o) {
    case SweepObservable::MaxImGlobal: return "max_im_global";
    case SweepObservable::MaxImPerCluster: return "max_im_per_cluster";
    case SweepObservable::NcorOfMaxIm: return "ncor_of_max_im_state";
    case SweepObservable::Polarization: return "polarization";
    case SweepObservable::Entropies: return "entropies";
    case SweepObservable::Threshold: return "threshold";
  }
  return "?";
}

SweepObservable parse_sweep_observable(const std::string& name) {
  for (auto o : {SweepObservable::MaxImGlobal, SweepObservable::MaxImPerCluster,
                 SweepObservable::NcorOfMaxIm, SweepObservable::Polarization,
                 SweepObservable::Entropies, SweepObservable::Threshold}) {
    if (name == to_string(o)) return o;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown sweep observable '" + name + "'");
}

bool SweepSpec::wants(SweepObservable o) const {
  return std::find(observables.begin(), observables.end(), o) != observables.end();
}

void SweepSpec::validate() const {
  if (axes.empty() || axes.size() > 2) {
    throw Error(ErrorKind::InvalidArgument, "a sweep takes one or two axes");
  }
  for (const auto& axis : axes) {
    if (axis.points < 2) throw Error(ErrorKind::InvalidArgument, "axis point count must be >= 2");
  }
  if (axes.size() == 2 && axes[0].parameter == axes[1].parameter) {
    throw Error(ErrorKind::InvalidArgument, "sweep axes must differ");
  }
  if (observables.empty()) throw Error(ErrorKind::InvalidArgument, "no sweep observables");
  if (!(gap_factor > 0.0) || min_gap < 0.0 || eps_im < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "clustering and eps_im settings must be positive");
  }
}

SweepRow evaluate_point(const SweepSpec& spec, const std::vector<double>& coords) {
  SweepRow row;
  row.coords = coords;
  row.eps_im = row.max_im_global = row.selected_max_im = kNaN;
  row.ncor = row.polarization = row.entropy_ab = row.entropy_left = row.threshold = kNaN;
  try {
    ModelParams p = spec.base;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      apply_parameter(p, spec.axes[a].parameter, coords[a]);
    }
    p.validate();
    const Basis basis =
        Basis::enumerate(p.cells, p.particles, p.statistics, basis_capacity_from_env());
    row.dimension = basis.dimension();

    const bool per_state = spec.wants(SweepObservable::NcorOfMaxIm) ||
                           spec.wants(SweepObservable::Polarization) ||
                           spec.wants(SweepObservable::Entropies);
    const bool labels = spec.wants(SweepObservable::MaxImPerCluster) && p.particles == 2;
    EigenOptions eig = spec.eig;
    eig.compute_vectors = per_state || labels || spec.selector.needs_vectors();
    const SpectrumResult result = eigendecompose(build_hamiltonian(p, basis, 1), eig);

    row.eps_im = spec.eps_im > 0.0 ? spec.eps_im : default_eps_im(result.matrix_norm);
    row.max_im_global = max_imag(result);
    ClusterOptions copt = ClusterOptions::for_params(p);
    copt.gap_factor = spec.gap_factor;
    if (spec.min_gap > 0.0) copt.min_gap = spec.min_gap;
    auto clusters = cluster_spectrum(result, copt);
    std::vector<StateSummary> summaries;
    if (eig.compute_vectors) summaries = summarize_states_serial(result, basis);

    const auto members = select_members(spec.selector, result.eigenvalues, clusters, summaries);
    const std::size_t k = max_imag_member(result.eigenvalues, members);
    row.selected_max_im = result.eigenvalues(static_cast<Eigen::Index>(k)).imag();
    if (spec.wants(SweepObservable::NcorOfMaxIm)) row.ncor = summaries[k].ncor;
    if (spec.wants(SweepObservable::Polarization)) row.polarization = summaries[k].polarization;
    if (spec.wants(SweepObservable::Entropies)) {
      const auto v = result.right_eigenvectors.col(static_cast<Eigen::Index>(k));
      row.entropy_ab = entanglement_entropy(v, basis, leg_sites(p.cells, Leg::A));
      if (p.cells >= 2) row.entropy_left = entanglement_entropy(v, basis, left_half_sites(p.cells));
    }
    if (spec.wants(SweepObservable::MaxImPerCluster)) {
      ClassifyOptions classify;
      classify.eps_im = row.eps_im;
      for (const auto& c : clusters) {
        ClusterTrace trace;
        trace.centroid = c.centroid(result.eigenvalues);
        trace.max_im = c.max_im;
        trace.size = c.members.size();
        if (labels) trace.label = classify_cluster(c, summaries, classify);
        row.clusters.push_back(trace);
      }
    }
    if (spec.wants(SweepObservable::Threshold)) {
      ThresholdOptions topt = spec.threshold;
      topt.workers = 1;
      try {
        row.threshold = find_threshold_jp(p, spec.selector, topt).jp_star;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BracketInvalid) throw;
      }
    }
  } catch (const Error& e) {
    return failed_row(row, std::string(to_string(e.kind())) + ": " + e.what());
  } catch (const std::exception& e) {
    return failed_row(row, std::string("error: ") + e.what());
  }
  return row;
}

void track_clusters(SweepTable& table) {
  int next_id = 0;
  const std::vector<ClusterTrace>* previous = nullptr;
  for (auto& row : table.rows) {
    if (!row.error.empty()) continue;
    auto& current = row.clusters;
    std::vector<char> taken_prev(previous ? previous->size() : 0, 0);
    if (previous) {
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < current.size(); ++i) {
        for (std::size_t j = 0; j < previous->size(); ++j) {
          pairs.emplace_back(std::abs(current[i].centroid - (*previous)[j].centroid), i, j);
        }
      }
      std::sort(pairs.begin(), pairs.end());
      for (const auto& [dist, i, j] : pairs) {
        if (current[i].track >= 0 || taken_prev[j]) continue;
        current[i].track = (*previous)[j].track;
        taken_prev[j] = 1;
      }
    }
    for (auto& c : current) {
      if (c.track < 0) c.track = next_id++;
    }
    previous = &current;
  }
}

namespace {

std::vector<std::vector<double>> grid_points(const SweepSpec& spec) {
  std::vector<std::vector<double>> points;
  const auto first = spec.axes[0].values();
  if (spec.axes.size() == 1) {
    for (double a : first) points.push_back({a});
  } else {
    const auto second = spec.axes[1].values();
    for (double a : first) {
      for (double b : second) points.push_back({a, b});
    }
  }
  return points;
}

}  // namespace

SweepTable run_sweep_serial(const SweepSpec& spec) {
  spec.validate();
  SweepTable table;
  for (const auto& point : grid_points(spec)) table.rows.push_back(evaluate_point(spec, point));
  track_clusters(table);
  return table;
}

SweepTable run_sweep(const SweepSpec& spec, int workers) {
  spec.validate();
  const auto points = grid_points(spec);
  SweepTable table;
  table.rows.resize(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic) num_threads(run_threads(workers))
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    table.rows[i] = evaluate_point(spec, points[i]);
  }
  track_clusters(table);
  return table;
}

OnsiteTable eonsite_table(const ModelParams& params, double mu_min, double mu_max) {
  params.validate();
  if (params.particles > 4) throw Error(ErrorKind::InvalidArgument, "eonsite table needs N <= 4");
  if (!(mu_min <= mu_max)) throw Error(ErrorKind::InvalidArgument, "eonsite needs mu_min <= mu_max");
  const Basis basis = Basis::enumerate(params.cells, params.particles, params.statistics,
                                       basis_capacity_from_env());
  const bool bosons = params.statistics == Statistics::Boson;
  const std::size_t cells = params.cells;

  OnsiteTable table;
  table.coupling = bosons ? params.u : params.u_nn;
  std::map<std::pair<int, int>, OnsiteClass> classes;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(i);
    int interactions = 0;
    int imbalance = 0;
    for (std::size_t x = 0; x < cells; ++x) {
      imbalance += static_cast<int>(occ[x]) - static_cast<int>(occ[cells + x]);
    }
    if (bosons) {
      for (Occupation n : occ) interactions += n * (n - 1) / 2;
    } else {
      for (std::size_t leg = 0; leg < 2; ++leg) {
        for (std::size_t x = 0; x + 1 < cells; ++x) {
          interactions += occ[leg * cells + x] * occ[leg * cells + x + 1];
        }
      }
    }
    auto [it, fresh] = classes.try_emplace({interactions, imbalance});
    if (fresh) {
      it->second.interactions = interactions;
      it->second.imbalance = imbalance;
      it->second.example = basis.state(i).to_string();
    }
    ++it->second.population;
  }
  for (auto& [key, c] : classes) table.classes.push_back(std::move(c));

  const double slack = 1e-12 * std::max({1.0, std::abs(mu_min), std::abs(mu_max)});
  for (std::size_t a = 0; a < table.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < table.classes.size(); ++b) {
      const auto& ca = table.classes[a];
      const auto& cb = table.classes[b];
      if (ca.imbalance == cb.imbalance) continue;
      const double mu = table.coupling * (cb.interactions - ca.interactions) /
                        static_cast<double>(ca.imbalance - cb.imbalance);
      if (mu < mu_min - slack || mu > mu_max + slack) continue;
      table.crossings.push_back(
          {a, b, mu, ca.energy(mu, table.coupling), std::abs(ca.imbalance - cb.imbalance) / 2});
    }
  }
  std::sort(table.crossings.begin(), table.crossings.end(), [](const auto& x, const auto& y) {
    return std::tie(x.mu, x.first, x.second) < std::tie(y.mu, y.first, y.second);
  });
  return table;
}

}  // namespace nhse
