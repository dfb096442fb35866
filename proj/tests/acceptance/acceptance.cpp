// Acceptance runner. Usage: acceptance [c01..c11|all]
// Prints one PASS/FAIL line per criterion and exits non-zero if any failed.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nhse/eig.hpp"
#include "nhse/errors.hpp"
#include "nhse/model.hpp"
#include "nhse/observables.hpp"
#include "nhse/perturb.hpp"
#include "nhse/sweep.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"

using namespace nhse;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

class Report {
 public:
  void check(bool ok, const std::string& what) {
    passed_ = passed_ && ok;
    note((ok ? "" : "FAILED ") + what);
  }
  void note(const std::string& what) {
    if (!text_.empty()) text_ += "; ";
    text_ += what;
  }
  Verdict verdict() const { return {passed_, text_}; }

 private:
  bool passed_ = true;
  std::string text_;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void runtime(Report& r, const Stopwatch& w, double limit) {
  const double s = w.seconds();
  r.check(s < limit, "runtime " + num(s) + " s < " + num(limit) + " s");
}

ModelParams ladder(std::size_t cells, std::size_t n, double u, double mu, double jp) {
  ModelParams p;
  p.cells = cells;
  p.particles = n;
  p.u = u;
  p.mu = mu;
  p.j_p = jp;
  return p;
}

struct Solved {
  Basis basis;
  SpectrumResult spectrum;
  std::vector<Cluster> clusters;
  std::vector<StateSummary> summaries;
  double eps_im = 0.0;
};

Solved solve(const ModelParams& p, bool vectors = true) {
  Solved s{Basis::enumerate(p.cells, p.particles, p.statistics), {}, {}, {}, 0.0};
  s.spectrum = eigendecompose(build_hamiltonian(p, s.basis), {.compute_vectors = vectors});
  s.clusters = cluster_spectrum(s.spectrum, ClusterOptions::for_params(p));
  if (vectors) s.summaries = summarize_states(s.spectrum, s.basis);
  s.eps_im = default_eps_im(s.spectrum.matrix_norm);
  return s;
}

std::vector<std::size_t> pick(const Solved& s, const std::string& selector) {
  return select_members(parse_selector(selector), s.spectrum.eigenvalues, s.clusters, s.summaries);
}

double max_im_of(const Solved& s, const std::vector<std::size_t>& members) {
  return s.spectrum.eigenvalues(static_cast<Eigen::Index>(max_imag_member(s.spectrum.eigenvalues, members)))
      .imag();
}

// 1. decoupled legs give a real spectrum
Verdict reality_at_decoupling() {
  Report r;
  Stopwatch w;
  const auto s = solve(ladder(20, 2, 4.0, 0.2, 0.0), false);
  const double bound = 1e-9 * s.spectrum.matrix_norm;
  r.check(s.spectrum.size() == 820, "dimension " + std::to_string(s.spectrum.size()));
  r.check(max_imag(s.spectrum) <= bound,
          "max|Im E| " + num(max_imag(s.spectrum)) + " <= " + num(bound));
  runtime(r, w, 10.0);
  return r.verdict();
}

// 2. onset at weak inter-leg hopping, delayed by interactions
Verdict onset() {
  Report r;
  Stopwatch w;
  const auto weak = solve(ladder(20, 2, 4.0, 0.2, 0.01));
  const auto strong = solve(ladder(20, 2, 8.0, 0.2, 0.01));
  const double scat = max_im_of(weak, pick(weak, "scattering"));
  const double bound4 = max_im_of(weak, pick(weak, "bound"));
  const double bound8 = max_im_of(strong, pick(strong, "bound"));
  r.check(scat > 1e-4, "scattering max Im " + num(scat) + " > 1e-4");
  r.check(bound4 > 1e-6, "bound max Im at U=4 " + num(bound4) + " > 1e-6");
  r.check(2.0 * bound8 <= bound4, "bound max Im at U=8 " + num(bound8) + " <= half of U=4");
  runtime(r, w, 60.0);
  return r.verdict();
}

// 3. single particle chains against the closed form
Verdict single_particle_chains() {
  Report r;
  Stopwatch w;
  double worst = 0.0;
  for (std::size_t len = 1; len <= 50; ++len) {
    auto p = ladder(len, 1, 0.0, 0.0, 0.0);
    const auto spec = eigendecompose(build_single_particle_matrix(p), {.compute_vectors = false});
    std::vector<double> expected;
    for (const auto& [jl, jr] : {std::pair{p.j_left_a, p.j_right_a}, {p.j_left_b, p.j_right_b}}) {
      const auto leg = oracle::hatano_nelson(len, jl, jr);
      expected.insert(expected.end(), leg.begin(), leg.end());
    }
    std::vector<std::complex<double>> want(expected.begin(), expected.end());
    std::vector<std::complex<double>> got(spec.eigenvalues.begin(), spec.eigenvalues.end());
    worst = std::max(worst, oracle::multiset_distance(got, want));
  }
  r.check(worst <= 1e-10, "L=1..50 worst deviation " + num(worst) + " <= 1e-10");
  runtime(r, w, 1.0);
  return r.verdict();
}

// 4. mu -> -mu leaves the spectrum unchanged
Verdict mu_reflection() {
  Report r;
  const auto plus = solve(ladder(10, 2, 4.0, 0.7, 0.01), false);
  const auto minus = solve(ladder(10, 2, 4.0, -0.7, 0.01), false);
  std::vector<std::complex<double>> a(plus.spectrum.eigenvalues.begin(), plus.spectrum.eigenvalues.end());
  std::vector<std::complex<double>> b(minus.spectrum.eigenvalues.begin(), minus.spectrum.eigenvalues.end());
  const double d = oracle::multiset_distance(a, b);
  r.check(d <= 1e-8, "multiset distance " + num(d) + " <= 1e-8");
  return r.verdict();
}

// 5. effective pair model error shrinks 3-5x when U doubles
Verdict effective_convergence() {
  Report r;
  Stopwatch w;
  const auto p = ladder(8, 2, 16.0, 0.0, 0.01);
  const auto printed = validate_effective_model(p, PairCoefficients::Printed);
  r.check(printed.ratio >= 3.0 && printed.ratio <= 5.0,
          "deviation " + num(printed.max_dev) + " -> " + num(printed.max_dev_doubled) +
              ", ratio " + num(printed.ratio) + " in [3, 5]");
  const auto projected = validate_effective_model(p, PairCoefficients::SecondOrder);
  r.note("projected coefficients: " + num(projected.max_dev) + " -> " +
         num(projected.max_dev_doubled) + ", ratio " + num(projected.ratio));
  runtime(r, w, 30.0);
  return r.verdict();
}

// 6. correlation diagnostic at representative points, plus a coarse grid
Verdict ncor_points() {
  Report r;
  auto ncor_at = [](double mu, double u, const std::string& selector) {
    const auto s = solve(ladder(15, 2, u, mu, 0.01));
    return s.summaries[max_imag_member(s.spectrum.eigenvalues, pick(s, selector))].ncor;
  };
  const double bound = ncor_at(0.05, 12.0, "bound");
  const double scattering = ncor_at(0.2, 4.0, "all");
  const double mixed = ncor_at(4.0, 16.0, "all");
  r.check(bound >= 2.3 && bound <= 3.3, "bound (mu=0.05, U=12) " + num(bound) + " in [2.3, 3.3]");
  r.check(scattering < 0.0, "scattering (mu=0.2, U=4) " + num(scattering) + " < 0");
  r.check(mixed > 0.0 && mixed < 2.0, "mixed (mu=4, U=16) " + num(mixed) + " in (0, 2)");

  Stopwatch w;
  SweepSpec grid;
  grid.base = ladder(15, 2, 4.0, 0.0, 0.01);
  grid.axes = {parse_axis("mu:0:5:10"), parse_axis("u:2:20:10")};
  grid.observables = {SweepObservable::NcorOfMaxIm};
  const auto table = run_sweep(grid);
  std::size_t failed = 0;
  for (const auto& row : table.rows) failed += row.error.empty() ? 0 : 1;
  r.check(failed == 0, "10x10 grid errors " + std::to_string(failed));
  runtime(r, w, 300.0);
  return r.verdict();
}

// 7. bound-cluster states respect the maximal-spread bound
Verdict ncor_bound() {
  Report r;
  for (std::size_t len : {8u, 15u}) {
    const auto s = solve(ladder(len, 2, 16.0, 0.0, 0.01));
    const auto members = pick(s, "bound");
    const double limit = 4.0 * (1.0 - 1.0 / static_cast<double>(len)) + 1e-6;
    double worst = -INFINITY;
    for (std::size_t k : members) worst = std::max(worst, s.summaries[k].ncor);
    r.check(worst <= limit, "L=" + std::to_string(len) + ": " + std::to_string(members.size()) +
                                " states, max N_cor " + num(worst) + " <= " + num(limit));
  }
  return r.verdict();
}

// 8. mixed cluster drifts towards the left edge as L grows
Verdict mixed_size_dependence() {
  Report r;
  std::vector<double> left;
  for (std::size_t len : {20u, 30u}) {
    const auto s = solve(ladder(len, 2, 16.0, 4.0, 0.01));
    const auto members = pick(s, "near:8");
    const auto top = max_imag_member(s.spectrum.eigenvalues, members);
    const double im = s.spectrum.eigenvalues(static_cast<Eigen::Index>(top)).imag();
    left.push_back(s.summaries[top].left_half_fraction);
    r.check(im > s.eps_im, "L=" + std::to_string(len) + " max Im " + num(im) +
                               ", rho_left/N " + num(left.back()));
  }
  r.check(left[1] > left[0], "rho_left/N increases");
  return r.verdict();
}

// 9. fermions with nearest-neighbour repulsion
Verdict fermions() {
  Report r;
  Stopwatch w;
  auto p = ladder(10, 2, 0.0, 4.0, 0.01);
  p.statistics = Statistics::Fermion;
  p.u_nn = 16.0;
  const auto small = solve(p, false);
  r.check(max_imag(small.spectrum) <= small.eps_im,
          "L=10 max Im " + num(max_imag(small.spectrum)) + " <= " + num(small.eps_im));
  p.cells = 20;
  const auto large = solve(p, false);
  r.check(max_imag(large.spectrum) > 1e-6, "L=20 max Im " + num(max_imag(large.spectrum)) + " > 1e-6");
  runtime(r, w, 60.0);
  return r.verdict();
}

// 10. three-particle sector at the triplon crossing
Verdict third_order() {
  Report r;
  Stopwatch w;
  const auto selector = parse_selector("window:29:35");
  std::vector<double> ims;
  std::vector<double> thresholds;
  for (std::size_t len : {6u, 8u, 10u}) {
    auto p = ladder(len, 3, 16.0, 16.0 / 3.0, 0.8);
    ims.push_back(selected_max_imag(p, selector).max_im);
    ThresholdOptions options;
    options.lo = 0.0;
    options.hi = 1.2;
    options.resolution = 1e-3;
    double star = INFINITY;
    try {
      star = find_threshold_jp(p, selector, options).jp_star;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BracketInvalid) throw;
    }
    thresholds.push_back(star);
    r.note("L=" + std::to_string(len) + " max Im " + num(ims.back()) + ", threshold " + num(star));
  }
  const double eps = default_eps_im(1.0);
  r.check(ims.back() > eps && std::is_sorted(ims.begin(), ims.end()),
          "complex eigenvalues emerge with L");
  bool non_increasing = true;
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    non_increasing = non_increasing && thresholds[k] <= thresholds[k - 1];
  }
  r.check(non_increasing, "threshold non-increasing in L");
  runtime(r, w, 600.0);
  return r.verdict();
}

// 11. structural property suites
Verdict property_suites() {
  Report r;
  for (const auto& prop : properties::all()) {
    const auto o = prop.check();
    r.check(o.passed, prop.name + (o.detail.empty() ? "" : " (" + o.detail + ")"));
  }
  return r.verdict();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"c01", reality_at_decoupling}, {"c02", onset},
      {"c03", single_particle_chains}, {"c04", mu_reflection},
      {"c05", effective_convergence}, {"c06", ncor_points},
      {"c07", ncor_bound},            {"c08", mixed_size_dependence},
      {"c09", fermions},              {"c10", third_order},
      {"c11", property_suites},
  };
  const std::string which = argc > 1 ? argv[1] : "all";
  bool any = false;
  bool all_passed = true;
  for (const auto& [id, run] : criteria) {
    if (which != "all" && which != id) continue;
    any = true;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    all_passed = all_passed && v.passed;
    std::printf("%s %s: %s\n", id.c_str(), v.passed ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  if (!any) {
    std::fprintf(stderr, "unknown criterion '%s' (expected c01..c11 or all)\n", which.c_str());
    return 2;
  }
  return all_passed ? 0 : 1;
}
