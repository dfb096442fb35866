#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nhse/errors.hpp"
#include "nhse/fock.hpp"
#include "nhse/sweep.hpp"

using namespace nhse;

namespace {

ModelParams small(std::size_t cells, std::size_t n) {
  ModelParams p;
  p.cells = cells;
  p.particles = n;
  p.u = 4.0;
  p.j_p = 0.3;
  return p;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST_CASE("axes parse and print") {
  const auto a = parse_axis("mu:-1:2.5:8");
  CHECK(a.parameter == SweepParameter::Mu);
  CHECK(a.min == -1.0);
  CHECK(a.max == 2.5);
  CHECK(a.points == 8);
  CHECK(parse_axis(to_string(a)).max == 2.5);
  const auto v = parse_axis("jp:0:1:5").values();
  REQUIRE(v.size() == 5);
  CHECK(v[1] == 0.25);
  CHECK(v.back() == 1.0);
  CHECK(parse_axis("u:3:3:1").values() == std::vector<double>{3.0});
  CHECK_THROWS_AS(parse_axis("jp:0:1"), Error);
  CHECK_THROWS_AS(parse_axis("foo:0:1:3"), Error);
  CHECK_THROWS_AS(parse_axis("jp:0:x:3"), Error);
  CHECK_THROWS_AS(parse_axis("jp:0:1:0"), Error);
}

TEST_CASE("selectors parse and print") {
  for (const char* text : {"all", "scattering", "bound", "index:3", "near:8", "window:29:35"}) {
    CHECK(to_string(parse_selector(text)) == text);
  }
  CHECK(parse_selector("near:-1.5").energy == -1.5);
  CHECK(parse_selector("bound").needs_vectors());
  CHECK_FALSE(parse_selector("window:0:1").needs_vectors());
  CHECK_THROWS_AS(parse_selector("window:2:1"), Error);
  CHECK_THROWS_AS(parse_selector("index:-1"), Error);
  CHECK_THROWS_AS(parse_selector("index"), Error);
  CHECK_THROWS_AS(parse_selector("nearest"), Error);
}

TEST_CASE("parameter application") {
  ModelParams p;
  apply_parameter(p, SweepParameter::JLeft, 2.0);
  CHECK(p.j_left_a == 2.0);
  CHECK(p.j_right_b == 2.0);
  apply_parameter(p, SweepParameter::JRight, 0.5);
  CHECK(p.j_right_a == 0.5);
  CHECK(p.j_left_b == 0.5);
  apply_parameter(p, SweepParameter::Alpha, 0.0);
  CHECK(p.j_left_a == doctest::Approx(1.0));
  CHECK(p.j_right_a == doctest::Approx(1.0));
  apply_parameter(p, SweepParameter::Cells, 7.0);
  CHECK(p.cells == 7);
  CHECK_THROWS_AS(apply_parameter(p, SweepParameter::Cells, 2.5), Error);
}

TEST_CASE("member selection") {
  Eigen::VectorXcd e(4);
  e << std::complex<double>(0.0, 0.1), std::complex<double>(0.1, -0.1), 5.0,
      std::complex<double>(5.1, 0.2);
  const auto clusters = cluster_spectrum(e, 10.0, 0.1);
  REQUIRE(clusters.size() == 2);
  const std::vector<StateSummary> none;
  CHECK(select_members(parse_selector("index:1"), e, clusters, none) == clusters[1].members);
  CHECK(select_members(parse_selector("near:4.0"), e, clusters, none) == clusters[1].members);
  CHECK(select_members(parse_selector("window:-1:1"), e, clusters, none).size() == 2);
  CHECK(select_members(parse_selector("all"), e, clusters, none).size() == 4);
  CHECK_THROWS_AS(select_members(parse_selector("index:5"), e, clusters, none), Error);
  CHECK_THROWS_AS(select_members(parse_selector("window:2:3"), e, clusters, none), Error);
  CHECK_THROWS_AS(select_members(parse_selector("bound"), e, clusters, none), Error);
  std::vector<StateSummary> s(4);
  s[2].pair_weight = 0.9;
  s[3].pair_weight = 0.8;
  CHECK(select_members(parse_selector("bound"), e, clusters, s) == clusters[1].members);
  CHECK(select_members(parse_selector("scattering"), e, clusters, s) == clusters[0].members);
  const std::vector<std::size_t> all{0, 1, 2, 3};
  CHECK(max_imag_member(e, all) == 3);
}

TEST_CASE("decoupled legs stay real along a sweep") {
  SweepSpec spec;
  spec.base = small(4, 2);
  spec.axes = {parse_axis("u:1:10:4"), parse_axis("jp:0:0:2")};
  const auto table = run_sweep(spec);
  REQUIRE(table.rows.size() == 8);
  for (const auto& row : table.rows) {
    CHECK(row.error.empty());
    CHECK(row.max_im_global <= row.eps_im);
    CHECK(row.dimension == 36);
    CHECK(std::isnan(row.ncor));
  }
  CHECK(table.rows[2].coords == std::vector<double>{4.0, 0.0});
}

TEST_CASE("parallel sweep equals the serial reference") {
  SweepSpec spec;
  spec.base = small(4, 2);
  spec.axes = {parse_axis("mu:0:2:3"), parse_axis("jp:0:0.6:3")};
  spec.observables = {SweepObservable::MaxImGlobal, SweepObservable::MaxImPerCluster,
                      SweepObservable::NcorOfMaxIm, SweepObservable::Polarization,
                      SweepObservable::Entropies};
  const auto serial = run_sweep_serial(spec);
  for (int workers : {1, 3}) {
    const auto parallel = run_sweep(spec, workers);
    REQUIRE(parallel.rows.size() == serial.rows.size());
    for (std::size_t r = 0; r < serial.rows.size(); ++r) {
      const auto& a = serial.rows[r];
      const auto& b = parallel.rows[r];
      CHECK(a.coords == b.coords);
      CHECK(same(a.max_im_global, b.max_im_global));
      CHECK(same(a.ncor, b.ncor));
      CHECK(same(a.polarization, b.polarization));
      CHECK(same(a.entropy_ab, b.entropy_ab));
      CHECK(same(a.entropy_left, b.entropy_left));
      REQUIRE(a.clusters.size() == b.clusters.size());
      for (std::size_t c = 0; c < a.clusters.size(); ++c) {
        CHECK(a.clusters[c].track == b.clusters[c].track);
        CHECK(a.clusters[c].max_im == b.clusters[c].max_im);
      }
    }
  }
}

TEST_CASE("failed points are recorded, not thrown") {
  SweepSpec spec;
  spec.base = small(3, 2);
  spec.axes = {parse_axis("cells:3:40:2")};
  ::setenv("NHSE_CAPACITY", "100", 1);
  const auto table = run_sweep(spec);
  ::unsetenv("NHSE_CAPACITY");
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].error.empty());
  CHECK(table.rows[1].error.find("capacity") != std::string::npos);
  CHECK(std::isnan(table.rows[1].max_im_global));
}

TEST_CASE("spec validation") {
  SweepSpec spec;
  spec.base = small(3, 2);
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.axes = {parse_axis("jp:0:1:1")};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.axes = {parse_axis("jp:0:1:2"), parse_axis("jp:0:1:2")};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.axes = {parse_axis("jp:0:1:2"), parse_axis("mu:0:1:2"), parse_axis("u:0:1:2")};
  CHECK_THROWS_AS(spec.validate(), Error);
  CHECK(parse_sweep_observable("threshold") == SweepObservable::Threshold);
  CHECK_THROWS_AS(parse_sweep_observable("energy"), Error);
}

TEST_CASE("threshold bracket satisfies its invariant") {
  const auto p = small(4, 2);
  ThresholdOptions options;
  options.lo = 0.0;
  options.hi = 2.0;
  options.resolution = 1e-4;
  const auto sel = parse_selector("all");
  const auto t = find_threshold_jp(p, sel, options);
  CHECK(t.hi - t.lo <= 1e-4);
  CHECK(t.jp_star == t.hi);
  auto at = [&](double jp) {
    ModelParams q = p;
    q.j_p = jp;
    return selected_max_imag(q, sel, options.eig).max_im;
  };
  CHECK(at(t.lo) <= t.eps_im);
  CHECK(at(t.hi) > t.eps_im);
  const auto serial_options = [&] {
    auto o = options;
    o.workers = 1;
    return o;
  }();
  CHECK(find_threshold_jp(p, sel, serial_options).jp_star == t.jp_star);
}

TEST_CASE("threshold rejects brackets that do not straddle") {
  auto p = small(4, 1);
  p.set_j_alpha(1.0, 0.0);  // reciprocal hopping: always real
  ThresholdOptions options;
  try {
    find_threshold_jp(p, parse_selector("all"), options);
    FAIL("expected BracketInvalid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BracketInvalid);
  }
  options.hi = -1.0;
  CHECK_THROWS_AS(find_threshold_jp(p, parse_selector("all"), options), Error);
}

TEST_CASE("onsite classes and crossings") {
  auto p = small(3, 2);
  p.u = 6.0;
  const auto table = eonsite_table(p, -10.0, 10.0);
  std::size_t total = 0;
  for (const auto& c : table.classes) total += c.population;
  CHECK(total == sector_dimension(6, 2, Statistics::Boson));
  CHECK(table.classes.size() == 5);
  bool zero_crossing = false;
  for (const auto& x : table.crossings) {
    const auto& a = table.classes[x.first];
    const auto& b = table.classes[x.second];
    CHECK(a.energy(x.mu, table.coupling) == doctest::Approx(b.energy(x.mu, table.coupling)));
    CHECK(x.order == std::abs(a.imbalance - b.imbalance) / 2);
    if (x.mu == 0.0 && a.interactions == 0 && b.interactions == 0) zero_crossing = true;
  }
  CHECK(zero_crossing);
  for (std::size_t k = 1; k < table.crossings.size(); ++k) {
    CHECK(table.crossings[k - 1].mu <= table.crossings[k].mu);
  }
  p.particles = 5;
  CHECK_THROWS_AS(eonsite_table(p, -1.0, 1.0), Error);
}

TEST_CASE("three-particle triplon crossing") {
  auto p = small(4, 3);
  p.u = 16.0;
  const auto table = eonsite_table(p, 0.0, 10.0);
  bool found = false;
  for (const auto& x : table.crossings) {
    if (std::abs(x.mu - 16.0 / 3.0) < 1e-12 && x.order == 3) found = true;
  }
  CHECK(found);
}
