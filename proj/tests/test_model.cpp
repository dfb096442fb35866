#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nhse/errors.hpp"
#include "nhse/model.hpp"
#include "support/oracles.hpp"

using namespace nhse;

namespace {

ModelParams params(std::size_t cells, std::size_t n, Statistics stats, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  ModelParams p;
  p.cells = cells;
  p.particles = n;
  p.statistics = stats;
  p.j_left_a = d(rng);
  p.j_right_a = d(rng);
  p.j_left_b = d(rng);
  p.j_right_b = d(rng);
  p.j_p = d(rng);
  p.mu = d(rng);
  if (stats == Statistics::Boson) {
    p.u = 4.0 * d(rng);
  } else {
    p.u_nn = 4.0 * d(rng);
  }
  return p;
}

}  // namespace

TEST_CASE("assembled Hamiltonian equals the operator-algebra oracle") {
  std::mt19937 rng(3);
  struct Case {
    std::size_t cells, n;
    Statistics stats;
  };
  for (const Case c : {Case{1, 2, Statistics::Boson}, Case{2, 2, Statistics::Boson},
                       Case{3, 3, Statistics::Boson}, Case{2, 2, Statistics::Fermion},
                       Case{3, 3, Statistics::Fermion}, Case{4, 2, Statistics::Fermion}}) {
    const auto p = params(c.cells, c.n, c.stats, rng);
    const auto basis = Basis::enumerate(c.cells, c.n, c.stats);
    const Eigen::MatrixXd got = build_hamiltonian(p, basis).to_dense_real();
    const Eigen::MatrixXd want = oracle::hamiltonian(p);
    CAPTURE(c.cells);
    CAPTURE(c.n);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("parallel assembly is identical to the serial reference") {
  std::mt19937 rng(5);
  for (auto stats : {Statistics::Boson, Statistics::Fermion}) {
    const auto p = params(6, 3, stats, rng);
    const auto basis = Basis::enumerate(6, 3, stats);
    const auto serial = build_hamiltonian_serial(p, basis);
    for (int workers : {1, 2, 3, 8}) CHECK(build_hamiltonian(p, basis, workers) == serial);
  }
}

TEST_CASE("single particle sector matches the first-quantised matrix") {
  std::mt19937 rng(9);
  auto p = params(5, 1, Statistics::Boson, rng);
  const auto basis = Basis::enumerate(5, 1, Statistics::Boson);
  // basis state i has its particle on site 2L-1-i (lexicographic order)
  const Eigen::MatrixXd many = build_hamiltonian(p, basis).to_dense_real();
  const Eigen::MatrixXd single = build_single_particle_matrix(p).to_dense_real();
  const Eigen::Index m = single.rows();
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) CHECK(many(m - 1 - r, m - 1 - c) == single(r, c));
  }
}

TEST_CASE("hopping conventions") {
  ModelParams p;
  p.cells = 3;
  p.j_left_a = 1.0;
  p.j_right_a = 0.5;
  p.j_left_b = 0.25;
  p.j_right_b = 2.0;
  p.j_p = 0.3;
  p.mu = 0.7;
  const auto h = build_single_particle_matrix(p);
  CHECK(h.at(0, 1).real() == -1.0);   // a^dag_1 a_2 on leg A
  CHECK(h.at(1, 0).real() == -0.5);
  CHECK(h.at(3, 4).real() == -0.25);
  CHECK(h.at(4, 3).real() == -2.0);
  CHECK(h.at(0, 3).real() == 0.3);
  CHECK(h.at(3, 0).real() == 0.3);
  CHECK(h.at(0, 0).real() == 0.7);
  CHECK(h.at(3, 3).real() == -0.7);
  CHECK(h.at(0, 2) == std::complex<double>{});
}

TEST_CASE("onsite energies") {
  ModelParams p;
  p.cells = 2;
  p.particles = 3;
  p.u = 16.0;
  p.mu = 1.0;
  CHECK(onsite_energy(FockState{0, 0, 3, 0}, p) == doctest::Approx(3 * 16.0 - 3.0));
  CHECK(onsite_energy(FockState{2, 1, 0, 0}, p) == doctest::Approx(16.0 + 3.0));
  ModelParams f;
  f.cells = 3;
  f.particles = 3;
  f.statistics = Statistics::Fermion;
  f.u_nn = 2.0;
  CHECK(onsite_energy(FockState{1, 1, 1, 0, 0, 0}, f) == doctest::Approx(4.0 + 0.0));
  CHECK(onsite_energy(FockState{1, 0, 1, 1, 0, 0}, f) == doctest::Approx(0.0));
  CHECK_THROWS_AS(onsite_energy(FockState{1, 1}, f), Error);
}

TEST_CASE("J-alpha parametrisation and mirroring") {
  ModelParams p;
  p.set_j_alpha(2.0, std::log(2.0));
  CHECK(p.j_left_a == doctest::Approx(4.0));
  CHECK(p.j_right_a == doctest::Approx(1.0));
  CHECK(p.j_left_b == doctest::Approx(1.0));
  CHECK(p.j_right_b == doctest::Approx(4.0));
  p.set_mirrored_hopping(0.3, 0.9);
  CHECK(p.j_left_b == 0.9);
  CHECK(p.j_right_b == 0.3);
}

TEST_CASE("Hermitian limit gives a symmetric matrix") {
  ModelParams p;
  p.cells = 4;
  p.particles = 2;
  p.set_j_alpha(1.0, 0.0);
  p.j_p = 0.4;
  p.u = 3.0;
  const auto basis = Basis::enumerate(4, 2, Statistics::Boson);
  const Eigen::MatrixXd h = build_hamiltonian(p, basis).to_dense_real();
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.cells = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.cells = 2;
  p.u_nn = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.u_nn = 0.0;
  p.statistics = Statistics::Fermion;
  p.u = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.u = 0.0;
  p.particles = 5;
  CHECK_THROWS_AS(p.validate(), Error);
  p.particles = 2;
  p.mu = NAN;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("basis and parameters must agree") {
  ModelParams p;
  p.cells = 3;
  p.particles = 2;
  const auto basis = Basis::enumerate(3, 1, Statistics::Boson);
  CHECK_THROWS_AS(build_hamiltonian(p, basis), Error);
}

TEST_CASE("sparse operator canonicalisation") {
  SparseOperator op(3, {{2, 1, 1.0}, {0, 0, 2.0}, {2, 1, 0.5}, {1, 2, {0.0, 1.0}}});
  CHECK(op.nonzeros() == 3);
  CHECK(op.at(2, 1).real() == 1.5);
  CHECK_FALSE(op.is_real());
  CHECK(op.inf_norm() == doctest::Approx(2.0));
  CHECK(op.trace().real() == 2.0);
  CHECK_THROWS_AS(SparseOperator(2, {{2, 0, 1.0}}), Error);
  Eigen::VectorXcd x(3);
  x << 1.0, 2.0, 3.0;
  const Eigen::VectorXcd y = op.apply(x);
  CHECK(y(0).real() == 2.0);
  CHECK(y(1).imag() == 3.0);
  CHECK(y(2).real() == 3.0);
}
