#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nhse/eig.hpp"
#include "nhse/errors.hpp"
#include "support/oracles.hpp"

using namespace nhse;

namespace {

SparseOperator dense_operator(const Eigen::MatrixXcd& m) {
  std::vector<MatrixEntry> entries;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) {
        entries.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), m(r, c)});
      }
    }
  }
  return SparseOperator(static_cast<std::size_t>(m.rows()), std::move(entries));
}

std::vector<std::complex<double>> values(const SpectrumResult& r) {
  return {r.eigenvalues.begin(), r.eigenvalues.end()};
}

}  // namespace

TEST_CASE("2x2 characteristic polynomial") {
  Eigen::MatrixXcd m(2, 2);
  m << 0.0, 1.0, 0.5, 0.0;
  const auto r = eigendecompose(dense_operator(m));
  std::vector<double> re{r.eigenvalues(0).real(), r.eigenvalues(1).real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-14));
  CHECK(re[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(max_imag(r) == 0.0);
}

TEST_CASE("identity has unit eigenvalues and zero residuals") {
  const auto r = eigendecompose(dense_operator(Eigen::MatrixXcd::Identity(5, 5)));
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(r.eigenvalues(k) == std::complex<double>(1.0, 0.0));
  for (double res : r.residuals) CHECK(res == 0.0);
}

TEST_CASE("random matrices up to dimension 4 agree with characteristic roots") {
  std::mt19937 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    const bool complex_input = trial % 3 == 0;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = {g(rng), complex_input ? g(rng) : 0.0};
    }
    const auto r = eigendecompose(dense_operator(m));
    const double d = oracle::multiset_distance(values(r), oracle::characteristic_roots(m));
    CAPTURE(trial);
    CHECK(d < 1e-8);
  }
}

TEST_CASE("Hatano-Nelson chain against analytic and symmetrised oracles") {
  for (std::size_t len : {2u, 3u, 7u, 20u, 50u}) {
    ModelParams p;
    p.cells = len;
    p.set_mirrored_hopping(1.0, 0.5);
    const auto h = build_single_particle_matrix(p);
    const auto r = eigendecompose(h);
    std::vector<double> got;
    for (Eigen::Index k = 0; k < r.eigenvalues.size(); ++k) {
      CHECK(std::abs(r.eigenvalues(k).imag()) < 1e-10);
      got.push_back(r.eigenvalues(k).real());
    }
    std::sort(got.begin(), got.end());
    auto want = oracle::hatano_nelson(len, 1.0, 0.5);
    const auto sym = oracle::hatano_nelson_symmetrized(len, 1.0, 0.5);
    for (std::size_t k = 0; k < len; ++k) CHECK(std::abs(want[k] - sym[k]) < 1e-12);
    std::vector<double> doubled;
    for (double e : want) doubled.insert(doubled.end(), {e, e});
    std::sort(doubled.begin(), doubled.end());
    CAPTURE(len);
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - doubled[k]) < 1e-10);
  }
}

TEST_CASE("Hatano-Nelson L=3 is {-1, 0, 1}") {
  const auto e = oracle::hatano_nelson(3, 1.0, 0.5);
  CHECK(e[0] == doctest::Approx(-1.0));
  CHECK(std::abs(e[1]) < 1e-15);
  CHECK(e[2] == doctest::Approx(1.0));
}

TEST_CASE("conjugate pairs come out exactly") {
  Eigen::MatrixXcd m(3, 3);
  m << 1.0, -0.3, 0.0, 0.3, 1.0, 0.0, 0.0, 0.0, 2.0;  // spectrum {1 +- 0.3i, 2}
  const auto r = eigendecompose(dense_operator(m));
  CHECK(max_imag(r) == doctest::Approx(0.3));
  std::vector<std::complex<double>> conj;
  for (const auto& z : values(r)) conj.push_back(std::conj(z));
  CHECK(oracle::multiset_distance(values(r), conj) == 0.0);
  CHECK_FALSE(is_spectrum_real(r, 1e-9));
  CHECK(is_spectrum_real(r, 0.31));
}

TEST_CASE("eigenvalue-only mode") {
  Eigen::MatrixXcd m(2, 2);
  m << 2.0, 1.0, 0.0, 3.0;
  const auto r = eigendecompose(dense_operator(m), {.compute_vectors = false});
  CHECK_FALSE(r.has_vectors());
  CHECK(r.residuals.empty());
  CHECK(r.size() == 2);
}

TEST_CASE("errors") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
  EigenOptions small;
  small.capacity = 3;
  try {
    eigendecompose(dense_operator(m), small);
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
  }
  EigenOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(eigendecompose(dense_operator(m), bad), Error);
  CHECK_THROWS_AS(is_spectrum_real(SpectrumResult{}, 0.0), Error);
  CHECK_THROWS_AS(max_imag(SpectrumResult{}), Error);
}

TEST_CASE("default reality threshold") {
  CHECK(default_eps_im(1.0) == 1e-9);
  CHECK(default_eps_im(1e4) == doctest::Approx(1e-8));
}
