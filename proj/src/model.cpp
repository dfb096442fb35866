#include "nhse/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <omp.h>

#include "nhse/errors.hpp"

namespace nhse {

void ModelParams::set_j_alpha(double j, double alpha) {
  j_left_a = j * std::exp(alpha);
  j_right_a = j * std::exp(-alpha);
  j_left_b = j * std::exp(-alpha);
  j_right_b = j * std::exp(alpha);
}

void ModelParams::set_mirrored_hopping(double left, double right) {
  j_left_a = left;
  j_right_a = right;
  j_left_b = right;
  j_right_b = left;
}

void ModelParams::validate() const {
  if (cells < 1) throw Error(ErrorKind::InvalidArgument, "cells must be >= 1");
  if (particles < 1) throw Error(ErrorKind::InvalidArgument, "particles must be >= 1");
  if (statistics == Statistics::Fermion && particles > 2 * cells) {
    throw Error(ErrorKind::InvalidArgument, "more fermions than sites");
  }
  for (double v : {j_left_a, j_right_a, j_left_b, j_right_b, j_p, mu, u, u_nn}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite coupling");
  }
  if (statistics == Statistics::Boson && u_nn != 0.0) {
    throw Error(ErrorKind::InvalidArgument, "u_nn is a fermionic coupling; bosons use u");
  }
  if (statistics == Statistics::Fermion && u != 0.0) {
    throw Error(ErrorKind::InvalidArgument, "u is a bosonic coupling; fermions use u_nn");
  }
}

SparseOperator::SparseOperator(std::size_t dimension, std::vector<MatrixEntry> entries)
    : dimension_(dimension) {
  for (const auto& e : entries) {
    if (e.row >= dimension || e.col >= dimension) {
      throw Error(ErrorKind::InvalidArgument, "matrix entry outside dimension");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
}

std::complex<double> SparseOperator::at(std::size_t row, std::size_t col) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                             [](const MatrixEntry& e, const std::pair<std::size_t, std::size_t>& k) {
                               return e.row != k.first ? e.row < k.first : e.col < k.second;
                             });
  if (it != entries_.end() && it->row == row && it->col == col) return it->value;
  return {};
}

bool SparseOperator::is_real() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const MatrixEntry& e) { return e.value.imag() == 0.0; });
}

double SparseOperator::inf_norm() const {
  std::vector<double> rows(dimension_, 0.0);
  for (const auto& e : entries_) rows[e.row] += std::abs(e.value);
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

std::complex<double> SparseOperator::trace() const {
  std::complex<double> t;
  for (const auto& e : entries_) {
    if (e.row == e.col) t += e.value;
  }
  return t;
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dimension_, dimension_);
  for (const auto& e : entries_) m(e.row, e.col) = e.value;
  return m;
}

Eigen::MatrixXd SparseOperator::to_dense_real() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (const auto& e : entries_) m(e.row, e.col) = e.value.real();
  return m;
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::Ref<const Eigen::VectorXcd>& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension_) {
    throw Error(ErrorKind::Mismatch, "vector length does not match operator dimension");
  }
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dimension_);
  for (const auto& e : entries_) y(e.row) += e.value * x(e.col);
  return y;
}

bool operator==(const SparseOperator& a, const SparseOperator& b) {
  if (a.dimension_ != b.dimension_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.row != y.row || x.col != y.col || x.value != y.value) return false;
  }
  return true;
}

double onsite_energy(std::span<const Occupation> occ, const ModelParams& params) {
  const std::size_t cells = occ.size() / 2;
  double interaction = 0.0;
  long imbalance = 0;
  for (std::size_t x = 0; x < cells; ++x) {
    imbalance += static_cast<long>(occ[x]) - static_cast<long>(occ[cells + x]);
  }
  if (params.statistics == Statistics::Boson) {
    for (Occupation n : occ) interaction += 0.5 * params.u * n * (n - 1.0);
  } else {
    for (std::size_t leg = 0; leg < 2; ++leg) {
      for (std::size_t x = 0; x + 1 < cells; ++x) {
        interaction += params.u_nn * occ[leg * cells + x] * occ[leg * cells + x + 1];
      }
    }
  }
  return interaction + params.mu * static_cast<double>(imbalance);
}

double onsite_energy(const FockState& state, const ModelParams& params) {
  if (state.size() != 2 * params.cells) {
    throw Error(ErrorKind::Mismatch, "state length does not match 2L");
  }
  return onsite_energy(state.occupations(), params);
}

namespace {

void check_compatible(const ModelParams& params, const Basis& basis) {
  params.validate();
  if (basis.cells() != params.cells || basis.particles() != params.particles ||
      basis.statistics() != params.statistics) {
    throw Error(ErrorKind::Mismatch, "basis (L, N, statistics) does not match the parameters");
  }
}

struct HopTerm {
  std::size_t from;
  std::size_t to;
  double coefficient;
};

std::vector<HopTerm> hop_terms(const ModelParams& p) {
  const std::size_t cells = p.cells;
  std::vector<HopTerm> terms;
  terms.reserve(6 * cells);
  const double left[2] = {p.j_left_a, p.j_left_b};
  const double right[2] = {p.j_right_a, p.j_right_b};
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const std::size_t offset = leg * cells;
    for (std::size_t x = 0; x + 1 < cells; ++x) {
      // a^dag_x a_{x+1}: from x+1 to x
      if (left[leg] != 0.0) terms.push_back({offset + x + 1, offset + x, -left[leg]});
      if (right[leg] != 0.0) terms.push_back({offset + x, offset + x + 1, -right[leg]});
    }
  }
  if (p.j_p != 0.0) {
    for (std::size_t x = 0; x < cells; ++x) {
      terms.push_back({cells + x, x, p.j_p});
      terms.push_back({x, cells + x, p.j_p});
    }
  }
  return terms;
}

// Column `col` of H: all entries <s'|H|s_col>.
void assemble_column(const ModelParams& params, const Basis& basis,
                     const std::vector<HopTerm>& terms, std::size_t col,
                     std::vector<Occupation>& scratch, std::vector<MatrixEntry>& out) {
  const auto occ = basis.occupations(col);
  const double diagonal = onsite_energy(occ, params);
  if (diagonal != 0.0) out.push_back({col, col, diagonal});
  for (const auto& term : terms) {
    if (occ[term.from] == 0) continue;
    std::copy(occ.begin(), occ.end(), scratch.begin());
    const double amplitude = hop_in_place(scratch, term.from, term.to, params.statistics);
    if (amplitude == 0.0) continue;
    out.push_back({basis.rank_unchecked(scratch), col, term.coefficient * amplitude});
  }
}

}  // namespace

SparseOperator build_hamiltonian_serial(const ModelParams& params, const Basis& basis) {
  check_compatible(params, basis);
  const auto terms = hop_terms(params);
  std::vector<Occupation> scratch(basis.sites());
  std::vector<MatrixEntry> entries;
  entries.reserve(basis.dimension() * (terms.size() / 2 + 1));
  for (std::size_t col = 0; col < basis.dimension(); ++col) {
    assemble_column(params, basis, terms, col, scratch, entries);
  }
  return SparseOperator(basis.dimension(), std::move(entries));
}

SparseOperator build_hamiltonian(const ModelParams& params, const Basis& basis, int workers) {
  check_compatible(params, basis);
  const auto terms = hop_terms(params);
  const std::size_t dim = basis.dimension();
  const int threads = workers > 0 ? workers : omp_get_max_threads();

  // One buffer per contiguous column block; concatenated in block order the
  // triplets come out exactly as in the serial loop.
  std::vector<std::vector<MatrixEntry>> blocks(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t begin = dim * t / nt;
    const std::size_t end = dim * (t + 1) / nt;
    std::vector<Occupation> scratch(basis.sites());
    auto& out = blocks[t];
    out.reserve((end - begin) * (terms.size() / 2 + 1));
    for (std::size_t col = begin; col < end; ++col) {
      assemble_column(params, basis, terms, col, scratch, out);
    }
  }
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  std::vector<MatrixEntry> entries;
  entries.reserve(total);
  for (auto& b : blocks) entries.insert(entries.end(), b.begin(), b.end());
  return SparseOperator(dim, std::move(entries));
}

SparseOperator build_single_particle_matrix(const ModelParams& params) {
  if (params.cells < 1) throw Error(ErrorKind::InvalidArgument, "cells must be >= 1");
  const std::size_t cells = params.cells;
  std::vector<MatrixEntry> entries;
  for (std::size_t x = 0; x < cells; ++x) {
    if (params.mu != 0.0) {
      entries.push_back({x, x, params.mu});
      entries.push_back({cells + x, cells + x, -params.mu});
    }
    if (params.j_p != 0.0) {
      entries.push_back({x, cells + x, params.j_p});
      entries.push_back({cells + x, x, params.j_p});
    }
    if (x + 1 < cells) {
      entries.push_back({x, x + 1, -params.j_left_a});
      entries.push_back({x + 1, x, -params.j_right_a});
      entries.push_back({cells + x, cells + x + 1, -params.j_left_b});
      entries.push_back({cells + x + 1, cells + x, -params.j_right_b});
    }
  }
  std::erase_if(entries, [](const MatrixEntry& e) { return e.value == 0.0; });
  return SparseOperator(2 * cells, std::move(entries));
}

}  // namespace nhse
