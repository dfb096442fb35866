#include "nhse/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

#include "nhse/errors.hpp"

namespace nhse {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-arguments";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::NotInBasis: return "not-in-basis";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::Convergence: return "convergence-failure";
    case ErrorKind::Resonance: return "resonance";
    case ErrorKind::BracketInvalid: return "bracket-invalid";
    case ErrorKind::NotIsolable: return "not-isolable";
    case ErrorKind::NoState: return "no-state";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

const char* to_string(Statistics s) noexcept {
  return s == Statistics::Boson ? "boson" : "fermion";
}

Statistics parse_statistics(const std::string& text) {
  if (text == "boson" || text == "bosons") return Statistics::Boson;
  if (text == "fermion" || text == "fermions") return Statistics::Fermion;
  throw Error(ErrorKind::Config, "unknown statistics '" + text + "' (expected boson|fermion)");
}

std::size_t basis_capacity_from_env() {
  const char* raw = std::getenv("NHSE_CAPACITY");
  if (raw == nullptr || *raw == '\0') return kDefaultBasisCapacity;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || value == 0) {
    throw Error(ErrorKind::Config, std::string("NHSE_CAPACITY is not a positive integer: ") + raw);
  }
  return static_cast<std::size_t>(value);
}

SiteIndex combined_site(std::size_t cell, Leg leg, std::size_t cells) {
  if (cell < 1 || cell > cells) {
    throw Error(ErrorKind::InvalidArgument, "cell " + std::to_string(cell) + " outside [1, " +
                                                std::to_string(cells) + "]");
  }
  return SiteIndex{leg == Leg::A ? cell - 1 : cells + cell - 1};
}

FockState::FockState(std::initializer_list<int> occupations) {
  occupations_.reserve(occupations.size());
  for (int n : occupations) {
    if (n < 0 || n > std::numeric_limits<Occupation>::max()) {
      throw Error(ErrorKind::InvalidArgument, "occupation out of range");
    }
    occupations_.push_back(static_cast<Occupation>(n));
  }
}

std::size_t FockState::particle_count() const noexcept {
  return std::accumulate(occupations_.begin(), occupations_.end(), std::size_t{0});
}

std::string FockState::to_string() const {
  std::ostringstream out;
  out << '|';
  for (std::size_t i = 0; i < occupations_.size(); ++i) {
    if (i) out << ',';
    out << static_cast<int>(occupations_[i]);
  }
  out << '>';
  return out.str();
}

double hop_in_place(std::span<Occupation> occ, std::size_t from, std::size_t to,
                    Statistics statistics) {
  const Occupation n_from = occ[from];
  const Occupation n_to = occ[to];
  if (n_from == 0) return 0.0;
  if (statistics == Statistics::Fermion) {
    if (n_to != 0) return 0.0;
    const auto [lo, hi] = std::minmax(from, to);
    int between = 0;
    for (std::size_t s = lo + 1; s < hi; ++s) between += occ[s];
    occ[from] = 0;
    occ[to] = 1;
    return (between % 2 == 0) ? 1.0 : -1.0;
  }
  occ[from] = static_cast<Occupation>(n_from - 1);
  occ[to] = static_cast<Occupation>(n_to + 1);
  return std::sqrt(static_cast<double>(n_from) * static_cast<double>(n_to + 1));
}

std::optional<Hop> apply_single_hop(const FockState& state, SiteIndex from, SiteIndex to,
                                    Statistics statistics) {
  if (from.value >= state.size() || to.value >= state.size()) {
    throw Error(ErrorKind::InvalidArgument, "site index outside the state");
  }
  if (from == to) throw Error(ErrorKind::InvalidArgument, "hop requires from != to");
  std::vector<Occupation> occ(state.occupations().begin(), state.occupations().end());
  const double amplitude = hop_in_place(occ, from.value, to.value, statistics);
  if (amplitude == 0.0) return std::nullopt;
  return Hop{FockState(std::move(occ)), amplitude};
}

namespace {

__extension__ using Wide = unsigned __int128;

std::uint64_t saturating_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // result holds C(n-k+i, i) after step i, so every division is exact.
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    Wide next = static_cast<Wide>(result) * (n - k + i);
    next /= i;
    if (next > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = static_cast<std::uint64_t>(next);
  }
  return result;
}

}  // namespace

std::uint64_t sector_dimension(std::size_t sites, std::size_t particles, Statistics statistics) {
  if (sites == 0) return particles == 0 ? 1 : 0;
  if (statistics == Statistics::Fermion) return saturating_binomial(sites, particles);
  return saturating_binomial(sites + particles - 1, particles);
}

Basis Basis::enumerate(std::size_t cells, std::size_t particles, Statistics statistics,
                       std::size_t capacity) {
  if (cells < 1) throw Error(ErrorKind::InvalidArgument, "need at least one cell");
  if (particles < 1) throw Error(ErrorKind::InvalidArgument, "need at least one particle");
  const std::size_t sites = 2 * cells;
  if (statistics == Statistics::Fermion && particles > sites) {
    throw Error(ErrorKind::InvalidArgument, "more fermions than sites");
  }
  if (particles > std::numeric_limits<Occupation>::max()) {
    throw Error(ErrorKind::InvalidArgument, "particle number exceeds occupation range");
  }
  const std::uint64_t dim = sector_dimension(sites, particles, statistics);
  if (dim > capacity) {
    throw Error(ErrorKind::Capacity, "basis dimension " + std::to_string(dim) +
                                         " exceeds capacity " + std::to_string(capacity));
  }

  Basis basis;
  basis.cells_ = cells;
  basis.particles_ = particles;
  basis.statistics_ = statistics;
  basis.dimension_ = static_cast<std::size_t>(dim);
  basis.counts_.resize((sites + 1) * (particles + 1));
  for (std::size_t m = 0; m <= sites; ++m) {
    for (std::size_t n = 0; n <= particles; ++n) {
      basis.counts_[m * (particles + 1) + n] = sector_dimension(m, n, statistics);
    }
  }

  basis.storage_.reserve(basis.dimension_ * sites);
  const std::size_t max_per_site = statistics == Statistics::Fermion ? 1 : particles;
  std::vector<Occupation> current(sites, 0);
  // Depth-first with values ascending at every position yields ascending
  // lexicographic order; the last site takes whatever is left.
  auto recurse = [&](auto&& self, std::size_t site, std::size_t left) -> void {
    if (site + 1 == sites) {
      if (left > max_per_site) return;
      current[site] = static_cast<Occupation>(left);
      basis.storage_.insert(basis.storage_.end(), current.begin(), current.end());
      return;
    }
    const std::size_t top = std::min(left, max_per_site);
    for (std::size_t v = 0; v <= top; ++v) {
      current[site] = static_cast<Occupation>(v);
      self(self, site + 1, left - v);
    }
  };
  recurse(recurse, 0, particles);
  return basis;
}

FockState Basis::state(std::size_t index) const {
  if (index >= dimension_) {
    throw Error(ErrorKind::InvalidArgument, "basis index " + std::to_string(index) +
                                                " out of range");
  }
  const auto occ = occupations(index);
  return FockState(std::vector<Occupation>(occ.begin(), occ.end()));
}

std::size_t Basis::rank_unchecked(std::span<const Occupation> occ) const noexcept {
  std::uint64_t r = 0;
  std::size_t left = particles_;
  const std::size_t m = sites();
  for (std::size_t site = 0; site + 1 < m; ++site) {
    const std::size_t remaining_sites = m - site - 1;
    for (std::size_t v = 0; v < occ[site]; ++v) r += count(remaining_sites, left - v);
    left -= occ[site];
  }
  return static_cast<std::size_t>(r);
}

std::size_t Basis::index_of(std::span<const Occupation> occ) const {
  if (occ.size() != sites()) {
    throw Error(ErrorKind::NotInBasis, "state has " + std::to_string(occ.size()) +
                                           " sites, basis has " + std::to_string(sites()));
  }
  std::size_t total = 0;
  for (Occupation n : occ) {
    if (statistics_ == Statistics::Fermion && n > 1) {
      throw Error(ErrorKind::NotInBasis, "fermionic occupation above 1");
    }
    total += n;
  }
  if (total != particles_) {
    throw Error(ErrorKind::NotInBasis, "state carries " + std::to_string(total) +
                                           " particles, basis has " + std::to_string(particles_));
  }
  return rank_unchecked(occ);
}

Basis enumerate_basis(std::size_t cells, std::size_t particles, Statistics statistics,
                      std::size_t capacity) {
  return Basis::enumerate(cells, particles, statistics, capacity);
}

std::size_t rank(const Basis& basis, const FockState& state) { return basis.index_of(state); }

FockState unrank(const Basis& basis, std::size_t index) { return basis.state(index); }

}  // namespace nhse
