#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nhse {

enum class Statistics { Boson, Fermion };
enum class Leg { A, B };

const char* to_string(Statistics s) noexcept;
Statistics parse_statistics(const std::string& text);

inline constexpr std::size_t kDefaultBasisCapacity = 200000;

/// Basis cap, honouring the NHSE_CAPACITY environment variable when set.
std::size_t basis_capacity_from_env();

/// Zero-based index into the 2L sites of the ladder. A-leg cells occupy
/// [0, L), B-leg cells occupy [L, 2L).
struct SiteIndex {
  std::size_t value = 0;

  friend constexpr auto operator<=>(SiteIndex, SiteIndex) = default;
};

/// Maps (cell x in [1, L], leg) to the combined coordinate.
SiteIndex combined_site(std::size_t cell, Leg leg, std::size_t cells);

using Occupation = std::uint8_t;

class FockState {
 public:
  FockState() = default;
  explicit FockState(std::vector<Occupation> occupations)
      : occupations_(std::move(occupations)) {}
  FockState(std::initializer_list<int> occupations);

  std::size_t size() const noexcept { return occupations_.size(); }
  Occupation operator[](std::size_t site) const { return occupations_[site]; }
  Occupation& operator[](std::size_t site) { return occupations_[site]; }
  std::span<const Occupation> occupations() const noexcept { return occupations_; }
  std::size_t particle_count() const noexcept;

  std::string to_string() const;

  friend bool operator==(const FockState&, const FockState&) = default;
  friend auto operator<=>(const FockState& a, const FockState& b) {
    return a.occupations_ <=> b.occupations_;
  }

 private:
  std::vector<Occupation> occupations_;
};

struct Hop {
  FockState state;
  double amplitude = 0.0;
};

/// Matrix element of a^dagger_to a_from acting on `state`. Bosons pick up
/// sqrt(n_from (n_to + 1)); fermions pick up the Jordan-Wigner sign
/// (-1)^(occupied sites strictly between from and to). Returns nullopt when
/// the move annihilates the state.
std::optional<Hop> apply_single_hop(const FockState& state, SiteIndex from, SiteIndex to,
                                    Statistics statistics);

/// In-place variant used by the assembly kernels. On success the occupations
/// are modified and the amplitude returned; on a blocked move the
/// occupations are left untouched and 0 is returned.
double hop_in_place(std::span<Occupation> occupations, std::size_t from, std::size_t to,
                    Statistics statistics);

/// Number of N-particle states on `sites` sites (saturates at UINT64_MAX).
std::uint64_t sector_dimension(std::size_t sites, std::size_t particles, Statistics statistics);

/// Fixed-particle-number Fock basis on the 2L-site ladder, ordered
/// lexicographically (ascending) on the occupation sequences. Ranking is
/// combinatorial, so no hash map is kept.
class Basis {
 public:
  static Basis enumerate(std::size_t cells, std::size_t particles, Statistics statistics,
                         std::size_t capacity = kDefaultBasisCapacity);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t cells() const noexcept { return cells_; }
  std::size_t sites() const noexcept { return 2 * cells_; }
  std::size_t particles() const noexcept { return particles_; }
  Statistics statistics() const noexcept { return statistics_; }

  std::span<const Occupation> occupations(std::size_t index) const {
    return {storage_.data() + index * sites(), sites()};
  }
  FockState state(std::size_t index) const;

  /// Throws ErrorKind::NotInBasis for wrong length, particle number or
  /// statistics.
  std::size_t index_of(std::span<const Occupation> occupations) const;
  std::size_t index_of(const FockState& state) const { return index_of(state.occupations()); }

  /// Unchecked rank; the caller guarantees the occupations belong to the basis.
  std::size_t rank_unchecked(std::span<const Occupation> occupations) const noexcept;

 private:
  Basis() = default;
  std::uint64_t count(std::size_t sites_left, std::size_t particles_left) const noexcept {
    return counts_[sites_left * (particles_ + 1) + particles_left];
  }

  std::size_t cells_ = 0;
  std::size_t particles_ = 0;
  Statistics statistics_ = Statistics::Boson;
  std::size_t dimension_ = 0;
  std::vector<Occupation> storage_;
  std::vector<std::uint64_t> counts_;
};

Basis enumerate_basis(std::size_t cells, std::size_t particles, Statistics statistics,
                      std::size_t capacity = kDefaultBasisCapacity);
std::size_t rank(const Basis& basis, const FockState& state);
FockState unrank(const Basis& basis, std::size_t index);

}  // namespace nhse
