#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "shapetree/density.hpp"

namespace shapetree {

// Random numbers --------------------------------------------------------------
//
// Every stream is a std::mt19937_64 (output sequence fixed by the C++
// standard) seeded with one SplitMix64 output. Uniform doubles take the top
// 53 bits of a draw, so results are identical on every conforming platform.
// Replication i of a Monte Carlo run with master seed s uses
// derive_seed(s, i) = splitmix64(s ^ splitmix64(i + 0x9E3779B97F4A7C15)).

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Sample counts -----------------------------------------------------------------

/// Per-atom counts of n draws on {1, ..., k}; also answers interval counts
/// N_z and the empirical measure mu_n(A) = count(A) / n.
class SampleCounts {
 public:
  explicit SampleCounts(std::vector<std::uint64_t> counts);

  std::size_t k() const noexcept { return counts_.size(); }
  std::uint64_t n() const noexcept { return prefix_.back(); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t operator()(std::size_t x) const { return counts_.at(x - 1); }

  /// Count over [a, a + len); atoms beyond k count zero. No range checks.
  std::uint64_t padded_count(std::size_t a, std::size_t len) const noexcept;

  friend bool operator==(const SampleCounts& lhs, const SampleCounts& rhs) {
    return lhs.counts_ == rhs.counts_;
  }

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> prefix_;  // prefix_[x] = counts of atoms 1..x
};

/// n i.i.d. draws from f by inverse CDF; bit-identical for equal (f, n, seed).
SampleCounts sample(const DiscreteDensity& f, std::uint64_t n, std::uint64_t seed);

/// Sum of counts over [a, a + len). Throws OutOfRange unless it lies in [1, k + 1).
std::uint64_t interval_count(const SampleCounts& c, std::size_t a, std::size_t len);

/// Sorted, 1-based atom indices.
using AtomSet = std::vector<std::size_t>;

/// max over sets of |mu_n(A) - mu(A)|; 0 for an empty list.
double empirical_sup_deviation(const SampleCounts& c, const DiscreteDensity& f,
                               std::span<const AtomSet> sets);

}  // namespace shapetree
