#include "shapetree/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapetree/error.hpp"

namespace shapetree {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(master_seed ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

SampleCounts::SampleCounts(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw Error(Errc::BadParam, "counts need at least one atom");
  prefix_.resize(counts_.size() + 1, 0);
  for (std::size_t i = 0; i < counts_.size(); ++i) prefix_[i + 1] = prefix_[i] + counts_[i];
}

std::uint64_t SampleCounts::padded_count(std::size_t a, std::size_t len) const noexcept {
  const std::size_t k = counts_.size();
  const std::size_t lo = std::min(a - 1, k);
  const std::size_t hi = std::min(a - 1 + len, k);
  return prefix_[hi] - prefix_[lo];
}

SampleCounts sample(const DiscreteDensity& f, std::uint64_t n, std::uint64_t seed) {
  const auto mass = f.mass();
  const std::size_t k = mass.size();
  std::vector<double> cdf(k);
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < k; ++i) {
    running += mass[i];
    cdf[i] = running;
    if (mass[i] > 0.0) last_positive = i;
  }

  std::vector<std::uint64_t> counts(k, 0);
  Rng rng(seed);
  // Draws are scaled by the actual total so rounding in the cumulative sum
  // never leaves a gap at the top.
  const double total = running;
  for (std::uint64_t draw = 0; draw < n; ++draw) {
    const double u = rng.uniform() * total;
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx > last_positive) idx = last_positive;
    ++counts[idx];
  }
  return SampleCounts(std::move(counts));
}

std::uint64_t interval_count(const SampleCounts& c, std::size_t a, std::size_t len) {
  if (a < 1 || a - 1 + len > c.k()) {
    throw Error(Errc::OutOfRange, "interval [" + std::to_string(a) + ", " + std::to_string(a + len) +
                                      ") outside [1, " + std::to_string(c.k() + 1) + ")");
  }
  return c.padded_count(a, len);
}

double empirical_sup_deviation(const SampleCounts& c, const DiscreteDensity& f,
                               std::span<const AtomSet> sets) {
  if (c.k() != f.k()) throw Error(Errc::DomainMismatch, "counts and density differ in k");
  if (c.n() == 0) throw Error(Errc::BadParam, "empirical measure needs n >= 1");
  const auto n = static_cast<double>(c.n());
  double best = 0.0;
  for (const auto& set : sets) {
    std::uint64_t count = 0;
    double mass = 0.0;
    for (const auto x : set) {
      if (x < 1 || x > c.k()) throw Error(Errc::OutOfRange, "atom " + std::to_string(x));
      count += c(x);
      mass += f(x);
    }
    best = std::max(best, std::fabs(static_cast<double>(count) / n - mass));
  }
  return best;
}

}  // namespace shapetree
