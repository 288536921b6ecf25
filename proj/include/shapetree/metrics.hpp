#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "shapetree/density.hpp"
#include "shapetree/partition_tree.hpp"

namespace shapetree {

/// Total variation as half the L1 distance between per-atom values.
/// Throws DomainMismatch on differing lengths.
double tv(std::span<const double> f, std::span<const double> g);
double tv(const DiscreteDensity& f, const DiscreteDensity& g);
double tv(const PiecewiseEstimate& e, const DiscreteDensity& f);

/// max over all 2^k events A of |mu(A) - nu(A)|. Throws TooLarge for k > 20.
double tv_sup_bruteforce(const DiscreteDensity& f, const DiscreteDensity& g);

/// sum_x sqrt(f(x) g(x)).
double hellinger_affinity(std::span<const double> f, std::span<const double> g);
double hellinger_affinity(const DiscreteDensity& f, const DiscreteDensity& g);

/// Assouad's lemma: (r alpha / 4) * max(0, 1 - sqrt(2 n (1 - beta))).
double assouad_lower_bound(std::size_t r, double alpha, double beta, std::uint64_t n);

// Minimax rate functions --------------------------------------------------------

enum class ShapeClass { Monotone, Convex };
enum class RateBranch { SmallK, MidK, LargeK };

std::string_view rate_branch_name(RateBranch branch) noexcept;
ShapeClass parse_shape_class(std::string_view name);

struct RateRegime {
  ShapeClass shape = ShapeClass::Monotone;
  std::uint64_t n = 1;
  std::uint64_t k = 2;
  RateBranch branch = RateBranch::SmallK;
  double value = 0.0;
};

/// sqrt(k/n) below 2 n^{1/3}; (log2(k / n^{1/3}) / n)^{1/3} up to n^{1/3} 2^n; 1 beyond.
RateRegime rate_monotone(std::uint64_t n, std::uint64_t k);
/// sqrt(k/n) below 3 n^{1/5}; (log3(k / n^{1/5}) / n)^{2/5} up to n^{1/5} 3^n; 1 beyond.
RateRegime rate_convex(std::uint64_t n, std::uint64_t k);

/// VC dimension of unions of at most ell integer intervals restricted to
/// {1, ..., m}, by exhaustive shattering search. Throws TooLarge for m > 24 or ell > 4.
std::size_t vc_unions_intervals_brute(std::size_t ell, std::size_t m);

}  // namespace shapetree
