#include "shapetree/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "shapetree/error.hpp"

namespace shapetree {
namespace {

void check_same_k(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(Errc::DomainMismatch, "domains differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// Runs of selected points, read in increasing order: each run needs its own interval.
int runs(std::uint32_t labels) { return std::popcount(labels & ~(labels << 1)); }

// Calls visit(mask) for every d-subset of {0, ..., m - 1} until it returns true.
template <typename Visit>
bool any_subset(std::size_t m, std::size_t d, Visit visit) {
  if (d == 0) return visit(std::uint32_t{0});
  std::uint32_t mask = (std::uint32_t{1} << d) - 1;
  const std::uint32_t limit = std::uint32_t{1} << m;
  while (mask < limit) {
    if (visit(mask)) return true;
    // next mask with the same popcount
    const std::uint32_t low = mask & -mask;
    const std::uint32_t ripple = mask + low;
    mask = ripple | (((ripple ^ mask) >> 2) / low);
  }
  return false;
}

}  // namespace

double tv(std::span<const double> f, std::span<const double> g) {
  check_same_k(f.size(), g.size());
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::fabs(static_cast<long double>(f[i]) - g[i]);
  return static_cast<double>(s / 2.0L);
}

double tv(const DiscreteDensity& f, const DiscreteDensity& g) { return tv(f.mass(), g.mass()); }

double tv(const PiecewiseEstimate& e, const DiscreteDensity& f) {
  check_same_k(e.domain_k(), f.k());
  const auto values = e.values();
  return tv(values, f.mass());
}

double tv_sup_bruteforce(const DiscreteDensity& f, const DiscreteDensity& g) {
  check_same_k(f.k(), g.k());
  const std::size_t k = f.k();
  if (k > 20) throw Error(Errc::TooLarge, "2^k events with k = " + std::to_string(k));
  std::vector<long double> diff(k);
  for (std::size_t i = 0; i < k; ++i) diff[i] = static_cast<long double>(f.mass()[i]) - g.mass()[i];
  long double best = 0.0L;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask >> i & 1U) s += diff[i];
    }
    best = std::max(best, std::fabs(s));
  }
  return static_cast<double>(best);
}

double hellinger_affinity(std::span<const double> f, std::span<const double> g) {
  check_same_k(f.size(), g.size());
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::sqrt(static_cast<long double>(f[i]) * g[i]);
  return static_cast<double>(s);
}

double hellinger_affinity(const DiscreteDensity& f, const DiscreteDensity& g) {
  return hellinger_affinity(f.mass(), g.mass());
}

double assouad_lower_bound(std::size_t r, double alpha, double beta, std::uint64_t n) {
  if (!(alpha > 0.0) || !(beta > 0.0 && beta <= 1.0) || n == 0) {
    throw Error(Errc::BadParam, "need alpha > 0, beta in (0, 1], n >= 1");
  }
  const double deficiency = std::sqrt(2.0 * static_cast<double>(n) * (1.0 - beta));
  return static_cast<double>(r) * alpha / 4.0 * std::max(0.0, 1.0 - deficiency);
}

std::string_view rate_branch_name(RateBranch branch) noexcept {
  switch (branch) {
    case RateBranch::SmallK: return "SmallK";
    case RateBranch::MidK: return "MidK";
    case RateBranch::LargeK: return "LargeK";
  }
  return "Unknown";
}

ShapeClass parse_shape_class(std::string_view name) {
  if (name == "monotone") return ShapeClass::Monotone;
  if (name == "convex") return ShapeClass::Convex;
  throw Error(Errc::BadParam, "unknown class '" + std::string(name) + "'");
}

namespace {

// Thresholds b * n^{1/d} and n^{1/d} b^n compared as logarithms base b.
RateRegime rate(ShapeClass shape, std::uint64_t n, std::uint64_t k, double base, double root,
                double power) {
  if (n < 1 || k < 2) throw Error(Errc::BadParam, "rates need n >= 1 and k >= 2");
  const double log_base = std::log(base);
  const double log_k = std::log(static_cast<double>(k)) / log_base;
  const double log_root_n = std::log(static_cast<double>(n)) / log_base / root;
  const auto nd = static_cast<double>(n);
  RateRegime out{shape, n, k, RateBranch::SmallK, 0.0};
  if (log_k < 1.0 + log_root_n) {
    out.value = std::sqrt(static_cast<double>(k) / nd);
  } else if (log_k < log_root_n + nd) {
    out.branch = RateBranch::MidK;
    out.value = std::pow((log_k - log_root_n) / nd, power);
  } else {
    out.branch = RateBranch::LargeK;
    out.value = 1.0;
  }
  return out;
}

}  // namespace

RateRegime rate_monotone(std::uint64_t n, std::uint64_t k) {
  return rate(ShapeClass::Monotone, n, k, 2.0, 3.0, 1.0 / 3.0);
}

RateRegime rate_convex(std::uint64_t n, std::uint64_t k) {
  return rate(ShapeClass::Convex, n, k, 3.0, 5.0, 2.0 / 5.0);
}

std::size_t vc_unions_intervals_brute(std::size_t ell, std::size_t m) {
  if (ell == 0 || m == 0) throw Error(Errc::BadParam, "ell and m must be positive");
  if (m > 24 || ell > 4) throw Error(Errc::TooLarge, "enumeration limited to m <= 24, ell <= 4");
  // A labeling of S (points in increasing order) is cut out by a union of at
  // most ell intervals iff its selected points form at most ell runs.
  const auto shattered = [&](std::uint32_t set) {
    const auto d = static_cast<unsigned>(std::popcount(set));
    const std::uint32_t all = d == 32 ? ~0U : (std::uint32_t{1} << d) - 1;
    const std::uint32_t alternating = 0x55555555U & all;
    if (static_cast<std::size_t>(runs(alternating)) > ell) return false;
    for (std::uint32_t labels = 0; labels <= all; ++labels) {
      if (static_cast<std::size_t>(runs(labels)) > ell) return false;
      if (labels == all) break;
    }
    return true;
  };
  for (std::size_t d = m; d > 0; --d) {
    if (any_subset(m, d, shattered)) return d;
  }
  return 0;
}

}  // namespace shapetree
