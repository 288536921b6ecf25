#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shapetree/density.hpp"
#include "shapetree/error.hpp"
#include "shapetree/metrics.hpp"

using namespace shapetree;

namespace {

std::vector<std::uint8_t> random_theta(std::size_t r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> t(r);
  for (auto& b : t) b = static_cast<std::uint8_t>(rng() & 1U);
  return t;
}

bool convex_regime(Regime g) { return g == Regime::ConvexLargeK || g == Regime::ConvexSmallK; }

struct Case {
  Regime regime;
  std::uint64_t k;
  std::size_t r;
  double epsilon;
};

// Visible perturbations: epsilon large enough that every bin differs in double.
const Case kCases[] = {
    {Regime::MonotoneLargeK, 20000, 30, 0.05}, {Regime::MonotoneLargeK, 5000, 12, 0.15},
    {Regime::MonotoneSmallK, 1000, 500, 0.5},  {Regime::MonotoneSmallK, 5, 2, 0.9},
    {Regime::ConvexSmallK, 300, 100, 0.5},     {Regime::ConvexSmallK, 10, 3, 0.25},
    {Regime::ConvexLargeK, 10000, 10, 0.5},    {Regime::ConvexLargeK, 60000, 30, 0.2},
};

HypercubeSpec spec_for(const Case& c, std::vector<std::uint8_t> theta) {
  HypercubeSpec s{c.regime, 1000, c.k, c.r, c.epsilon, std::move(theta)};
  if (c.regime == Regime::ConvexLargeK) s.k = std::min(s.k, assouad_natural_support(s));
  return s;
}

double restricted_l1(const DiscreteDensity& f, const DiscreteDensity& g, const Interval& bin) {
  double s = 0.0;
  for (std::size_t x = bin.start; x < bin.end(); ++x) s += std::fabs(f(x) - g(x));
  return s;
}

}  // namespace

TEST(AssouadParams, MonotoneSmallK) {
  const auto p = assouad_default_params(Regime::MonotoneSmallK, 1000, 4);
  EXPECT_EQ(p.r, 2u);
  EXPECT_NEAR(p.epsilon, std::exp(-12.0) * 2 * std::sqrt(4.0 / 1000.0), 1e-18);
}

TEST(AssouadParams, ConvexSmallK) {
  const auto p = assouad_default_params(Regime::ConvexSmallK, 1000, 9);
  EXPECT_EQ(p.r, 3u);
  EXPECT_NEAR(p.epsilon, std::exp(-100.0) * 9 * std::sqrt(9.0 / 1000.0), 1e-60);
}

TEST(AssouadParams, MonotoneLargeKSmallestR) {
  for (const auto& [n, k] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
           {1000000, 298096}, {1000, 100000}, {50000, 1ULL << 40}}) {
    const auto p = assouad_default_params(Regime::MonotoneLargeK, n, k);
    const double l = std::log(static_cast<double>(k)) - std::log(static_cast<double>(n)) / 3.0;
    const double bound = 0.25 * std::cbrt(static_cast<double>(n) * l * l);
    EXPECT_GE(static_cast<double>(p.r), bound);
    EXPECT_LT(static_cast<double>(p.r) - 1.0, bound);
    EXPECT_NEAR(p.epsilon, 0.25 * std::cbrt(l / static_cast<double>(n)), 1e-15);
  }
}

TEST(AssouadParams, ConvexLargeK) {
  const std::uint64_t n = 100000;
  const auto k = static_cast<std::uint64_t>(std::ceil(std::exp(40.0) * 10.0));
  const auto p = assouad_default_params(Regime::ConvexLargeK, n, k);
  const double l = std::log(static_cast<double>(k)) - std::log(static_cast<double>(n)) / 5.0;
  EXPECT_NEAR(p.epsilon, 0.5 * std::pow(l / n, 0.2), 1e-12);
  EXPECT_GE(static_cast<double>(p.r), std::pow(n, 0.2) * std::pow(l, 0.8) / 18.0);
}

TEST(AssouadParams, OutOfRegime) {
  for (const auto& [g, n, k] : std::vector<std::tuple<Regime, std::uint64_t, std::uint64_t>>{
           {Regime::MonotoneLargeK, 1000000, 1000},
           {Regime::MonotoneSmallK, 1000000, 1000000},
           {Regime::MonotoneSmallK, 100, 1},
           {Regime::ConvexLargeK, 100000, 1000},
           {Regime::ConvexSmallK, 100, 2}}) {
    try {
      assouad_default_params(g, n, k);
      ADD_FAILURE() << regime_name(g);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::OutOfRegime);
    }
  }
}

TEST(AssouadDensity, MonotoneLargeKOnesIsFlatPerBin) {
  HypercubeSpec s{Regime::MonotoneLargeK, 1000, 20000, 30, 0.05, std::vector<std::uint8_t>(30, 1)};
  const auto f = assouad_density(s);
  for (const auto& bin : assouad_bins(s)) {
    const double expected = 1.0 / (30.0 * static_cast<double>(bin.len));
    for (std::size_t x = bin.start; x < bin.end(); ++x) EXPECT_NEAR(f(x), expected, expected * 1e-12);
  }
}

TEST(AssouadDensity, MonotoneLargeKBinSizes) {
  HypercubeSpec s{Regime::MonotoneLargeK, 1000, 20000, 30, 0.05, std::vector<std::uint8_t>(30, 0)};
  const auto bins = assouad_bins(s);
  ASSERT_EQ(bins.size(), 30u);
  EXPECT_EQ(bins[0], (Interval{1, 2}));
  for (std::size_t i = 0; i < bins.size(); ++i) {
    EXPECT_EQ(bins[i].len % 2, 0u);
    EXPECT_GE(static_cast<double>(bins[i].len), 2.0 * std::exp(4.0 * 0.05 * static_cast<double>(i)) * (1 - 1e-12));
    if (i > 0) EXPECT_EQ(bins[i].start, bins[i - 1].end());
  }
}

TEST(AssouadDensity, MonotoneSmallKMaxAtom) {
  const std::size_t r = 2;
  const double eps = 0.4;
  const double a_minus_b = (1.0 + eps) / (2.0 * r);
  double max_over_theta = 0.0;
  for (const auto theta : {std::vector<std::uint8_t>{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
    const auto f = assouad_density({Regime::MonotoneSmallK, 100, 4, r, eps, theta});
    const double top = *std::max_element(f.mass().begin(), f.mass().end());
    if (theta[0] == 0) EXPECT_NEAR(top, a_minus_b, 1e-14);
    EXPECT_LE(top, a_minus_b + 1e-14);
    max_over_theta = std::max(max_over_theta, top);
  }
  EXPECT_NEAR(max_over_theta, a_minus_b, 1e-14);
}

TEST(AssouadDensity, NormalizedAndInClass) {
  for (const auto& c : kCases) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      std::vector<std::uint8_t> theta = seed == 0   ? std::vector<std::uint8_t>(c.r, 0)
                                        : seed == 1 ? std::vector<std::uint8_t>(c.r, 1)
                                                    : random_theta(c.r, seed);
      const auto f = assouad_density(spec_for(c, theta));
      long double sum = 0;
      for (const double m : f.mass()) sum += m;
      EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-9) << regime_name(c.regime);
      EXPECT_TRUE(is_non_increasing(f)) << regime_name(c.regime) << " seed " << seed;
      if (convex_regime(c.regime)) EXPECT_TRUE(is_convex_non_increasing(f)) << regime_name(c.regime);
    }
  }
}

TEST(AssouadDensity, SeparationAndAffinity) {
  for (const auto& c : kCases) {
    const auto bounds = appendix_bounds(c.regime, c.r, c.epsilon);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto theta = random_theta(c.r, seed + 100);
      const auto base = spec_for(c, theta);
      const auto f = assouad_density(base);
      const auto bins = assouad_bins(base);
      for (std::size_t i = 0; i < c.r; ++i) {
        auto flipped = base;
        flipped.theta[i] ^= 1U;
        const auto g = assouad_density(flipped);
        const double l1 = restricted_l1(f, g, bins[i]);
        if (c.regime == Regime::ConvexLargeK) {
          EXPECT_GE(l1, bounds.alpha) << "bin " << i;
        } else {
          EXPECT_NEAR(l1, bounds.alpha, 1e-9) << regime_name(c.regime) << " bin " << i;
          EXPECT_NEAR(l1 / bounds.alpha, 1.0, 1e-6) << regime_name(c.regime) << " bin " << i;
        }
        EXPECT_GE(hellinger_affinity(f, g), bounds.beta - 1e-9) << regime_name(c.regime);
      }
    }
  }
}

TEST(AssouadDensity, FlipChangesOnlyItsBin) {
  for (const auto& c : kCases) {
    const auto base = spec_for(c, random_theta(c.r, 7));
    const auto f = assouad_density(base);
    const auto bins = assouad_bins(base);
    for (std::size_t i = 0; i < c.r; i += std::max<std::size_t>(1, c.r / 7)) {
      auto flipped = base;
      flipped.theta[i] ^= 1U;
      const auto g = assouad_density(flipped);
      for (std::size_t x = 1; x <= f.k(); ++x) {
        if (x >= bins[i].start && x < bins[i].end()) continue;
        EXPECT_EQ(f(x), g(x)) << regime_name(c.regime) << " bin " << i << " atom " << x;
      }
    }
  }
}

TEST(AssouadDensity, MonotoneTailIsZero) {
  HypercubeSpec s{Regime::MonotoneLargeK, 1000, 20000, 30, 0.05, random_theta(30, 3)};
  const auto f = assouad_density(s);
  const auto used = assouad_natural_support(s);
  EXPECT_EQ(used, assouad_bins(s).back().end() - 1);
  for (std::size_t x = used + 1; x <= f.k(); ++x) EXPECT_EQ(f(x), 0.0);
}

TEST(AssouadDensity, ConvexLargeKNaturalSupport) {
  HypercubeSpec s{Regime::ConvexLargeK, 1000, 1ULL << 40, 10, 0.5, random_theta(10, 4)};
  const auto support = assouad_natural_support(s);
  s.k = support;
  const auto f = assouad_density(s);
  EXPECT_GT(f(support), 0.0);
  s.k = support + 50;
  const auto g = assouad_density(s);
  for (std::size_t x = 1; x <= support; ++x) EXPECT_EQ(f(x), g(x));
  for (std::size_t x = support + 1; x <= g.k(); ++x) EXPECT_EQ(g(x), 0.0);
  EXPECT_TRUE(is_convex_non_increasing(g));
}

TEST(AssouadDensity, Infeasible) {
  const auto expect_infeasible = [](HypercubeSpec s) {
    try {
      assouad_density(s);
      ADD_FAILURE() << regime_name(s.regime);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InfeasibleSpec);
    }
  };
  expect_infeasible({Regime::MonotoneSmallK, 100, 3, 2, 0.5, {0, 0}});        // bins exceed k
  expect_infeasible({Regime::MonotoneSmallK, 100, 4, 2, 1.5, {0, 0}});        // epsilon
  expect_infeasible({Regime::MonotoneSmallK, 100, 4, 2, 0.5, {0}});           // theta length
  expect_infeasible({Regime::MonotoneLargeK, 100, 20000, 30, 0.75, std::vector<std::uint8_t>(30)});
  expect_infeasible({Regime::ConvexSmallK, 100, 9, 3, 0.6, {0, 0, 0}});       // epsilon > 1/2
  expect_infeasible({Regime::ConvexSmallK, 100, 8, 3, 0.2, {0, 0, 0}});       // bins exceed k
  expect_infeasible({Regime::ConvexLargeK, 100, 1000, 30, 0.2, std::vector<std::uint8_t>(30)});
}

TEST(AssouadDensity, AcceptancePointsAreInClass) {
  struct Point {
    Regime regime;
    std::uint64_t n;
    std::uint64_t k;
  };
  const Point points[] = {{Regime::MonotoneLargeK, 1000000, 298096},
                          {Regime::MonotoneSmallK, 1000000, 1000},
                          {Regime::ConvexSmallK, 100000, 300}};
  for (const auto& p : points) {
    const auto params = assouad_default_params(p.regime, p.n, p.k);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto f = assouad_density({p.regime, p.n, p.k, params.r, params.epsilon, random_theta(params.r, seed)});
      EXPECT_TRUE(is_non_increasing(f));
      if (convex_regime(p.regime)) EXPECT_TRUE(is_convex_non_increasing(f));
    }
  }
}

TEST(AppendixBounds, Formulas) {
  const double e = 0.2;
  const double r = 5;
  auto b = appendix_bounds(Regime::MonotoneLargeK, 5, e);
  EXPECT_DOUBLE_EQ(b.alpha, e / r);
  EXPECT_DOUBLE_EQ(b.beta, 1 - e * e / (2 * r));
  b = appendix_bounds(Regime::MonotoneSmallK, 5, e);
  EXPECT_DOUBLE_EQ(b.alpha, e / (r * r));
  b = appendix_bounds(Regime::ConvexLargeK, 5, e);
  EXPECT_DOUBLE_EQ(b.alpha, e * e / (72 * r));
  EXPECT_DOUBLE_EQ(b.beta, 1 - std::pow(e, 4) / (9 * r));
  b = appendix_bounds(Regime::ConvexSmallK, 5, e);
  EXPECT_DOUBLE_EQ(b.alpha, e / (6 * r * r * r));
  EXPECT_DOUBLE_EQ(b.beta, 1 - e * e / (48 * std::pow(r, 5)));
}

TEST(Regime, Names) {
  for (const auto g : {Regime::MonotoneLargeK, Regime::MonotoneSmallK, Regime::ConvexLargeK,
                       Regime::ConvexSmallK}) {
    EXPECT_EQ(parse_regime(regime_name(g)), g);
  }
  EXPECT_THROW(parse_regime("monotone"), Error);
}
