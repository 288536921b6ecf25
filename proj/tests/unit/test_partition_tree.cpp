#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "shapetree/error.hpp"
#include "shapetree/metrics.hpp"
#include "shapetree/partition_tree.hpp"

using namespace shapetree;

namespace {

std::vector<oracle::Leaf> as_oracle(const PartitionTree& t) {
  std::vector<oracle::Leaf> out;
  for (const auto& l : t.leaves()) out.push_back({l.start, l.len});
  return out;
}

std::vector<double> to_vec(const DiscreteDensity& f) { return {f.mass().begin(), f.mass().end()}; }
std::vector<std::uint64_t> to_vec(const SampleCounts& c) { return {c.counts().begin(), c.counts().end()}; }

void expect_structure(const PartitionTree& t) {
  const auto leaves = t.leaves();
  ASSERT_FALSE(leaves.empty());
  std::size_t next = 1;
  for (const auto& l : leaves) {
    EXPECT_EQ(l.start, next);
    next = l.end();
  }
  EXPECT_EQ(next, t.padded_k() + 1);
  EXPECT_EQ(t.nodes()[0].interval, (Interval{1, t.padded_k()}));
  for (const auto& node : t.nodes()) {
    if (node.is_leaf()) continue;
    std::size_t start = node.interval.start;
    for (unsigned j = 0; j < t.arity(); ++j) {
      const auto& child = t.nodes()[static_cast<std::size_t>(node.first_child) + j];
      EXPECT_EQ(child.interval.start, start);
      EXPECT_EQ(child.interval.len * t.arity(), node.interval.len);
      EXPECT_EQ(child.depth, node.depth + 1);
      start = child.interval.end();
    }
  }
}

double leaf_bound(const PartitionTree& t, std::uint64_t n) {
  return 2.5 * std::sqrt(static_cast<double>(t.non_singleton_leaf_count()) / static_cast<double>(n));
}

}  // namespace

TEST(PadToPower, Examples) {
  EXPECT_EQ(pad_to_power(64, 2), 64u);
  EXPECT_EQ(pad_to_power(5, 2), 8u);
  EXPECT_EQ(pad_to_power(10, 3), 27u);
  EXPECT_EQ(pad_to_power(1, 3), 1u);
  EXPECT_THROW(pad_to_power(4, 4), Error);
}

TEST(SplitRules, GreedyBinary) {
  EXPECT_FALSE(greedy_split_decision(5, 5));
  EXPECT_TRUE(greedy_split_decision(8, 0));
  EXPECT_TRUE(greedy_split_decision(5, 2));
  EXPECT_TRUE(greedy_split_decision(2, 5));
  EXPECT_FALSE(greedy_split_decision(3, 1));  // 4 = 4, strict
  EXPECT_FALSE(greedy_split_decision(0, 0));
  EXPECT_TRUE(greedy_split_decision(~0ULL, 0));
}

TEST(SplitRules, GreedyTernary) {
  EXPECT_FALSE(greedy_ternary_split_decision(4, 4, 4));
  EXPECT_TRUE(greedy_ternary_split_decision(9, 0, 0));
  EXPECT_TRUE(greedy_ternary_split_decision(4, 1, 1));
  EXPECT_FALSE(greedy_ternary_split_decision(0, 9, 0));  // negative second difference
  EXPECT_FALSE(greedy_ternary_split_decision(1, 0, 0));  // 1 = 1, strict
  EXPECT_TRUE(greedy_ternary_split_decision(3, 0, 0));
}

TEST(SplitRules, Idealized) {
  EXPECT_FALSE(idealized_split_decision(0.5, 0.5, 100));
  EXPECT_TRUE(idealized_split_decision(1.0, 0.0, 4));
  EXPECT_FALSE(idealized_split_decision(1.0, 0.0, 1));
  EXPECT_TRUE(idealized_ternary_split_decision(0.6, 0.2, 0.2, 100));
}

TEST(GreedyBinary, AllAtFirstAtom) {
  for (const std::uint64_t n : {2u, 5u, 100u}) {
    const SampleCounts c({n, 0});
    const auto t = build_greedy_binary(c);
    EXPECT_EQ(t.leaves(), (std::vector<Interval>{{1, 1}, {2, 1}}));
    const auto e = histogram_estimate(t, c);
    EXPECT_EQ(e.values(), (std::vector<double>{1.0, 0.0}));
  }
  // n = 1: |1 - 0| = sqrt(1), no split
  EXPECT_EQ(build_greedy_binary(SampleCounts({1, 0})).leaf_count(), 1u);
}

TEST(GreedyBinary, EqualCountsGiveOneLeaf) {
  const SampleCounts c(std::vector<std::uint64_t>(16, 7));
  const auto t = build_greedy_binary(c);
  EXPECT_EQ(t.leaf_count(), 1u);
  const auto e = histogram_estimate(t, c);
  for (const double v : e.values()) EXPECT_DOUBLE_EQ(v, 1.0 / 16.0);
}

TEST(GreedyBinary, MatchesReferenceRecursion) {
  const auto f = family(Family::HarmonicZipf, 64);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = sample(f, 1000, seed);
    const auto t = build_greedy_binary(c);
    expect_structure(t);
    EXPECT_EQ(as_oracle(t), oracle::greedy_binary_leaves(to_vec(c))) << "seed " << seed;
  }
}

TEST(GreedyBinary, PaddedDomainMatchesReference) {
  std::mt19937_64 rng(5);
  for (const std::size_t k : {3u, 5u, 37u, 100u, 1000u}) {
    const auto f = oracle::random_monotone(k, rng);
    const auto c = sample(f, 500, k);
    const auto t = build_greedy_binary(c);
    EXPECT_EQ(t.padded_k(), oracle::next_power(k, 2));
    expect_structure(t);
    EXPECT_EQ(as_oracle(t), oracle::greedy_binary_leaves(to_vec(c)));
  }
}

TEST(Histogram, ValuesAndTruncation) {
  const SampleCounts c({6, 2, 1});  // padded to 4
  const auto t = build_greedy_binary(c);
  const auto e = histogram_estimate(t, c);
  EXPECT_EQ(e.domain_k(), 3u);
  for (std::size_t x = 1; x <= 3; ++x) {
    EXPECT_GE(e(x), 0.0);
  }
  // Root splits (8 vs 1); [3, 4] stays a leaf (1 vs 0) holding 1 sample over 2 atoms.
  EXPECT_DOUBLE_EQ(e(1), 6.0 / 9.0);
  EXPECT_DOUBLE_EQ(e(3), 1.0 / (9.0 * 2.0));
  EXPECT_NEAR(e.total_mass(), 17.0 / 18.0, 1e-15);
  EXPECT_LT(e.total_mass(), 1.0);
  const auto renorm = histogram_estimate(t, c, {true});
  EXPECT_NEAR(renorm.total_mass(), 1.0, 1e-15);
}

TEST(Histogram, SingleLeafIsUniform) {
  const SampleCounts c({3, 1, 2, 2});
  const PartitionTree t(2, 4, {{Interval{1, 4}, 0, -1}});
  const auto e = histogram_estimate(t, c);
  for (const double v : e.values()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Histogram, DomainMismatch) {
  const SampleCounts c({3, 1, 2, 2});
  const PartitionTree t(2, 8, {{Interval{1, 8}, 0, -1}});
  EXPECT_THROW(histogram_estimate(t, c), Error);
}

TEST(IdealizedBinary, UniformIsOneLeaf) {
  EXPECT_EQ(build_idealized_binary(family(Family::Uniform, 64), 1000).leaf_count(), 1u);
}

TEST(IdealizedBinary, ZipfLeafBoundAndReference) {
  const auto f = family(Family::HarmonicZipf, 64);
  const std::uint64_t n = 1000;
  const auto t = build_idealized_binary(f, n);
  expect_structure(t);
  EXPECT_EQ(as_oracle(t), oracle::idealized_binary_leaves(to_vec(f), n));
  const double bound = 12.0 * std::cbrt(1000.0) * std::pow(std::log2(64.0 / std::cbrt(1000.0)), 2.0 / 3.0);
  EXPECT_LE(static_cast<double>(t.leaf_count()), bound);
}

TEST(IdealizedBinary, RejectsNonMonotone) {
  try {
    build_idealized_binary(make_density({0.2, 0.8}), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotMonotone);
  }
}

TEST(IdealizedPc, SingleLeafAndFullSplit) {
  const auto u = family(Family::Uniform, 8);
  const PartitionTree single(2, 8, {{Interval{1, 8}, 0, -1}});
  EXPECT_EQ(idealized_pc_estimate(single, u).values(), to_vec(u));

  const auto f = family(Family::HarmonicZipf, 8);
  std::vector<PartitionTree::Node> nodes{{Interval{1, 8}, 0, 1}};
  // complete binary tree, breadth first
  for (std::size_t i = 0; nodes.size() < 15; ++i) {
    const auto iv = nodes[i].interval;
    nodes[i].first_child = static_cast<std::ptrdiff_t>(nodes.size());
    nodes.push_back({Interval{iv.start, iv.len / 2}, nodes[i].depth + 1, -1});
    nodes.push_back({Interval{iv.start + iv.len / 2, iv.len / 2}, nodes[i].depth + 1, -1});
  }
  const PartitionTree full(2, 8, nodes);
  EXPECT_EQ(full.leaf_count(), 8u);
  EXPECT_EQ(idealized_pc_estimate(full, f).values(), to_vec(f));
}

TEST(IdealizedPc, TvWithinLeafCountBoundOnZipf) {
  const auto f = family(Family::HarmonicZipf, 64);
  const auto t = build_idealized_binary(f, 1000);
  const auto e = idealized_pc_estimate(t, f);
  EXPECT_NEAR(e.total_mass(), 1.0, 1e-9);
  EXPECT_LE(tv(e, f), leaf_bound(t, 1000) + 1e-12);
}

TEST(IdealizedTernary, LinearIsOneLeaf) {
  for (const std::size_t k : {9u, 27u, 243u}) {
    const auto f = family(Family::LinearDecreasing, k);
    EXPECT_EQ(build_idealized_ternary(f, 1000000).leaf_count(), 1u) << k;
  }
}

TEST(IdealizedTernary, ZipfLeafBound) {
  const std::uint64_t n = 59049;  // 3^10
  for (const std::size_t k : {27u, 81u, 243u, 729u, 2187u}) {
    const auto f = family(Family::HarmonicZipf, k);
    const auto t = build_idealized_ternary(f, n);
    expect_structure(t);
    EXPECT_EQ(as_oracle(t), oracle::idealized_ternary_leaves(to_vec(f), n));
    const double root5 = std::pow(static_cast<double>(n), 0.2);
    const double bound = 34.0 * root5 * std::pow(std::log(k / root5) / std::log(3.0), 0.8);
    EXPECT_LE(static_cast<double>(t.leaf_count()), bound) << k;
  }
}

TEST(IdealizedTernary, RejectsNonConvex) {
  try {
    build_idealized_ternary(make_density({0.4, 0.35, 0.25}), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotConvex);
  }
}

TEST(IdealizedPl, LinearReproducedExactly) {
  const auto f = family(Family::LinearDecreasing, 27);
  const PartitionTree single(3, 27, {{Interval{1, 27}, 0, -1}});
  const auto e = idealized_pl_estimate(single, f);
  ASSERT_EQ(e.pieces().size(), 1u);
  for (std::size_t x = 1; x <= 27; ++x) EXPECT_NEAR(e(x), f(x), 1e-15);
}

TEST(IdealizedPl, SingletonsCopyF) {
  const auto f = family(Family::HarmonicZipf, 9);
  std::vector<PartitionTree::Node> nodes{{Interval{1, 9}, 0, 1}};
  for (std::size_t j = 0; j < 3; ++j) nodes.push_back({Interval{1 + 3 * j, 3}, 1, -1});
  nodes[1].first_child = 4;
  for (std::size_t j = 0; j < 3; ++j) nodes.push_back({Interval{1 + j, 1}, 2, -1});
  const PartitionTree t(3, 9, nodes);
  const auto e = idealized_pl_estimate(t, f);
  for (std::size_t x = 1; x <= 3; ++x) EXPECT_EQ(e(x), f(x));
  // Leaf [4, 6]: line through the single-atom thirds at 4 and 6.
  EXPECT_NEAR(e(4), f(4), 1e-15);
  EXPECT_NEAR(e(6), f(6), 1e-15);
  EXPECT_NEAR(e(5), (f(4) + f(6)) / 2, 1e-15);
}

TEST(IdealizedPl, TvWithinLeafCountBoundOnZipf243) {
  const std::uint64_t n = 59049;
  const auto f = family(Family::HarmonicZipf, 243);
  const auto t = build_idealized_ternary(f, n);
  const auto e = idealized_pl_estimate(t, f);
  const double m = static_cast<double>(t.non_singleton_leaf_count());
  EXPECT_LE(tv(e, f), 41.0 / 48.0 * std::sqrt(m / n) + 1e-12);
}

TEST(IdealizedPl, NeedsTernaryTree) {
  const auto f = family(Family::LinearDecreasing, 8);
  EXPECT_THROW(idealized_pl_estimate(build_idealized_binary(f, 10), f), Error);
}

TEST(GreedyTernary, MatchesReference) {
  const auto f = family(Family::HarmonicZipf, 243);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = sample(f, 1000, seed);
    const auto t = build_greedy_ternary(c);
    expect_structure(t);
    EXPECT_EQ(as_oracle(t), oracle::greedy_ternary_leaves(to_vec(c)));
  }
}

TEST(GreedyPl, EqualThirdsGiveFlatPiece) {
  const SampleCounts c({4, 4, 4});
  const auto t = build_greedy_ternary(c);
  EXPECT_EQ(t.leaf_count(), 1u);
  const auto e = greedy_pl_estimate(t, c);
  ASSERT_EQ(e.pieces().size(), 1u);
  EXPECT_EQ(e.pieces()[0].slope, 0.0);
  for (const double v : e.values()) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(GreedyPl, SingletonLeafIsCountOverN) {
  const SampleCounts c({9, 0, 0});
  const auto t = build_greedy_ternary(c);
  EXPECT_EQ(t.leaf_count(), 3u);
  const auto e = greedy_pl_estimate(t, c);
  EXPECT_EQ(e.values(), (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(GreedyPl, ValidOnSeededZipf) {
  const auto f = family(Family::HarmonicZipf, 243);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = sample(f, 1000, seed);
    const auto e = greedy_pl_estimate(build_greedy_ternary(c), c);
    EXPECT_EQ(e.domain_k(), 243u);
    for (const double v : e.values()) EXPECT_GE(v, 0.0);
  }
}

TEST(GreedyPl, ClampsNegativeValues) {
  // Thirds 0, 0, 30 on one leaf would give a line below zero at the left end.
  std::vector<std::uint64_t> counts(9, 0);
  counts[0] = 1;
  counts[8] = 30;
  const SampleCounts c(counts);
  const PartitionTree single(3, 9, {{Interval{1, 9}, 0, -1}});
  const auto e = greedy_pl_estimate(single, c);
  for (const double v : e.values()) EXPECT_GE(v, 0.0);
}

TEST(Monotonize, UnchangedWhenNonIncreasing) {
  const PiecewiseEstimate e(4, {{Interval{1, 2}, PiecewiseEstimate::Kind::Constant, 0.3},
                                {Interval{3, 2}, PiecewiseEstimate::Kind::Constant, 0.2}});
  EXPECT_EQ(monotonize(e), e);
}

TEST(Monotonize, TwoPieceAverage) {
  const PiecewiseEstimate e(4, {{Interval{1, 2}, PiecewiseEstimate::Kind::Constant, 0.1},
                                {Interval{3, 2}, PiecewiseEstimate::Kind::Constant, 0.2}});
  const auto m = monotonize(e);
  ASSERT_EQ(m.pieces().size(), 1u);
  EXPECT_EQ(m.pieces()[0].interval, (Interval{1, 4}));
  EXPECT_NEAR(m.pieces()[0].value, 0.15, 1e-16);
}

TEST(Monotonize, MatchesEveryMergeOrder) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pieces_dist(1, 6);
  std::uniform_int_distribution<std::size_t> len_dist(1, 5);
  std::uniform_real_distribution<double> value_dist(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int count = pieces_dist(rng);
    std::vector<PiecewiseEstimate::Piece> pieces;
    oracle::Blocks blocks;
    std::size_t start = 1;
    for (int j = 0; j < count; ++j) {
      const std::size_t len = len_dist(rng);
      const double v = value_dist(rng);
      pieces.push_back({Interval{start, len}, PiecewiseEstimate::Kind::Constant, v});
      blocks.emplace_back(len, v);
      start += len;
    }
    const PiecewiseEstimate e(start - 1, pieces);
    const auto m = monotonize(e);
    for (const auto& outcome : oracle::all_merge_outcomes(blocks)) {
      ASSERT_EQ(outcome.size(), m.pieces().size());
      for (std::size_t j = 0; j < outcome.size(); ++j) {
        EXPECT_EQ(outcome[j].first, m.pieces()[j].interval.len);
        EXPECT_NEAR(static_cast<double>(outcome[j].second), m.pieces()[j].value, 1e-12);
      }
    }
    for (std::size_t j = 0; j + 1 < m.pieces().size(); ++j) {
      EXPECT_GE(m.pieces()[j].value, m.pieces()[j + 1].value);
    }
    EXPECT_NEAR(m.total_mass(), e.total_mass(), 1e-12);
    EXPECT_EQ(monotonize(m), m);
  }
}

TEST(Monotonize, RejectsLinearPieces) {
  const auto f = family(Family::LinearDecreasing, 9);
  const PartitionTree single(3, 9, {{Interval{1, 9}, 0, -1}});
  try {
    monotonize(idealized_pl_estimate(single, f));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPiecewiseConstant);
  }
}

TEST(Monotonize, NeverIncreasesRisk) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 4 + rng() % 200;
    const auto f = oracle::random_monotone(k, rng);
    const auto c = sample(f, 50 + rng() % 2000, rng());
    const auto raw = histogram_estimate(build_greedy_binary(c), c);
    EXPECT_LE(tv(monotonize(raw), f), tv(raw, f) + 1e-12);
  }
}

TEST(PiecewiseEstimate, Validation) {
  using K = PiecewiseEstimate::Kind;
  EXPECT_THROW(PiecewiseEstimate(3, {{Interval{1, 2}, K::Constant, 0.5}}), Error);
  EXPECT_THROW(PiecewiseEstimate(3, {{Interval{1, 2}, K::Constant, 0.5}, {Interval{2, 2}, K::Constant, 0.5}}),
               Error);
  EXPECT_THROW(PiecewiseEstimate(1, {{Interval{1, 1}, K::Constant, -0.1}}), Error);
  EXPECT_NO_THROW(PiecewiseEstimate(1, {{Interval{1, 1}, K::Constant, -1e-13}}));
  const PiecewiseEstimate e(3, {{Interval{1, 3}, K::Linear, 0.0, -0.1, 0.5}});
  EXPECT_NEAR(e(1), 0.4, 1e-15);
  EXPECT_NEAR(e(3), 0.2, 1e-15);
  EXPECT_FALSE(e.is_piecewise_constant());
  EXPECT_THROW(e(4), Error);
}

TEST(PiecewiseEstimate, RenormalizedScalesLinearPieces) {
  using K = PiecewiseEstimate::Kind;
  const PiecewiseEstimate e(3, {{Interval{1, 3}, K::Linear, 0.0, -0.1, 0.5}});
  const auto r = e.renormalized();
  EXPECT_NEAR(r.total_mass(), 1.0, 1e-15);
  EXPECT_NEAR(r(1) / r(3), 2.0, 1e-14);
}
