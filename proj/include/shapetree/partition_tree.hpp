#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shapetree/density.hpp"
#include "shapetree/sampling.hpp"

namespace shapetree {

/// Rooted ordered tree of equal-split intervals over {1, ..., padded_k}.
/// Nodes are stored breadth first with each node's children contiguous;
/// leaves() walks the tree depth first, so it lists leaves left to right.
class PartitionTree {
 public:
  struct Node {
    Interval interval;
    std::size_t depth = 0;
    std::ptrdiff_t first_child = -1;  // children are contiguous: first_child .. + arity - 1
    bool is_leaf() const noexcept { return first_child < 0; }
  };

  PartitionTree(unsigned arity, std::size_t padded_k, std::vector<Node> nodes);

  unsigned arity() const noexcept { return arity_; }
  std::size_t padded_k() const noexcept { return padded_k_; }
  std::span<const Node> nodes() const noexcept { return nodes_; }

  std::vector<Interval> leaves() const;
  std::size_t leaf_count() const noexcept;
  /// Leaves with more than one atom.
  std::size_t non_singleton_leaf_count() const noexcept;

  friend bool operator==(const PartitionTree& lhs, const PartitionTree& rhs) {
    return lhs.arity_ == rhs.arity_ && lhs.padded_k_ == rhs.padded_k_ &&
           lhs.leaves() == rhs.leaves();
  }

 private:
  unsigned arity_;
  std::size_t padded_k_;
  std::vector<Node> nodes_;
};

/// Estimate that is constant or affine on each piece; pieces tile {1, ..., domain_k}.
class PiecewiseEstimate {
 public:
  enum class Kind { Constant, Linear };

  struct Piece {
    Interval interval;
    Kind kind = Kind::Constant;
    double value = 0.0;      // Constant
    double slope = 0.0;      // Linear: slope * x + intercept at integer x
    double intercept = 0.0;
    bool clamp_at_zero = false;  // Linear: evaluate max(0, slope * x + intercept)

    double at(std::size_t x) const noexcept;
    friend bool operator==(const Piece&, const Piece&) = default;
  };

  /// Throws DomainMismatch if the pieces do not tile {1, ..., domain_k} or a
  /// value falls below -1e-12.
  PiecewiseEstimate(std::size_t domain_k, std::vector<Piece> pieces);

  std::size_t domain_k() const noexcept { return domain_k_; }
  std::span<const Piece> pieces() const noexcept { return pieces_; }

  double operator()(std::size_t x) const;
  std::vector<double> values() const;
  double total_mass() const;
  bool is_piecewise_constant() const noexcept;

  /// Same estimate scaled to total mass 1 (no-op on a zero estimate).
  PiecewiseEstimate renormalized() const;

  friend bool operator==(const PiecewiseEstimate&, const PiecewiseEstimate&) = default;

 private:
  std::size_t domain_k_;
  std::vector<Piece> pieces_;
};

/// Smallest power of arity that is >= k.
std::size_t pad_to_power(std::size_t k, unsigned arity);

/// |n_left - n_right| > sqrt(n_left + n_right), in exact integer arithmetic.
bool greedy_split_decision(std::uint64_t n_left, std::uint64_t n_right) noexcept;
/// n_v - 2 n_w + n_r > sqrt(n_v + n_w + n_r), in exact integer arithmetic.
bool greedy_ternary_split_decision(std::uint64_t n_v, std::uint64_t n_w, std::uint64_t n_r) noexcept;
/// f_v - f_w > sqrt((f_v + f_w) / n).
bool idealized_split_decision(double f_v, double f_w, std::uint64_t n) noexcept;
/// f_v - 2 f_w + f_r > sqrt((f_v + f_w + f_r) / n).
bool idealized_ternary_split_decision(double f_v, double f_w, double f_r, std::uint64_t n) noexcept;

struct EstimateOptions {
  bool renormalize = false;  // rescale truncated estimates to total mass 1
};

PartitionTree build_greedy_binary(const SampleCounts& c);
PartitionTree build_greedy_ternary(const SampleCounts& c);
PartitionTree build_idealized_binary(const DiscreteDensity& f, std::uint64_t n);
PartitionTree build_idealized_ternary(const DiscreteDensity& f, std::uint64_t n);

PiecewiseEstimate histogram_estimate(const PartitionTree& t, const SampleCounts& c,
                                     EstimateOptions options = {});
PiecewiseEstimate idealized_pc_estimate(const PartitionTree& t, const DiscreteDensity& f,
                                        EstimateOptions options = {});
PiecewiseEstimate idealized_pl_estimate(const PartitionTree& t, const DiscreteDensity& f,
                                        EstimateOptions options = {});
PiecewiseEstimate greedy_pl_estimate(const PartitionTree& t, const SampleCounts& c,
                                     EstimateOptions options = {});

/// Pool-adjacent-violators over pieces weighted by length: the unique fixed
/// point of repeatedly averaging adjacent pieces whose values increase.
/// Throws NotPiecewiseConstant.
PiecewiseEstimate monotonize(const PiecewiseEstimate& e);

}  // namespace shapetree
