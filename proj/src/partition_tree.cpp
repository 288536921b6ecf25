#include "shapetree/partition_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "shapetree/error.hpp"

namespace shapetree {
namespace {

constexpr double kValueFloor = -1e-12;

using SplitRule = std::function<bool(const Interval&)>;

// Breadth-first construction; a node splits into `arity` equal parts when the
// rule says so and it has more than one atom.
PartitionTree grow(unsigned arity, std::size_t padded_k, const SplitRule& split) {
  std::vector<PartitionTree::Node> nodes;
  nodes.push_back({Interval{1, padded_k}, 0, -1});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Interval iv = nodes[i].interval;
    if (iv.len == 1 || !split(iv)) continue;
    const std::size_t part = iv.len / arity;
    const std::size_t depth = nodes[i].depth + 1;
    nodes[i].first_child = static_cast<std::ptrdiff_t>(nodes.size());
    for (unsigned j = 0; j < arity; ++j) nodes.push_back({Interval{iv.start + j * part, part}, depth, -1});
  }
  return PartitionTree(arity, padded_k, std::move(nodes));
}

// Mass of f over [a, a + len), atoms beyond k contributing zero, summed left to right.
double interval_mass(const DiscreteDensity& f, std::size_t a, std::size_t len) {
  const auto m = f.mass();
  const std::size_t hi = std::min(a - 1 + len, m.size());
  double s = 0.0;
  for (std::size_t i = a - 1; i < hi; ++i) s += m[i];
  return s;
}

void check_domain(const PartitionTree& t, std::size_t k) {
  if (t.padded_k() != pad_to_power(k, t.arity())) {
    throw Error(Errc::DomainMismatch, "tree over " + std::to_string(t.padded_k()) +
                                          " atoms does not pad k = " + std::to_string(k));
  }
}

void check_positive_n(std::uint64_t n) {
  if (n == 0) throw Error(Errc::BadParam, "n must be positive");
}

// Piece covering the part of `leaf` inside {1, ..., k}.
Interval truncated(const Interval& leaf, std::size_t k) {
  return Interval{leaf.start, std::min(leaf.end(), k + 1) - leaf.start};
}

template <typename Average>
PiecewiseEstimate constant_pieces(const PartitionTree& t, std::size_t k, Average average) {
  std::vector<PiecewiseEstimate::Piece> pieces;
  for (const auto& leaf : t.leaves()) {
    if (leaf.start > k) break;
    PiecewiseEstimate::Piece p;
    p.interval = truncated(leaf, k);
    p.value = average(leaf);
    pieces.push_back(p);
  }
  return PiecewiseEstimate(k, std::move(pieces));
}

// Line through (m_v, avg_v) and (m_r, avg_r) for the outer thirds of each
// leaf; singleton leaves keep their own average.
template <typename Average>
PiecewiseEstimate linear_pieces(const PartitionTree& t, std::size_t k, Average average,
                                bool always_clamp) {
  if (t.arity() != 3) throw Error(Errc::DomainMismatch, "piecewise-linear estimates need a ternary tree");
  std::vector<PiecewiseEstimate::Piece> pieces;
  for (const auto& leaf : t.leaves()) {
    if (leaf.start > k) break;
    PiecewiseEstimate::Piece p;
    p.interval = truncated(leaf, k);
    if (leaf.len == 1) {
      p.value = average(leaf);
      pieces.push_back(p);
      continue;
    }
    const std::size_t third = leaf.len / 3;
    const Interval v{leaf.start, third};
    const Interval r{leaf.start + 2 * third, third};
    const double half_width = (static_cast<double>(third) - 1.0) / 2.0;
    const double m_v = static_cast<double>(v.start) + half_width;
    const double m_r = static_cast<double>(r.start) + half_width;
    const double avg_v = average(v);
    const double avg_r = average(r);
    p.kind = PiecewiseEstimate::Kind::Linear;
    p.slope = (avg_r - avg_v) / (m_r - m_v);
    p.intercept = avg_v - p.slope * m_v;
    const double first = p.slope * static_cast<double>(p.interval.start) + p.intercept;
    const double last = p.slope * static_cast<double>(p.interval.end() - 1) + p.intercept;
    p.clamp_at_zero = always_clamp || std::min(first, last) < 0.0;
    pieces.push_back(p);
  }
  return PiecewiseEstimate(k, std::move(pieces));
}

PiecewiseEstimate finish(PiecewiseEstimate e, EstimateOptions options) {
  return options.renormalize ? e.renormalized() : e;
}

}  // namespace

// PartitionTree ----------------------------------------------------------------

PartitionTree::PartitionTree(unsigned arity, std::size_t padded_k, std::vector<Node> nodes)
    : arity_(arity), padded_k_(padded_k), nodes_(std::move(nodes)) {
  if (arity_ != 2 && arity_ != 3) throw Error(Errc::BadParam, "arity must be 2 or 3");
  if (nodes_.empty() || nodes_.front().interval != Interval{1, padded_k_}) {
    throw Error(Errc::BadParam, "root must cover {1, ..., padded_k}");
  }
}

std::vector<Interval> PartitionTree::leaves() const {
  std::vector<Interval> out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.is_leaf()) {
      out.push_back(node.interval);
      continue;
    }
    for (unsigned j = arity_; j-- > 0;) stack.push_back(static_cast<std::size_t>(node.first_child) + j);
  }
  return out;
}

std::size_t PartitionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t PartitionTree::non_singleton_leaf_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) {
    return n.is_leaf() && n.interval.len > 1;
  }));
}

// PiecewiseEstimate ----------------------------------------------------------------

double PiecewiseEstimate::Piece::at(std::size_t x) const noexcept {
  if (kind == Kind::Constant) return value;
  const double v = slope * static_cast<double>(x) + intercept;
  return clamp_at_zero ? std::max(0.0, v) : v;
}

PiecewiseEstimate::PiecewiseEstimate(std::size_t domain_k, std::vector<Piece> pieces)
    : domain_k_(domain_k), pieces_(std::move(pieces)) {
  std::size_t next = 1;
  for (const auto& p : pieces_) {
    if (p.interval.start != next || p.interval.len == 0) {
      throw Error(Errc::DomainMismatch, "pieces must tile the domain; gap or overlap at atom " +
                                            std::to_string(next));
    }
    for (const std::size_t x : {p.interval.start, p.interval.end() - 1}) {
      const double v = p.at(x);
      if (!std::isfinite(v) || v < kValueFloor) {
        throw Error(Errc::DomainMismatch, "estimate value " + std::to_string(v) + " at atom " +
                                              std::to_string(x));
      }
    }
    next = p.interval.end();
  }
  if (next != domain_k_ + 1) {
    throw Error(Errc::DomainMismatch, "pieces cover " + std::to_string(next - 1) + " of " +
                                          std::to_string(domain_k_) + " atoms");
  }
}

double PiecewiseEstimate::operator()(std::size_t x) const {
  if (x < 1 || x > domain_k_) throw Error(Errc::OutOfRange, "atom " + std::to_string(x));
  const auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                                   [](std::size_t v, const Piece& p) { return v < p.interval.start; });
  return std::prev(it)->at(x);
}

std::vector<double> PiecewiseEstimate::values() const {
  std::vector<double> out;
  out.reserve(domain_k_);
  for (const auto& p : pieces_) {
    for (std::size_t x = p.interval.start; x < p.interval.end(); ++x) out.push_back(p.at(x));
  }
  return out;
}

double PiecewiseEstimate::total_mass() const {
  long double s = 0.0L;
  for (const double v : values()) s += v;
  return static_cast<double>(s);
}

bool PiecewiseEstimate::is_piecewise_constant() const noexcept {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const Piece& p) { return p.kind == Kind::Constant; });
}

PiecewiseEstimate PiecewiseEstimate::renormalized() const {
  const double mass = total_mass();
  if (mass <= 0.0) return *this;
  auto pieces = pieces_;
  for (auto& p : pieces) {
    p.value /= mass;
    p.slope /= mass;
    p.intercept /= mass;
  }
  return PiecewiseEstimate(domain_k_, std::move(pieces));
}

// Split rules ----------------------------------------------------------------

std::size_t pad_to_power(std::size_t k, unsigned arity) {
  if (arity != 2 && arity != 3) throw Error(Errc::BadParam, "arity must be 2 or 3");
  std::size_t p = 1;
  while (p < k) p *= arity;
  return p;
}

bool greedy_split_decision(std::uint64_t n_left, std::uint64_t n_right) noexcept {
  using u128 = unsigned __int128;
  const u128 d = n_left > n_right ? n_left - n_right : n_right - n_left;
  return d * d > static_cast<u128>(n_left) + n_right;
}

bool greedy_ternary_split_decision(std::uint64_t n_v, std::uint64_t n_w, std::uint64_t n_r) noexcept {
  const __int128 t = static_cast<__int128>(n_v) - 2 * static_cast<__int128>(n_w) + n_r;
  const __int128 sum = static_cast<__int128>(n_v) + n_w + n_r;
  // t^2 fits: |t| < 2^66
  return t > 0 && t * t > sum;
}

bool idealized_split_decision(double f_v, double f_w, std::uint64_t n) noexcept {
  return f_v - f_w > std::sqrt((f_v + f_w) / static_cast<double>(n));
}

bool idealized_ternary_split_decision(double f_v, double f_w, double f_r, std::uint64_t n) noexcept {
  return f_v - 2.0 * f_w + f_r > std::sqrt((f_v + f_w + f_r) / static_cast<double>(n));
}

// Builders ----------------------------------------------------------------

PartitionTree build_greedy_binary(const SampleCounts& c) {
  return grow(2, pad_to_power(c.k(), 2), [&](const Interval& iv) {
    const std::size_t half = iv.len / 2;
    return greedy_split_decision(c.padded_count(iv.start, half), c.padded_count(iv.start + half, half));
  });
}

PartitionTree build_greedy_ternary(const SampleCounts& c) {
  return grow(3, pad_to_power(c.k(), 3), [&](const Interval& iv) {
    const std::size_t third = iv.len / 3;
    return greedy_ternary_split_decision(c.padded_count(iv.start, third),
                                         c.padded_count(iv.start + third, third),
                                         c.padded_count(iv.start + 2 * third, third));
  });
}

PartitionTree build_idealized_binary(const DiscreteDensity& f, std::uint64_t n) {
  check_positive_n(n);
  if (!is_non_increasing(f)) throw Error(Errc::NotMonotone, "idealized binary tree needs a non-increasing f");
  return grow(2, pad_to_power(f.k(), 2), [&](const Interval& iv) {
    const std::size_t half = iv.len / 2;
    return idealized_split_decision(interval_mass(f, iv.start, half),
                                    interval_mass(f, iv.start + half, half), n);
  });
}

PartitionTree build_idealized_ternary(const DiscreteDensity& f, std::uint64_t n) {
  check_positive_n(n);
  if (!is_convex_non_increasing(f)) {
    throw Error(Errc::NotConvex, "idealized ternary tree needs a convex non-increasing f");
  }
  return grow(3, pad_to_power(f.k(), 3), [&](const Interval& iv) {
    const std::size_t third = iv.len / 3;
    return idealized_ternary_split_decision(interval_mass(f, iv.start, third),
                                            interval_mass(f, iv.start + third, third),
                                            interval_mass(f, iv.start + 2 * third, third), n);
  });
}

// Estimates ----------------------------------------------------------------

PiecewiseEstimate histogram_estimate(const PartitionTree& t, const SampleCounts& c,
                                     EstimateOptions options) {
  check_domain(t, c.k());
  check_positive_n(c.n());
  const auto n = static_cast<double>(c.n());
  return finish(constant_pieces(t, c.k(),
                                [&](const Interval& leaf) {
                                  return static_cast<double>(c.padded_count(leaf.start, leaf.len)) /
                                         (n * static_cast<double>(leaf.len));
                                }),
                options);
}

PiecewiseEstimate idealized_pc_estimate(const PartitionTree& t, const DiscreteDensity& f,
                                        EstimateOptions options) {
  check_domain(t, f.k());
  return finish(constant_pieces(t, f.k(),
                                [&](const Interval& leaf) {
                                  return interval_mass(f, leaf.start, leaf.len) /
                                         static_cast<double>(leaf.len);
                                }),
                options);
}

PiecewiseEstimate idealized_pl_estimate(const PartitionTree& t, const DiscreteDensity& f,
                                        EstimateOptions options) {
  check_domain(t, f.k());
  const auto average = [&](const Interval& iv) {
    return interval_mass(f, iv.start, iv.len) / static_cast<double>(iv.len);
  };
  return finish(linear_pieces(t, f.k(), average, false), options);
}

PiecewiseEstimate greedy_pl_estimate(const PartitionTree& t, const SampleCounts& c,
                                     EstimateOptions options) {
  check_domain(t, c.k());
  check_positive_n(c.n());
  const auto n = static_cast<double>(c.n());
  const auto average = [&](const Interval& iv) {
    return static_cast<double>(c.padded_count(iv.start, iv.len)) / (n * static_cast<double>(iv.len));
  };
  return finish(linear_pieces(t, c.k(), average, true), options);
}

PiecewiseEstimate monotonize(const PiecewiseEstimate& e) {
  if (!e.is_piecewise_constant()) {
    throw Error(Errc::NotPiecewiseConstant, "monotonize needs a piecewise-constant estimate");
  }
  struct Block {
    Interval interval;
    long double mass;
    double value;
  };
  std::vector<Block> blocks;
  for (const auto& p : e.pieces()) {
    Block b{p.interval, static_cast<long double>(p.value) * p.interval.len, p.value};
    while (!blocks.empty() && blocks.back().value < b.value) {
      const Block& prev = blocks.back();
      const Interval joined{prev.interval.start, prev.interval.len + b.interval.len};
      const long double mass = prev.mass + b.mass;
      b = Block{joined, mass, static_cast<double>(mass / joined.len)};
      blocks.pop_back();
    }
    blocks.push_back(b);
  }
  std::vector<PiecewiseEstimate::Piece> pieces;
  pieces.reserve(blocks.size());
  for (const auto& b : blocks) {
    PiecewiseEstimate::Piece p;
    p.interval = b.interval;
    p.value = b.value;
    pieces.push_back(p);
  }
  return PiecewiseEstimate(e.domain_k(), std::move(pieces));
}

}  // namespace shapetree
