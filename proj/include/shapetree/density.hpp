#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shapetree {

/// Absolute tolerance on |sum(mass) - 1| accepted by make_density.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Probability vector on {1, ..., k}. Atoms are addressed 1-based through
/// operator(); mass() exposes the underlying 0-based storage.
class DiscreteDensity {
 public:
  std::size_t k() const noexcept { return mass_.size(); }
  std::span<const double> mass() const noexcept { return mass_; }
  double operator()(std::size_t x) const { return mass_.at(x - 1); }

  friend bool operator==(const DiscreteDensity&, const DiscreteDensity&) = default;

 private:
  explicit DiscreteDensity(std::vector<double> mass) : mass_(std::move(mass)) {}
  friend DiscreteDensity make_density(std::vector<double> mass);

  std::vector<double> mass_;
};

/// Validates and wraps a mass vector. Never renormalizes.
/// Throws NegativeMass, NotNormalized, or BadParam (empty / non-finite).
DiscreteDensity make_density(std::vector<double> mass);

/// Density proportional to non-negative integer weights, with every mass an
/// integer multiple of one dyadic quantum. Affine relations among the weights
/// (equal steps, zero second differences) then hold exactly in floating point.
/// Falls back to plain division when the weights are too large for that.
DiscreteDensity density_from_weights(std::span<const std::uint64_t> weights);

bool is_non_increasing(const DiscreteDensity& f) noexcept;
bool is_convex_non_increasing(const DiscreteDensity& f) noexcept;

// Named test families --------------------------------------------------------

enum class Family { Uniform, HarmonicZipf, TruncGeometric, LinearDecreasing };

/// CLI-style names: "uniform", "harmonic-zipf", "trunc-geometric",
/// "linear-decreasing". Throws BadParam on an unknown name.
Family parse_family(std::string_view name);
std::string_view family_name(Family family) noexcept;

/// Uniform: 1/k. HarmonicZipf: 1/(x H_k). TruncGeometric: proportional to
/// param^(x-1), param in (0,1). LinearDecreasing: proportional to k + 1 - x.
DiscreteDensity family(Family name, std::size_t k, std::optional<double> param = std::nullopt);

// Assouad hypercube constructions -------------------------------------------

enum class Regime { MonotoneLargeK, MonotoneSmallK, ConvexLargeK, ConvexSmallK };

Regime parse_regime(std::string_view name);
std::string_view regime_name(Regime regime) noexcept;

struct HypercubeSpec {
  Regime regime = Regime::MonotoneLargeK;
  std::uint64_t n = 1;
  std::uint64_t k = 1;
  std::size_t r = 1;
  double epsilon = 0.0;
  std::vector<std::uint8_t> theta;  // length r, entries 0 or 1
};

struct HypercubeParams {
  std::size_t r = 0;
  double epsilon = 0.0;
};

/// The appendix's choice of epsilon and the smallest admissible r for the
/// regime at (n, k). Throws OutOfRegime when (n, k) is outside its range.
HypercubeParams assouad_default_params(Regime regime, std::uint64_t n, std::uint64_t k);

/// Consecutive atom interval [start, start + len), 1-based.
struct Interval {
  std::size_t start = 1;
  std::size_t len = 0;
  std::size_t end() const noexcept { return start + len; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Perturbation bins A_1, ..., A_r of a HypercubeSpec (depends only on regime, r, epsilon).
std::vector<Interval> assouad_bins(const HypercubeSpec& spec);

/// f_theta for a HypercubeSpec. Leftover atoms after the last bin form the fixed
/// region A_0: zero mass in the monotone regimes, a theta-independent convex
/// continuation in the convex regimes. Throws InfeasibleSpec.
DiscreteDensity assouad_density(const HypercubeSpec& spec);

/// Largest atom carrying positive mass when the support is unbounded; building
/// with k >= this value yields the same density padded with zeros.
std::uint64_t assouad_natural_support(const HypercubeSpec& spec);

/// Separation (alpha) and affinity (beta) bounds stated for each regime.
struct AppendixBounds {
  double alpha = 0.0;
  double beta = 0.0;
};
AppendixBounds appendix_bounds(Regime regime, std::size_t r, double epsilon);

}  // namespace shapetree
