#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shapetree/density.hpp"
#include "shapetree/partition_tree.hpp"
#include "shapetree/sampling.hpp"

namespace shapetree {

enum class EstimatorKind {
  Oracle,               // returns f itself
  EmpiricalHistogram,   // counts[x] / n per atom
  GreedyBinary,
  GreedyBinaryMonotone, // greedy binary histogram followed by monotonize
  GreedyTernary,        // greedy ternary tree with piecewise-linear leaves
  IdealizedBinary,
  IdealizedTernary,
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::GreedyBinary;
  bool renormalize = false;
};

/// Accepts "oracle", "empirical-histogram", "greedy-binary",
/// "greedy-binary+monotonize", "greedy-ternary", "idealized-binary",
/// "idealized-ternary". Throws UnknownEstimator.
EstimatorSpec parse_estimator(std::string_view name);
std::string estimator_name(const EstimatorSpec& spec);

/// Fitted estimator: the partition tree (tree estimators only) and the estimate.
/// Oracle and empirical-histogram estimates use one piece per atom.
struct FittedEstimate {
  std::optional<PartitionTree> tree;
  PiecewiseEstimate estimate;
};

/// Idealized estimators read only f and c.n(); the others read only c
/// (and oracle only f).
FittedEstimate fit_estimator(const EstimatorSpec& spec, const SampleCounts& c,
                             const DiscreteDensity& f);

/// Per-atom values of fit_estimator(spec, c, f).estimate.
std::vector<double> run_estimator(const EstimatorSpec& spec, const SampleCounts& c,
                                  const DiscreteDensity& f);

struct NamedDensity {
  std::string name;
  DiscreteDensity density;
};

struct RiskReport {
  std::string estimator_name;
  std::string density_name;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::uint64_t replications = 0;
  double mean_tv = 0.0;
  double std_error = 0.0;
  std::uint64_t master_seed = 0;
};

struct McOptions {
  unsigned threads = 1;  // 0 means hardware concurrency
};

/// Mean and standard error of TV(estimate, f) over seeded replications.
/// Replication i samples with derive_seed(master_seed, i); the result does not
/// depend on the thread count.
RiskReport mc_risk(const EstimatorSpec& estimator, const NamedDensity& f, std::uint64_t n,
                   std::uint64_t reps, std::uint64_t master_seed, McOptions options = {});

/// Per-replication TV values in replication order.
std::vector<double> mc_tv_samples(const EstimatorSpec& estimator, const DiscreteDensity& f,
                                  std::uint64_t n, std::uint64_t reps, std::uint64_t master_seed,
                                  McOptions options = {});

/// mc_risk maximized over a finite family; density_name names the argmax.
/// Throws EmptyFamily.
RiskReport sup_risk(const EstimatorSpec& estimator, std::span<const NamedDensity> family,
                    std::uint64_t n, std::uint64_t reps, std::uint64_t seed,
                    McOptions options = {});

/// The documented stand-in for the supremum over non-increasing densities on
/// {1..k}: uniform, harmonic Zipf, truncated geometric(0.9), linear, and
/// monotone hypercube members (all-zeros, all-ones and eight seeded theta)
/// when a construction fits.
std::vector<NamedDensity> monotone_risk_family(std::size_t k, std::uint64_t n, std::uint64_t seed);

using FamilyBuilder = std::function<NamedDensity(std::uint64_t n, std::size_t k)>;

struct RateScaling {
  std::vector<RiskReport> reports;
  double slope = 0.0;         // least squares slope of log(mean_tv) on log(n)
  bool slope_defined = false; // false (slope NaN) when some mean_tv is 0
};

/// Throws DegenerateGrid unless n_grid has >= 3 strictly increasing entries.
RateScaling rate_scaling(const EstimatorSpec& estimator, const FamilyBuilder& family_builder,
                         std::span<const std::uint64_t> n_grid, std::size_t k,
                         std::uint64_t reps, std::uint64_t seed, McOptions options = {});

/// Least squares slope of log(y) on log(x); NaN if any y <= 0.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace shapetree
