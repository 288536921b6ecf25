#include "shapetree/risk_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "shapetree/error.hpp"
#include "shapetree/metrics.hpp"

namespace shapetree {
namespace {

constexpr std::string_view kRenormalizeSuffix = "+renormalize";

struct NamedKind {
  std::string_view name;
  EstimatorKind kind;
};

constexpr NamedKind kEstimators[] = {
    {"oracle", EstimatorKind::Oracle},
    {"empirical-histogram", EstimatorKind::EmpiricalHistogram},
    {"greedy-binary", EstimatorKind::GreedyBinary},
    {"greedy-binary+monotonize", EstimatorKind::GreedyBinaryMonotone},
    {"greedy-ternary", EstimatorKind::GreedyTernary},
    {"idealized-binary", EstimatorKind::IdealizedBinary},
    {"idealized-ternary", EstimatorKind::IdealizedTernary},
};

unsigned worker_count(unsigned requested, std::uint64_t reps) {
  unsigned threads = requested == 0 ? std::max(1U, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(threads, reps));
}

}  // namespace

EstimatorSpec parse_estimator(std::string_view name) {
  EstimatorSpec spec;
  if (name.size() > kRenormalizeSuffix.size() && name.ends_with(kRenormalizeSuffix)) {
    spec.renormalize = true;
    name.remove_suffix(kRenormalizeSuffix.size());
  }
  for (const auto& e : kEstimators) {
    if (e.name == name) {
      spec.kind = e.kind;
      return spec;
    }
  }
  throw Error(Errc::UnknownEstimator, "'" + std::string(name) + "'");
}

std::string estimator_name(const EstimatorSpec& spec) {
  for (const auto& e : kEstimators) {
    if (e.kind == spec.kind) {
      return std::string(e.name) + (spec.renormalize ? std::string(kRenormalizeSuffix) : "");
    }
  }
  return "unknown";
}

namespace {

PiecewiseEstimate per_atom(std::vector<double> values) {
  std::vector<PiecewiseEstimate::Piece> pieces(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    pieces[i].interval = Interval{i + 1, 1};
    pieces[i].value = values[i];
  }
  return PiecewiseEstimate(values.size(), std::move(pieces));
}

}  // namespace

FittedEstimate fit_estimator(const EstimatorSpec& spec, const SampleCounts& c,
                             const DiscreteDensity& f) {
  if (c.k() != f.k()) throw Error(Errc::DomainMismatch, "counts and density differ in k");
  const EstimateOptions options{spec.renormalize};
  switch (spec.kind) {
    case EstimatorKind::Oracle:
      return {std::nullopt, per_atom({f.mass().begin(), f.mass().end()})};
    case EstimatorKind::EmpiricalHistogram: {
      if (c.n() == 0) throw Error(Errc::BadParam, "n must be positive");
      std::vector<double> values(c.k());
      const auto n = static_cast<double>(c.n());
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(c.counts()[i]) / n;
      auto estimate = per_atom(std::move(values));
      return {std::nullopt, options.renormalize ? estimate.renormalized() : estimate};
    }
    case EstimatorKind::GreedyBinary: {
      auto tree = build_greedy_binary(c);
      auto estimate = histogram_estimate(tree, c, options);
      return {std::move(tree), std::move(estimate)};
    }
    case EstimatorKind::GreedyBinaryMonotone: {
      auto tree = build_greedy_binary(c);
      auto estimate = monotonize(histogram_estimate(tree, c, options));
      return {std::move(tree), std::move(estimate)};
    }
    case EstimatorKind::GreedyTernary: {
      auto tree = build_greedy_ternary(c);
      auto estimate = greedy_pl_estimate(tree, c, options);
      return {std::move(tree), std::move(estimate)};
    }
    case EstimatorKind::IdealizedBinary: {
      auto tree = build_idealized_binary(f, c.n());
      auto estimate = idealized_pc_estimate(tree, f, options);
      return {std::move(tree), std::move(estimate)};
    }
    case EstimatorKind::IdealizedTernary: {
      auto tree = build_idealized_ternary(f, c.n());
      auto estimate = idealized_pl_estimate(tree, f, options);
      return {std::move(tree), std::move(estimate)};
    }
  }
  throw Error(Errc::UnknownEstimator, "unhandled estimator");
}

std::vector<double> run_estimator(const EstimatorSpec& spec, const SampleCounts& c,
                                  const DiscreteDensity& f) {
  if (spec.kind == EstimatorKind::Oracle) {
    if (c.k() != f.k()) throw Error(Errc::DomainMismatch, "counts and density differ in k");
    return {f.mass().begin(), f.mass().end()};
  }
  return fit_estimator(spec, c, f).estimate.values();
}

std::vector<double> mc_tv_samples(const EstimatorSpec& estimator, const DiscreteDensity& f,
                                  std::uint64_t n, std::uint64_t reps, std::uint64_t master_seed,
                                  McOptions options) {
  if (reps == 0) throw Error(Errc::BadParam, "reps must be at least 1");
  std::vector<double> out(reps);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto work = [&] {
    try {
      for (std::uint64_t i = next.fetch_add(1); i < reps; i = next.fetch_add(1)) {
        const SampleCounts c = sample(f, n, derive_seed(master_seed, i));
        out[i] = tv(run_estimator(estimator, c, f), f.mass());
      }
    } catch (...) {
      next.store(reps);
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const unsigned threads = worker_count(options.threads, reps);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

RiskReport mc_risk(const EstimatorSpec& estimator, const NamedDensity& f, std::uint64_t n,
                   std::uint64_t reps, std::uint64_t master_seed, McOptions options) {
  const auto samples = mc_tv_samples(estimator, f.density, n, reps, master_seed, options);
  double sum = 0.0;
  for (const double v : samples) sum += v;
  const double mean = sum / static_cast<double>(reps);
  double squares = 0.0;
  for (const double v : samples) squares += (v - mean) * (v - mean);
  const double std_error =
      reps > 1 ? std::sqrt(squares / static_cast<double>(reps - 1)) / std::sqrt(static_cast<double>(reps))
               : 0.0;
  return RiskReport{estimator_name(estimator), f.name, n, f.density.k(), reps, mean, std_error, master_seed};
}

RiskReport sup_risk(const EstimatorSpec& estimator, std::span<const NamedDensity> family,
                    std::uint64_t n, std::uint64_t reps, std::uint64_t seed, McOptions options) {
  if (family.empty()) throw Error(Errc::EmptyFamily, "sup over an empty family");
  std::optional<RiskReport> best;
  for (const auto& member : family) {
    auto report = mc_risk(estimator, member, n, reps, seed, options);
    if (!best || report.mean_tv > best->mean_tv) best = std::move(report);
  }
  return *best;
}

std::vector<NamedDensity> monotone_risk_family(std::size_t k, std::uint64_t n, std::uint64_t seed) {
  std::vector<NamedDensity> out;
  for (const auto name : {Family::Uniform, Family::HarmonicZipf, Family::TruncGeometric,
                          Family::LinearDecreasing}) {
    out.push_back({std::string(family_name(name)), family(name, k)});
  }
  for (const auto regime : {Regime::MonotoneLargeK, Regime::MonotoneSmallK}) {
    HypercubeSpec spec;
    try {
      const auto params = assouad_default_params(regime, n, k);
      spec = HypercubeSpec{regime, n, k, params.r, params.epsilon, {}};
      spec.theta.assign(params.r, 0);
      assouad_density(spec);
    } catch (const Error&) {
      continue;  // (n, k) outside this regime or the bins do not fit
    }
    const std::string prefix = "assouad-" + std::string(regime_name(regime));
    out.push_back({prefix + "-zeros", assouad_density(spec)});
    std::fill(spec.theta.begin(), spec.theta.end(), 1);
    out.push_back({prefix + "-ones", assouad_density(spec)});
    Rng rng(seed);
    for (int j = 1; j <= 8; ++j) {
      for (auto& bit : spec.theta) bit = static_cast<std::uint8_t>(rng.next() >> 63);
      out.push_back({prefix + "-random-" + std::to_string(j), assouad_density(spec)});
    }
  }
  return out;
}

RateScaling rate_scaling(const EstimatorSpec& estimator, const FamilyBuilder& family_builder,
                         std::span<const std::uint64_t> n_grid, std::size_t k, std::uint64_t reps,
                         std::uint64_t seed, McOptions options) {
  if (n_grid.size() < 3) throw Error(Errc::DegenerateGrid, "need at least 3 sample sizes");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw Error(Errc::DegenerateGrid, "sample sizes must be positive and strictly increasing");
    }
  }
  RateScaling out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto n : n_grid) {
    const NamedDensity f = family_builder(n, k);
    out.reports.push_back(mc_risk(estimator, f, n, reps, seed, options));
    xs.push_back(static_cast<double>(n));
    ys.push_back(out.reports.back().mean_tv);
  }
  out.slope = log_log_slope(xs, ys);
  out.slope_defined = !std::isnan(out.slope);
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::DegenerateGrid, "need matching points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto m = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw Error(Errc::DegenerateGrid, "all x equal");
  return sxy / sxx;
}

}  // namespace shapetree
