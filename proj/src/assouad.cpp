// Assouad hypercube constructions for the monotone and convex lower bounds.
//
// Every construction is first laid out on a dyadic grid: atom values are
// integers ("units") times 2^-E. Linear stretches are then exact arithmetic
// progressions, so the exact class predicates (which compare doubles without
// tolerance) see the same zero second differences the real construction has.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shapetree/density.hpp"
#include "shapetree/error.hpp"

namespace shapetree {
namespace {

using Units = std::int64_t;
using Wide = __int128;

constexpr std::uint64_t kMaxMaterializedAtoms = std::uint64_t{1} << 25;
constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();
// Relative slack when growing bins, so snapped integer values keep the
// strict inequalities the real construction has.
constexpr long double kGrowthSlack = 1e-9L;

struct Grid {
  int exponent = 50;

  // Values up to max_value map to at most 2^50 units, so sums of a few atoms
  // stay below 2^53 and remain exact in double.
  static Grid for_max(long double max_value) {
    const int top = static_cast<int>(std::ceil(std::log2(static_cast<double>(max_value))));
    return Grid{50 - top};
  }
  Units units(long double v) const { return std::llround(std::ldexp(v, exponent)); }
  long double real(Units u) const { return std::ldexp(static_cast<long double>(u), -exponent); }
  double to_double(Units u) const { return std::ldexp(static_cast<double>(u), -exponent); }
  Wide one() const { return Wide{1} << exponent; }
};

struct Layout {
  Grid grid;
  std::vector<Units> units;  // atoms 1..units.size(); zero beyond
};

[[noreturn]] void infeasible(const std::string& why) { throw Error(Errc::InfeasibleSpec, why); }

std::size_t round_up_to(long double need, std::size_t multiple) {
  const auto blocks = std::ceil(need / static_cast<long double>(multiple));
  return static_cast<std::size_t>(blocks) * multiple;
}

// Bin sizes |A_1|, ..., |A_r|. The large-k regimes grow bins geometrically;
// each bin is also forced to exceed the previous one by the ratio the class
// constraint needs between neighbours, which rounding the geometric target
// alone does not guarantee.
std::vector<std::size_t> bin_sizes(Regime regime, std::size_t r, long double eps,
                                   std::uint64_t limit) {
  std::vector<std::size_t> sizes;
  sizes.reserve(std::min<std::size_t>(r, 1u << 20));
  std::uint64_t used = 0;
  for (std::size_t i = 1; i <= r; ++i) {
    std::size_t len = 0;
    switch (regime) {
      case Regime::MonotoneSmallK: len = 2; break;
      case Regime::ConvexSmallK: len = 3; break;
      case Regime::MonotoneLargeK: {
        long double need = 2.0L * std::exp(4.0L * eps * static_cast<long double>(i - 1));
        if (i > 1) {
          const long double ratio = (1.0L + eps) / (1.0L - eps);
          need = std::max(need, sizes.back() * ratio * (1.0L + kGrowthSlack));
        }
        len = round_up_to(need, 2);
        break;
      }
      case Regime::ConvexLargeK: {
        long double need = 3.0L / std::pow(1.0L - eps, static_cast<long double>(i - 1));
        if (i > 1) need = std::max(need, sizes.back() * (1.0L + eps) * (1.0L + kGrowthSlack));
        len = round_up_to(need, 3);
        break;
      }
    }
    used += len;
    if (used > limit) infeasible("bins need more than k = " + std::to_string(limit) + " atoms");
    sizes.push_back(len);
  }
  return sizes;
}

void validate(const HypercubeSpec& s) {
  if (s.n == 0) infeasible("n must be positive");
  if (s.k == 0) infeasible("k must be positive");
  if (s.r == 0) infeasible("r must be positive");
  if (s.theta.size() != s.r) infeasible("theta must have r = " + std::to_string(s.r) + " bits");
  for (const auto bit : s.theta) {
    if (bit > 1) infeasible("theta entries must be 0 or 1");
  }
  const double eps = s.epsilon;
  if (!(eps > 0.0 && eps < 1.0)) infeasible("epsilon must lie in (0, 1)");
  switch (s.regime) {
    case Regime::MonotoneLargeK:
      if (!(eps < 1.0 / std::sqrt(2.0))) infeasible("epsilon must be below 1/sqrt(2)");
      break;
    case Regime::MonotoneSmallK: break;
    case Regime::ConvexLargeK:
    case Regime::ConvexSmallK:
      if (eps > 0.5) infeasible("epsilon must be at most 1/2");
      break;
  }
}

Layout monotone_large(const HypercubeSpec& s, const std::vector<std::size_t>& sizes) {
  const long double eps = s.epsilon;
  const auto r = static_cast<long double>(s.r);
  const Grid grid = Grid::for_max((1.0L + eps) / (2.0L * r));
  Layout out{grid, {}};
  Units previous_low = std::numeric_limits<Units>::max();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto len = sizes[i];
    const long double base = 1.0L / (r * static_cast<long double>(len));
    const Units high = grid.units((1.0L + eps) * base);
    const Units flat = grid.units(base);
    const Units low = grid.units((1.0L - eps) * base);
    if (high > previous_low) infeasible("bins too close for a non-increasing construction");
    previous_low = low;
    if (s.theta[i] == 0) {
      out.units.insert(out.units.end(), len / 2, high);
      out.units.insert(out.units.end(), len / 2, low);
    } else {
      out.units.insert(out.units.end(), len, flat);
    }
  }
  return out;
}

Layout monotone_small(const HypercubeSpec& s) {
  const long double eps = s.epsilon;
  const auto r = static_cast<long double>(s.r);
  const long double b = eps / (2.0L * r * r);
  const long double a = b + (1.0L + eps) / (2.0L * r);
  const Grid grid = Grid::for_max(a);
  const Units bu = grid.units(b);
  const Units au = grid.units(a);
  Layout out{grid, {}};
  out.units.reserve(2 * s.r);
  for (std::size_t i = 1; i <= s.r; ++i) {
    const auto ii = static_cast<Units>(i);
    if (s.theta[i - 1] == 0) {
      out.units.push_back(au - bu * (2 * ii - 1));
      out.units.push_back(au - bu * (2 * ii + 1));
    } else {
      out.units.push_back(au - 2 * bu * ii);
      out.units.push_back(au - 2 * bu * ii);
    }
  }
  if (out.units.back() < 0) infeasible("negative atom in monotone small-k construction");
  return out;
}

// Bins of three atoms with beta_{i+1} = beta_i - 3 Delta - alpha (r - i) and
// Delta = alpha / 6. Atoms after the last bin stay at beta_{r+1}, the slope
// both bin endings continue with.
Layout convex_small(const HypercubeSpec& s, std::uint64_t support) {
  const long double eps = s.epsilon;
  const std::size_t r = s.r;
  const auto rl = static_cast<long double>(r);
  const long double alpha = eps / (rl * rl * rl);
  const std::uint64_t tail = support - 3 * r;

  // Real-valued first bin height for the grid scale.
  long double offset_sum = 0.0L;
  long double c = 0.0L;
  for (std::size_t i = 1; i <= r; ++i) {
    const long double d = alpha / 2.0L + alpha * static_cast<long double>(r - i);
    offset_sum += 3.0L * c + d + alpha / 4.0L;
    c += d;
  }
  offset_sum += static_cast<long double>(tail) * c;
  const long double beta1 = (1.0L + offset_sum) / static_cast<long double>(support);
  const Grid grid = Grid::for_max(beta1 * 1.01L);

  // alpha snapped to a multiple of 12 units keeps D_i / 3, Delta and Delta / 2 integral.
  const Units m = grid.units(alpha / 12.0L);
  const Units delta = 2 * m;
  std::vector<Units> offsets(r + 1, 0);  // c_i = beta_1 - beta_i
  std::vector<Units> steps(r + 1, 0);    // D_i = beta_i - beta_{i+1}
  Wide total_offset = 0;
  for (std::size_t i = 1; i <= r; ++i) {
    steps[i] = 6 * m + 12 * m * static_cast<Units>(r - i);
    total_offset += 3 * Wide{offsets[i - 1]} + steps[i] + 3 * m;
    offsets[i] = offsets[i - 1] + steps[i];
  }
  total_offset += Wide{static_cast<Units>(tail)} * offsets[r];
  const Wide numerator = grid.one() + total_offset;
  const Wide n_atoms = static_cast<Wide>(support);
  const auto b1 = static_cast<Units>((2 * numerator + n_atoms) / (2 * n_atoms));

  Layout out{grid, {}};
  out.units.reserve(support);
  for (std::size_t i = 1; i <= r; ++i) {
    const Units beta_i = b1 - offsets[i - 1];
    const Units third = steps[i] / 3;
    out.units.push_back(beta_i);
    if (s.theta[i - 1] == 0) {
      out.units.push_back(beta_i - third - delta);
      out.units.push_back(beta_i - 2 * third - delta / 2);
    } else {
      out.units.push_back(beta_i - third - delta / 2);
      out.units.push_back(beta_i - 2 * third - delta);
    }
  }
  out.units.insert(out.units.end(), tail, b1 - offsets[r]);
  if (*std::min_element(out.units.begin(), out.units.end()) < 0) {
    infeasible("negative atom in convex small-k construction");
  }
  return out;
}

// Each bin of length 3m interpolates linearly from beta_i through a kink at
// m (theta = 0) or 2m (theta = 1) down to beta_{i+1}. With D = 6 m p and
// Delta = 2 m q every segment has an integral slope. After the last bin the
// flatter of the two closing slopes continues until it reaches zero.
struct ConvexLargePlan {
  std::vector<std::size_t> sizes;
  long double eps = 0.0L;
};

Layout convex_large_units(const ConvexLargePlan& plan, const std::vector<std::uint8_t>& theta,
                          const Grid& grid, long double beta, std::uint64_t support) {
  const long double eps = plan.eps;
  Layout out{grid, {}};
  Units b = grid.units(beta);
  Units prev_p = 0;
  Units prev_q = 0;
  long double beta_next = beta;
  for (std::size_t i = 0; i < plan.sizes.size(); ++i) {
    const auto len = static_cast<Units>(plan.sizes[i]);
    const Units m = len / 3;
    const long double step = beta_next * eps;  // D_i
    beta_next -= step;
    const Units target = grid.units(beta_next);
    const Units p = std::llround(static_cast<long double>(b - target) / static_cast<long double>(6 * m));
    const Units q = grid.units(step * eps / 3.0L / static_cast<long double>(2 * m));
    if (p < 1 || q >= p) infeasible("perturbation below the numeric resolution of the grid");
    if (i > 0 && prev_p - prev_q < p + q) infeasible("bins too close for a convex construction");
    if (theta[i] == 0) {
      const Units kink = b - (2 * p + 2 * q) * m;
      for (Units t = 0; t < m; ++t) out.units.push_back(b - (2 * p + 2 * q) * t);
      for (Units t = m; t < len; ++t) out.units.push_back(kink + (q - 2 * p) * (t - m));
    } else {
      const Units kink = b - (2 * p + q) * 2 * m;
      for (Units t = 0; t < 2 * m; ++t) out.units.push_back(b - (2 * p + q) * t);
      for (Units t = 2 * m; t < len; ++t) out.units.push_back(kink + (2 * q - 2 * p) * (t - 2 * m));
    }
    b -= 6 * m * p;
    prev_p = p;
    prev_q = q;
  }
  const Units tail_slope = 2 * prev_q - 2 * prev_p;
  for (Units v = b; v > 0 && out.units.size() < support; v += tail_slope) out.units.push_back(v);
  return out;
}

Layout convex_large(const HypercubeSpec& s, const std::vector<std::size_t>& sizes,
                    std::uint64_t support) {
  ConvexLargePlan plan{sizes, s.epsilon};
  const long double eps = plan.eps;

  // Real mass at beta = 1 to seed the normalization.
  long double mass = 0.0L;
  long double height = 1.0L;
  long double last_slope = 0.0L;
  std::uint64_t used = 0;
  for (const auto len_sz : sizes) {
    const auto len = static_cast<long double>(len_sz);
    const long double step = height * eps;
    const long double delta = step * eps / 3.0L;
    mass += len * height - step * (len - 1.0L) / 2.0L - delta * len / 2.0L;
    last_slope = (step / 3.0L - delta) / (len / 3.0L);
    height -= step;
    used += len_sz;
  }
  for (long double v = height; v > 0.0L && used < support; v -= last_slope, ++used) mass += v;

  long double beta = 1.0L / mass;
  const Grid grid = Grid::for_max(beta * 1.05L);
  const std::vector<std::uint8_t> zeros(sizes.size(), 0);
  // Mass is linear in beta up to rounding; a few rescalings converge.
  Wide best_error = -1;
  long double best_beta = beta;
  for (int iter = 0; iter < 12; ++iter) {
    const Layout trial = convex_large_units(plan, zeros, grid, beta, support);
    Wide total = 0;
    for (const auto u : trial.units) total += u;
    const Wide error = total > grid.one() ? total - grid.one() : grid.one() - total;
    if (best_error < 0 || error < best_error) {
      best_error = error;
      best_beta = beta;
    }
    if (error == 0) break;
    beta *= static_cast<long double>(grid.one()) / static_cast<long double>(total);
  }
  return convex_large_units(plan, s.theta, grid, best_beta, support);
}

Layout build_layout(const HypercubeSpec& s, std::uint64_t support) {
  const auto sizes = bin_sizes(s.regime, s.r, s.epsilon, support);
  switch (s.regime) {
    case Regime::MonotoneLargeK: return monotone_large(s, sizes);
    case Regime::MonotoneSmallK: return monotone_small(s);
    case Regime::ConvexSmallK: return convex_small(s, support);
    case Regime::ConvexLargeK: return convex_large(s, sizes, support);
  }
  infeasible("unknown regime");
}

}  // namespace

Regime parse_regime(std::string_view name) {
  if (name == "monotone-large-k") return Regime::MonotoneLargeK;
  if (name == "monotone-small-k") return Regime::MonotoneSmallK;
  if (name == "convex-large-k") return Regime::ConvexLargeK;
  if (name == "convex-small-k") return Regime::ConvexSmallK;
  throw Error(Errc::BadParam, "unknown regime '" + std::string(name) + "'");
}

std::string_view regime_name(Regime regime) noexcept {
  switch (regime) {
    case Regime::MonotoneLargeK: return "monotone-large-k";
    case Regime::MonotoneSmallK: return "monotone-small-k";
    case Regime::ConvexLargeK: return "convex-large-k";
    case Regime::ConvexSmallK: return "convex-small-k";
  }
  return "unknown";
}

HypercubeParams assouad_default_params(Regime regime, std::uint64_t n, std::uint64_t k) {
  if (n == 0 || k == 0) throw Error(Errc::OutOfRegime, "n and k must be positive");
  const long double nl = static_cast<long double>(n);
  const long double log_n = std::log(nl);
  const long double log_k = std::log(static_cast<long double>(k));
  const auto out_of_regime = [&](const char* range) {
    throw Error(Errc::OutOfRegime, std::string(regime_name(regime)) + " needs " + range +
                                       " (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  };
  HypercubeParams p;
  switch (regime) {
    case Regime::MonotoneLargeK: {
      const long double lr = log_k - log_n / 3.0L;  // log(k / n^{1/3})
      if (!(lr >= 8.0L && lr <= nl)) out_of_regime("e^8 n^{1/3} <= k <= n^{1/3} e^n");
      p.epsilon = static_cast<double>(0.25L * std::cbrt(lr / nl));
      p.r = static_cast<std::size_t>(std::ceil(0.25L * std::cbrt(nl * lr * lr)));
      break;
    }
    case Regime::MonotoneSmallK: {
      const long double lr = log_k - log_n / 3.0L;
      if (!(k >= 2 && lr <= 8.0L)) out_of_regime("2 <= k <= e^8 n^{1/3}");
      p.r = static_cast<std::size_t>(k / 2);
      p.epsilon = static_cast<double>(std::exp(-12.0L) * static_cast<long double>(p.r) *
                                      std::sqrt(static_cast<long double>(k) / nl));
      break;
    }
    case Regime::ConvexLargeK: {
      const long double lr = log_k - log_n / 5.0L;  // log(k / n^{1/5})
      if (!(lr >= 40.0L && lr <= nl)) out_of_regime("e^40 n^{1/5} <= k <= n^{1/5} e^n");
      p.epsilon = static_cast<double>(0.5L * std::pow(lr / nl, 0.2L));
      p.r = static_cast<std::size_t>(std::ceil(std::pow(nl, 0.2L) * std::pow(lr, 0.8L) / 18.0L));
      break;
    }
    case Regime::ConvexSmallK: {
      const long double lr = log_k - log_n / 5.0L;
      if (!(k >= 3 && lr <= 40.0L)) out_of_regime("3 <= k <= e^40 n^{1/5}");
      p.r = static_cast<std::size_t>(k / 3);
      const auto rl = static_cast<long double>(p.r);
      p.epsilon = static_cast<double>(std::exp(-100.0L) * rl * rl *
                                      std::sqrt(static_cast<long double>(k) / nl));
      break;
    }
  }
  return p;
}

std::vector<Interval> assouad_bins(const HypercubeSpec& spec) {
  const auto sizes = bin_sizes(spec.regime, spec.r, spec.epsilon, kUnbounded);
  std::vector<Interval> bins;
  bins.reserve(sizes.size());
  std::size_t start = 1;
  for (const auto len : sizes) {
    bins.push_back(Interval{start, len});
    start += len;
  }
  return bins;
}

DiscreteDensity assouad_density(const HypercubeSpec& spec) {
  validate(spec);
  if (spec.k > kMaxMaterializedAtoms) {
    infeasible("k = " + std::to_string(spec.k) + " is too large to materialize");
  }
  const Layout layout = build_layout(spec, spec.k);
  std::vector<double> mass(spec.k, 0.0);
  for (std::size_t i = 0; i < layout.units.size(); ++i) mass[i] = layout.grid.to_double(layout.units[i]);
  return make_density(std::move(mass));
}

std::uint64_t assouad_natural_support(const HypercubeSpec& spec) {
  validate(spec);
  switch (spec.regime) {
    case Regime::MonotoneLargeK:
    case Regime::MonotoneSmallK: {
      std::uint64_t total = 0;
      for (const auto& bin : assouad_bins(spec)) total += bin.len;
      return total;
    }
    case Regime::ConvexSmallK: return spec.k;
    case Regime::ConvexLargeK: {
      auto unbounded = spec;
      unbounded.k = kUnbounded;
      return build_layout(unbounded, kUnbounded).units.size();
    }
  }
  return spec.k;
}

AppendixBounds appendix_bounds(Regime regime, std::size_t r, double epsilon) {
  const double rr = static_cast<double>(r);
  const double e = epsilon;
  switch (regime) {
    case Regime::MonotoneLargeK: return {e / rr, 1.0 - e * e / (2.0 * rr)};
    case Regime::MonotoneSmallK:
      return {e / (rr * rr), 1.0 - e * e / (2.0 * rr * rr * rr * (1.0 - e))};
    case Regime::ConvexLargeK: return {e * e / (72.0 * rr), 1.0 - e * e * e * e / (9.0 * rr)};
    case Regime::ConvexSmallK:
      return {e / (6.0 * rr * rr * rr), 1.0 - e * e / (48.0 * std::pow(rr, 5.0))};
  }
  return {};
}

}  // namespace shapetree
