#include "shapetree/density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "shapetree/error.hpp"

namespace shapetree {

DiscreteDensity make_density(std::vector<double> mass) {
  if (mass.empty()) throw Error(Errc::BadParam, "density needs at least one atom");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double m = mass[i];
    if (!std::isfinite(m)) throw Error(Errc::BadParam, "non-finite mass at atom " + std::to_string(i + 1));
    if (m < 0.0) throw Error(Errc::NegativeMass, "atom " + std::to_string(i + 1));
    sum += m;
  }
  if (std::fabs(static_cast<double>(sum) - 1.0) > kNormalizationTolerance) {
    throw Error(Errc::NotNormalized, "total mass " + std::to_string(static_cast<double>(sum)));
  }
  return DiscreteDensity(std::move(mass));
}

DiscreteDensity density_from_weights(std::span<const std::uint64_t> weights) {
  if (weights.empty()) throw Error(Errc::BadParam, "no weights");
  long double total = 0.0L;
  std::uint64_t max_weight = 0;
  for (const auto w : weights) {
    total += static_cast<long double>(w);
    max_weight = std::max(max_weight, w);
  }
  if (total <= 0.0L) throw Error(Errc::BadParam, "weights sum to zero");

  std::vector<double> mass(weights.size());
  // w * quantum and 2 * w * quantum are exact when the quantum carries at most
  // 53 - bit_width(2w) significant bits; 31 bits keep the normalization error
  // below 5e-10.
  constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 21;
  if (max_weight < kExactLimit) {
    const int bits = 53 - static_cast<int>(std::bit_width(2 * max_weight));
    const auto inverse = static_cast<double>(1.0L / total);
    const int e = std::ilogb(inverse);
    const double quantum =
        std::ldexp(std::nearbyint(std::ldexp(inverse, bits - 1 - e)), e - (bits - 1));
    for (std::size_t i = 0; i < weights.size(); ++i) {
      mass[i] = static_cast<double>(weights[i]) * quantum;
    }
  } else {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      mass[i] = static_cast<double>(static_cast<long double>(weights[i]) / total);
    }
  }
  return make_density(std::move(mass));
}

bool is_non_increasing(const DiscreteDensity& f) noexcept {
  const auto m = f.mass();
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    if (m[i + 1] > m[i]) return false;
  }
  return true;
}

bool is_convex_non_increasing(const DiscreteDensity& f) noexcept {
  if (!is_non_increasing(f)) return false;
  const auto m = f.mass();
  for (std::size_t i = 0; i + 2 < m.size(); ++i) {
    if (m[i] - 2.0 * m[i + 1] + m[i + 2] < 0.0) return false;
  }
  return true;
}

Family parse_family(std::string_view name) {
  if (name == "uniform") return Family::Uniform;
  if (name == "harmonic-zipf") return Family::HarmonicZipf;
  if (name == "trunc-geometric") return Family::TruncGeometric;
  if (name == "linear-decreasing") return Family::LinearDecreasing;
  throw Error(Errc::BadParam, "unknown family '" + std::string(name) + "'");
}

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::Uniform: return "uniform";
    case Family::HarmonicZipf: return "harmonic-zipf";
    case Family::TruncGeometric: return "trunc-geometric";
    case Family::LinearDecreasing: return "linear-decreasing";
  }
  return "unknown";
}

DiscreteDensity family(Family name, std::size_t k, std::optional<double> param) {
  if (k == 0) throw Error(Errc::BadParam, "k must be positive");
  std::vector<double> mass(k);
  switch (name) {
    case Family::Uniform:
      std::fill(mass.begin(), mass.end(), 1.0 / static_cast<double>(k));
      break;
    case Family::HarmonicZipf: {
      // smallest terms first
      long double harmonic = 0.0L;
      for (std::size_t x = k; x >= 1; --x) harmonic += 1.0L / static_cast<long double>(x);
      const auto h = static_cast<double>(harmonic);
      for (std::size_t x = 1; x <= k; ++x) mass[x - 1] = 1.0 / (static_cast<double>(x) * h);
      break;
    }
    case Family::TruncGeometric: {
      const double q = param.value_or(0.9);
      if (!(q > 0.0 && q < 1.0)) throw Error(Errc::BadParam, "trunc-geometric needs param in (0,1)");
      std::vector<long double> w(k);
      w[0] = 1.0L;
      for (std::size_t x = 1; x < k; ++x) w[x] = w[x - 1] * q;
      long double total = 0.0L;
      for (std::size_t x = k; x-- > 0;) total += w[x];
      for (std::size_t x = 0; x < k; ++x) mass[x] = static_cast<double>(w[x] / total);
      // Rounding to subnormals breaks convexity, so once the masses drop below
      // DBL_MIN continue linearly down to zero. Differences there are exact.
      for (std::size_t x = 2; x < k; ++x) {
        if (mass[x] >= std::numeric_limits<double>::min()) continue;
        const double step = mass[x - 1] - mass[x];
        for (std::size_t y = x + 1; y < k; ++y) mass[y] = std::max(0.0, mass[y - 1] - step);
        break;
      }
      break;
    }
    case Family::LinearDecreasing: {
      std::vector<std::uint64_t> w(k);
      for (std::size_t x = 1; x <= k; ++x) w[x - 1] = k + 1 - x;
      return density_from_weights(w);
    }
  }
  return make_density(std::move(mass));
}

}  // namespace shapetree
