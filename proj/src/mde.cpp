#include "shapetree/mde.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shapetree/error.hpp"

namespace shapetree {

CandidateSet::CandidateSet(std::vector<DiscreteDensity> candidates, std::vector<std::string> labels)
    : candidates_(std::move(candidates)), labels_(std::move(labels)) {
  if (candidates_.empty()) throw Error(Errc::EmptyCandidates, "candidate set is empty");
  for (const auto& f : candidates_) {
    if (f.k() != candidates_.front().k()) throw Error(Errc::DomainMismatch, "candidates differ in k");
  }
  if (!labels_.empty() && labels_.size() != candidates_.size()) {
    throw Error(Errc::BadParam, "one label per candidate");
  }
}

std::vector<AtomSet> yatracos_class(const CandidateSet& cs) {
  std::vector<AtomSet> out;
  std::set<AtomSet> seen;
  const std::size_t k = cs.k();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if (i == j) continue;
      AtomSet set;
      for (std::size_t x = 1; x <= k; ++x) {
        if (cs[i](x) > cs[j](x)) set.push_back(x);
      }
      if (seen.insert(set).second) out.push_back(std::move(set));
    }
  }
  return out;
}

MdeResult minimum_distance_estimate_detail(const CandidateSet& cs, const SampleCounts& c) {
  if (c.k() != cs.k()) throw Error(Errc::DomainMismatch, "counts and candidates differ in k");
  if (c.n() == 0) throw Error(Errc::BadParam, "minimum distance estimate needs n >= 1");
  const auto sets = yatracos_class(cs);
  const auto n = static_cast<long double>(c.n());

  std::vector<long double> empirical;
  empirical.reserve(sets.size());
  for (const auto& set : sets) {
    std::uint64_t count = 0;
    for (const auto x : set) count += c(x);
    empirical.push_back(static_cast<long double>(count) / n);
  }

  MdeResult result;
  result.deviations.assign(cs.size(), 0.0);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    long double worst = 0.0L;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      long double mass = 0.0L;
      for (const auto x : sets[s]) mass += cs[i](x);
      worst = std::max(worst, std::fabs(mass - empirical[s]));
    }
    result.deviations[i] = static_cast<double>(worst);
  }
  const double best = *std::min_element(result.deviations.begin(), result.deviations.end());
  while (result.deviations[result.index] > best + kMdeTieTolerance) ++result.index;
  return result;
}

std::size_t minimum_distance_estimate(const CandidateSet& cs, const SampleCounts& c) {
  return minimum_distance_estimate_detail(cs, c).index;
}

}  // namespace shapetree
