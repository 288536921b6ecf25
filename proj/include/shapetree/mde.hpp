#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shapetree/density.hpp"
#include "shapetree/sampling.hpp"

namespace shapetree {

/// Finite candidate family over a common support size.
class CandidateSet {
 public:
  /// Throws EmptyCandidates on an empty list, DomainMismatch on mixed k.
  explicit CandidateSet(std::vector<DiscreteDensity> candidates,
                        std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return candidates_.size(); }
  std::size_t k() const noexcept { return candidates_.front().k(); }
  const DiscreteDensity& operator[](std::size_t i) const { return candidates_.at(i); }
  const std::vector<DiscreteDensity>& candidates() const noexcept { return candidates_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<DiscreteDensity> candidates_;
  std::vector<std::string> labels_;
};

/// Deduplicated sets {x : f_i(x) > f_j(x)} over ordered pairs i != j.
std::vector<AtomSet> yatracos_class(const CandidateSet& cs);

struct MdeResult {
  std::size_t index = 0;
  std::vector<double> deviations;  // per candidate: max over the class of |mu_theta(A) - mu_n(A)|
};

/// Ties closer than this are broken toward the smaller index.
inline constexpr double kMdeTieTolerance = 1e-12;

/// Candidate minimizing its largest Yatracos-set deviation from the empirical
/// measure. Throws DomainMismatch or BadParam (n = 0).
MdeResult minimum_distance_estimate_detail(const CandidateSet& cs, const SampleCounts& c);
std::size_t minimum_distance_estimate(const CandidateSet& cs, const SampleCounts& c);

}  // namespace shapetree
