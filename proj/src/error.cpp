#include "shapetree/error.hpp"

namespace shapetree {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NegativeMass: return "NegativeMass";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::BadParam: return "BadParam";
    case Errc::InfeasibleSpec: return "InfeasibleSpec";
    case Errc::OutOfRegime: return "OutOfRegime";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::NotMonotone: return "NotMonotone";
    case Errc::NotConvex: return "NotConvex";
    case Errc::NotPiecewiseConstant: return "NotPiecewiseConstant";
    case Errc::TooLarge: return "TooLarge";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::UnknownEstimator: return "UnknownEstimator";
    case Errc::EmptyFamily: return "EmptyFamily";
    case Errc::DegenerateGrid: return "DegenerateGrid";
  }
  return "Unknown";
}

}  // namespace shapetree
