#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "shapetree/density.hpp"
#include "shapetree/partition_tree.hpp"
#include "shapetree/risk_lab.hpp"
#include "shapetree/sampling.hpp"

namespace shapetree::io {

// JSON: {"k": int, "mass": [...]}
nlohmann::json to_json(const DiscreteDensity& f);
DiscreteDensity density_from_json(const nlohmann::json& j);

// JSON: {"arity": a, "padded_k": m, "leaves": [{"start": s, "len": l}, ...]}
nlohmann::json to_json(const PartitionTree& t);

// JSON: {"domain_k": k, "pieces": [{"start", "len", "kind", "value" | "slope", "intercept"}]}
nlohmann::json to_json(const PiecewiseEstimate& e);

nlohmann::json to_json(const RiskReport& report);

/// Shortest decimal form that round-trips a double.
std::string format_double(double v);

// CSV writers. Headers: "index,mass", "index,count", "x,value",
// "n,k,mean_tv,std_error,reps,seed".
void write_csv(std::ostream& os, const DiscreteDensity& f);
void write_csv(std::ostream& os, const SampleCounts& c);
void write_csv(std::ostream& os, const PiecewiseEstimate& e);
void write_csv(std::ostream& os, std::span<const RiskReport> reports);

/// Reads "index,count" rows (header optional). Throws BadParam on malformed input.
SampleCounts counts_from_csv(std::istream& is);

}  // namespace shapetree::io
