#include "shapetree/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "shapetree/error.hpp"

namespace shapetree::io {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

nlohmann::json to_json(const DiscreteDensity& f) {
  return {{"k", f.k()}, {"mass", std::vector<double>(f.mass().begin(), f.mass().end())}};
}

DiscreteDensity density_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("mass") || !j["mass"].is_array()) {
    throw Error(Errc::BadParam, "density JSON needs a \"mass\" array");
  }
  std::vector<double> mass;
  for (const auto& v : j["mass"]) {
    if (!v.is_number()) throw Error(Errc::BadParam, "mass entries must be numbers");
    mass.push_back(v.get<double>());
  }
  if (j.contains("k") && (!j["k"].is_number_unsigned() || j["k"].get<std::size_t>() != mass.size())) {
    throw Error(Errc::BadParam, "\"k\" does not match the mass array");
  }
  return make_density(std::move(mass));
}

nlohmann::json to_json(const PartitionTree& t) {
  auto leaves = nlohmann::json::array();
  for (const auto& leaf : t.leaves()) leaves.push_back({{"start", leaf.start}, {"len", leaf.len}});
  return {{"arity", t.arity()}, {"padded_k", t.padded_k()}, {"leaves", std::move(leaves)}};
}

nlohmann::json to_json(const PiecewiseEstimate& e) {
  auto pieces = nlohmann::json::array();
  for (const auto& p : e.pieces()) {
    nlohmann::json piece{{"start", p.interval.start}, {"len", p.interval.len}};
    if (p.kind == PiecewiseEstimate::Kind::Constant) {
      piece["kind"] = "constant";
      piece["value"] = p.value;
    } else {
      piece["kind"] = "linear";
      piece["slope"] = p.slope;
      piece["intercept"] = p.intercept;
      piece["clamp_at_zero"] = p.clamp_at_zero;
    }
    pieces.push_back(std::move(piece));
  }
  return {{"domain_k", e.domain_k()}, {"total_mass", e.total_mass()}, {"pieces", std::move(pieces)}};
}

nlohmann::json to_json(const RiskReport& r) {
  return {{"estimator", r.estimator_name}, {"density", r.density_name}, {"n", r.n},
          {"k", r.k}, {"reps", r.replications}, {"mean_tv", r.mean_tv},
          {"std_error", r.std_error}, {"seed", r.master_seed}};
}

void write_csv(std::ostream& os, const DiscreteDensity& f) {
  os << "index,mass\n";
  for (std::size_t x = 1; x <= f.k(); ++x) os << x << ',' << format_double(f(x)) << '\n';
}

void write_csv(std::ostream& os, const SampleCounts& c) {
  os << "index,count\n";
  for (std::size_t x = 1; x <= c.k(); ++x) os << x << ',' << c(x) << '\n';
}

void write_csv(std::ostream& os, const PiecewiseEstimate& e) {
  os << "x,value\n";
  const auto values = e.values();
  for (std::size_t i = 0; i < values.size(); ++i) os << i + 1 << ',' << format_double(values[i]) << '\n';
}

void write_csv(std::ostream& os, std::span<const RiskReport> reports) {
  os << "n,k,mean_tv,std_error,reps,seed\n";
  for (const auto& r : reports) {
    os << r.n << ',' << r.k << ',' << format_double(r.mean_tv) << ',' << format_double(r.std_error)
       << ',' << r.replications << ',' << r.master_seed << '\n';
  }
}

SampleCounts counts_from_csv(std::istream& is) {
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string first = trim(line.substr(0, comma));
    const std::string second = comma == std::string::npos ? std::string{} : trim(line.substr(comma + 1));
    std::uint64_t index = 0;
    std::uint64_t count = 0;
    if (!parse_u64(first, index)) {
      if (counts.empty() && line_no == 1) continue;  // header
      throw Error(Errc::BadParam, "counts CSV line " + std::to_string(line_no) + ": bad index");
    }
    if (!parse_u64(second, count)) {
      throw Error(Errc::BadParam, "counts CSV line " + std::to_string(line_no) + ": bad count");
    }
    if (index != counts.size() + 1) {
      throw Error(Errc::BadParam, "counts CSV line " + std::to_string(line_no) + ": expected index " +
                                      std::to_string(counts.size() + 1));
    }
    counts.push_back(count);
  }
  if (counts.empty()) throw Error(Errc::BadParam, "counts CSV has no rows");
  return SampleCounts(std::move(counts));
}

}  // namespace shapetree::io
