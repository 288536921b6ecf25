#include "shapetree/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shapetree/density.hpp"
#include "shapetree/error.hpp"
#include "shapetree/io.hpp"
#include "shapetree/mde.hpp"
#include "shapetree/metrics.hpp"
#include "shapetree/partition_tree.hpp"
#include "shapetree/risk_lab.hpp"
#include "shapetree/sampling.hpp"

namespace shapetree::cli {
namespace {

using nlohmann::json;

// Raised while turning flags into library arguments; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char* kSupFamily = "monotone-sup";

struct Common {
  std::string format = "csv";
  std::string output;
};

struct EstimateArgs {
  std::string estimator = "greedy-binary";
  std::string family = "harmonic-zipf";
  std::optional<double> param;
  std::size_t k = 64;
  std::uint64_t n = 1000;
  std::uint64_t seed = 0;
  std::string counts_path;
  bool renormalize = false;
};

struct SimulateArgs {
  std::string estimator = "greedy-binary";
  std::string family = "harmonic-zipf";
  std::optional<double> param;
  std::size_t k = 64;
  std::uint64_t n = 1000;
  std::vector<std::uint64_t> n_grid;
  std::uint64_t reps = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool renormalize = false;
};

struct RatesArgs {
  std::string shape = "monotone";
  std::uint64_t n = 1;
  std::uint64_t k = 2;
};

struct AssouadArgs {
  std::string regime = "monotone-large-k";
  std::uint64_t n = 1;
  std::uint64_t k = 1;
  std::optional<std::size_t> r;
  std::optional<double> epsilon;
  std::string theta;
  std::optional<std::uint64_t> support;
};

struct VcArgs {
  std::size_t ell = 1;
  std::size_t m = 1;
};

struct MdeArgs {
  std::string candidates_path;
  std::string counts_path;
  std::optional<std::size_t> sample_from;
  std::uint64_t n = 1000;
  std::uint64_t seed = 0;
};

template <typename Parse>
auto usage(const std::string& flag, Parse parse) {
  try {
    return parse();
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

EstimatorSpec estimator_flag(const std::string& name, bool renormalize) {
  auto spec = usage("--estimator", [&] { return parse_estimator(name); });
  spec.renormalize = spec.renormalize || renormalize;
  return spec;
}

Family family_flag(const std::string& name) {
  return usage("--family", [&] { return parse_family(name); });
}

std::ifstream open_input(const std::string& flag, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(flag + ": cannot open '" + path + "'");
  return in;
}

// Results go to --output when given, otherwise to `out`.
class Sink {
 public:
  Sink(const Common& common, std::ostream& out) : format_(common.format), out_(&out) {
    if (!common.output.empty()) {
      file_ = std::make_unique<std::ofstream>(common.output, std::ios::binary);
      if (!*file_) throw Error(Errc::BadParam, "cannot write '" + common.output + "'");
      out_ = file_.get();
    }
  }
  bool json() const { return format_ == "json"; }
  std::ostream& stream() { return *out_; }
  void emit(const nlohmann::json& j) { *out_ << j.dump(2) << '\n'; }

 private:
  std::string format_;
  std::ostream* out_;
  std::unique_ptr<std::ofstream> file_;
};

// Subcommands ----------------------------------------------------------------

void run_estimate(const EstimateArgs& a, const Common& common, std::ostream& out) {
  const auto spec = estimator_flag(a.estimator, a.renormalize);
  const auto fam = family_flag(a.family);
  std::optional<SampleCounts> counts;
  if (!a.counts_path.empty()) {
    auto in = open_input("--counts", a.counts_path);
    counts = usage("--counts", [&] { return io::counts_from_csv(in); });
  }

  const std::size_t k = counts ? counts->k() : a.k;
  const DiscreteDensity f = family(fam, k, a.param);
  if (!counts) counts = sample(f, a.n, a.seed);
  const auto fitted = fit_estimator(spec, *counts, f);

  Sink sink(common, out);
  if (!sink.json()) {
    io::write_csv(sink.stream(), fitted.estimate);
    return;
  }
  json j{{"estimator", estimator_name(spec)},
         {"family", std::string(family_name(fam))},
         {"k", k},
         {"n", counts->n()},
         {"seed", a.seed},
         {"tree", fitted.tree ? io::to_json(*fitted.tree) : json(nullptr)},
         {"estimate", io::to_json(fitted.estimate)},
         {"tv", tv(fitted.estimate, f)}};
  sink.emit(j);
}

void run_simulate(const SimulateArgs& a, const Common& common, std::ostream& out) {
  const auto spec = estimator_flag(a.estimator, a.renormalize);
  const bool sup = a.family == kSupFamily;
  const auto fam = sup ? Family::Uniform : family_flag(a.family);
  if (a.reps == 0) throw UsageError("--reps: must be at least 1");
  if (!a.n_grid.empty()) {
    for (std::size_t i = 1; i < a.n_grid.size(); ++i) {
      if (a.n_grid[i] <= a.n_grid[i - 1]) throw UsageError("--n-grid: must be strictly increasing");
    }
    if (a.n_grid.size() < 3) throw UsageError("--n-grid: needs at least 3 sample sizes");
  }
  const McOptions options{a.threads};

  const auto one = [&](std::uint64_t n) {
    if (sup) {
      const auto members = monotone_risk_family(a.k, n, a.seed);
      return sup_risk(spec, members, n, a.reps, a.seed, options);
    }
    return mc_risk(spec, {std::string(family_name(fam)), family(fam, a.k, a.param)}, n, a.reps,
                   a.seed, options);
  };

  std::vector<RiskReport> reports;
  std::optional<RateScaling> scaling;
  if (a.n_grid.empty()) {
    reports.push_back(one(a.n));
  } else if (sup) {
    for (const auto n : a.n_grid) reports.push_back(one(n));
  } else {
    const FamilyBuilder builder = [&](std::uint64_t, std::size_t k) {
      return NamedDensity{std::string(family_name(fam)), family(fam, k, a.param)};
    };
    scaling = rate_scaling(spec, builder, a.n_grid, a.k, a.reps, a.seed, options);
    reports = scaling->reports;
  }

  Sink sink(common, out);
  if (!sink.json()) {
    io::write_csv(sink.stream(), reports);
    return;
  }
  json j{{"reports", json::array()}};
  for (const auto& r : reports) j["reports"].push_back(io::to_json(r));
  if (reports.size() >= 2) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : reports) {
      xs.push_back(static_cast<double>(r.n));
      ys.push_back(r.mean_tv);
    }
    const double slope = scaling ? scaling->slope : log_log_slope(xs, ys);
    j["slope"] = std::isnan(slope) ? json(nullptr) : json(slope);
  }
  sink.emit(j);
}

void run_rates(const RatesArgs& a, const Common& common, std::ostream& out) {
  const auto shape = usage("--class", [&] { return parse_shape_class(a.shape); });
  if (a.n < 1 || a.k < 2) throw UsageError("--n/--k: need n >= 1 and k >= 2");
  const auto rr = shape == ShapeClass::Monotone ? rate_monotone(a.n, a.k) : rate_convex(a.n, a.k);
  Sink sink(common, out);
  if (sink.json()) {
    sink.emit({{"class", a.shape}, {"n", rr.n}, {"k", rr.k},
               {"branch", std::string(rate_branch_name(rr.branch))}, {"value", rr.value}});
    return;
  }
  sink.stream() << "class,n,k,branch,value\n"
                << a.shape << ',' << rr.n << ',' << rr.k << ',' << rate_branch_name(rr.branch) << ','
                << io::format_double(rr.value) << '\n';
}

void run_assouad(const AssouadArgs& a, const Common& common, std::ostream& out) {
  const auto regime = usage("--regime", [&] { return parse_regime(a.regime); });
  HypercubeSpec spec{regime, a.n, a.k, 0, 0.0, {}};
  if (!a.r || !a.epsilon) {
    const auto params = assouad_default_params(regime, a.n, a.k);
    spec.r = a.r.value_or(params.r);
    spec.epsilon = a.epsilon.value_or(params.epsilon);
  } else {
    spec.r = *a.r;
    spec.epsilon = *a.epsilon;
  }
  if (a.theta.empty()) {
    spec.theta.assign(spec.r, 0);
  } else {
    for (const char ch : a.theta) {
      if (ch != '0' && ch != '1') throw UsageError("--theta: expected a string of 0 and 1");
      spec.theta.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
  }

  auto build = spec;
  if (a.support) build.k = *a.support;
  const DiscreteDensity f = assouad_density(build);
  const auto bounds = appendix_bounds(regime, spec.r, spec.epsilon);

  Sink sink(common, out);
  if (!sink.json()) {
    io::write_csv(sink.stream(), f);
    return;
  }
  json bins = json::array();
  for (const auto& b : assouad_bins(spec)) bins.push_back({{"start", b.start}, {"len", b.len}});
  sink.emit({{"regime", a.regime},
             {"n", spec.n},
             {"k", spec.k},
             {"support", build.k},
             {"r", spec.r},
             {"epsilon", spec.epsilon},
             {"bins", std::move(bins)},
             {"alpha", bounds.alpha},
             {"beta", bounds.beta},
             {"lower_bound", assouad_lower_bound(spec.r, bounds.alpha, bounds.beta, spec.n)},
             {"density", io::to_json(f)}});
}

void run_vc(const VcArgs& a, const Common& common, std::ostream& out) {
  const auto vc = vc_unions_intervals_brute(a.ell, a.m);
  Sink sink(common, out);
  if (sink.json()) {
    sink.emit({{"ell", a.ell}, {"m", a.m}, {"vc", vc}});
    return;
  }
  sink.stream() << "ell,m,vc\n" << a.ell << ',' << a.m << ',' << vc << '\n';
}

CandidateSet read_candidates(const std::string& path) {
  auto in = open_input("--candidates", path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string("--candidates: ") + e.what());
  }
  // Either [density, ...] or {"candidates": [...], "labels": [...]}.
  const json& list = j.is_object() && j.contains("candidates") ? j["candidates"] : j;
  if (!list.is_array()) throw UsageError("--candidates: expected a JSON array of densities");
  std::vector<DiscreteDensity> densities;
  for (const auto& item : list) {
    densities.push_back(usage("--candidates", [&] { return io::density_from_json(item); }));
  }
  std::vector<std::string> labels;
  if (j.is_object() && j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  return usage("--candidates", [&] { return CandidateSet(std::move(densities), std::move(labels)); });
}

void run_mde(const MdeArgs& a, const Common& common, std::ostream& out) {
  const CandidateSet cs = read_candidates(a.candidates_path);
  std::optional<SampleCounts> counts;
  if (!a.counts_path.empty()) {
    auto in = open_input("--counts", a.counts_path);
    counts = usage("--counts", [&] { return io::counts_from_csv(in); });
  } else if (a.sample_from) {
    if (*a.sample_from >= cs.size()) throw UsageError("--sample-from: candidate index out of range");
    counts = sample(cs[*a.sample_from], a.n, a.seed);
  } else {
    throw UsageError("mde needs --counts or --sample-from");
  }
  const auto result = minimum_distance_estimate_detail(cs, *counts);
  const auto label = [&](std::size_t i) {
    return cs.labels().empty() ? std::to_string(i) : cs.labels()[i];
  };

  Sink sink(common, out);
  if (sink.json()) {
    sink.emit({{"index", result.index}, {"label", label(result.index)}, {"n", counts->n()},
               {"deviations", result.deviations}});
    return;
  }
  sink.stream() << "index,label,deviation,chosen\n";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    sink.stream() << i << ',' << label(i) << ',' << io::format_double(result.deviations[i]) << ','
                  << (i == result.index ? 1 : 0) << '\n';
  }
}

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--output", common.output, "Write results to this file instead of stdout");
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tree-based estimators for monotone and convex discrete densities", "shapetree"};
  app.require_subcommand(1);

  Common common;
  EstimateArgs est;
  SimulateArgs sim;
  RatesArgs rates;
  AssouadArgs asd;
  VcArgs vc;
  MdeArgs mde;

  auto* estimate = app.add_subcommand("estimate", "Fit one estimator to one sample");
  estimate->add_option("--estimator", est.estimator,
                       "oracle, empirical-histogram, greedy-binary, greedy-binary+monotonize, "
                       "greedy-ternary, idealized-binary, idealized-ternary (suffix +renormalize)")
      ->capture_default_str();
  estimate->add_option("--family", est.family,
                       "uniform, harmonic-zipf, trunc-geometric, linear-decreasing")
      ->capture_default_str();
  estimate->add_option("--param", est.param, "trunc-geometric ratio in (0,1) (default 0.9)");
  estimate->add_option("--k", est.k, "Support size")->check(CLI::PositiveNumber)->capture_default_str();
  estimate->add_option("--n", est.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
  estimate->add_option("--seed", est.seed, "Sampling seed")->capture_default_str();
  estimate->add_option("--counts", est.counts_path, "Read counts (index,count CSV) instead of sampling");
  estimate->add_flag("--renormalize", est.renormalize, "Rescale truncated estimates to mass 1");
  add_common(estimate, common);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo TV risk");
  simulate->add_option("--estimator", sim.estimator, "Estimator name (see estimate)")->capture_default_str();
  simulate->add_option("--family", sim.family, "Density family, or monotone-sup for the sup over the "
                                                "monotone stand-in family")
      ->capture_default_str();
  simulate->add_option("--param", sim.param, "trunc-geometric ratio in (0,1)");
  simulate->add_option("--k", sim.k, "Support size")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--n", sim.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--n-grid", sim.n_grid, "Comma-separated increasing sample sizes")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  simulate->add_option("--reps", sim.reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
  simulate->add_flag("--renormalize", sim.renormalize, "Rescale truncated estimates to mass 1");
  add_common(simulate, common);

  auto* rates_cmd = app.add_subcommand("rates", "Minimax rate function and branch");
  rates_cmd->add_option("--class", rates.shape, "monotone or convex")
      ->check(CLI::IsMember({"monotone", "convex"}))
      ->capture_default_str();
  rates_cmd->add_option("--n", rates.n, "Sample size")->required();
  rates_cmd->add_option("--k", rates.k, "Support size")->required();
  add_common(rates_cmd, common);

  auto* assouad = app.add_subcommand("assouad", "Hypercube lower-bound density");
  assouad->add_option("--regime", asd.regime,
                      "monotone-large-k, monotone-small-k, convex-large-k, convex-small-k")
      ->capture_default_str();
  assouad->add_option("--n", asd.n, "Sample size")->required()->check(CLI::PositiveNumber);
  assouad->add_option("--k", asd.k, "Support size")->required()->check(CLI::PositiveNumber);
  assouad->add_option("--r", asd.r, "Number of bins (default: regime choice)")->check(CLI::PositiveNumber);
  assouad->add_option("--epsilon", asd.epsilon, "Perturbation size (default: regime choice)")
      ->check(CLI::Range(0.0, 1.0));
  assouad->add_option("--theta", asd.theta, "Bit string of length r (default all zeros)");
  assouad->add_option("--support", asd.support,
                      "Materialize on this many atoms instead of k")
      ->check(CLI::PositiveNumber);
  add_common(assouad, common);

  auto* vc_cmd = app.add_subcommand("vc", "VC dimension of unions of intervals by brute force");
  vc_cmd->add_option("--ell", vc.ell, "Number of intervals")->required()->check(CLI::Range(1, 4));
  vc_cmd->add_option("--m", vc.m, "Ground set size")->required()->check(CLI::Range(1, 24));
  add_common(vc_cmd, common);

  auto* mde_cmd = app.add_subcommand("mde", "Minimum distance estimate over candidates");
  mde_cmd->add_option("--candidates", mde.candidates_path, "JSON array of densities")->required();
  auto* counts_opt = mde_cmd->add_option("--counts", mde.counts_path, "index,count CSV");
  auto* from_opt = mde_cmd->add_option("--sample-from", mde.sample_from, "Sample from candidate i");
  counts_opt->excludes(from_opt);
  mde_cmd->add_option("--n", mde.n, "Sample size for --sample-from")->check(CLI::PositiveNumber)
      ->capture_default_str();
  mde_cmd->add_option("--seed", mde.seed, "Seed for --sample-from")->capture_default_str();
  add_common(mde_cmd, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*estimate) run_estimate(est, common, out);
    else if (*simulate) run_simulate(sim, common, out);
    else if (*rates_cmd) run_rates(rates, common, out);
    else if (*assouad) run_assouad(asd, common, out);
    else if (*vc_cmd) run_vc(vc, common, out);
    else if (*mde_cmd) run_mde(mde, common, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace shapetree::cli
