#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "shapetree/cli.hpp"
#include "shapetree/density.hpp"
#include "shapetree/error.hpp"
#include "shapetree/io.hpp"
#include "shapetree/mde.hpp"
#include "shapetree/metrics.hpp"
#include "shapetree/partition_tree.hpp"
#include "shapetree/risk_lab.hpp"
#include "shapetree/sampling.hpp"

namespace py = pybind11;
using namespace shapetree;

namespace {

std::vector<double> masses(const DiscreteDensity& f) { return {f.mass().begin(), f.mass().end()}; }

std::vector<std::uint64_t> counts_of(const SampleCounts& c) { return {c.counts().begin(), c.counts().end()}; }

py::dict report_dict(const RiskReport& r) {
  py::dict d;
  d["estimator"] = r.estimator_name;
  d["density"] = r.density_name;
  d["n"] = r.n;
  d["k"] = r.k;
  d["reps"] = r.replications;
  d["mean_tv"] = r.mean_tv;
  d["std_error"] = r.std_error;
  d["seed"] = r.master_seed;
  return d;
}

py::dict tree_dict(const PartitionTree& t) {
  py::list leaves;
  for (const auto& l : t.leaves()) leaves.append(py::make_tuple(l.start, l.len));
  py::dict d;
  d["arity"] = t.arity();
  d["padded_k"] = t.padded_k();
  d["leaves"] = leaves;
  return d;
}

Regime regime_arg(const std::string& name) { return parse_regime(name); }

}  // namespace

PYBIND11_MODULE(_shapetree, m) {
  m.doc() = "Tree-based estimators for monotone and convex discrete densities";

  static py::exception<Error> error_type(m, "ShapetreeError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(py::str(e.what()));
      exc.attr("code") = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def(
      "family",
      [](const std::string& name, std::size_t k, std::optional<double> param) {
        return masses(family(parse_family(name), k, param));
      },
      py::arg("name"), py::arg("k"), py::arg("param") = py::none(),
      "Masses of a named family: uniform, harmonic-zipf, trunc-geometric, linear-decreasing.");

  m.def(
      "is_non_increasing", [](std::vector<double> mass) { return is_non_increasing(make_density(std::move(mass))); },
      py::arg("mass"));
  m.def(
      "is_convex_non_increasing",
      [](std::vector<double> mass) { return is_convex_non_increasing(make_density(std::move(mass))); },
      py::arg("mass"));

  m.def(
      "sample",
      [](std::vector<double> mass, std::uint64_t n, std::uint64_t seed) {
        return counts_of(sample(make_density(std::move(mass)), n, seed));
      },
      py::arg("mass"), py::arg("n"), py::arg("seed"), "Per-atom counts of n seeded draws.");

  m.def(
      "tv", [](std::vector<double> f, std::vector<double> g) { return tv(make_density(f), make_density(g)); },
      py::arg("f"), py::arg("g"));
  m.def(
      "hellinger_affinity",
      [](std::vector<double> f, std::vector<double> g) {
        return hellinger_affinity(make_density(f), make_density(g));
      },
      py::arg("f"), py::arg("g"));

  m.def(
      "estimate",
      [](const std::string& estimator, std::vector<std::uint64_t> counts, std::optional<std::vector<double>> truth) {
        const SampleCounts c(std::move(counts));
        const auto f = truth ? make_density(*truth) : make_density(std::vector<double>(c.k(), 1.0 / c.k()));
        const auto fitted = fit_estimator(parse_estimator(estimator), c, f);
        py::dict d;
        d["values"] = fitted.estimate.values();
        d["total_mass"] = fitted.estimate.total_mass();
        d["tree"] = fitted.tree ? py::object(tree_dict(*fitted.tree)) : py::object(py::none());
        return d;
      },
      py::arg("estimator"), py::arg("counts"), py::arg("truth") = py::none(),
      "Fit an estimator to counts. Idealized and oracle estimators need the true masses.");

  m.def(
      "monotonize",
      [](std::vector<double> values) {
        std::vector<PiecewiseEstimate::Piece> pieces;
        for (std::size_t i = 0; i < values.size(); ++i) {
          pieces.push_back({Interval{i + 1, 1}, PiecewiseEstimate::Kind::Constant, values[i]});
        }
        return monotonize(PiecewiseEstimate(values.size(), std::move(pieces))).values();
      },
      py::arg("values"), "Pool adjacent violators on a per-atom step function.");

  m.def(
      "mc_risk",
      [](const std::string& estimator, const std::string& family_name, std::size_t k, std::uint64_t n,
         std::uint64_t reps, std::uint64_t seed, unsigned threads, std::optional<double> param) {
        const NamedDensity f{family_name, family(parse_family(family_name), k, param)};
        const auto spec = parse_estimator(estimator);
        RiskReport r;
        {
          py::gil_scoped_release release;
          r = mc_risk(spec, f, n, reps, seed, {threads});
        }
        return report_dict(r);
      },
      py::arg("estimator"), py::arg("family"), py::arg("k"), py::arg("n"), py::arg("reps"), py::arg("seed"),
      py::arg("threads") = 1, py::arg("param") = py::none());

  m.def(
      "rate",
      [](const std::string& shape, std::uint64_t n, std::uint64_t k) {
        const auto r = parse_shape_class(shape) == ShapeClass::Monotone ? rate_monotone(n, k) : rate_convex(n, k);
        return py::make_tuple(std::string(rate_branch_name(r.branch)), r.value);
      },
      py::arg("shape"), py::arg("n"), py::arg("k"), "(branch, value) of the minimax rate.");

  m.def("vc_unions_intervals", &vc_unions_intervals_brute, py::arg("ell"), py::arg("m"));

  m.def(
      "assouad_default_params",
      [](const std::string& regime, std::uint64_t n, std::uint64_t k) {
        const auto p = assouad_default_params(regime_arg(regime), n, k);
        return py::make_tuple(p.r, p.epsilon);
      },
      py::arg("regime"), py::arg("n"), py::arg("k"));

  m.def(
      "assouad_density",
      [](const std::string& regime, std::uint64_t n, std::uint64_t k, std::size_t r, double epsilon,
         std::vector<std::uint8_t> theta) {
        return masses(assouad_density({regime_arg(regime), n, k, r, epsilon, std::move(theta)}));
      },
      py::arg("regime"), py::arg("n"), py::arg("k"), py::arg("r"), py::arg("epsilon"), py::arg("theta"));

  m.def(
      "minimum_distance_estimate",
      [](const std::vector<std::vector<double>>& candidates, std::vector<std::uint64_t> counts) {
        std::vector<DiscreteDensity> cs;
        for (const auto& c : candidates) cs.push_back(make_density(c));
        const auto r = minimum_distance_estimate_detail(CandidateSet(std::move(cs)), SampleCounts(std::move(counts)));
        return py::make_tuple(r.index, r.deviations);
      },
      py::arg("candidates"), py::arg("counts"), "(index, deviations) of the minimum distance estimate.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI subcommand in-process; returns (exit code, stdout, stderr).");
}
