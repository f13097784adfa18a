#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "causalbounds/analysis.hpp"
#include "causalbounds/bootstrap.hpp"
#include "causalbounds/error.hpp"
#include "causalbounds/estimators.hpp"
#include "causalbounds/linprog.hpp"
#include "causalbounds/logistic.hpp"
#include "causalbounds/simulation.hpp"

namespace py = pybind11;
using namespace cbounds;

namespace {

py::dict estimate_dict(const AteEstimate& e) {
  py::dict out;
  out["mu1"] = e.mu1;
  out["mu0"] = e.mu0;
  out["psi"] = e.psi;
  return out;
}

py::dict bounds_dict(const BoundResult& r) {
  py::dict out;
  out["mu1_lo"] = r.mu1.lo;
  out["mu1_hi"] = r.mu1.hi;
  out["mu0_lo"] = r.mu0.lo;
  out["mu0_hi"] = r.mu0.hi;
  out["psi_lo"] = r.psi_lo;
  out["psi_hi"] = r.psi_hi;
  out["length"] = r.length();
  out["status"] = r.status();
  return out;
}

SensitivityConfig make_config(double delta, std::optional<double> lambda, std::vector<std::string> terms,
                              std::uint64_t seed, std::size_t b) {
  SensitivityConfig cfg;
  cfg.delta = delta;
  cfg.lambda = lambda;
  cfg.basis_terms = std::move(terms);
  cfg.seed = seed;
  cfg.bootstrap_b = b;
  cfg.validate();
  return cfg;
}

AnalysisOptions make_options(bool standardize, std::size_t qb_folds, bool qb_delta_box) {
  AnalysisOptions o;
  o.standardize = standardize;
  o.qb_folds = qb_folds;
  o.qb_delta_box = qb_delta_box;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Worst-case ATE bounds over inverse-propensity weights";

  // The exception type lives as long as the interpreter; the handle is leaked on purpose.
  static auto* error_type = new py::object(py::exception<Error>(m, "CausalBoundsError", PyExc_RuntimeError));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = (*error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type->ptr(), exc.ptr());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd, Eigen::MatrixXd, std::vector<std::string>>(), py::arg("y"),
           py::arg("z"), py::arg("x"), py::arg("names") = std::vector<std::string>{})
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("k", &Dataset::k)
      .def_property_readonly("y", &Dataset::y)
      .def_property_readonly("z", &Dataset::z)
      .def_property_readonly("x", &Dataset::x)
      .def_property_readonly("names", &Dataset::names)
      .def("to_csv", [](const Dataset& d) {
        std::ostringstream out;
        write_csv(d, out);
        return out.str();
      });

  m.def("load_csv", [](const std::string& path) { return load_csv(path); }, py::arg("path"));

  m.def(
      "fit_mar_propensity",
      [](const Dataset& d) {
        const auto f = fit_mar_propensity(d);
        py::dict out;
        out["theta"] = f.theta;
        out["alpha"] = f.alpha;
        out["ehat"] = f.ehat;
        out["iterations"] = f.iterations;
        return out;
      },
      py::arg("dataset"));

  m.def("ipw", [](const Dataset& d, const Eigen::VectorXd& e) { return estimate_dict(ipw(d, e)); }, py::arg("dataset"),
        py::arg("e"));
  m.def("sipw", [](const Dataset& d, const Eigen::VectorXd& e) { return estimate_dict(sipw(d, e)); },
        py::arg("dataset"), py::arg("e"));

  m.def(
      "solve_lp",
      [](Eigen::VectorXd c, Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd lower, Eigen::VectorXd upper,
         bool maximize) {
        LinearProgram p{std::move(c), maximize ? Sense::Max : Sense::Min, std::move(lower), std::move(upper),
                        std::move(a), std::move(b)};
        const auto s = solve(p);
        py::dict out;
        out["status"] = std::string(to_string(s.status));
        out["w"] = s.w;
        out["objective"] = s.objective;
        out["iterations"] = s.iterations;
        out["duals"] = s.duals;
        return out;
      },
      py::arg("c"), py::arg("a"), py::arg("b"), py::arg("lower"), py::arg("upper"), py::arg("maximize") = false);

  m.def(
      "ladder_terms", [](const std::string& level, std::size_t k) { return ladder(parse_ladder(level), k).labels(); },
      py::arg("level"), py::arg("k"));

  m.def(
      "analyze",
      [](const Dataset& d, double delta, std::optional<double> lambda, std::vector<std::string> terms,
         const std::string& method, bool standardize, std::size_t qb_folds, std::uint64_t seed, bool qb_delta_box) {
        const auto cfg = make_config(delta, lambda, std::move(terms), seed, 0);
        const auto r = analyze(d, cfg, parse_method(method), make_options(standardize, qb_folds, qb_delta_box));
        auto out = bounds_dict(r.bounds);
        out["tau_lower"] = r.tau_lower;
        out["tau_upper"] = r.tau_upper;
        return out;
      },
      py::arg("dataset"), py::arg("delta") = 0.01, py::arg("lambda_") = py::none(),
      py::arg("terms") = std::vector<std::string>{}, py::arg("method") = "Proposed", py::arg("standardize") = false,
      py::arg("qb_folds") = 5, py::arg("seed") = 0, py::arg("qb_delta_box") = false);

  m.def(
      "bootstrap",
      [](const Dataset& d, std::size_t b, double delta, std::optional<double> lambda, std::vector<std::string> terms,
         const std::string& method, std::uint64_t seed, std::size_t threads) {
        const auto cfg = make_config(delta, lambda, std::move(terms), seed, b);
        const auto s = [&] {
          py::gil_scoped_release release;
          return bootstrap_bounds(d, cfg, parse_method(method), {}, threads);
        }();
        py::dict out;
        out["b_requested"] = s.b_requested;
        out["feasible_count"] = s.feasible_count;
        out["lower"] = s.boot_lower;
        out["upper"] = s.boot_upper;
        py::list lo, hi;
        for (const auto& rec : s.records) {
          lo.append(rec.psi_lo);
          hi.append(rec.psi_hi);
        }
        out["replicate_lo"] = lo;
        out["replicate_hi"] = hi;
        return out;
      },
      py::arg("dataset"), py::arg("b") = 1000, py::arg("delta") = 0.01, py::arg("lambda_") = py::none(),
      py::arg("terms") = std::vector<std::string>{}, py::arg("method") = "Proposed", py::arg("seed") = 0,
      py::arg("threads") = 0);

  m.def(
      "simulate_study",
      [](const std::string& scenario, std::size_t n, std::uint64_t seed, std::size_t replicate) {
        auto s = Scenario::make(parse_scenario(scenario));
        s.n = n;
        auto st = simulate_replicate(s, seed, replicate);
        py::dict out;
        out["dataset"] = st.dataset;
        out["x5"] = st.x5;
        out["y1"] = st.y1;
        out["y0"] = st.y0;
        out["true_ps"] = st.true_ps;
        return out;
      },
      py::arg("scenario"), py::arg("n") = 1000, py::arg("seed") = 0, py::arg("replicate") = 0);

  m.def(
      "true_ate",
      [](const std::string& scenario, std::size_t studies, std::uint64_t seed, std::size_t threads) {
        const auto s = Scenario::make(parse_scenario(scenario));
        const auto t = [&] {
          py::gil_scoped_release release;
          return true_ate(s, studies, seed, threads);
        }();
        return py::make_tuple(t.value, t.standard_error);
      },
      py::arg("scenario"), py::arg("studies") = 1000, py::arg("seed") = 0, py::arg("threads") = 0);

  m.def(
      "simulate_table",
      [](const std::string& scenario, double true_ate_value, std::size_t replicates, std::size_t n,
         std::vector<std::string> ladders, std::vector<double> deltas, std::uint64_t seed, std::size_t threads) {
        auto s = Scenario::make(parse_scenario(scenario));
        s.n = n;
        s.replicates = replicates;
        std::vector<Ladder> levels;
        for (const auto& l : ladders) levels.push_back(parse_ladder(l));
        const auto settings = table_settings(Method::Proposed, levels, deltas, {});
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          write_simulation_csv(run_table(s, settings, seed, true_ate_value, {}, threads), out);
        }
        return out.str();
      },
      py::arg("scenario"), py::arg("true_ate"), py::arg("replicates") = 100, py::arg("n") = 1000,
      py::arg("ladders") = std::vector<std::string>{"D1"}, py::arg("deltas") = std::vector<double>{0.01},
      py::arg("seed") = 0, py::arg("threads") = 0);
}
