#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "bifbm/calculus.hpp"
#include "bifbm/chaos.hpp"
#include "bifbm/covariance.hpp"
#include "bifbm/grid.hpp"
#include "bifbm/hermite.hpp"
#include "bifbm/potential.hpp"
#include "bifbm/report.hpp"
#include "bifbm/simulate.hpp"

namespace py = pybind11;
using namespace bifbm;

namespace {

TestFunction make_test_function(py::function f, py::function fp, py::function fpp) {
  TestFunction tf;
  tf.f = [f](double z) { return f(z).cast<double>(); };
  tf.f_prime = [fp](double z) { return fp(z).cast<double>(); };
  tf.f_second = [fpp](double z) { return fpp(z).cast<double>(); };
  return tf;
}

}  // namespace

PYBIND11_MODULE(_bifbm, m) {
  m.doc() = "Exact simulation and numerical certification toolkit for "
            "bifractional Brownian motion";
  m.attr("__version__") = kLibraryVersion;
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  py::class_<HurstParams>(m, "HurstParams")
      .def(py::init<double, double>(), py::arg("h"), py::arg("k"))
      .def_readonly("h", &HurstParams::h)
      .def_readonly("k", &HurstParams::k)
      .def("hk", &HurstParams::hk)
      .def_property_readonly("regime",
                             [](const HurstParams& p) { return regime_name(p.regime()); })
      .def("__repr__", [](const HurstParams& p) {
        return "HurstParams(h=" + std::to_string(p.h) + ", k=" + std::to_string(p.k) + ")";
      });

  py::class_<MultiParams>(m, "MultiParams")
      .def(py::init<std::vector<HurstParams>>(), py::arg("params"))
      .def_readonly("params", &MultiParams::params)
      .def("dims", &MultiParams::dims)
      .def("hk_star", &MultiParams::hk_star);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<std::vector<double>>(), py::arg("times"))
      .def_static("uniform", &TimeGrid::uniform, py::arg("t"), py::arg("n"))
      .def("times", &TimeGrid::times)
      .def("size", &TimeGrid::size)
      .def("steps", &TimeGrid::steps)
      .def("horizon", &TimeGrid::horizon);

  // covariance structure
  m.def("covariance", &covariance, py::arg("p"), py::arg("t"), py::arg("s"));
  m.def("variogram", &variogram, py::arg("p"), py::arg("t"), py::arg("s"));
  m.def("quasi_helix_bounds", &quasi_helix_bounds, py::arg("p"), py::arg("t"), py::arg("s"));
  m.def("mixed_partial", &mixed_partial, py::arg("p"), py::arg("t"), py::arg("s"));
  m.def("h_fn", &h_fn, py::arg("p"), py::arg("y"));
  m.def("scaled_h", &scaled_h, py::arg("p"), py::arg("y"));

  // Hermite / mollifier kernels
  m.def("gauss_kernel", &gauss_kernel, py::arg("var"), py::arg("y"));
  m.def("hermite", &hermite, py::arg("n"), py::arg("x"));
  m.def("hermite_gauss", &hermite_gauss, py::arg("n"), py::arg("y"));
  m.def("mollifier", [](double eps, double z) { return mollifier(MollifierParam{eps}, z); },
        py::arg("eps"), py::arg("z"));
  m.def("mollifier_prime",
        [](double eps, double z) { return mollifier_prime(MollifierParam{eps}, z); },
        py::arg("eps"), py::arg("z"));

  // simulation
  py::class_<CholeskyFactor>(m, "CholeskyFactor")
      .def_readonly("lower", &CholeskyFactor::lower)
      .def_readonly("jitter", &CholeskyFactor::jitter);

  py::class_<PathEnsemble>(m, "PathEnsemble")
      .def_readonly("params", &PathEnsemble::params)
      .def_readonly("grid", &PathEnsemble::grid)
      .def_readonly("seed", &PathEnsemble::seed)
      .def_readonly("n_paths", &PathEnsemble::n_paths)
      .def("dim", &PathEnsemble::dim, py::arg("d"),
           py::return_value_policy::reference_internal);

  py::class_<SelfSimilarityReport>(m, "SelfSimilarityReport")
      .def_readonly("c", &SelfSimilarityReport::c)
      .def_readonly("max_standardized_discrepancy",
                    &SelfSimilarityReport::max_standardized_discrepancy)
      .def_readonly("variance_ratios", &SelfSimilarityReport::variance_ratios)
      .def_readonly("expected_ratio", &SelfSimilarityReport::expected_ratio);

  m.def("covariance_matrix", &covariance_matrix, py::arg("p"), py::arg("grid"));
  m.def("factorize", &factorize, py::arg("matrix"));
  m.def("sample_paths", &sample_paths, py::arg("params"), py::arg("grid"), py::arg("n_paths"),
        py::arg("seed"));
  m.def("self_similarity_check", &self_similarity_check, py::arg("p"), py::arg("c"),
        py::arg("grid"), py::arg("n_paths"), py::arg("seed"));

  // stochastic calculus
  py::class_<TestFunction>(m, "TestFunction")
      .def(py::init(&make_test_function), py::arg("f"), py::arg("f_prime"), py::arg("f_second"))
      .def("validate", &TestFunction::validate, py::arg("rel_tol") = 1e-4,
           py::arg("seed") = 12345);

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("mean", &McEstimate::mean)
      .def_readonly("standard_error", &McEstimate::standard_error);

  py::class_<LocalTimeEstimate>(m, "LocalTimeEstimate")
      .def_readonly("x", &LocalTimeEstimate::x)
      .def_readonly("t", &LocalTimeEstimate::t)
      .def_readonly("epsilon", &LocalTimeEstimate::epsilon)
      .def_readonly("per_path", &LocalTimeEstimate::per_path)
      .def_readonly("mean", &LocalTimeEstimate::mean)
      .def_readonly("standard_error", &LocalTimeEstimate::standard_error);

  py::class_<PathwiseResidual>(m, "PathwiseResidual")
      .def_readonly("l2_error", &PathwiseResidual::l2_error)
      .def_readonly("standard_error", &PathwiseResidual::standard_error);

  py::class_<TanakaResidual>(m, "TanakaResidual")
      .def_readonly("l2_error", &TanakaResidual::l2_error)
      .def_readonly("standard_error", &TanakaResidual::standard_error)
      .def_readonly("mean_mollified_value", &TanakaResidual::mean_mollified_value)
      .def_readonly("mean_local_time", &TanakaResidual::mean_local_time)
      .def_readonly("mean_skorohod", &TanakaResidual::mean_skorohod);

  m.def("quadratic_variation", &quadratic_variation, py::arg("path"), py::arg("grid"));
  m.def("expected_qv", &expected_qv, py::arg("p"), py::arg("t"), py::arg("n"));
  m.def("expected_qv_h_route", &expected_qv_h_route, py::arg("p"), py::arg("t"), py::arg("n"));
  m.def("increment_cov_theta", &increment_cov_theta, py::arg("p"), py::arg("t"), py::arg("n"),
        py::arg("i"), py::arg("j"));
  m.def("critical_trace_constants", &critical_trace_constants, py::arg("p"));
  m.def("ito_deterministic_residual",
        [](const HurstParams& p, const TestFunction& tf, double t) {
          return ito_deterministic_residual(p, tf, t);
        },
        py::arg("p"), py::arg("tf"), py::arg("t"));
  m.def("skorohod_estimate", &skorohod_estimate, py::arg("ens"), py::arg("tf"), py::arg("t"));
  m.def("mc_mean", &mc_mean, py::arg("values"));
  m.def("ito_pathwise_residual", &ito_pathwise_residual, py::arg("ens"), py::arg("tf"),
        py::arg("t"));
  m.def("weighted_local_time", &weighted_local_time, py::arg("ens"), py::arg("x"),
        py::arg("eps"));
  m.def("weighted_local_time_mean", &weighted_local_time_mean, py::arg("p"), py::arg("t"),
        py::arg("x"), py::arg("eps") = 0.0);
  m.def("tanaka_residual", &tanaka_residual, py::arg("ens"), py::arg("x"), py::arg("eps"));

  // chaos expansions and Watanabe norms
  py::class_<WatanabeIndex>(m, "WatanabeIndex")
      .def(py::init<double, const MultiParams&>(), py::arg("alpha"), py::arg("params"))
      .def_readonly("alpha", &WatanabeIndex::alpha)
      .def_readonly("threshold", &WatanabeIndex::threshold);

  py::class_<TailFit>(m, "TailFit")
      .def_readonly("slope", &TailFit::slope)
      .def_readonly("slope_stderr", &TailFit::slope_stderr)
      .def_readonly("implied_alpha_bound", &TailFit::implied_alpha_bound);

  m.def("multiple_integral_inner", &multiple_integral_inner, py::arg("p"), py::arg("n"),
        py::arg("s"), py::arg("r"));
  m.def("local_time_coeff_1d", &local_time_coeff_1d, py::arg("p"), py::arg("n"), py::arg("s"),
        py::arg("x"));
  m.def("local_time_chaos_norms",
        [](const HurstParams& p, double t, double x, std::size_t N, double eps) {
          return local_time_chaos_norms(p, t, x, N, eps);
        },
        py::arg("p"), py::arg("t"), py::arg("x"), py::arg("max_order"), py::arg("eps") = 0.0);
  m.def("local_time_chaos_moment",
        [](const HurstParams& p, double t, double x, std::size_t N, double eps) {
          return local_time_chaos_moment(p, t, x, N, eps);
        },
        py::arg("p"), py::arg("t"), py::arg("x"), py::arg("max_order"), py::arg("eps") = 0.0);
  m.def("multi_local_time_coeff", &multi_local_time_coeff, py::arg("params"), py::arg("orders"),
        py::arg("s"), py::arg("x"), py::arg("theta"));
  m.def("multi_chaos_shell_norms",
        [](const MultiParams& mp, double t, const std::vector<double>& x, double theta,
           std::size_t max_total) {
          return multi_chaos_shell_norms(mp, t, x, theta, max_total);
        },
        py::arg("params"), py::arg("t"), py::arg("x"), py::arg("theta"),
        py::arg("max_total_order"));
  m.def("beta_coeff", &beta_coeff, py::arg("p"), py::arg("n"), py::arg("eps"), py::arg("s"),
        py::arg("x"));
  m.def("watanabe_partial_norm", &watanabe_partial_norm, py::arg("index"), py::arg("norms"),
        py::arg("max_order"));
  m.def("tail_exponent_estimate", &tail_exponent_estimate, py::arg("norms"), py::arg("n_lo"),
        py::arg("n_hi"));
  m.def("export_coefficient_table", &export_coefficient_table, py::arg("p"), py::arg("x"),
        py::arg("max_order"), py::arg("s_grid"), py::arg("path"));

  // potential kernels
  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def(py::init<MultiParams, double, Eigen::VectorXd>(), py::arg("params"),
           py::arg("theta"), py::arg("x"))
      .def_readonly("theta", &PotentialSpec::theta)
      .def_readonly("x", &PotentialSpec::x)
      .def("dims", &PotentialSpec::dims)
      .def("gamma", &PotentialSpec::gamma);

  py::class_<UBarDerivatives>(m, "UBarDerivatives")
      .def_readonly("d_s", &UBarDerivatives::d_s)
      .def_readonly("grad", &UBarDerivatives::grad)
      .def_readonly("diag_second", &UBarDerivatives::diag_second);

  py::class_<MultiTanakaReport>(m, "MultiTanakaReport")
      .def_readonly("l2_residual", &MultiTanakaReport::l2_residual)
      .def_readonly("residual_se", &MultiTanakaReport::residual_se)
      .def_readonly("mean_i2", &MultiTanakaReport::mean_i2)
      .def_readonly("i2_order0_quad", &MultiTanakaReport::i2_order0_quad)
      .def_readonly("u_bar_origin_limit", &MultiTanakaReport::u_bar_origin_limit);

  m.def("newtonian_U", &newtonian_U, py::arg("d"), py::arg("z"));
  m.def("mollified_U", &mollified_U, py::arg("d"), py::arg("eps"), py::arg("w"));
  m.def("mollified_U_quadrature", &mollified_U_quadrature, py::arg("d"), py::arg("eps"),
        py::arg("w"), py::arg("order") = 48);
  m.def("u_bar", &u_bar, py::arg("spec"), py::arg("s"), py::arg("z"));
  m.def("u_bar_derivatives", &u_bar_derivatives, py::arg("spec"), py::arg("s"), py::arg("z"));
  m.def("laplace_identity_residual", &laplace_identity_residual, py::arg("d"), py::arg("a"),
        py::arg("eps"), py::arg("z"));
  m.def("stencil_laplacian_U", &stencil_laplacian_U, py::arg("d"), py::arg("z"),
        py::arg("h") = 1e-4);
  m.def("mollified_multidim_tanaka", &mollified_multidim_tanaka, py::arg("ens"),
        py::arg("spec"), py::arg("eps"));

  // experiment reports (JSON strings at the boundary)
  m.def("list_experiments", &list_experiments);
  m.def("describe_experiment", &describe_experiment, py::arg("kind"));
  m.def("run_experiment",
        [](const std::string& config_json, const std::string& out_dir) {
          const auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
          return run_experiment(cfg, out_dir).to_json().dump(2);
        },
        py::arg("config_json"), py::arg("out_dir") = std::string{},
        "Run one experiment from a JSON config string; returns the report as a JSON string.");

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NotPositiveSemidefinite>(m, "NotPositiveSemidefinite");
}
