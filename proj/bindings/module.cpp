#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mhof/controller.hpp"
#include "mhof/pareto.hpp"
#include "mhof/plant.hpp"
#include "mhof/render.hpp"
#include "mhof/schemes.hpp"
#include "mhof/trace.hpp"

namespace py = pybind11;
using namespace mhof;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-objective hierarchical output-feedback optimization";

  py::register_exception<Error>(m, "MhofError", PyExc_RuntimeError);

  py::class_<ObjectiveVector>(m, "ObjectiveVector")
      .def(py::init<double, std::vector<double>>(), py::arg("ell"),
           py::arg("reg"))
      .def_readonly("ell", &ObjectiveVector::ell)
      .def_readonly("reg", &ObjectiveVector::reg)
      .def("joint", &ObjectiveVector::joint)
      .def_property_readonly("dim", &ObjectiveVector::dim)
      .def("__eq__", [](const ObjectiveVector& a, const ObjectiveVector& b) {
        return a == b;
      });

  py::class_<RefPoint>(m, "RefPoint")
      .def(py::init<std::vector<double>>(), py::arg("values"))
      .def_static("from_objective", &RefPoint::from_objective)
      .def_readonly("values", &RefPoint::values);

  py::class_<Archive>(m, "Archive")
      .def(py::init<>())
      .def("append", &Archive::append)
      .def("points", &Archive::points)
      .def("__len__", &Archive::size);

  m.def("dominates", [](const std::vector<double>& u, const std::vector<double>& v) {
    return dominates(u, v);
  });
  m.def("equivalent", [](const std::vector<double>& u, const std::vector<double>& v) {
    return equivalent(u, v);
  });
  m.def("pareto_filter", &pareto_filter);
  m.def("hypervolume", &hypervolume, py::arg("points"), py::arg("ref"));
  m.def(
      "hypervolume_mc",
      [](const std::vector<std::vector<double>>& points, const RefPoint& ref,
         std::uint64_t samples, std::uint64_t seed) {
        const McEstimate est = hypervolume_mc(points, ref, samples, seed);
        return py::make_tuple(est.estimate, est.stderr_estimate);
      },
      py::arg("points"), py::arg("ref"), py::arg("samples"), py::arg("seed"));
  m.def("ehv_of_archive", &ehv_of_archive);

  py::class_<ControllerConfig>(m, "ControllerConfig")
      .def(py::init<>())
      .def_readwrite("rho", &ControllerConfig::rho)
      .def_readwrite("eta", &ControllerConfig::eta)
      .def_readwrite("v_sat", &ControllerConfig::v_sat)
      .def_readwrite("mu_clip", &ControllerConfig::mu_clip)
      .def_readwrite("xi_d", &ControllerConfig::xi_d)
      .def_readwrite("smoothing_enabled", &ControllerConfig::smoothing_enabled)
      .def_readwrite("xi_o", &ControllerConfig::xi_o)
      .def_readwrite("xi_r", &ControllerConfig::xi_r);

  py::class_<ControllerState>(m, "ControllerState")
      .def_readonly("mu", &ControllerState::mu)
      .def_readonly("b", &ControllerState::b)
      .def_readonly("gain", &ControllerState::gain)
      .def_readonly("delta_i", &ControllerState::delta_i)
      .def_readonly("ell_min", &ControllerState::ell_min)
      .def_readonly("shrink_epochs", &ControllerState::shrink_epochs)
      .def_readonly("degenerate_gain", &ControllerState::degenerate_gain);

  m.def(
      "controller_init",
      [](const std::vector<double>& R0, double ell0,
         const std::vector<double>& mu0, const ControllerConfig& cfg) {
        return controller_init(R0, ell0, mu0, cfg);
      },
      py::arg("R0"), py::arg("ell0"), py::arg("mu0"), py::arg("cfg"));
  m.def(
      "mu_step",
      [](const ControllerState& st, const std::vector<double>& R_k,
         const ControllerConfig& cfg) { return mu_step(st, R_k, cfg); },
      py::arg("state"), py::arg("R_k"), py::arg("cfg"));
  m.def(
      "setpoint_step",
      [](const ControllerState& st, const std::vector<double>& R_k,
         double ell_k, std::uint64_t epoch, const ControllerConfig& cfg) {
        SetpointResult res = setpoint_step(st, R_k, ell_k, epoch, cfg);
        return py::make_tuple(res.state, res.shrank);
      },
      py::arg("state"), py::arg("R_k"), py::arg("ell_k"), py::arg("epoch"),
      py::arg("cfg"));

  py::class_<RegSlideReport>(m, "RegSlideReport")
      .def_readonly("improve", &RegSlideReport::improve)
      .def_readonly("deteriorate", &RegSlideReport::deteriorate)
      .def_readonly("mu_nondecreasing", &RegSlideReport::mu_nondecreasing)
      .def_readonly("slider_holds", &RegSlideReport::slider_holds)
      .def_readonly("reg_decrease", &RegSlideReport::reg_decrease)
      .def_readonly("ell_increase", &RegSlideReport::ell_increase)
      .def_readonly("bound_margin", &RegSlideReport::bound_margin);

  m.def("regslide_check", &regslide_check, py::arg("prev"), py::arg("mu_prev"),
        py::arg("next"), py::arg("mu_next"));

  py::class_<EllBoundComponent>(m, "EllBoundComponent")
      .def_readonly("k_greater", &EllBoundComponent::k_greater)
      .def_readonly("s_greater", &EllBoundComponent::s_greater)
      .def_readonly("s_less", &EllBoundComponent::s_less)
      .def_readonly("s_less_pos", &EllBoundComponent::s_less_pos)
      .def_readonly("s_less_neg", &EllBoundComponent::s_less_neg)
      .def_readonly("hypothesis_violations",
                    &EllBoundComponent::hypothesis_violations)
      .def_readonly("all_hypothesis_hold",
                    &EllBoundComponent::all_hypothesis_hold)
      .def_readonly("full_bound_slack", &EllBoundComponent::full_bound_slack)
      .def_readonly("segment_begin", &EllBoundComponent::segment_begin)
      .def_readonly("segment_end", &EllBoundComponent::segment_end)
      .def_readonly("segment_slack", &EllBoundComponent::segment_slack)
      .def_readonly("segment_bound_holds",
                    &EllBoundComponent::segment_bound_holds);

  py::class_<EllBoundReport>(m, "EllBoundReport")
      .def_readonly("components", &EllBoundReport::components);

  m.def("ellbound_diagnostic", &ellbound_diagnostic);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](std::vector<double> theta) {
             return ModelParams{std::move(theta)};
           }),
           py::arg("theta"))
      .def_readwrite("theta", &ModelParams::theta);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_static("quadratic", &ProblemSpec::quadratic, py::arg("anchor"),
                  py::arg("centers"))
      .def_static("toy_mlp", &ProblemSpec::toy_mlp, py::arg("hidden"),
                  py::arg("dataset_seed"), py::arg("samples_per_class") = 200)
      .def_property_readonly("param_count", &ProblemSpec::param_count)
      .def_property_readonly("reg_count", &ProblemSpec::reg_count);

  m.def("problem_digest",
        [](const ProblemSpec& prob) { return digest(prob); });
  m.def("init_params", &init_params, py::arg("prob"), py::arg("seed"));
  m.def("evaluate", &evaluate, py::arg("prob"), py::arg("params"));
  m.def(
      "grad_penalized",
      [](const ProblemSpec& prob, const ModelParams& params,
         const std::vector<double>& mu) {
        return grad_penalized(prob, params, mu);
      },
      py::arg("prob"), py::arg("params"), py::arg("mu"));

  py::class_<OptimizerState>(m, "OptimizerState")
      .def_static("make_sgd", &OptimizerState::make_sgd, py::arg("lr"))
      .def_static("make_adam", &OptimizerState::make_adam, py::arg("lr"))
      .def_readonly("lr", &OptimizerState::lr);

  m.def(
      "optimizer_step",
      [](const OptimizerState& opt, const ModelParams& params,
         const std::vector<double>& grad) {
        auto [next_opt, next] = optimizer_step(opt, params, grad);
        return py::make_tuple(next_opt, next);
      },
      py::arg("opt"), py::arg("params"), py::arg("grad"));
  m.def(
      "epoch",
      [](const ProblemSpec& prob, const OptimizerState& opt,
         const ModelParams& params, const std::vector<double>& mu,
         std::uint64_t inner_steps) {
        auto [next_opt, next] = epoch(prob, opt, params, mu, inner_steps);
        return py::make_tuple(next_opt, next);
      },
      py::arg("prob"), py::arg("opt"), py::arg("params"), py::arg("mu"),
      py::arg("inner_steps") = 5);

  py::enum_<SchemeKind>(m, "SchemeKind")
      .value("mhof", SchemeKind::mhof)
      .value("fixed", SchemeKind::fixed)
      .value("warmup_linear", SchemeKind::warmup_linear)
      .value("warmup_sigmoid", SchemeKind::warmup_sigmoid);

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init<>())
      .def_readwrite("scheme", &SchemeConfig::scheme)
      .def_readwrite("mu0", &SchemeConfig::mu0)
      .def_readwrite("warmup_epochs", &SchemeConfig::warmup_epochs)
      .def_readwrite("controller", &SchemeConfig::controller)
      .def_readwrite("budget", &SchemeConfig::budget)
      .def_readwrite("inner_steps", &SchemeConfig::inner_steps);

  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("k", &EpochRecord::k)
      .def_readonly("ell", &EpochRecord::ell)
      .def_readonly("reg", &EpochRecord::reg)
      .def_readonly("mu", &EpochRecord::mu)
      .def_readonly("b", &EpochRecord::b)
      .def_readonly("shrank", &EpochRecord::shrank)
      .def_readonly("ehv", &EpochRecord::ehv);

  py::class_<TraceMeta>(m, "TraceMeta")
      .def_readonly("problem_digest", &TraceMeta::problem_digest)
      .def_readonly("scheme_digest", &TraceMeta::scheme_digest)
      .def_readonly("seed", &TraceMeta::seed)
      .def_readonly("d", &TraceMeta::d)
      .def_readonly("budget", &TraceMeta::budget);

  py::class_<Trace>(m, "Trace")
      .def_property_readonly("meta", &Trace::meta)
      .def("epochs", &Trace::epochs)
      .def("__len__", &Trace::size)
      .def("__eq__", [](const Trace& a, const Trace& b) { return a == b; });

  m.def("save_trace", &save_trace, py::arg("trace"), py::arg("path"));
  m.def("load_trace", &load_trace, py::arg("path"));
  m.def("render_dynamics", &render_dynamics, py::arg("trace"),
        py::arg("svg_path"), py::arg("csv_path"));
  m.def("render_phase_portrait", &render_phase_portrait, py::arg("trace"),
        py::arg("reg_index"), py::arg("svg_path"), py::arg("csv_path"),
        py::arg("stride") = 1);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("trace", &RunResult::trace)
      .def_readonly("selected_epoch", &RunResult::selected_epoch)
      .def_readonly("final_ehv", &RunResult::final_ehv)
      .def_readonly("failed_epoch", &RunResult::failed_epoch)
      .def_readonly("error", &RunResult::error);

  m.def("run", &run, py::arg("prob"), py::arg("opt"), py::arg("cfg"),
        py::arg("seed"));
  m.def("select_model", &select_model, py::arg("trace"));
}
