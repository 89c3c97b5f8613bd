#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aoi_relay/aoi_analytics.hpp"
#include "aoi_relay/aoi_simulator.hpp"
#include "aoi_relay/experiments.hpp"
#include "aoi_relay/finite_blocklength.hpp"
#include "aoi_relay/link_model.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace aoi_relay;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Age of information of a two-hop decode-and-forward relay link";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_ValueError);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("distance_m", &SystemConfig::distance_m)
        .def_readwrite("tau", &SystemConfig::tau)
        .def_readwrite("total_power_dbm", &SystemConfig::total_power_dbm)
        .def_readwrite("phi_s", &SystemConfig::phi_s)
        .def_readwrite("phi_r", &SystemConfig::phi_r)
        .def_readwrite("noise_dbm", &SystemConfig::noise_dbm)
        .def_readwrite("carrier_hz", &SystemConfig::carrier_hz)
        .def_readwrite("n_total", &SystemConfig::n_total)
        .def_readwrite("eta_sr", &SystemConfig::eta_sr)
        .def_readwrite("eta_rd", &SystemConfig::eta_rd)
        .def_readwrite("k_bits", &SystemConfig::k_bits)
        .def_readwrite("symbol_duration_s", &SystemConfig::symbol_duration_s)
        .def_readwrite("channel_delay_s", &SystemConfig::channel_delay_s)
        .def_readwrite("lambda_rate", &SystemConfig::lambda_rate)
        .def("validate", &SystemConfig::validate)
        .def("attempt_duration", &SystemConfig::attempt_duration);

    py::enum_<Hop>(m, "Hop")
        .value("source_relay", Hop::source_relay)
        .value("relay_destination", Hop::relay_destination);

    py::class_<LinkBudget>(m, "LinkBudget")
        .def_readonly("hop", &LinkBudget::hop)
        .def_readonly("alpha", &LinkBudget::alpha)
        .def_readonly("avg_snr", &LinkBudget::avg_snr)
        .def_readonly("n_hop", &LinkBudget::n_hop);

    m.def("dbm_to_watts", &dbm_to_watts, "dbm"_a);
    m.def("watts_to_dbm", &watts_to_dbm, "watts"_a);
    m.def("path_gain", &path_gain, "distance_m"_a, "carrier_hz"_a);
    m.def("build_link_budgets", &build_link_budgets, "cfg"_a);

    py::class_<ApproxParams>(m, "ApproxParams")
        .def_readonly("beta", &ApproxParams::beta)
        .def_readonly("psi", &ApproxParams::psi)
        .def_readonly("phi_lo", &ApproxParams::phi_lo)
        .def_readonly("delta_hi", &ApproxParams::delta_hi);

    py::enum_<Kernel>(m, "Kernel").value("exact", Kernel::exact).value("linearized", Kernel::linearized);
    py::enum_<ErrorMethod>(m, "ErrorMethod")
        .value("closed_form", ErrorMethod::closed_form)
        .value("quadrature_linearized", ErrorMethod::quadrature_linearized)
        .value("quadrature_exact", ErrorMethod::quadrature_exact);

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("eps_sr", &ErrorReport::eps_sr)
        .def_readonly("eps_rd", &ErrorReport::eps_rd)
        .def_readonly("eps_overall", &ErrorReport::eps_overall)
        .def_readonly("method", &ErrorReport::method);

    m.def("q_function", &q_function, "x"_a);
    m.def("capacity", &capacity, "gamma"_a);
    m.def("dispersion", &dispersion, "gamma"_a);
    m.def("conditional_error", &conditional_error, "gamma"_a, "n_hop"_a, "k_bits"_a);
    m.def("approx_params", &approx_params, "n_hop"_a, "k_bits"_a);
    m.def("avg_error_closed_form",
          py::overload_cast<double, double, double>(&avg_error_closed_form), "avg_snr"_a,
          "n_hop"_a, "k_bits"_a);
    m.def("avg_error_quadrature",
          py::overload_cast<double, double, double, Kernel>(&avg_error_quadrature), "avg_snr"_a,
          "n_hop"_a, "k_bits"_a, "kernel"_a = Kernel::exact);
    m.def("overall_df_error", &overall_df_error, "eps_r"_a, "eps_d"_a);
    m.def("system_error", &system_error, "cfg"_a, "method"_a = ErrorMethod::closed_form);

    py::class_<ServiceMoments>(m, "ServiceMoments")
        .def_readonly("mean_s", &ServiceMoments::mean_s)
        .def_readonly("second_moment_s", &ServiceMoments::second_moment_s)
        .def_readonly("mgf_neg_lambda", &ServiceMoments::mgf_neg_lambda)
        .def_readonly("attempt_duration", &ServiceMoments::attempt_duration)
        .def_readonly("eps", &ServiceMoments::eps)
        .def_readonly("utilization", &ServiceMoments::utilization);

    py::class_<AoiEstimate>(m, "AoiEstimate")
        .def_readonly("aaoi", &AoiEstimate::aaoi)
        .def_readonly("stable", &AoiEstimate::stable)
        .def_readonly("breakdown", &AoiEstimate::breakdown)
        .def_readonly("moments", &AoiEstimate::moments)
        .def_readonly("errors", &AoiEstimate::errors);

    m.def("service_moments", &service_moments, "eps"_a, "n_total"_a, "symbol_duration_s"_a,
          "channel_delay_s"_a, "lambda_rate"_a);
    m.def("pk_mean_wait", &pk_mean_wait, "moments"_a, "lambda_rate"_a);
    m.def("aaoi_for_error", &aaoi_for_error, "eps"_a, "attempt_duration_s"_a, "lambda_rate"_a);
    m.def("aaoi_analytic", &aaoi_analytic, "cfg"_a, "method"_a = ErrorMethod::closed_form);

    py::enum_<SimMode>(m, "SimMode")
        .value("sampled_fading", SimMode::sampled_fading)
        .value("fixed_eps", SimMode::fixed_eps);

    py::class_<SimResult>(m, "SimResult")
        .def_property_readonly("delivered", [](const SimResult& r) { return r.status == SimStatus::ok; })
        .def_readonly("time_avg_aoi", &SimResult::time_avg_aoi)
        .def_readonly("time_avg_aoi_raw", &SimResult::time_avg_aoi_raw)
        .def_readonly("ci_halfwidth", &SimResult::ci_halfwidth)
        .def_readonly("mean_delay", &SimResult::mean_delay)
        .def_readonly("mean_wait", &SimResult::mean_wait)
        .def_readonly("mean_service", &SimResult::mean_service)
        .def_readonly("mean_attempts", &SimResult::mean_attempts)
        .def_readonly("delivered_count", &SimResult::delivered_count)
        .def_readonly("rounds", &SimResult::rounds)
        .def_readonly("failed_rounds", &SimResult::failed_rounds)
        .def_readonly("horizon", &SimResult::horizon)
        .def_readonly("seed", &SimResult::seed);

    m.def(
        "simulate",
        [](const SystemConfig& cfg, double horizon_s, std::uint64_t seed, SimMode mode,
           double fixed_eps, std::uint64_t replication) {
            SimOptions o;
            o.horizon_s = horizon_s;
            o.seed = seed;
            o.mode = mode;
            o.fixed_eps = fixed_eps;
            o.replication = replication;
            py::gil_scoped_release release;
            return simulate(cfg, o);
        },
        "cfg"_a, "horizon_s"_a, "seed"_a = 1, "mode"_a = SimMode::sampled_fading,
        "fixed_eps"_a = 0.0, "replication"_a = 0);

    m.def(
        "replicate",
        [](const SystemConfig& cfg, double horizon_s, int count, std::uint64_t seed, SimMode mode,
           double fixed_eps) {
            SimOptions o;
            o.horizon_s = horizon_s;
            o.seed = seed;
            o.mode = mode;
            o.fixed_eps = fixed_eps;
            ReplicationSummary s;
            {
                py::gil_scoped_release release;
                s = replicate(cfg, o, count);
            }
            return py::make_tuple(s.mean_aoi, s.ci_halfwidth, s.runs);
        },
        "cfg"_a, "horizon_s"_a, "count"_a = 10, "seed"_a = 1, "mode"_a = SimMode::sampled_fading,
        "fixed_eps"_a = 0.0, "Returns (mean_aoi, ci_halfwidth, runs).");

    py::enum_<SweepParam>(m, "SweepParam")
        .value("lambda_rate", SweepParam::lambda_rate)
        .value("n_total", SweepParam::n_total)
        .value("eta_sr", SweepParam::eta_sr)
        .value("phi_s", SweepParam::phi_s)
        .value("k_bits", SweepParam::k_bits);
    py::enum_<Evaluator>(m, "Evaluator")
        .value("analytic", Evaluator::analytic)
        .value("simulated", Evaluator::simulated)
        .value("both", Evaluator::both);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("value", &SweepRow::value)
        .def_readonly("aaoi_analytic", &SweepRow::aaoi_analytic)
        .def_readonly("aaoi_sim", &SweepRow::aaoi_sim)
        .def_readonly("ci_halfwidth", &SweepRow::ci_halfwidth)
        .def_readonly("eps_overall", &SweepRow::eps_overall)
        .def_readonly("stable", &SweepRow::stable);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("rows", &SweepResult::rows)
        .def_readonly("argmin", &SweepResult::argmin)
        .def_property_readonly("argmin_value", &SweepResult::argmin_value)
        .def_property_readonly("argmin_aaoi", &SweepResult::argmin_aaoi);

    m.def("default_grid", &default_grid, "param"_a);
    m.def(
        "sweep",
        [](SweepParam param, std::vector<double> grid, const SystemConfig& base,
           Evaluator evaluator, int replications, double horizon_s, std::uint64_t seed) {
            SweepSpec spec;
            spec.parameter = param;
            spec.grid = grid.empty() ? default_grid(param) : std::move(grid);
            spec.base = base;
            spec.evaluator = evaluator;
            spec.replications = replications;
            spec.horizon_s = horizon_s;
            spec.seed = seed;
            py::gil_scoped_release release;
            return sweep(spec);
        },
        "param"_a, "grid"_a = std::vector<double>{}, "base"_a = SystemConfig{},
        "evaluator"_a = Evaluator::analytic, "replications"_a = 10, "horizon_s"_a = 2.0e4,
        "seed"_a = 1);
}
