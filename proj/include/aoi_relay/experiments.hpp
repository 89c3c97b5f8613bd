#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aoi_relay/aoi_analytics.hpp"
#include "aoi_relay/aoi_simulator.hpp"
#include "aoi_relay/finite_blocklength.hpp"
#include "aoi_relay/link_model.hpp"

namespace aoi_relay {

enum class SweepParam { lambda_rate, n_total, eta_sr, phi_s, k_bits };

const char* to_string(SweepParam p);
/// Accepts the config-key spelling plus the short aliases `lambda` and `n`.
SweepParam sweep_param_from_string(const std::string& name);

enum class Evaluator { analytic, simulated, both };

const char* to_string(Evaluator e);
Evaluator evaluator_from_string(const std::string& name);

/// Copy of `base` with one parameter replaced. Sweeping eta_sr also sets
/// eta_rd = 1 - eta_sr; sweeping phi_s sets phi_r = 1 - phi_s.
SystemConfig apply_param(const SystemConfig& base, SweepParam p, double value);

/// Grids used when none is given.
std::vector<double> default_grid(SweepParam p);

struct SweepSpec {
    SweepParam parameter = SweepParam::lambda_rate;
    std::vector<double> grid;
    SystemConfig base;
    Evaluator evaluator = Evaluator::analytic;
    ErrorMethod error_method = ErrorMethod::closed_form;
    // Simulation settings, used when the evaluator includes simulation.
    SimMode sim_mode = SimMode::fixed_eps;  ///< fixed_eps uses the analytic round error
    int replications = 10;
    double horizon_s = 2.0e4;
    std::uint64_t seed = 1;
    unsigned workers = 0;  ///< 0 = hardware concurrency

    /// Throws ConfigError / std::invalid_argument.
    void validate() const;
};

struct SweepRow {
    double value = 0.0;
    double aaoi_analytic = std::numeric_limits<double>::infinity();
    double aaoi_sim = std::numeric_limits<double>::quiet_NaN();     ///< NaN when not simulated
    double ci_halfwidth = std::numeric_limits<double>::quiet_NaN();
    double eps_overall = 0.0;
    bool stable = false;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
    SweepParam parameter = SweepParam::lambda_rate;
    std::vector<SweepRow> rows;
    std::optional<std::size_t> argmin;  ///< empty when every row is unstable

    double argmin_value() const;
    double argmin_aaoi() const;
};

/// Evaluates every grid point (in parallel) and locates the stable argmin,
/// breaking ties toward the smaller parameter value.
SweepResult sweep(const SweepSpec& spec);

struct RefineOptions {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double tolerance = 1e-6;
};

enum class OptimumStatus { refined, grid_fallback, no_stable_bracket };

const char* to_string(OptimumStatus s);

struct Optimum {
    OptimumStatus status = OptimumStatus::no_stable_bracket;
    double value = std::numeric_limits<double>::quiet_NaN();
    double aaoi = std::numeric_limits<double>::infinity();
    std::string note;
};

/// Grid argmin of the analytic AAoI inside [lo, hi], then golden-section
/// search between the neighbouring grid points. Falls back to the grid
/// argmin when the stable grid values are not unimodal.
Optimum find_optimum(const SweepSpec& spec, const RefineOptions& refine);

struct AllocationRow {
    double phi_s = 0.0;
    double eta_sr = 0.0;
    double aaoi = std::numeric_limits<double>::infinity();
    double eps_overall = 0.0;
    bool stable = false;
};

struct AllocationCurveMin {
    double phi_s = 0.0;
    double eta_sr = std::numeric_limits<double>::quiet_NaN();
    double aaoi = std::numeric_limits<double>::infinity();
};

struct AllocationStudy {
    std::vector<AllocationRow> rows;  ///< phi-major, eta-minor
    std::vector<AllocationCurveMin> minima;
};

/// eta_sr x phi_s cross sweep (with eta_rd = 1 - eta_sr, phi_r = 1 - phi_s).
AllocationStudy allocation_study(const SystemConfig& base, const std::vector<double>& eta_grid,
                                 const std::vector<double>& phi_values,
                                 ErrorMethod method = ErrorMethod::closed_form);

}  // namespace aoi_relay
