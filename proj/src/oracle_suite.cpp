#include "aoi_relay/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aoi_relay/aoi_analytics.hpp"
#include "aoi_relay/aoi_simulator.hpp"
#include "aoi_relay/finite_blocklength.hpp"

namespace aoi_relay {
namespace {

OracleCheck make_check(std::string name, double measured, double tolerance, std::string detail = {}) {
    OracleCheck c;
    c.name = std::move(name);
    c.measured = measured;
    c.tolerance = tolerance;
    c.passed = measured <= tolerance;
    c.detail = std::move(detail);
    return c;
}

std::string describe(double sim, double analytic) {
    std::ostringstream os;
    os.precision(8);
    os << "simulated=" << sim << " analytic=" << analytic;
    return os.str();
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite(const SystemConfig& cfg, const OracleOptions& opts) {
    std::vector<OracleCheck> checks;
    const auto [sr, rd] = build_link_budgets(cfg);

    for (const LinkBudget& b : {sr, rd}) {
        const double closed = avg_error_closed_form(b, cfg.k_bits);
        const double lin = avg_error_quadrature(b, cfg.k_bits, Kernel::linearized);
        const double exact = avg_error_quadrature(b, cfg.k_bits, Kernel::exact);
        const std::string hop = to_string(b.hop);
        checks.push_back(make_check(hop + " closed form vs linearized quadrature",
                                    std::abs(closed - lin), 1e-9));
        checks.push_back(make_check(hop + " closed form vs exact-kernel quadrature",
                                    std::abs(closed - exact), 2e-2));
    }

    const ErrorReport closed = system_error(cfg, ErrorMethod::closed_form);
    checks.push_back(make_check("two-hop error, composed vs product form",
                                std::abs(closed.eps_overall - overall_error_product_form(cfg)),
                                1e-12));

    // AAoI: replicated fixed-eps simulation at the closed-form round error.
    const AoiEstimate analytic = aaoi_analytic(cfg, ErrorMethod::closed_form);
    SimOptions sim_opts;
    sim_opts.seed = opts.seed;
    sim_opts.horizon_s = opts.horizon_s;
    sim_opts.mode = SimMode::fixed_eps;
    sim_opts.fixed_eps = closed.eps_overall;
    const ReplicationSummary reps = replicate(cfg, sim_opts, opts.replications);
    const double aoi_tol = std::max(0.05 * analytic.aaoi, 2.0 * reps.ci_halfwidth);
    checks.push_back(make_check("AAoI analytic vs simulated", std::abs(reps.mean_aoi - analytic.aaoi),
                                aoi_tol, describe(reps.mean_aoi, analytic.aaoi)));

    // Service and waiting moments from a single long run.
    SimOptions queue_opts = sim_opts;
    queue_opts.replication = 1'000'000;
    queue_opts.horizon_s = opts.horizon_s * opts.replications;
    const QueueComparison q = validate_queue(cfg, queue_opts);
    checks.push_back(make_check(
        "mean service time", std::abs(q.sim.mean_service - q.analytic.mean_s),
        std::max(0.01 * q.analytic.mean_s, 3.0 * q.sim.se_service),
        describe(q.sim.mean_service, q.analytic.mean_s)));
    checks.push_back(make_check("mean waiting time (Pollaczek-Khinchine)",
                                std::abs(q.sim.mean_wait - q.analytic_wait),
                                std::max(0.02 * q.analytic_wait, 3.0 * q.sim.se_wait),
                                describe(q.sim.mean_wait, q.analytic_wait)));

    // Fading: per-round failure rate against the exact-kernel quadrature.
    SimOptions fade_opts = sim_opts;
    fade_opts.mode = SimMode::sampled_fading;
    fade_opts.replication = 2'000'000;
    const SimResult fade = simulate(cfg, fade_opts);
    // The simulator decodes with integer blocklengths, so the oracle does too.
    const double p = overall_df_error(
        avg_error_quadrature(sr.avg_snr, static_cast<double>(fade.n_sr_used), cfg.k_bits, Kernel::exact),
        avg_error_quadrature(rd.avg_snr, static_cast<double>(fade.n_rd_used), cfg.k_bits, Kernel::exact));
    const double rate = fade.rounds ? static_cast<double>(fade.failed_rounds) / fade.rounds : 0.0;
    const double se = fade.rounds ? std::sqrt(p * (1 - p) / fade.rounds) : 0.0;
    checks.push_back(make_check("round failure rate under sampled fading", std::abs(rate - p),
                                3.0 * se,
                                describe(rate, p)));
    return checks;
}

}  // namespace aoi_relay
