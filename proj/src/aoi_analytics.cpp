#include "aoi_relay/aoi_analytics.hpp"

#include <cmath>
#include <limits>

namespace aoi_relay {
namespace {

constexpr double kStabilityGuard = 1e-9;

void check_eps(double eps, const char* who) {
    if (!(eps >= 0.0) || !(eps < 1.0))
        throw std::domain_error(std::string(who) + ": eps must lie in [0, 1)");
}

}  // namespace

double retransmission_pmf(double eps, long long m) {
    check_eps(eps, "retransmission_pmf");
    if (m < 1) throw std::invalid_argument("retransmission_pmf: m must be >= 1");
    if (m == 1) return 1.0 - eps;
    return (1.0 - eps) * std::pow(eps, static_cast<double>(m - 1));
}

ServiceMoments service_moments(double eps, double n_total, double symbol_duration_s,
                               double channel_delay_s, double lambda_rate) {
    check_eps(eps, "service_moments");
    if (!(n_total > 0) || !(symbol_duration_s > 0) || !(channel_delay_s >= 0) ||
        !(lambda_rate > 0))
        throw std::invalid_argument("service_moments: need n, T, lambda > 0 and upsilon >= 0");

    ServiceMoments m;
    m.eps = eps;
    m.attempt_duration = n_total * symbol_duration_s + channel_delay_s;
    const double d = m.attempt_duration;
    const double ok = 1.0 - eps;
    m.mean_s = d / ok;
    m.second_moment_s = d * d * (1.0 + eps) / (ok * ok);
    const double decay = std::exp(-d * lambda_rate);
    m.mgf_neg_lambda = ok * decay / (1.0 - eps * decay);
    m.utilization = lambda_rate * m.mean_s;
    return m;
}

bool is_stable(const ServiceMoments& m, double lambda_rate) {
    return m.mean_s < (1.0 / lambda_rate) * (1.0 - kStabilityGuard);
}

double pk_mean_wait(const ServiceMoments& m, double lambda_rate) {
    if (!is_stable(m, lambda_rate))
        throw InstabilityError("pk_mean_wait: queue is unstable (lambda E[s] = " +
                               std::to_string(m.utilization) + ")");
    return m.second_moment_s / (2.0 * (1.0 / lambda_rate - m.mean_s));
}

AoiEstimate aaoi_for_error(double eps, double attempt_duration_s, double lambda_rate) {
    AoiEstimate est;
    est.source = EstimateSource::analytic;
    est.aaoi = std::numeric_limits<double>::infinity();
    est.breakdown.fill(std::numeric_limits<double>::infinity());
    if (!(eps < 1.0)) {
        est.stable = false;
        est.moments.eps = eps;
        est.moments.attempt_duration = attempt_duration_s;
        return est;
    }
    // service_moments wants n and T separately; only their product matters.
    est.moments = service_moments(eps, attempt_duration_s, 1.0, 0.0, lambda_rate);
    est.stable = is_stable(est.moments, lambda_rate);
    if (!est.stable) return est;

    const double slack = 1.0 / lambda_rate - est.moments.mean_s;
    est.breakdown[0] = est.moments.mean_s;
    est.breakdown[1] = est.moments.second_moment_s / (2.0 * slack);
    est.breakdown[2] = slack / est.moments.mgf_neg_lambda;
    est.aaoi = est.breakdown[0] + est.breakdown[1] + est.breakdown[2];
    return est;
}

AoiEstimate aaoi_analytic(const SystemConfig& cfg, ErrorMethod method) {
    const ErrorReport errors = system_error(cfg, method);
    AoiEstimate est = aaoi_for_error(errors.eps_overall, cfg.attempt_duration(), cfg.lambda_rate);
    est.errors = errors;
    return est;
}

}  // namespace aoi_relay
