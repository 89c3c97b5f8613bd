#pragma once

#include <array>
#include <stdexcept>

#include "aoi_relay/finite_blocklength.hpp"
#include "aoi_relay/link_model.hpp"

namespace aoi_relay {

/// Moments of the service time s = (nT + upsilon) R, R ~ Geometric(1 - eps).
struct ServiceMoments {
    double mean_s = 0.0;
    double second_moment_s = 0.0;
    double mgf_neg_lambda = 0.0;  ///< E[exp(-lambda s)]
    double attempt_duration = 0.0;
    double eps = 0.0;
    double utilization = 0.0;     ///< lambda E[s]
};

/// Thrown by operations that need a stable queue when E[s] >= 1/lambda.
class InstabilityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class EstimateSource { analytic, simulated };

struct AoiEstimate {
    double aaoi = 0.0;  ///< +inf when unstable
    bool stable = false;
    /// E[s], the Pollaczek-Khinchine wait term, and the (1/lambda - E[s]) / E[e^{-lambda s}] term.
    std::array<double, 3> breakdown{};
    EstimateSource source = EstimateSource::analytic;
    double ci_halfwidth = 0.0;
    ServiceMoments moments;
    ErrorReport errors;
};

/// P(R = m) = (1 - eps) eps^(m-1).
double retransmission_pmf(double eps, long long m);

ServiceMoments service_moments(double eps, double n_total, double symbol_duration_s,
                               double channel_delay_s, double lambda_rate);

/// True when E[s] < 1/lambda by more than a 1e-9 relative guard band.
bool is_stable(const ServiceMoments& m, double lambda_rate);

/// Mean queueing delay E[s^2] / (2 (1/lambda - E[s])). Throws InstabilityError.
double pk_mean_wait(const ServiceMoments& m, double lambda_rate);

/// Average AoI for a given overall round error and attempt duration.
AoiEstimate aaoi_for_error(double eps, double attempt_duration_s, double lambda_rate);

/// Average AoI of the relay link, with the round error from system_error(cfg, method).
AoiEstimate aaoi_analytic(const SystemConfig& cfg, ErrorMethod method = ErrorMethod::closed_form);

}  // namespace aoi_relay
