#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "aoi_relay/link_model.hpp"

namespace aoi_relay {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double q_function(double x);

/// log2(1 + gamma), bits per channel use. Throws std::domain_error for gamma < 0.
double capacity(double gamma);

/// Channel dispersion (log2 e)^2 / 2 * (1 - 1/(1+gamma)^2).
double dispersion(double gamma);

/// Normal-approximation block error for a fixed SNR: Q((n C - k) / sqrt(n V)).
double conditional_error(double gamma, double n_hop, double k_bits);

/// Breakpoints of the piecewise-linear stand-in for the conditional error.
/// Between phi_lo and delta_hi the kernel is 1/2 - beta sqrt(n) (z - psi).
struct ApproxParams {
    double beta = 0.0;
    double psi = 0.0;       ///< SNR threshold 2^(k/n) - 1
    double phi_lo = 0.0;    ///< kernel is 1 below this SNR
    double delta_hi = 0.0;  ///< kernel is 0 above this SNR

    double half_width() const { return delta_hi - psi; }
};

ApproxParams approx_params(double n_hop, double k_bits);

/// The piecewise-linear kernel evaluated at SNR z.
double linearized_kernel(double z, const ApproxParams& p, double n_hop);

/// Fading-averaged block error of one hop, closed form of the linearized
/// kernel against the exponential SNR density.
///
/// When phi_lo < 0 the lower plateau lies outside the SNR support and the
/// integral starts at zero instead; for phi_lo >= 0 the expression is the
/// usual 1 - beta sqrt(n) gbar (e^{-phi/gbar} - e^{-delta/gbar}). Evaluated
/// with expm1/log1p so that errors around 1e-12 at high SNR keep their
/// relative precision. Results are clamped to [0, 1]; every clamp bumps
/// closed_form_clamp_count().
double avg_error_closed_form(double avg_snr, double n_hop, double k_bits);
double avg_error_closed_form(const LinkBudget& budget, double k_bits);

std::uint64_t closed_form_clamp_count();
void reset_closed_form_clamp_count();

enum class Kernel { exact, linearized };

/// Numerical integration did not reach the requested accuracy.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive Gauss-Kronrod integration of the averaged block error.
/// Relative accuracy 1e-9; throws IntegrationError otherwise.
double avg_error_quadrature(double avg_snr, double n_hop, double k_bits, Kernel kernel);
double avg_error_quadrature(const LinkBudget& budget, double k_bits, Kernel kernel);

/// Decode-and-forward combination eps_r + eps_d (1 - eps_r).
double overall_df_error(double eps_r, double eps_d);

enum class ErrorMethod { closed_form, quadrature_linearized, quadrature_exact };

const char* to_string(ErrorMethod method);
ErrorMethod error_method_from_string(const std::string& name);

struct ErrorReport {
    double eps_sr = 0.0;
    double eps_rd = 0.0;
    double eps_overall = 0.0;
    ErrorMethod method = ErrorMethod::closed_form;
};

ErrorReport system_error(const SystemConfig& cfg, ErrorMethod method);

/// Two-hop error written as one product, 1 - (1-eps_sr)(1-eps_rd) with
/// each factor expanded from the closed form. Used as a cross-check on
/// system_error(cfg, closed_form).
double overall_error_product_form(const SystemConfig& cfg);

}  // namespace aoi_relay
