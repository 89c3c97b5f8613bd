#include "aoi_relay/finite_blocklength.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace aoi_relay {
namespace {

std::atomic<std::uint64_t> g_clamp_count{0};

constexpr double kLog2E = std::numbers::log2e;

// Weight e^{-z/gbar} is below 1e-16 of its peak past this many gbar.
const double kTruncationFactor = 16.0 * std::numbers::ln10;

constexpr double kQuadRelTol = 1e-9;

// (1 - e^{-x}) / x - 1, accurate for small x.
double g_minus_one(double x) {
    if (x < 1e-2) {
        // -x/2 + x^2/6 - x^3/24 + x^4/120 - x^5/720
        return x * (-1.0 / 2 + x * (1.0 / 6 + x * (-1.0 / 24 + x * (1.0 / 120 - x / 720))));
    }
    if (std::isinf(x)) return -1.0;
    return -std::expm1(-x) / x - 1.0;
}

double clamp_probability(double p) {
    if (p < 0.0 || p > 1.0 || std::isnan(p)) {
        g_clamp_count.fetch_add(1, std::memory_order_relaxed);
        if (std::isnan(p)) return 1.0;
        return std::clamp(p, 0.0, 1.0);
    }
    return p;
}

void check_hop_inputs(double n_hop, double k_bits, const char* who) {
    if (!(n_hop >= 1.0) || !(k_bits >= 1.0) || !std::isfinite(n_hop) || !std::isfinite(k_bits)) {
        std::ostringstream os;
        os << who << ": need n_hop >= 1 and k >= 1 (got n_hop=" << n_hop << ", k=" << k_bits
           << ")";
        throw std::invalid_argument(os.str());
    }
}

struct Piece {
    double lo;
    double hi;
};

std::vector<Piece> make_pieces(std::vector<double> cuts, double upper) {
    cuts.push_back(0.0);
    cuts.push_back(upper);
    std::vector<double> pts;
    for (double c : cuts)
        if (c >= 0.0 && c <= upper) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Piece> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back({pts[i], pts[i + 1]});
    return out;
}

}  // namespace

double q_function(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double capacity(double gamma) {
    if (!(gamma >= 0)) throw std::domain_error("capacity: SNR must be >= 0");
    return std::log1p(gamma) * kLog2E;
}

double dispersion(double gamma) {
    if (!(gamma >= 0)) throw std::domain_error("dispersion: SNR must be >= 0");
    if (std::isinf(gamma)) return kLog2E * kLog2E / 2.0;
    // 1 - 1/(1+g)^2 = g (2+g) / (1+g)^2, no cancellation near zero
    const double one_plus = 1.0 + gamma;
    return kLog2E * kLog2E / 2.0 * (gamma * (2.0 + gamma) / (one_plus * one_plus));
}

double conditional_error(double gamma, double n_hop, double k_bits) {
    check_hop_inputs(n_hop, k_bits, "conditional_error");
    if (!(gamma >= 0)) throw std::domain_error("conditional_error: SNR must be >= 0");
    if (gamma == 0.0) return 1.0;
    if (std::isinf(gamma)) return 0.0;
    const double num = n_hop * capacity(gamma) - k_bits;
    const double den = std::sqrt(n_hop * dispersion(gamma));
    return q_function(num / den);
}

ApproxParams approx_params(double n_hop, double k_bits) {
    check_hop_inputs(n_hop, k_bits, "approx_params");
    const double rate_ln2 = k_bits / n_hop * std::numbers::ln2;
    ApproxParams p;
    p.beta = 1.0 / (2.0 * std::numbers::pi * std::sqrt(std::expm1(2.0 * rate_ln2)));
    p.psi = std::expm1(rate_ln2);
    const double half = 1.0 / (2.0 * p.beta * std::sqrt(n_hop));
    p.phi_lo = p.psi - half;
    p.delta_hi = p.psi + half;
    return p;
}

double linearized_kernel(double z, const ApproxParams& p, double n_hop) {
    if (z <= p.phi_lo) return 1.0;
    if (z >= p.delta_hi) return 0.0;
    return 0.5 - p.beta * std::sqrt(n_hop) * (z - p.psi);
}

double avg_error_closed_form(double avg_snr, double n_hop, double k_bits) {
    const ApproxParams p = approx_params(n_hop, k_bits);
    if (!(avg_snr > 0)) return 1.0;
    if (std::isinf(avg_snr)) return 0.0;

    double eps;
    if (p.phi_lo >= 0.0) {
        const double width = p.delta_hi - p.phi_lo;
        eps = -std::expm1(-p.phi_lo / avg_snr + std::log1p(g_minus_one(width / avg_snr)));
    } else {
        // Kernel at z = 0 is 1/2 + beta sqrt(n) psi = beta sqrt(n) delta.
        const double top = p.beta * std::sqrt(n_hop) * p.delta_hi;
        eps = -top * g_minus_one(p.delta_hi / avg_snr);
    }
    return clamp_probability(eps);
}

double avg_error_closed_form(const LinkBudget& budget, double k_bits) {
    return avg_error_closed_form(budget.avg_snr, budget.n_hop, k_bits);
}

std::uint64_t closed_form_clamp_count() { return g_clamp_count.load(); }
void reset_closed_form_clamp_count() { g_clamp_count.store(0); }

double avg_error_quadrature(double avg_snr, double n_hop, double k_bits, Kernel kernel) {
    const ApproxParams p = approx_params(n_hop, k_bits);
    if (!(avg_snr > 0)) return 1.0;
    if (std::isinf(avg_snr)) return 0.0;

    const double upper = kTruncationFactor * avg_snr;
    const double weight_at_upper = std::exp(-upper / avg_snr);

    auto kernel_at = [&](double z) {
        return kernel == Kernel::exact ? conditional_error(z, n_hop, k_bits)
                                       : linearized_kernel(z, p, n_hop);
    };
    auto integrand = [&](double z) { return std::exp(-z / avg_snr) / avg_snr * kernel_at(z); };

    std::vector<double> cuts;
    if (kernel == Kernel::linearized) {
        cuts = {p.phi_lo, p.delta_hi};
    } else {
        const double h = p.half_width();
        cuts = {p.psi - 3 * h, p.psi - h, p.psi, p.psi + h, p.psi + 3 * h};
        // Above the threshold the exact kernel falls off on a log(z) scale.
        for (double z = 2 * (p.psi + 3 * h); z < upper; z *= 2) cuts.push_back(z);
    }
    // Long pieces are cut every few e-folds of the weight.
    for (int i = 1; 4.0 * i * avg_snr < upper; ++i) cuts.push_back(4.0 * i * avg_snr);

    double total = 0.0;
    double err_total = 0.0;
    for (const Piece& piece : make_pieces(cuts, upper)) {
        if (kernel == Kernel::linearized && piece.lo >= p.delta_hi) break;
        // Each piece is mapped onto [0, 1]: the Kronrod error estimate has a
        // floor near eps * max|f| that does not shrink with the width.
        const double width = piece.hi - piece.lo;
        auto unit = [&](double t) { return integrand(piece.lo + t * width); };
        double err = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            unit, 0.0, 1.0, 12, 1e-12, &err);
        total += v * width;
        err_total += err * width;
    }
    // Tail past the truncation point: kernel is non-increasing, so it is
    // bounded by K(upper) times the remaining exponential mass.
    const double tail_bound = kernel_at(upper) * weight_at_upper;
    err_total += tail_bound;

    if (!(err_total <= kQuadRelTol * std::abs(total) + 1e-15)) {
        std::ostringstream os;
        os.precision(6);
        os << "avg_error_quadrature: no convergence (avg_snr=" << avg_snr << ", n=" << n_hop
           << ", k=" << k_bits << ", value=" << total << ", error estimate=" << err_total << ")";
        throw IntegrationError(os.str());
    }
    return std::clamp(total, 0.0, 1.0);
}

double avg_error_quadrature(const LinkBudget& budget, double k_bits, Kernel kernel) {
    return avg_error_quadrature(budget.avg_snr, budget.n_hop, k_bits, kernel);
}

double overall_df_error(double eps_r, double eps_d) {
    if (!(eps_r >= 0 && eps_r <= 1) || !(eps_d >= 0 && eps_d <= 1))
        throw std::invalid_argument("overall_df_error: probabilities must lie in [0, 1]");
    return eps_r + eps_d * (1.0 - eps_r);
}

const char* to_string(ErrorMethod method) {
    switch (method) {
        case ErrorMethod::closed_form: return "closed_form";
        case ErrorMethod::quadrature_linearized: return "quadrature_linearized";
        case ErrorMethod::quadrature_exact: return "quadrature_exact";
    }
    return "?";
}

ErrorMethod error_method_from_string(const std::string& name) {
    if (name == "closed_form") return ErrorMethod::closed_form;
    if (name == "quadrature_linearized") return ErrorMethod::quadrature_linearized;
    if (name == "quadrature_exact") return ErrorMethod::quadrature_exact;
    throw std::invalid_argument("unknown error method '" + name + "'");
}

ErrorReport system_error(const SystemConfig& cfg, ErrorMethod method) {
    const auto [sr, rd] = build_link_budgets(cfg);
    auto hop_error = [&](const LinkBudget& b) {
        switch (method) {
            case ErrorMethod::closed_form: return avg_error_closed_form(b, cfg.k_bits);
            case ErrorMethod::quadrature_linearized:
                return avg_error_quadrature(b, cfg.k_bits, Kernel::linearized);
            case ErrorMethod::quadrature_exact:
                return avg_error_quadrature(b, cfg.k_bits, Kernel::exact);
        }
        return 1.0;
    };
    ErrorReport r;
    r.method = method;
    r.eps_sr = hop_error(sr);
    r.eps_rd = hop_error(rd);
    r.eps_overall = overall_df_error(r.eps_sr, r.eps_rd);
    return r;
}

double overall_error_product_form(const SystemConfig& cfg) {
    const auto [sr, rd] = build_link_budgets(cfg);
    // Success factor of one hop: beta sqrt(n) gbar (e^{-phi/gbar} - e^{-delta/gbar}).
    auto success = [&](const LinkBudget& b) {
        const ApproxParams p = approx_params(b.n_hop, cfg.k_bits);
        const double bsn = p.beta * std::sqrt(b.n_hop);
        const double lo = std::max(p.phi_lo, 0.0);
        const double diff = std::exp(-lo / b.avg_snr) * -std::expm1(-(p.delta_hi - lo) / b.avg_snr);
        return bsn * (lo - p.phi_lo) * std::exp(-lo / b.avg_snr) + bsn * b.avg_snr * diff;
    };
    return 1.0 - success(sr) * success(rd);
}

}  // namespace aoi_relay
