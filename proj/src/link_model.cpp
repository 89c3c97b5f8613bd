#include "aoi_relay/link_model.hpp"

#include <cmath>
#include <numbers>

namespace aoi_relay {
namespace {

void require(bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void SystemConfig::validate() const {
    require(finite(distance_m) && distance_m > 0, "distance_m", "must be > 0");
    require(finite(tau) && tau > 0 && tau < 1, "tau", "must lie in (0, 1)");
    require(finite(total_power_dbm), "total_power_dbm", "must be finite");
    require(finite(phi_s) && phi_s > 0 && phi_s <= 1, "phi_s", "must lie in (0, 1]");
    require(finite(phi_r) && phi_r > 0 && phi_r <= 1, "phi_r", "must lie in (0, 1]");
    require(finite(noise_dbm), "noise_dbm", "must be finite");
    require(finite(carrier_hz) && carrier_hz > 0, "carrier_hz", "must be > 0");
    require(finite(n_total) && n_total >= 2, "n_total", "must be >= 2");
    require(finite(eta_sr) && eta_sr > 0 && eta_sr < 1, "eta_sr", "must lie in (0, 1)");
    require(finite(eta_rd) && eta_rd > 0 && eta_rd < 1, "eta_rd", "must lie in (0, 1)");
    // Small slack so that eta_rd = 1 - eta_sr never trips on rounding.
    require(eta_sr + eta_rd <= 1 + 1e-12, "eta_rd", "eta_sr + eta_rd must not exceed 1");
    require(finite(k_bits) && k_bits >= 1, "k_bits", "must be >= 1");
    require(finite(symbol_duration_s) && symbol_duration_s > 0, "symbol_duration_s",
            "must be > 0");
    require(finite(channel_delay_s) && channel_delay_s >= 0, "channel_delay_s", "must be >= 0");
    require(finite(lambda_rate) && lambda_rate > 0, "lambda_rate", "must be > 0");
}

const char* to_string(Hop hop) {
    return hop == Hop::source_relay ? "S->R" : "R->D";
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
    if (!(watts > 0)) throw std::invalid_argument("watts_to_dbm: power must be > 0");
    return 10.0 * std::log10(watts) + 30.0;
}

double path_gain(double distance_m, double carrier_hz) {
    if (!(distance_m > 0) || !(carrier_hz > 0))
        throw std::invalid_argument("path_gain: distance and carrier must be > 0");
    const double r = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_hz * distance_m);
    return r * r;
}

std::pair<LinkBudget, LinkBudget> build_link_budgets(const SystemConfig& cfg) {
    cfg.validate();
    const double total_w = dbm_to_watts(cfg.total_power_dbm);
    const double noise_w = dbm_to_watts(cfg.noise_dbm);

    auto make = [&](Hop hop, double dist, double phi, double eta) {
        LinkBudget b;
        b.hop = hop;
        b.alpha = path_gain(dist, cfg.carrier_hz);
        b.avg_snr = b.alpha * phi * total_w / noise_w;
        b.n_hop = eta * cfg.n_total;
        return b;
    };
    auto sr = make(Hop::source_relay, cfg.tau * cfg.distance_m, cfg.phi_s, cfg.eta_sr);
    auto rd = make(Hop::relay_destination, (1.0 - cfg.tau) * cfg.distance_m, cfg.phi_r,
                   cfg.eta_rd);
    require(sr.n_hop >= 1, "eta_sr", "allocates less than one channel use to S->R");
    require(rd.n_hop >= 1, "eta_rd", "allocates less than one channel use to R->D");
    return {sr, rd};
}

}  // namespace aoi_relay
