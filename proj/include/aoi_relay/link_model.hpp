#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace aoi_relay {

/// Raised when a configuration value is out of range. `key()` names the
/// offending parameter using its config-file spelling.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

/// Full parameter set of a two-hop decode-and-forward status-update link.
///
/// Powers and noise are kept in dBm because that is how they are
/// configured; everything downstream converts to watts first. Blocklength
/// and update size are real-valued so sweeps can treat them continuously.
struct SystemConfig {
    double distance_m = 1000.0;
    double tau = 0.5;                 ///< S-R distance = tau * d
    double total_power_dbm = 23.0;
    double phi_s = 0.5;
    double phi_r = 0.5;
    double noise_dbm = -167.0;
    double carrier_hz = 6.0e9;
    double n_total = 300.0;           ///< channel uses per two-hop round
    double eta_sr = 0.5;
    double eta_rd = 0.5;
    double k_bits = 100.0;
    double symbol_duration_s = 1.0e-4;
    double channel_delay_s = 0.0;
    double lambda_rate = 22.0;        ///< updates per second

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;

    /// Duration of one complete two-hop round, n*T + upsilon.
    double attempt_duration() const { return n_total * symbol_duration_s + channel_delay_s; }

    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

enum class Hop { source_relay, relay_destination };

const char* to_string(Hop hop);

struct LinkBudget {
    Hop hop = Hop::source_relay;
    double alpha = 0.0;    // large-scale path gain, linear
    double avg_snr = 0.0;  // alpha * P_i / sigma^2, linear
    double n_hop = 0.0;    // eta_ij * n, may be fractional
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Free-space path gain (c / (4 pi f d))^2.
double path_gain(double distance_m, double carrier_hz);

/// Per-hop budgets for the S->R and R->D hops, in that order.
std::pair<LinkBudget, LinkBudget> build_link_budgets(const SystemConfig& cfg);

}  // namespace aoi_relay
