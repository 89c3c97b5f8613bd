#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi_relay/aoi_analytics.hpp"
#include "aoi_relay/link_model.hpp"

namespace aoi_relay {

/// One delivered status update.
struct UpdateRecord {
    double gen_time = 0.0;
    double depart_time = 0.0;
    long long attempts = 1;      ///< complete two-hop rounds used
    double service_start = 0.0;  ///< when its first round began

    double system_delay() const { return depart_time - gen_time; }
    double wait() const { return service_start - gen_time; }
    double service() const { return depart_time - service_start; }
};

/// Rejected by integrate_sawtooth when records are out of order.
class RecordOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Time average of the age process over [window_start, window_end].
///
/// `age_at_start` is the age at window_start; each record resets the age to
/// its system delay at its departure. Records departing outside the window
/// only matter through `age_at_start`, so callers pass the deliveries that
/// fall inside. Records must be ordered by departure with non-decreasing
/// generation times.
double integrate_sawtooth(std::span<const UpdateRecord> records, double age_at_start,
                          double window_start, double window_end);

/// Same, for the window [0, horizon].
double integrate_sawtooth(std::span<const UpdateRecord> records, double initial_age,
                          double horizon);

enum class SimMode {
    sampled_fading,  ///< per-round Rayleigh draws and normal-approximation decoding
    fixed_eps,       ///< each round fails independently with probability fixed_eps
};

struct SimOptions {
    double horizon_s = 1.0e4;
    std::uint64_t seed = 1;
    std::uint64_t replication = 0;
    SimMode mode = SimMode::sampled_fading;
    double fixed_eps = 0.0;
    double warmup_fraction = 0.05;
    double initial_age = 0.0;
    int batches = 20;  ///< batch count for the single-run confidence interval
    bool keep_records = false;
};

const char* to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& name);

enum class SimStatus { ok, no_delivery };

struct SimResult {
    SimStatus status = SimStatus::ok;
    double time_avg_aoi = 0.0;      ///< over [warmup, horizon]
    double time_avg_aoi_raw = 0.0;  ///< over [0, horizon]
    double ci_halfwidth = 0.0;      ///< 95% batch-means half-width of time_avg_aoi

    // Sample means over updates generated after the warm-up.
    double mean_delay = 0.0;
    double mean_wait = 0.0;
    double mean_service = 0.0;
    double mean_service_sq = 0.0;
    double mean_attempts = 0.0;
    double se_wait = 0.0;  ///< batch-means standard errors
    double se_service = 0.0;
    double se_service_sq = 0.0;
    std::uint64_t stationary_count = 0;

    std::uint64_t delivered_count = 0;
    std::uint64_t arrival_count = 0;
    double mean_interarrival = 0.0;
    std::uint64_t rounds = 0;         ///< every two-hop round started
    std::uint64_t failed_rounds = 0;
    std::uint64_t relay_failures = 0; ///< rounds lost on the S->R hop

    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    long long n_sr_used = 0;  ///< integer blocklengths after rounding
    long long n_rd_used = 0;
    bool blocklength_rounded = false;

    std::vector<UpdateRecord> records;  ///< only with keep_records
};

/// One sample path of the FCFS M/G/1 relay queue.
SimResult simulate(const SystemConfig& cfg, const SimOptions& opts);

/// Independent replications r = 0..count-1 (replication index feeds the
/// stream seeds), run concurrently and reduced in index order.
struct ReplicationSummary {
    std::vector<SimResult> runs;
    double mean_aoi = 0.0;
    double ci_halfwidth = 0.0;  ///< 95% Student-t half-width over replications
    std::uint64_t no_delivery_runs = 0;
};

ReplicationSummary replicate(const SystemConfig& cfg, const SimOptions& opts, int count);

/// Writes `gen_time,depart_time,attempts,age_after` rows, 17 significant digits.
void write_trace(std::ostream& os, std::span<const UpdateRecord> records);

/// Simulated vs analytic queue statistics for one configuration.
struct QueueComparison {
    bool stable = false;
    double eps = 0.0;
    ServiceMoments analytic;
    double analytic_wait = 0.0;
    double analytic_aaoi = 0.0;
    SimResult sim;
};

/// Runs a single long simulation and lines it up against the closed forms.
/// In fixed_eps mode the analytic side uses opts.fixed_eps; in sampled_fading
/// mode it uses the exact-kernel quadrature error of the configuration.
QueueComparison validate_queue(const SystemConfig& cfg, const SimOptions& opts);

/// 97.5% Student-t quantile.
double t_quantile_975(double dof);

}  // namespace aoi_relay
