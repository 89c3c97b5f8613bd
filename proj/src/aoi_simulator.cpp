#include "aoi_relay/aoi_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "aoi_relay/finite_blocklength.hpp"
#include "aoi_relay/parallel.hpp"
#include "aoi_relay/rng.hpp"

namespace aoi_relay {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/// Mean and batch-means standard error of xs (contiguous batches).
MeanSe batch_mean_se(const std::vector<double>& xs, int batches) {
    MeanSe out;
    if (xs.empty()) return out;
    CompensatedSum total;
    for (double x : xs) total.add(x);
    out.mean = total.value() / static_cast<double>(xs.size());
    const std::size_t per = xs.size() / static_cast<std::size_t>(batches);
    if (batches < 2 || per == 0) return out;
    std::vector<double> means;
    for (int b = 0; b < batches; ++b) {
        CompensatedSum s;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) s.add(xs[i]);
        means.push_back(s.value() / static_cast<double>(per));
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= batches;
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    out.se = std::sqrt(ss / (batches - 1) / batches);
    return out;
}

/// Age at time t given the deliveries with depart_time <= t.
double age_at(std::span<const UpdateRecord> records, double initial_age, double t) {
    auto it = std::upper_bound(records.begin(), records.end(), t,
                               [](double v, const UpdateRecord& r) { return v < r.depart_time; });
    if (it == records.begin()) return initial_age + t;
    return t - std::prev(it)->gen_time;
}

/// Average age over [a, b] for a full sample path that starts at t = 0.
double window_average(std::span<const UpdateRecord> records, double initial_age, double a,
                      double b) {
    auto first = std::upper_bound(records.begin(), records.end(), a,
                                  [](double v, const UpdateRecord& r) { return v < r.depart_time; });
    const auto offset = static_cast<std::size_t>(first - records.begin());
    return integrate_sawtooth(records.subspan(offset), age_at(records, initial_age, a), a, b);
}

}  // namespace

const char* to_string(SimMode mode) {
    return mode == SimMode::fixed_eps ? "fixed_eps" : "sampled_fading";
}

SimMode sim_mode_from_string(const std::string& name) {
    if (name == "fixed_eps") return SimMode::fixed_eps;
    if (name == "sampled_fading") return SimMode::sampled_fading;
    throw std::invalid_argument("unknown simulation mode '" + name + "'");
}

double integrate_sawtooth(std::span<const UpdateRecord> records, double age_at_start,
                          double window_start, double window_end) {
    if (!(window_end > window_start))
        throw std::invalid_argument("integrate_sawtooth: empty window");
    if (!(age_at_start >= 0)) throw std::invalid_argument("integrate_sawtooth: negative age");

    CompensatedSum area;
    double t = window_start;
    double age = age_at_start;
    const UpdateRecord* prev = nullptr;
    for (const UpdateRecord& r : records) {
        if (r.depart_time < r.gen_time)
            throw RecordOrderError("integrate_sawtooth: departure before generation");
        if (prev && (r.depart_time < prev->depart_time || r.gen_time < prev->gen_time))
            throw RecordOrderError("integrate_sawtooth: records out of order");
        if (r.depart_time < window_start)
            throw RecordOrderError("integrate_sawtooth: record departs before the window");
        prev = &r;
        if (r.depart_time > window_end) break;
        const double dt = r.depart_time - t;
        area.add(dt * (age + 0.5 * dt));
        t = r.depart_time;
        age = r.system_delay();
    }
    const double dt = window_end - t;
    area.add(dt * (age + 0.5 * dt));
    return area.value() / (window_end - window_start);
}

double integrate_sawtooth(std::span<const UpdateRecord> records, double initial_age,
                          double horizon) {
    return integrate_sawtooth(records, initial_age, 0.0, horizon);
}

double t_quantile_975(double dof) {
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.975);
}

SimResult simulate(const SystemConfig& cfg, const SimOptions& opts) {
    cfg.validate();
    if (!(opts.horizon_s > 0) || !std::isfinite(opts.horizon_s))
        throw std::invalid_argument("simulate: horizon must be > 0");
    if (!(opts.warmup_fraction >= 0 && opts.warmup_fraction < 1))
        throw std::invalid_argument("simulate: warm-up fraction must lie in [0, 1)");
    if (opts.mode == SimMode::fixed_eps && !(opts.fixed_eps >= 0 && opts.fixed_eps <= 1))
        throw std::invalid_argument("simulate: fixed_eps must lie in [0, 1]");
    if (!(opts.initial_age >= 0)) throw std::invalid_argument("simulate: initial age must be >= 0");

    const auto [sr, rd] = build_link_budgets(cfg);
    SimResult res;
    res.horizon = opts.horizon_s;
    res.seed = opts.seed;
    res.replication = opts.replication;
    res.n_sr_used = std::max(1LL, std::llround(sr.n_hop));
    res.n_rd_used = std::max(1LL, std::llround(rd.n_hop));
    res.blocklength_rounded = static_cast<double>(res.n_sr_used) != sr.n_hop ||
                              static_cast<double>(res.n_rd_used) != rd.n_hop;

    RandomStream arrivals(opts.seed, opts.replication, Stream::arrivals);
    RandomStream fading_sr(opts.seed, opts.replication, Stream::fading_sr);
    RandomStream fading_rd(opts.seed, opts.replication, Stream::fading_rd);
    RandomStream decoding(opts.seed, opts.replication, Stream::decoding);

    const double n_sr = static_cast<double>(res.n_sr_used);
    const double n_rd = static_cast<double>(res.n_rd_used);
    // Returns 0 on success, 1 when the relay fails, 2 when the destination fails.
    auto run_round = [&]() -> int {
        if (opts.mode == SimMode::fixed_eps) return decoding.uniform() < opts.fixed_eps ? 2 : 0;
        const double snr_sr = sr.avg_snr * fading_sr.exponential(1.0);
        if (decoding.uniform() < conditional_error(snr_sr, n_sr, cfg.k_bits)) return 1;
        const double snr_rd = rd.avg_snr * fading_rd.exponential(1.0);
        if (decoding.uniform() < conditional_error(snr_rd, n_rd, cfg.k_bits)) return 2;
        return 0;
    };

    const double horizon = opts.horizon_s;
    const double d = cfg.attempt_duration();
    std::vector<UpdateRecord> records;
    // Departure times inside a busy period are origin + rounds * d, so they
    // never accumulate rounding from repeated additions.
    double busy_origin = 0.0;
    long long busy_rounds = 0;
    double free_at = 0.0;
    double t = 0.0;
    double last_arrival = 0.0;
    for (;;) {
        t += arrivals.exponential(cfg.lambda_rate);
        if (t >= horizon) break;
        ++res.arrival_count;
        last_arrival = t;

        if (t > free_at) {
            busy_origin = t;
            busy_rounds = 0;
        }
        const double start = busy_origin + static_cast<double>(busy_rounds) * d;
        long long attempts = 0;
        bool delivered = false;
        while (busy_origin + static_cast<double>(busy_rounds + 1) * d <= horizon) {
            ++busy_rounds;
            ++attempts;
            ++res.rounds;
            const int outcome = run_round();
            if (outcome == 0) {
                delivered = true;
                break;
            }
            ++res.failed_rounds;
            if (outcome == 1) ++res.relay_failures;
        }
        // FCFS: once an update cannot finish, nothing behind it can either.
        if (!delivered) break;
        free_at = busy_origin + static_cast<double>(busy_rounds) * d;
        records.push_back({t, free_at, attempts, start});
    }
    res.delivered_count = records.size();
    res.mean_interarrival =
        res.arrival_count ? last_arrival / static_cast<double>(res.arrival_count) : kInf;

    if (records.empty()) {
        res.status = SimStatus::no_delivery;
        res.time_avg_aoi = res.time_avg_aoi_raw = res.ci_halfwidth = kInf;
        return res;
    }

    res.time_avg_aoi_raw = integrate_sawtooth(records, opts.initial_age, horizon);
    const double warm = opts.warmup_fraction * horizon;
    res.time_avg_aoi = window_average(records, opts.initial_age, warm, horizon);
    if (opts.batches >= 2) {
        const double width = (horizon - warm) / opts.batches;
        double mean = 0.0;
        std::vector<double> avgs;
        for (int b = 0; b < opts.batches; ++b) {
            const double a = warm + b * width;
            const double e = b + 1 == opts.batches ? horizon : a + width;
            avgs.push_back(window_average(records, opts.initial_age, a, e));
            mean += avgs.back();
        }
        mean /= opts.batches;
        double ss = 0.0;
        for (double v : avgs) ss += (v - mean) * (v - mean);
        res.ci_halfwidth =
            t_quantile_975(opts.batches - 1) * std::sqrt(ss / (opts.batches - 1) / opts.batches);
    }

    std::vector<double> delays, waits, services, services_sq, attempts;
    for (const UpdateRecord& r : records) {
        if (r.gen_time < warm) continue;
        delays.push_back(r.system_delay());
        waits.push_back(r.wait());
        // Service is an integer number of rounds; rebuild it from the count.
        const double s = static_cast<double>(r.attempts) * d;
        services.push_back(s);
        services_sq.push_back(s * s);
        attempts.push_back(static_cast<double>(r.attempts));
    }
    res.stationary_count = delays.size();
    res.mean_delay = batch_mean_se(delays, opts.batches).mean;
    const MeanSe w = batch_mean_se(waits, opts.batches);
    const MeanSe s = batch_mean_se(services, opts.batches);
    const MeanSe s2 = batch_mean_se(services_sq, opts.batches);
    res.mean_wait = w.mean;
    res.se_wait = w.se;
    res.mean_service = s.mean;
    res.se_service = s.se;
    res.mean_service_sq = s2.mean;
    res.se_service_sq = s2.se;
    res.mean_attempts = batch_mean_se(attempts, opts.batches).mean;

    if (opts.keep_records) res.records = std::move(records);
    return res;
}

ReplicationSummary replicate(const SystemConfig& cfg, const SimOptions& opts, int count) {
    if (count < 1) throw std::invalid_argument("replicate: need at least one replication");
    ReplicationSummary out;
    out.runs = parallel_map(static_cast<std::size_t>(count), [&](std::size_t r) {
        SimOptions o = opts;
        o.replication = opts.replication + r;
        return simulate(cfg, o);
    });
    double sum = 0.0;
    for (const SimResult& r : out.runs) {
        if (r.status == SimStatus::no_delivery) ++out.no_delivery_runs;
        sum += r.time_avg_aoi;
    }
    if (out.no_delivery_runs) {
        out.mean_aoi = out.ci_halfwidth = kInf;
        return out;
    }
    out.mean_aoi = sum / count;
    if (count >= 2) {
        double ss = 0.0;
        for (const SimResult& r : out.runs) ss += (r.time_avg_aoi - out.mean_aoi) * (r.time_avg_aoi - out.mean_aoi);
        out.ci_halfwidth = t_quantile_975(count - 1) * std::sqrt(ss / (count - 1) / count);
    } else {
        out.ci_halfwidth = out.runs.front().ci_halfwidth;
    }
    return out;
}

void write_trace(std::ostream& os, std::span<const UpdateRecord> records) {
    os << "gen_time,depart_time,attempts,age_after\n";
    char buf[128];
    for (const UpdateRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld,%.17g\n", r.gen_time, r.depart_time,
                      r.attempts, r.system_delay());
        os << buf;
    }
}

QueueComparison validate_queue(const SystemConfig& cfg, const SimOptions& opts) {
    cfg.validate();
    QueueComparison cmp;
    cmp.eps = opts.mode == SimMode::fixed_eps
                  ? opts.fixed_eps
                  : system_error(cfg, ErrorMethod::quadrature_exact).eps_overall;
    if (!(cmp.eps < 1.0)) return cmp;
    cmp.analytic = service_moments(cmp.eps, cfg.n_total, cfg.symbol_duration_s,
                                   cfg.channel_delay_s, cfg.lambda_rate);
    cmp.stable = is_stable(cmp.analytic, cfg.lambda_rate);
    if (!cmp.stable) return cmp;
    cmp.analytic_wait = pk_mean_wait(cmp.analytic, cfg.lambda_rate);
    cmp.analytic_aaoi = aaoi_for_error(cmp.eps, cfg.attempt_duration(), cfg.lambda_rate).aaoi;
    cmp.sim = simulate(cfg, opts);
    return cmp;
}

}  // namespace aoi_relay
