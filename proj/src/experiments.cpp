#include "aoi_relay/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aoi_relay/parallel.hpp"

namespace aoi_relay {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SweepRow evaluate_point(const SweepSpec& spec, std::size_t index) {
    SweepRow row;
    row.value = spec.grid[index];
    const SystemConfig cfg = apply_param(spec.base, spec.parameter, row.value);
    const AoiEstimate est = aaoi_analytic(cfg, spec.error_method);
    row.aaoi_analytic = est.aaoi;
    row.stable = est.stable;
    row.eps_overall = est.errors.eps_overall;

    if (spec.evaluator == Evaluator::analytic) return row;
    if (!row.stable) {
        row.aaoi_sim = kInf;
        row.ci_halfwidth = kInf;
        return row;
    }
    SimOptions opts;
    opts.horizon_s = spec.horizon_s;
    opts.seed = spec.seed;
    opts.mode = spec.sim_mode;
    opts.fixed_eps = row.eps_overall;
    // Grid points draw from disjoint replication ranges.
    opts.replication = static_cast<std::uint64_t>(index) * 1'000'000ULL;
    const ReplicationSummary sim = replicate(cfg, opts, spec.replications);
    row.aaoi_sim = sim.mean_aoi;
    row.ci_halfwidth = sim.ci_halfwidth;
    return row;
}

double objective(const SweepRow& row, Evaluator e) {
    if (!row.stable) return kInf;
    return e == Evaluator::simulated ? row.aaoi_sim : row.aaoi_analytic;
}

std::optional<std::size_t> stable_argmin(const std::vector<SweepRow>& rows, Evaluator e) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double v = objective(rows[i], e);
        if (!std::isfinite(v)) continue;
        // Strict comparison keeps the earliest (smallest) value on ties.
        if (!best || v < objective(rows[*best], e)) best = i;
    }
    return best;
}

}  // namespace

const char* to_string(SweepParam p) {
    switch (p) {
        case SweepParam::lambda_rate: return "lambda_rate";
        case SweepParam::n_total: return "n_total";
        case SweepParam::eta_sr: return "eta_sr";
        case SweepParam::phi_s: return "phi_s";
        case SweepParam::k_bits: return "k_bits";
    }
    return "?";
}

SweepParam sweep_param_from_string(const std::string& name) {
    if (name == "lambda_rate" || name == "lambda") return SweepParam::lambda_rate;
    if (name == "n_total" || name == "n") return SweepParam::n_total;
    if (name == "eta_sr" || name == "eta") return SweepParam::eta_sr;
    if (name == "phi_s" || name == "phi") return SweepParam::phi_s;
    if (name == "k_bits" || name == "k") return SweepParam::k_bits;
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

const char* to_string(Evaluator e) {
    switch (e) {
        case Evaluator::analytic: return "analytic";
        case Evaluator::simulated: return "simulated";
        case Evaluator::both: return "both";
    }
    return "?";
}

Evaluator evaluator_from_string(const std::string& name) {
    if (name == "analytic") return Evaluator::analytic;
    if (name == "simulated") return Evaluator::simulated;
    if (name == "both") return Evaluator::both;
    throw std::invalid_argument("unknown evaluator '" + name + "'");
}

const char* to_string(OptimumStatus s) {
    switch (s) {
        case OptimumStatus::refined: return "refined";
        case OptimumStatus::grid_fallback: return "grid_fallback";
        case OptimumStatus::no_stable_bracket: return "no_stable_bracket";
    }
    return "?";
}

SystemConfig apply_param(const SystemConfig& base, SweepParam p, double value) {
    SystemConfig cfg = base;
    switch (p) {
        case SweepParam::lambda_rate: cfg.lambda_rate = value; break;
        case SweepParam::n_total: cfg.n_total = value; break;
        case SweepParam::eta_sr:
            cfg.eta_sr = value;
            cfg.eta_rd = 1.0 - value;
            break;
        case SweepParam::phi_s:
            cfg.phi_s = value;
            cfg.phi_r = 1.0 - value;
            break;
        case SweepParam::k_bits: cfg.k_bits = value; break;
    }
    return cfg;
}

std::vector<double> default_grid(SweepParam p) {
    std::vector<double> g;
    switch (p) {
        case SweepParam::lambda_rate:
            for (int i = 1; i <= 33; ++i) g.push_back(i);
            break;
        case SweepParam::n_total:
            g = {10, 15, 20, 25};
            for (int n = 30; n <= 300; n += 10) g.push_back(n);
            break;
        case SweepParam::eta_sr:
        case SweepParam::phi_s:
            for (int i = 1; i <= 19; ++i) g.push_back(i / 20.0);
            break;
        case SweepParam::k_bits:
            for (int k = 10; k <= 400; k += 10) g.push_back(k);
            break;
    }
    return g;
}

void SweepSpec::validate() const {
    if (grid.empty()) throw std::invalid_argument("sweep: grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("sweep: grid must be strictly increasing");
    for (double v : grid) apply_param(base, parameter, v).validate();
    if (evaluator != Evaluator::analytic) {
        if (replications < 1) throw std::invalid_argument("sweep: replications must be >= 1");
        if (!(horizon_s > 0)) throw std::invalid_argument("sweep: horizon must be > 0");
    }
}

double SweepResult::argmin_value() const { return argmin ? rows[*argmin].value : kNaN; }

double SweepResult::argmin_aaoi() const {
    return argmin ? rows[*argmin].aaoi_analytic : kInf;
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult out;
    out.parameter = spec.parameter;
    out.rows = parallel_map(
        spec.grid.size(), [&](std::size_t i) { return evaluate_point(spec, i); }, spec.workers);
    out.argmin = stable_argmin(out.rows, spec.evaluator);
    return out;
}

Optimum find_optimum(const SweepSpec& spec, const RefineOptions& refine) {
    SweepSpec inside = spec;
    inside.evaluator = Evaluator::analytic;
    inside.grid.clear();
    for (double v : spec.grid)
        if (v >= refine.lo && v <= refine.hi) inside.grid.push_back(v);

    Optimum opt;
    if (inside.grid.empty()) {
        opt.note = "no grid points inside the refinement bounds";
        return opt;
    }
    const SweepResult grid = sweep(inside);
    if (!grid.argmin) {
        opt.note = "every grid point inside the bounds is unstable";
        return opt;
    }
    const std::size_t i = *grid.argmin;
    opt.value = grid.rows[i].value;
    opt.aaoi = grid.rows[i].aaoi_analytic;

    // Unimodal means non-increasing up to the argmin and non-decreasing after it.
    bool unimodal = true;
    for (std::size_t j = 1; j < grid.rows.size(); ++j) {
        const double prev = objective(grid.rows[j - 1], Evaluator::analytic);
        const double cur = objective(grid.rows[j], Evaluator::analytic);
        if (j <= i ? cur > prev : cur < prev) unimodal = false;
    }
    if (!unimodal) {
        opt.status = OptimumStatus::grid_fallback;
        opt.note = "stable grid values are not unimodal; reporting the grid argmin";
        return opt;
    }

    double a = i > 0 ? grid.rows[i - 1].value : grid.rows[i].value;
    double b = i + 1 < grid.rows.size() ? grid.rows[i + 1].value : grid.rows[i].value;
    auto f = [&](double x) {
        return aaoi_analytic(apply_param(spec.base, spec.parameter, x), spec.error_method).aaoi;
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > refine.tolerance) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    opt.status = OptimumStatus::refined;
    if (fx < opt.aaoi) {
        opt.value = x;
        opt.aaoi = fx;
    } else {
        opt.note = "refinement did not improve on the grid argmin";
    }
    return opt;
}

AllocationStudy allocation_study(const SystemConfig& base, const std::vector<double>& eta_grid,
                                 const std::vector<double>& phi_values, ErrorMethod method) {
    if (eta_grid.empty() || phi_values.empty())
        throw std::invalid_argument("allocation_study: empty grid");
    AllocationStudy study;
    const std::size_t cols = eta_grid.size();
    study.rows = parallel_map(phi_values.size() * cols, [&](std::size_t idx) {
        AllocationRow row;
        row.phi_s = phi_values[idx / cols];
        row.eta_sr = eta_grid[idx % cols];
        SystemConfig cfg = apply_param(base, SweepParam::phi_s, row.phi_s);
        cfg = apply_param(cfg, SweepParam::eta_sr, row.eta_sr);
        const AoiEstimate est = aaoi_analytic(cfg, method);
        row.aaoi = est.aaoi;
        row.stable = est.stable;
        row.eps_overall = est.errors.eps_overall;
        return row;
    });
    for (std::size_t p = 0; p < phi_values.size(); ++p) {
        AllocationCurveMin m;
        m.phi_s = phi_values[p];
        for (std::size_t j = 0; j < cols; ++j) {
            const AllocationRow& r = study.rows[p * cols + j];
            if (r.stable && r.aaoi < m.aaoi) {
                m.aaoi = r.aaoi;
                m.eta_sr = r.eta_sr;
            }
        }
        study.minima.push_back(m);
    }
    return study;
}

}  // namespace aoi_relay
