#include "cdolab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdolab/errors.hpp"

namespace cdolab {

std::vector<double> checkpoint_times(double horizon, std::size_t checkpoints) {
    std::vector<double> t(checkpoints + 1);
    for (std::size_t c = 0; c <= checkpoints; ++c) {
        t[c] = horizon * static_cast<double>(c) / static_cast<double>(checkpoints);
    }
    return t;
}

namespace {

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
    Moments m;
    if (x.empty()) return m;
    double s = 0.0;
    for (double v : x) s += v;
    m.mean = s / static_cast<double>(x.size());
    if (x.size() < 2) return m;
    double ss = 0.0;
    for (double v : x) ss += (v - m.mean) * (v - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    return m;
}

double normalized_drift(double mean, double initial, double se) {
    // Differences at rounding level count as zero, whatever the standard error.
    const double d = std::abs(mean - initial);
    if (d <= 1e-12 * (1.0 + std::abs(initial))) return 0.0;
    return se > 0.0 ? d / se : std::numeric_limits<double>::infinity();
}

}  // namespace

MartingaleReport martingale_from_batch(const std::vector<ScenarioResult>& batch, double threshold) {
    MartingaleReport rep;
    rep.threshold = threshold;
    rep.n_paths = batch.size();
    if (batch.empty() || batch.front().prices.empty()) return rep;
    const PriceGrid& first = batch.front().prices.front();
    rep.maturities = first.maturities;
    const std::size_t n = first.n;
    const std::size_t n_times = batch.front().prices.size();
    std::vector<double> buf(batch.size());

    for (std::size_t m = 0; m < rep.maturities.size(); ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            MeanSeries s;
            s.maturity = m;
            s.rating = i;
            s.initial = first.discounted_price(m, i);
            for (std::size_t c = 1; c < n_times; ++c) {
                for (std::size_t p = 0; p < batch.size(); ++p) buf[p] = batch[p].prices[c].discounted_price(m, i);
                const Moments mo = moments(buf);
                const double z = normalized_drift(mo.mean, s.initial, mo.se);
                s.times.push_back(batch.front().prices[c].t);
                s.means.push_back(mo.mean);
                s.std_errors.push_back(mo.se);
                s.normalized.push_back(z);
                s.max_normalized = std::max(s.max_normalized, z);
                if (mo.se > 0.1 * s.initial) rep.insufficient_paths = true;
            }
            rep.max_normalized = std::max(rep.max_normalized, s.max_normalized);
            rep.series.push_back(std::move(s));
        }
    }
    rep.verdict = rep.max_normalized <= threshold ? Verdict::Pass : Verdict::Fail;
    return rep;
}

MartingaleReport martingale_test(const HjmmModel& model, const ForwardSurface& r0, const MartingaleOptions& opts) {
    if (opts.maturities.empty()) throw ConfigError("martingale test needs at least one maturity");
    if (opts.checkpoints == 0) throw ConfigError("martingale test needs at least one checkpoint");
    for (double T : opts.maturities) {
        if (T < opts.horizon) throw ConfigError("maturities must not precede the horizon");
    }
    BatchOptions b;
    b.n_paths = opts.n_paths;
    b.seed = opts.seed;
    b.path.horizon = opts.horizon;
    b.path.maturities = opts.maturities;
    b.path.price_times = checkpoint_times(opts.horizon, opts.checkpoints);
    const auto batch = opts.parallel ? run_batch(model, r0, b) : run_batch_serial(model, r0, b);
    return martingale_from_batch(batch, opts.threshold);
}

AuditReport audit_positivity_monotonicity(const std::vector<ScenarioResult>& batch, double rel_tol) {
    AuditReport rep;
    for (std::size_t p = 0; p < batch.size(); ++p) {
        const PathAudit& a = batch[p].audit;
        auto take = [p](AuditPoint& dst, const AuditPoint& src) {
            if (src.value < dst.value) {
                dst = src;
                dst.path = p;
            }
        };
        take(rep.min_r, a.min_r);
        take(rep.min_diff, a.min_diff);
        take(rep.min_short_diff, a.min_short_diff);
        rep.max_abs_r = std::max(rep.max_abs_r, a.max_abs_r);
    }
    rep.tolerance = rel_tol * rep.max_abs_r;
    rep.positivity = rep.min_r.value >= -rep.tolerance ? Verdict::Pass : Verdict::Fail;
    rep.ordering = rep.min_diff.value >= -rep.tolerance ? Verdict::Pass : Verdict::Fail;
    rep.short_end = rep.min_short_diff.value >= -rep.tolerance ? Verdict::Pass : Verdict::Fail;
    return rep;
}

PriceAuditReport price_monotonicity_audit(const std::vector<ScenarioResult>& batch, double tolerance) {
    PriceAuditReport rep;
    rep.tolerance = tolerance;
    for (std::size_t p = 0; p < batch.size(); ++p) {
        for (const PriceGrid& g : batch[p].prices) {
            // Maturities in increasing order.
            std::vector<std::size_t> order(g.maturities.size());
            for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return g.maturities[a] < g.maturities[b]; });
            for (std::size_t i = 0; i < g.n; ++i) {
                for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                    const double v = g.price(order[k + 1], i) - g.price(order[k], i);
                    if (v > rep.maturity.amount) rep.maturity = {v, p, g.t, order[k + 1], i};
                }
            }
            for (std::size_t m = 0; m < g.maturities.size(); ++m) {
                for (std::size_t i = 0; i + 1 < g.n; ++i) {
                    const double v = g.price(m, i) - g.price(m, i + 1);
                    if (v > rep.rating.amount) rep.rating = {v, p, g.t, m, i};
                }
            }
        }
    }
    const bool ok = rep.maturity.amount <= tolerance && rep.rating.amount <= tolerance;
    rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
    return rep;
}

CompensatorReport compensator_test(const std::vector<ScenarioResult>& batch, const RatingLadder& ladder,
                                   std::size_t checkpoints, double threshold) {
    CompensatorReport rep;
    rep.threshold = threshold;
    if (batch.empty() || batch.front().times.size() < 2) return rep;
    const auto& times = batch.front().times;
    const double dt = times[1] - times[0];
    const double horizon = times.back();
    const std::size_t n = ladder.size();
    const auto cps = checkpoint_times(horizon, checkpoints);

    // increments[c][p][i]
    std::vector<std::vector<std::vector<double>>> inc(cps.size(),
                                                      std::vector<std::vector<double>>(batch.size(), std::vector<double>(n)));
    for (std::size_t p = 0; p < batch.size(); ++p) {
        const ScenarioResult& r = batch[p];
        std::vector<double> integral(n, 0.0);
        std::size_t next_cp = 1;
        for (std::size_t k = 0; k < r.times.size(); ++k) {
            const double L = r.loss.level_at(r.times[k]);
            if (next_cp < cps.size() && k == grid_index(cps[next_cp], dt)) {
                for (std::size_t i = 0; i < n; ++i) {
                    inc[next_cp][p][i] = (L <= ladder[i] ? 1.0 : 0.0) + integral[i] - 1.0;
                }
                ++next_cp;
            }
            const auto& se = r.short_end[k];
            for (std::size_t i = 0; i < n; ++i) {
                if (L <= ladder[i]) integral[i] += (se[i] - se[n - 1]) * dt;
            }
        }
    }
    std::vector<double> buf(batch.size());
    for (std::size_t i = 0; i < n; ++i) {
        MeanSeries s;
        s.rating = i;
        for (std::size_t c = 1; c < cps.size(); ++c) {
            for (std::size_t p = 0; p < batch.size(); ++p) buf[p] = inc[c][p][i];
            const Moments mo = moments(buf);
            const double z = normalized_drift(mo.mean, 0.0, mo.se);
            s.times.push_back(cps[c]);
            s.means.push_back(mo.mean);
            s.std_errors.push_back(mo.se);
            s.normalized.push_back(z);
            s.max_normalized = std::max(s.max_normalized, z);
        }
        rep.max_normalized = std::max(rep.max_normalized, s.max_normalized);
        rep.series.push_back(std::move(s));
    }
    rep.verdict = rep.max_normalized <= threshold ? Verdict::Pass : Verdict::Fail;
    return rep;
}

}  // namespace cdolab
