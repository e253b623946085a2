#include "cdolab/hjmm.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cdolab/errors.hpp"

namespace cdolab {

std::size_t grid_index(double t, double dt) {
    const double pos = t / dt;
    const double k = std::round(pos);
    if (!(k >= 0.0) || std::abs(pos - k) > 1e-6) {
        throw ConfigError("time " + std::to_string(t) + " is not a multiple of the step " + std::to_string(dt));
    }
    return static_cast<std::size_t>(k);
}

HjmmModel::HjmmModel(LevyTriplet triplet, VolatilitySpec spec, Geometry geom, double eps, DriftConvention convention,
                     bool no_drift)
    : triplet_(std::move(triplet)),
      spec_(std::move(spec)),
      geom_(std::move(geom)),
      eps_(eps),
      convention_(convention),
      no_drift_(no_drift),
      sampler_(triplet_, geom_.dz, eps),
      laplace_(triplet_) {
    if (spec_.n() != geom_.ladder.size()) {
        throw ConfigError("volatility has " + std::to_string(spec_.n()) + " components but the ladder has " +
                          std::to_string(geom_.ladder.size()) + " ratings");
    }
    if (geom_.n_z < 3) throw ConfigError("grid needs at least three points");
    if (convention_ == DriftConvention::Shifted) shift_ = triplet_.a() - sampler_.compensation();
    if (triplet_.nu().density() && !no_drift_) {
        if (auto sup = spec_.declared_sup()) {
            const double reach = *sup * geom_.dz * static_cast<double>(geom_.n_z - 1);
            laplace_.tabulate(shift_ - reach, shift_ + reach);
        }
    }
}

ForwardSurface HjmmModel::blank_surface(double fill) const {
    return ForwardSurface(geom_.dz, geom_.n_z, geom_.gamma, geom_.ladder, fill);
}

void HjmmModel::volatility_field(double t, double l, const ForwardSurface& s, std::vector<double>& G) const {
    const std::size_t n = s.n_ratings();
    G.resize(s.n_z() * n);
    for (std::size_t k = 0; k < s.n_z(); ++k) spec_.eval_all(t, s.z(k), l, s.row(k), G.data() + k * n);
}

void HjmmModel::drift_field(double t, const ForwardSurface& s, const std::vector<double>& G,
                            std::vector<double>& F) const {
    const std::size_t n = s.n_ratings();
    const std::size_t nz = s.n_z();
    const double dz = s.dz();
    F.assign(nz * n, 0.0);
    if (no_drift_) return;
    for (std::size_t i = 0; i < n; ++i) {
        double I = 0.0;
        for (std::size_t k = 0; k < nz; ++k) {
            const double g = G[k * n + i];
            if (k > 0) I += 0.5 * dz * (G[(k - 1) * n + i] + g);
            if (g == 0.0) continue;
            try {
                F[k * n + i] = laplace_.first_derivative(I + shift_) * g;
            } catch (const DomainError& e) {
                throw SimulationError(std::string("drift outside the domain of J': ") + e.what(), t, s.z(k), i);
            } catch (const IndeterminateError& e) {
                throw SimulationError(std::string("drift quadrature failed: ") + e.what(), t, s.z(k), i);
            }
        }
    }
}

ForwardSurface HjmmModel::drift(double t, double l, const ForwardSurface& s) const {
    std::vector<double> G, F;
    volatility_field(t, l, s, G);
    drift_field(t, s, G, F);
    ForwardSurface out = s;
    out.values() = std::move(F);
    return out;
}

void HjmmModel::step(double t, double l, ForwardSurface& s, const LevyIncrement& inc, Workspace& ws) const {
    const std::size_t n = s.n_ratings();
    const std::size_t nz = s.n_z();
    const double dt = geom_.dz;
    volatility_field(t, l, s, ws.G);
    drift_field(t, s, ws.G, ws.F);
    ws.next.resize(nz * n);
    const double dZ = inc.continuous;
    const auto& v = s.values();
    for (std::size_t k = 0; k < nz; ++k) {
        const std::size_t src = std::min(k + 1, nz - 1) * n;
        for (std::size_t i = 0; i < n; ++i) {
            ws.next[k * n + i] = v[src + i] + ws.F[src + i] * dt + ws.G[src + i] * dZ;
        }
    }
    std::swap(s.values(), ws.next);
    for (double y : inc.jumps) {
        volatility_field(t, l, s, ws.G);
        auto& w = s.values();
        for (std::size_t idx = 0; idx < w.size(); ++idx) w[idx] += ws.G[idx] * y;
    }
    for (std::size_t idx = 0; idx < s.values().size(); ++idx) {
        if (!std::isfinite(s.values()[idx])) {
            throw SimulationError("surface became non-finite", t + dt, s.z(idx / n), idx % n);
        }
    }
}

void PathAudit::observe(double t, const ForwardSurface& s) {
    const std::size_t n = s.n_ratings();
    for (std::size_t k = 0; k < s.n_z(); ++k) {
        const double* row = s.row(k);
        for (std::size_t i = 0; i < n; ++i) {
            min_r.offer(row[i], t, s.z(k), i);
            max_abs_r = std::max(max_abs_r, std::abs(row[i]));
            if (i + 1 < n) {
                const double d = row[i] - row[i + 1];
                min_diff.offer(d, t, s.z(k), i);
                if (k == 0) min_short_diff.offer(d, t, 0.0, i);
            }
        }
    }
}

namespace {

ScenarioResult run(const HjmmModel& model, const ForwardSurface& r0, const PathOptions& opts, std::uint64_t seed,
                   const LossPath* fixed_loss) {
    const double dt = model.dt();
    const std::size_t n_steps = grid_index(opts.horizon, dt);
    const std::size_t n = r0.n_ratings();
    if (r0.n_z() != model.geometry().n_z || std::abs(r0.dz() - dt) > 1e-15 * dt || n != model.spec().n()) {
        throw ConfigError("initial surface does not match the model grid");
    }
    std::vector<std::size_t> snap_idx, price_idx;
    for (double t : opts.snapshot_times) snap_idx.push_back(grid_index(t, dt));
    for (double t : opts.price_times) price_idx.push_back(grid_index(t, dt));

    Engine rng_inc(stream_seed(seed, 0));
    Engine rng_loss(stream_seed(seed, 1));
    const LossSampler loss_sampler(model.geometry().ladder);

    ScenarioResult res;
    ForwardSurface s = r0;
    HjmmModel::Workspace ws;
    LevyIncrement inc;
    double level = 0.0;
    double log_discount = 0.0;
    for (std::size_t step = 0;; ++step) {
        const double t = dt * static_cast<double>(step);
        if (fixed_loss) level = fixed_loss->level_at(t);
        res.times.push_back(t);
        res.short_end.emplace_back(s.row(0), s.row(0) + n);
        res.audit.observe(t, s);
        for (std::size_t k : snap_idx) {
            if (k == step) res.snapshots.push_back({t, s});
        }
        for (std::size_t k : price_idx) {
            if (k == step) res.prices.push_back(bond_prices(s, t, level, opts.maturities, std::exp(-log_discount)));
        }
        if (step == n_steps) break;

        double next_level = level;
        if (!fixed_loss) {
            const Intensity lam = intensity(s.row(0), n);
            res.intensity_consistent = res.intensity_consistent && lam.consistent;
            next_level = loss_sampler.step(t, level, lam.lambda, dt, rng_loss);
        }
        model.increments().draw(rng_inc, inc);
        res.jumps += inc.jumps.size();
        log_discount += s.at(0, n - 1) * dt;
        model.step(t, level, s, inc, ws);
        if (!fixed_loss && next_level != level) {
            res.loss.add(t + dt, next_level);
            level = next_level;
        }
    }
    if (fixed_loss) res.loss = *fixed_loss;
    return res;
}

}  // namespace

ScenarioResult solve_path(const HjmmModel& model, const ForwardSurface& r0, const LossPath& loss,
                          const PathOptions& opts, std::uint64_t seed) {
    return run(model, r0, opts, seed, &loss);
}

ScenarioResult simulate_path(const HjmmModel& model, const ForwardSurface& r0, const PathOptions& opts,
                             std::uint64_t seed) {
    return run(model, r0, opts, seed, nullptr);
}

}  // namespace cdolab
