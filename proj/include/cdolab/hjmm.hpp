#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "cdolab/levy.hpp"
#include "cdolab/market.hpp"
#include "cdolab/statespace.hpp"
#include "cdolab/volatility.hpp"

namespace cdolab {

/// Where J' is evaluated in the drift: at the bare cumulative volatility
/// integral, or shifted by a - m_eps as in the cutoff scheme.
enum class DriftConvention { Bare, Shifted };

struct Geometry {
    double dz = 0.01;
    std::size_t n_z = 1001;
    double gamma = 1.0;
    RatingLadder ladder;
};

/// dr = (A r + F) dt + G dZ on the grid, with dt = dz so the transport is an
/// exact one-cell shift.
class HjmmModel {
public:
    HjmmModel(LevyTriplet triplet, VolatilitySpec spec, Geometry geom, double eps = 1e-3,
              DriftConvention convention = DriftConvention::Bare, bool no_drift = false);

    const LevyTriplet& triplet() const { return triplet_; }
    const VolatilitySpec& spec() const { return spec_; }
    const Geometry& geometry() const { return geom_; }
    double dt() const { return geom_.dz; }
    double eps() const { return eps_; }
    DriftConvention convention() const { return convention_; }
    bool no_drift() const { return no_drift_; }
    const IncrementSampler& increments() const { return sampler_; }
    const LaplaceEvaluator& laplace() const { return laplace_; }
    /// Offset added to the cumulative integral inside J'.
    double jprime_shift() const { return shift_; }

    ForwardSurface blank_surface(double fill = 0.0) const;

    /// G[k * n + i] = g_i(t, z_k, l, r(z_k, .)).
    void volatility_field(double t, double l, const ForwardSurface& s, std::vector<double>& G) const;
    /// F from G; throws SimulationError naming (z, i) outside the domain of J'.
    void drift_field(double t, const ForwardSurface& s, const std::vector<double>& G, std::vector<double>& F) const;
    ForwardSurface drift(double t, double l, const ForwardSurface& s) const;

    struct Workspace {
        std::vector<double> G, F, next;
    };
    /// One explicit step of the mild form: shift by one cell, add F dt and
    /// G dZ at the shifted node, then apply each jump with G re-evaluated.
    void step(double t, double l, ForwardSurface& s, const LevyIncrement& inc, Workspace& ws) const;

private:
    LevyTriplet triplet_;
    VolatilitySpec spec_;
    Geometry geom_;
    double eps_;
    DriftConvention convention_;
    bool no_drift_;
    IncrementSampler sampler_;
    LaplaceEvaluator laplace_;
    double shift_ = 0.0;
};

struct AuditPoint {
    double value = std::numeric_limits<double>::infinity();
    double t = 0.0;
    double z = 0.0;
    std::size_t i = 0;
    std::size_t path = 0;

    void offer(double v, double t_, double z_, std::size_t i_) {
        if (v < value) {
            value = v;
            t = t_;
            z = z_;
            i = i_;
        }
    }
};

/// Running minima over everything a path visits.
struct PathAudit {
    AuditPoint min_r;           // r(t, z, x_i)
    AuditPoint min_diff;        // r(t, z, x_i) - r(t, z, x_{i+1})
    AuditPoint min_short_diff;  // same at z = 0
    double max_abs_r = 0.0;

    void observe(double t, const ForwardSurface& s);
};

struct Snapshot {
    double t = 0.0;
    ForwardSurface surface;
};

struct PathOptions {
    double horizon = 1.0;
    std::vector<double> snapshot_times;
    std::vector<double> maturities;
    std::vector<double> price_times;  // valuation times for price grids
};

struct ScenarioResult {
    std::vector<Snapshot> snapshots;
    std::vector<double> times;                 // t_0 .. t_N
    std::vector<std::vector<double>> short_end;  // r(t_k, 0, .)
    LossPath loss;
    std::vector<PriceGrid> prices;  // one per price time, in order
    PathAudit audit;
    std::size_t jumps = 0;
    bool intensity_consistent = true;
};

/// Path on a frozen loss path: l = L at the start of each step.
ScenarioResult solve_path(const HjmmModel& model, const ForwardSurface& r0, const LossPath& loss,
                          const PathOptions& opts, std::uint64_t seed);

/// Coupled loss and surface path: each step freezes L, advances r, then draws
/// the loss jump from the hazard read off the short end at the step start.
ScenarioResult simulate_path(const HjmmModel& model, const ForwardSurface& r0, const PathOptions& opts,
                             std::uint64_t seed);

/// Step index of time t on the model grid; throws ConfigError when off-grid.
std::size_t grid_index(double t, double dt);

}  // namespace cdolab
