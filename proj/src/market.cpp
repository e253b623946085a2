#include "cdolab/market.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cdolab/errors.hpp"

namespace cdolab {

double LossPath::level_at(double t) const {
    double level = 0.0;
    for (std::size_t k = 0; k < jump_times.size() && jump_times[k] <= t; ++k) level = levels[k];
    return level;
}

void LossPath::add(double t, double level) {
    const double prev = levels.empty() ? 0.0 : levels.back();
    if (!jump_times.empty() && t < jump_times.back()) throw SimulationError("loss jump times must increase");
    if (level < prev) throw SimulationError("loss level decreased", t, 0.0, 0);
    if (level < 0.0 || level > 1.0) throw SimulationError("loss level outside [0, 1]", t, 0.0, 0);
    jump_times.push_back(t);
    levels.push_back(level);
}

Intensity intensity(const double* short_end, std::size_t n) {
    Intensity out;
    out.lambda.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.lambda[i] = short_end[i] - short_end[n - 1];
    for (std::size_t i = 0; i < n; ++i) {
        const bool negative = out.lambda[i] < 0.0;
        const bool increasing = i + 1 < n && out.lambda[i + 1] > out.lambda[i];
        if ((negative || increasing) && out.consistent) {
            out.consistent = false;
            out.first_bad = i;
        }
    }
    return out;
}

std::size_t LossSampler::first_alive(double level) const {
    for (std::size_t i = 0; i < ladder_.size(); ++i) {
        if (ladder_[i] >= level) return i;
    }
    return ladder_.size();
}

double LossSampler::step(double t, double level, const std::vector<double>& lambda, double dt, Engine& rng) const {
    const std::size_t n = ladder_.size();
    const std::size_t j = first_alive(level);
    if (j + 1 >= n) return level;  // only the senior rating is left; it carries no hazard

    double scale = 0.0;
    for (std::size_t k = j; k < n; ++k) scale = std::max(scale, std::abs(lambda[k]));
    const double tol = 1e-12 * (1.0 + scale);
    std::vector<double> dec(n - 1 - j);
    double total = 0.0;
    for (std::size_t k = j; k + 1 < n; ++k) {
        double d = lambda[k] - lambda[k + 1];
        if (d < -tol) {
            throw SimulationError("negative loss-intensity decrement between ratings " + std::to_string(k + 1) +
                                      " and " + std::to_string(k + 2),
                                  t, 0.0, k);
        }
        d = std::max(d, 0.0);
        dec[k - j] = d;
        total += d;
    }
    if (total <= 0.0) return level;

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double p_jump = -std::expm1(-total * dt);
    if (uni(rng) >= p_jump) return level;
    double v = uni(rng) * total;
    for (std::size_t k = 0; k < dec.size(); ++k) {
        if (v < dec[k] || k + 1 == dec.size()) return ladder_[j + k + 1];
        v -= dec[k];
    }
    return level;
}

PriceGrid bond_prices(const ForwardSurface& s, double t, double level, const std::vector<double>& maturities,
                      double discount) {
    const std::size_t n = s.n_ratings();
    PriceGrid g;
    g.t = t;
    g.level = level;
    g.discount = discount;
    g.n = n;
    g.maturities = maturities;
    g.prices.assign(maturities.size() * n, 0.0);
    g.discounted.assign(maturities.size() * n, 0.0);
    const double dz = s.dz();
    for (std::size_t m = 0; m < maturities.size(); ++m) {
        const double tau = maturities[m] - t;
        if (tau < -1e-12) throw SimulationError("maturity " + std::to_string(maturities[m]) + " precedes t", t, tau, 0);
        if (tau > s.z_max() * (1.0 + 1e-12)) {
            throw SimulationError("maturity " + std::to_string(maturities[m]) + " lies beyond the grid", t, tau, 0);
        }
        const double pos = std::max(tau, 0.0) / dz;
        auto cells = static_cast<std::size_t>(std::floor(pos));
        cells = std::min(cells, s.n_z() - 1);
        const double frac = std::clamp(pos - static_cast<double>(cells), 0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (level > s.ladder()[i]) continue;
            double integral = 0.0;
            for (std::size_t k = 0; k < cells; ++k) integral += 0.5 * dz * (s.at(k, i) + s.at(k + 1, i));
            if (frac > 0.0 && cells + 1 < s.n_z()) {
                const double a = s.at(cells, i);
                const double b = s.at(cells + 1, i);
                integral += dz * frac * (a + 0.5 * frac * (b - a));
            }
            g.prices[m * n + i] = std::exp(-integral);
            g.discounted[m * n + i] = discount * g.prices[m * n + i];
        }
    }
    return g;
}

std::vector<double> digital_cdo_price(const PriceGrid& grid, const RatingLadder& ladder, double x) {
    const std::size_t i = ladder.index_of(x);
    if (i == ladder.size()) throw ConfigError("attachment " + std::to_string(x) + " is not on the rating ladder");
    std::vector<double> out(grid.maturities.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = grid.price(m, i);
    return out;
}

}  // namespace cdolab
