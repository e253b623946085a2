#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cdolab/rng.hpp"
#include "cdolab/statespace.hpp"

namespace cdolab {

/// Nondecreasing pure-jump loss path on the rating lattice, L_0 = 0.
struct LossPath {
    std::vector<double> jump_times;
    std::vector<double> levels;  // level right after each jump

    /// Right-continuous evaluation: jumps at times <= t are included.
    double level_at(double t) const;
    void add(double t, double level);
};

struct Intensity {
    std::vector<double> lambda;  // lambda_i = r(t,0,x_i) - r(t,0,x_n)
    bool consistent = true;      // false when some lambda_i < 0 or lambda increases in i
    std::size_t first_bad = 0;
};

Intensity intensity(const double* short_end, std::size_t n);
inline Intensity intensity(const std::vector<double>& short_end) {
    return intensity(short_end.data(), short_end.size());
}

/// One thinning step of the loss process. Ratings with x_i >= L are alive; the
/// smallest alive one carries the total hazard. A jump moves L to x_{k+1} with
/// probability proportional to lambda_k - lambda_{k+1}.
class LossSampler {
public:
    explicit LossSampler(RatingLadder ladder) : ladder_(std::move(ladder)) {}

    /// Index of the smallest rating with x_i >= level (n when none).
    std::size_t first_alive(double level) const;
    /// Level at the end of [t, t + dt]; equals `level` when nothing happens.
    /// Throws SimulationError on a negative decrement.
    double step(double t, double level, const std::vector<double>& lambda, double dt, Engine& rng) const;

private:
    RatingLadder ladder_;
};

struct PriceGrid {
    double t = 0.0;
    double level = 0.0;
    double discount = 1.0;  // exp(-int_0^t r(s,0,1) ds)
    std::size_t n = 0;
    std::vector<double> maturities;
    std::vector<double> prices;      // [m * n + i]
    std::vector<double> discounted;  // same layout

    double price(std::size_t m, std::size_t i) const { return prices[m * n + i]; }
    double discounted_price(std::size_t m, std::size_t i) const { return discounted[m * n + i]; }
};

/// P(t,T,x_i) = 1{L <= x_i} exp(-int_0^{T-t} r(t,u,x_i) du), trapezoid in u.
/// Throws SimulationError when T - t leaves [0, z_max].
PriceGrid bond_prices(const ForwardSurface& s, double t, double level, const std::vector<double>& maturities,
                      double discount = 1.0);

/// Price column of the digital tranche paying 1{L_T <= x}; x must be on the ladder.
std::vector<double> digital_cdo_price(const PriceGrid& grid, const RatingLadder& ladder, double x);

}  // namespace cdolab
