#include "cdolab/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cdolab/errors.hpp"

namespace cdolab {

RatingLadder::RatingLadder(std::vector<double> xs) : xs_(std::move(xs)) {
    if (xs_.empty()) throw ConfigError("rating ladder is empty");
    if (xs_.back() != 1.0) throw ConfigError("rating ladder must end at exactly 1");
    if (xs_.front() < 0.0) throw ConfigError("rating ladder must lie in [0, 1]");
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        if (!(xs_[i] > xs_[i - 1])) throw ConfigError("rating ladder must be strictly increasing");
    }
}

std::size_t RatingLadder::index_of(double x) const {
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (std::abs(xs_[i] - x) <= 1e-12) return i;
    }
    return xs_.size();
}

ForwardSurface::ForwardSurface(double dz, std::size_t n_z, double gamma, RatingLadder ladder, double fill)
    : dz_(dz), n_z_(n_z), gamma_(gamma), ladder_(std::move(ladder)), values_(n_z * ladder_.size(), fill) {
    if (!(dz > 0.0)) throw ConfigError("grid step dz must be positive");
    if (n_z < 2) throw ConfigError("grid needs at least two points");
    if (!(gamma > 0.0)) throw ConfigError("norm weight gamma must be positive");
}

ForwardSurface ForwardSurface::from_function(double dz, std::size_t n_z, double gamma, RatingLadder ladder,
                                             const std::function<double(double, std::size_t)>& fn) {
    ForwardSurface s(dz, n_z, gamma, std::move(ladder));
    for (std::size_t k = 0; k < n_z; ++k) {
        for (std::size_t i = 0; i < s.n_ratings(); ++i) s.at(k, i) = fn(s.z(k), i);
    }
    return s;
}

double ForwardSurface::tail_weight(std::size_t i) const {
    const double v = at(n_z_ - 1, i);
    return v * v * std::exp(gamma_ * z_max()) * dz_;
}

bool ForwardSurface::tail_ok(double bound) const {
    for (std::size_t i = 0; i < n_ratings(); ++i) {
        if (!(tail_weight(i) <= bound)) return false;
    }
    return true;
}

namespace {

double weighted_trapezoid(const ForwardSurface& s, const std::function<double(std::size_t)>& sq) {
    double sum = 0.0;
    for (std::size_t k = 0; k < s.n_z(); ++k) {
        const double w = (k == 0 || k + 1 == s.n_z()) ? 0.5 : 1.0;
        sum += w * sq(k) * std::exp(s.gamma() * s.z(k));
    }
    return sum * s.dz();
}

}  // namespace

double norm_L2gamma(const ForwardSurface& s, std::size_t i) {
    return std::sqrt(weighted_trapezoid(s, [&](std::size_t k) { return s.at(k, i) * s.at(k, i); }));
}

std::vector<double> z_derivative(const ForwardSurface& s, std::size_t i) {
    const std::size_t n = s.n_z();
    std::vector<double> d(n);
    const double h = s.dz();
    d[0] = (s.at(1, i) - s.at(0, i)) / h;
    d[n - 1] = (s.at(n - 1, i) - s.at(n - 2, i)) / h;
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (s.at(k + 1, i) - s.at(k - 1, i)) / (2.0 * h);
    return d;
}

double norm_H1gamma(const ForwardSurface& s, std::size_t i) {
    const std::vector<double> d = z_derivative(s, i);
    return std::sqrt(
        weighted_trapezoid(s, [&](std::size_t k) { return s.at(k, i) * s.at(k, i) + d[k] * d[k]; }));
}

ForwardSurface shift(const ForwardSurface& s, std::size_t steps) {
    if (steps > s.n_z()) throw ConfigError("shift beyond the grid");
    ForwardSurface out = s;
    const std::size_t n = s.n_ratings();
    const std::size_t last = s.n_z() - 1;
    for (std::size_t k = 0; k < s.n_z(); ++k) {
        const std::size_t src = std::min(k + steps, last);
        for (std::size_t i = 0; i < n; ++i) out.at(k, i) = s.at(src, i);
    }
    return out;
}

EmbeddingReport sup_embedding_check(const ForwardSurface& s) {
    EmbeddingReport rep;
    double h1_sq = 0.0;
    double max_deriv = 0.0;
    for (std::size_t i = 0; i < s.n_ratings(); ++i) {
        const double h1 = norm_H1gamma(s, i);
        h1_sq += h1 * h1;
        for (double d : z_derivative(s, i)) max_deriv = std::max(max_deriv, std::abs(d));
    }
    for (std::size_t k = 0; k < s.n_z(); ++k) {
        double sq = 0.0;
        for (std::size_t i = 0; i < s.n_ratings(); ++i) sq += s.at(k, i) * s.at(k, i);
        rep.sup_norm = std::max(rep.sup_norm, std::sqrt(sq));
    }
    rep.bound = 2.0 / std::sqrt(s.gamma()) * std::sqrt(h1_sq);
    rep.allowance = 2.0 * s.dz() * max_deriv;
    rep.margin = rep.bound + rep.allowance - rep.sup_norm;
    rep.pass = rep.margin >= 0.0;
    return rep;
}

}  // namespace cdolab
