#include "cdolab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace cdolab::quad {
namespace {

constexpr int kOrder = 10;

struct GaussLegendre {
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};

    GaussLegendre() {
        for (int k = 0; k < kOrder; ++k) {
            double x = std::cos(std::numbers::pi * (k + 0.75) / (kOrder + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int j = 2; j <= kOrder; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[k] = x;
            weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendre& rule() {
    static const GaussLegendre gl;
    return gl;
}

double apply_rule(const Integrand& f, double a, double b) {
    const auto& gl = rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int k = 0; k < kOrder; ++k) sum += gl.weights[k] * f(mid + half * gl.nodes[k]);
    return half * sum;
}

struct Panel {
    double a, b;
    double left, right;  // rule applied to each half
    double error;

    double value() const { return left + right; }
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel make_panel(const Integrand& f, double a, double b, double whole, std::size_t& evals) {
    const double m = 0.5 * (a + b);
    Panel p{a, b, apply_rule(f, a, m), apply_rule(f, m, b), 0.0};
    evals += 2 * kOrder;
    p.error = std::abs(whole - p.value());
    if (!std::isfinite(p.error)) p.error = std::numeric_limits<double>::infinity();
    return p;
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
    Result res;
    if (a == b) return res;
    if (!(std::isfinite(a) && std::isfinite(b))) {
        res.value = std::numeric_limits<double>::quiet_NaN();
        res.converged = false;
        return res;
    }
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::priority_queue<Panel> heap;
    const double whole = apply_rule(f, a, b);
    res.evals = kOrder;
    heap.push(make_panel(f, a, b, whole, res.evals));

    double total = heap.top().value();
    double err = heap.top().error;
    while (true) {
        if (!std::isfinite(total)) {
            res.value = sign * total;
            res.error = std::numeric_limits<double>::infinity();
            res.converged = std::isinf(total);
            return res;
        }
        if (err <= std::max(opts.rel_tol * std::abs(total), opts.abs_tol)) break;
        if (res.evals + 4 * kOrder > opts.max_evals) {
            res.converged = false;
            break;
        }
        Panel worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) {
            // Panel cannot be split further in floating point.
            res.converged = false;
            heap.push(worst);
            break;
        }
        Panel lo = make_panel(f, worst.a, m, worst.left, res.evals);
        Panel hi = make_panel(f, m, worst.b, worst.right, res.evals);
        heap.push(lo);
        heap.push(hi);

        total += lo.value() + hi.value() - worst.value();
        err += lo.error + hi.error - worst.error;
        err = std::max(err, 0.0);
    }
    // Final exact re-summation.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value();
        err += heap.top().error;
        heap.pop();
    }
    res.value = sign * total;
    res.error = err;
    return res;
}

TailResult integrate_to_infinity(const Integrand& f, double start, const Options& opts) {
    TailResult out;
    if (!(start > 0.0)) start = 1.0;

    std::vector<double> partial;  // partial[k]: integral over [start, start 2^{k+1}]
    std::vector<double> panels;
    int trend_run = 0;            // consecutive doublings with non-decreasing growth ratio >= 1
    double prev_ratio = 0.0;
    double sum = 0.0;
    double lo = start;
    constexpr int kMaxDoublings = 1000;

    auto diverged = [&out] {
        out.status = TailStatus::Divergent;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    };

    for (int k = 0; k < kMaxDoublings; ++k) {
        const double hi = 2.0 * lo;
        if (!std::isfinite(hi)) break;
        if (out.evals >= opts.max_evals) {
            out.status = TailStatus::Indeterminate;
            out.value = sum;
            return out;
        }
        Options panel_opts = opts;
        panel_opts.abs_tol = std::max(opts.abs_tol, 1e-3 * opts.rel_tol * std::abs(sum));
        panel_opts.max_evals = opts.max_evals - out.evals;
        const Result r = integrate(f, lo, hi, panel_opts);
        out.evals += r.evals;
        if (!std::isfinite(r.value)) return diverged();

        sum += r.value;
        partial.push_back(sum);
        panels.push_back(std::abs(r.value));

        const std::size_t n = panels.size();
        if (n >= 2 && panels[n - 2] > 0.0) {
            const double ratio = panels[n - 1] / panels[n - 2];
            const bool trending = ratio >= 1.0 && (n < 3 || ratio >= prev_ratio * (1.0 - 1e-9));
            trend_run = trending ? trend_run + 1 : 0;
            prev_ratio = ratio;
        } else {
            trend_run = 0;
            prev_ratio = 0.0;
        }
        // Growth by a factor > 10 across two doublings while still accelerating.
        if (n >= 3 && trend_run >= 2 && std::abs(partial[n - 3]) > 0.0 &&
            std::abs(partial[n - 1]) > 10.0 * std::abs(partial[n - 3])) {
            return diverged();
        }
        // Power-law or logarithmic growth: contributions never start shrinking.
        if (trend_run >= 5) return diverged();

        const double mag = panels[n - 1];
        if (k >= 2 && trend_run == 0 && mag <= opts.rel_tol * std::abs(sum)) {
            out.value = sum;
            return out;
        }
        if (!r.converged) {
            out.status = TailStatus::Indeterminate;
            out.value = sum;
            return out;
        }
        lo = hi;
    }
    out.status = TailStatus::Indeterminate;
    out.value = sum;
    return out;
}

}  // namespace cdolab::quad
