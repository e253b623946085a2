#pragma once

#include <cstddef>
#include <functional>

namespace cdolab::quad {

struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-300;
    std::size_t max_evals = std::size_t{1} << 14;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evals = 0;
    bool converged = true;
};

enum class TailStatus { Finite, Divergent, Indeterminate };

struct TailResult {
    double value = 0.0;
    TailStatus status = TailStatus::Finite;
    std::size_t evals = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Legendre quadrature on [a, b] with dyadic panel
/// splitting. The panel with the largest local error is bisected until the
/// summed error estimate meets the tolerance or the evaluation budget runs out.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Integral of f over [start, +inf), start > 0, accumulated over doubling
/// panels [start 2^k, start 2^{k+1}]. Divergence is declared when f overflows,
/// when the partial integral grows by a factor > 10 across two doublings while
/// the panel growth ratio is still >= 1 and non-decreasing, or when that ratio
/// trend persists for five doublings (power-law growth).
TailResult integrate_to_infinity(const Integrand& f, double start, const Options& opts = {});

}  // namespace cdolab::quad
