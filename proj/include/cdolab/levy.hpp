#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cdolab/quadrature.hpp"
#include "cdolab/report.hpp"
#include "cdolab/rng.hpp"

namespace cdolab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
    double location;
    double mass;
};

/// Absolutely continuous part of a Levy measure.
struct Density {
    std::string name;
    std::vector<double> params;
    std::function<double(double)> fn;
    double lo = 0.0;
    double hi = kInf;
    std::size_t node_budget = std::size_t{1} << 14;

    /// c * exp(-rate * y) on [lo, hi].
    static Density exp_tilted(double c, double rate, double lo = 0.0, double hi = kInf);
    /// Constant height on [lo, hi]; `mass` is the total mass.
    static Density uniform(double mass, double lo, double hi);
};

class LevyMeasure {
public:
    LevyMeasure() = default;
    LevyMeasure(std::vector<Atom> atoms, std::optional<Density> density);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<Density>& density() const { return density_; }
    bool empty() const { return atoms_.empty() && !density_; }

    /// Smallest / largest point of the declared support (atoms and density interval).
    double support_lo() const { return support_lo_; }
    double support_hi() const { return support_hi_; }

private:
    std::vector<Atom> atoms_;
    std::optional<Density> density_;
    double support_lo_ = 0.0;
    double support_hi_ = 0.0;
};

class LevyTriplet {
public:
    LevyTriplet() = default;
    LevyTriplet(double a, double q, LevyMeasure nu = {});

    static LevyTriplet wiener() { return {0.0, 1.0}; }
    static LevyTriplet drift(double a) { return {a, 0.0}; }

    double a() const { return a_; }
    double q() const { return q_; }
    const LevyMeasure& nu() const { return nu_; }

    /// q == 0, nonnegative jumps, and the drift left after compensating small
    /// jumps is nonnegative.
    bool is_subordinator() const;

private:
    double a_ = 0.0;
    double q_ = 0.0;
    LevyMeasure nu_;
};

quad::Options default_quadrature();

// ---------------------------------------------------------------------------
// Integration against the measure.

/// Selects jumps with lo < |y| < hi; the closed flags include the endpoint.
struct AbsBand {
    double lo = 0.0;
    double hi = kInf;
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double y) const;
};

struct MeasureIntegral {
    double value = 0.0;
    quad::TailStatus status = quad::TailStatus::Finite;
};

/// Integral of phi over the part of nu whose jump sizes fall in `band`.
/// Atoms are summed exactly; the density is integrated by adaptive quadrature
/// with the expanding-interval divergence test on unbounded support.
MeasureIntegral integrate_measure(const LevyMeasure& nu, const std::function<double(double)>& phi,
                                  const AbsBand& band, const quad::Options& opts = default_quadrature());

// ---------------------------------------------------------------------------
// Laplace exponent J(z) = log E exp(-z Z(1)).

/// Big-jump exponential moment over |y| >= 1; infinite outside the domain.
MeasureIntegral big_jump_exponential_moment(const LevyTriplet& t, double z,
                                            const quad::Options& opts = default_quadrature());

bool in_domain(const LevyTriplet& t, double z, const quad::Options& opts = default_quadrature());

/// Returns +inf outside the domain. Throws IndeterminateError when quadrature
/// cannot decide.
double laplace_exponent(const LevyTriplet& t, double z, const quad::Options& opts = default_quadrature());

/// order in {1, 2, 3}. Throws DomainError outside the domain of the requested
/// derivative and IndeterminateError on quadrature non-convergence.
double laplace_derivative(const LevyTriplet& t, double z, int order,
                          const quad::Options& opts = default_quadrature());

/// Fast J' for the drift. The density contribution is tabulated on demand as
/// a cubic Hermite interpolant (values J', slopes J''); atoms and the Gaussian
/// part are evaluated exactly. Outside the tabulated range it falls back to
/// direct quadrature.
class LaplaceEvaluator {
public:
    explicit LaplaceEvaluator(LevyTriplet t, quad::Options opts = default_quadrature());

    void tabulate(double lo, double hi);
    double first_derivative(double x) const;
    double exponent(double x) const { return laplace_exponent(triplet_, x, opts_); }
    const LevyTriplet& triplet() const { return triplet_; }
    bool has_table() const { return !nodes_.empty(); }

private:
    double density_part(double x) const;

    LevyTriplet triplet_;
    quad::Options opts_;
    double table_lo_ = 0.0;
    double table_step_ = 0.0;
    std::vector<double> nodes_;   // density part of J' at nodes
    std::vector<double> slopes_;  // density part of J'' at nodes
    std::vector<char> valid_;
};

// ---------------------------------------------------------------------------
// Moment and support conditions.

struct MomentCheck {
    std::string name;
    Verdict verdict = Verdict::Pass;
    double value = 0.0;
    std::string note;
};

struct MomentReport {
    std::vector<MomentCheck> checks;

    const MomentCheck* find(const std::string& name) const;
    Verdict verdict(const std::string& name) const;
};

/// `exp_constant` is the K / sqrt(gamma) entering the exponential moment
/// condition; that check is skipped when it is absent.
MomentReport check_moment_conditions(const LevyTriplet& t, std::optional<double> exp_constant = std::nullopt,
                                     const quad::Options& opts = default_quadrature());

// ---------------------------------------------------------------------------
// Simulation with the small-jump cutoff.

struct LevyIncrement {
    double continuous = 0.0;    // drift + Gaussian part over the step
    std::vector<double> jumps;  // individual jumps with |y| > eps, in arrival order

    double total() const;
};

/// Inverse-CDF sampler for jump sizes of nu restricted to |y| > cutoff.
class JumpSizeSampler {
public:
    JumpSizeSampler() = default;
    JumpSizeSampler(const LevyMeasure& nu, double cutoff, const quad::Options& opts = default_quadrature());

    double total_mass() const { return atom_mass_ + density_mass_; }
    double sample(Engine& rng) const;
    /// Quantiles of the normalized density part at probabilities (k + 0.5) / count.
    std::vector<double> density_quantiles(std::size_t count) const;

private:
    double sample_density(double u) const;

    std::vector<Atom> atoms_;
    std::vector<double> atom_cdf_;
    double atom_mass_ = 0.0;
    std::vector<double> cells_;     // cell edges (signed, increasing)
    std::vector<double> cell_cdf_;  // cumulative mass at right edge of each cell
    double density_mass_ = 0.0;
};

/// Draws increments of the approximating process over steps of length dt:
/// (a - m_eps) dt + sqrt(q dt) N(0,1) + compound Poisson jumps from nu on
/// {|y| > eps}, with m_eps the integral of y over eps < |y| < 1. Jumps with
/// |y| <= eps are dropped.
class IncrementSampler {
public:
    IncrementSampler(const LevyTriplet& t, double dt, double eps, const quad::Options& opts = default_quadrature());

    void draw(Engine& rng, LevyIncrement& out) const;

    double dt() const { return dt_; }
    double eps() const { return eps_; }
    double compensation() const { return m_eps_; }
    double jump_rate() const { return jumps_.total_mass(); }
    /// Variance per unit time lost by dropping jumps with |y| <= eps.
    double dropped_variance() const { return dropped_variance_; }
    /// eps exceeds every jump in the support: only drift and diffusion remain.
    bool pure_diffusion() const { return pure_diffusion_; }

private:
    double dt_;
    double eps_;
    double drift_;
    double diffusion_;
    double m_eps_ = 0.0;
    double dropped_variance_ = 0.0;
    bool pure_diffusion_ = false;
    JumpSizeSampler jumps_;
};

struct IncrementSeries {
    std::vector<double> values;
    std::size_t jump_count = 0;
    bool pure_diffusion = false;
    double dropped_variance = 0.0;
};

IncrementSeries simulate_increments(const LevyTriplet& t, double dt, std::size_t n_steps, double eps,
                                    std::uint64_t seed);

}  // namespace cdolab
