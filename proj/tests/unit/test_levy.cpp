#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cdolab/errors.hpp"
#include "cdolab/levy.hpp"

using namespace cdolab;

namespace {

// Closed form for a finite atom measure.
double atom_J(double a, double q, const std::vector<Atom>& atoms, double z) {
    double s = -a * z + 0.5 * q * z * z;
    for (const auto& at : atoms) {
        const double small = std::abs(at.location) < 1.0 ? z * at.location : 0.0;
        s += at.mass * (std::expm1(-z * at.location) + small);
    }
    return s;
}

double atom_J1(double a, double q, const std::vector<Atom>& atoms, double z) {
    double s = -a + q * z;
    for (const auto& at : atoms) {
        const double small = std::abs(at.location) < 1.0 ? at.location : 0.0;
        s += at.mass * (-at.location * std::exp(-z * at.location) + small);
    }
    return s;
}

double atom_J2(double q, const std::vector<Atom>& atoms, double z) {
    double s = q;
    for (const auto& at : atoms) s += at.mass * at.location * at.location * std::exp(-z * at.location);
    return s;
}

// nu(dy) = c e^{-k y} dy on (0, inf): J(z) = c (1/(k+z) - 1/k) + c z (1 - (1+k) e^{-k}) / k^2.
double exp_J(double c, double k, double z) {
    return c * (1.0 / (k + z) - 1.0 / k) + c * z * (1.0 - (1.0 + k) * std::exp(-k)) / (k * k);
}

const std::vector<Atom> kAtoms{{0.5, 1.0}, {1.5, 0.3}, {-0.4, 0.7}};

}  // namespace

TEST(LaplaceExponent, WienerIsHalfSquare) {
    const auto w = LevyTriplet::wiener();
    for (double z : {-3.0, -0.5, 0.0, 0.25, 1.0, 4.0}) {
        EXPECT_DOUBLE_EQ(laplace_exponent(w, z), 0.5 * z * z);
        EXPECT_DOUBLE_EQ(laplace_derivative(w, z, 1), z);
        EXPECT_DOUBLE_EQ(laplace_derivative(w, z, 2), 1.0);
    }
}

TEST(LaplaceExponent, PureDriftIsLinear) {
    const auto d = LevyTriplet::drift(1.0);
    for (double z : {0.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(laplace_exponent(d, z), -z);
}

TEST(LaplaceExponent, AtomsMatchClosedForm) {
    const LevyTriplet t(0.2, 0.0, LevyMeasure(kAtoms, std::nullopt));
    for (double z = -2.0; z <= 5.0; z += 0.37) {
        const double ref = atom_J(0.2, 0.0, kAtoms, z);
        EXPECT_NEAR(laplace_exponent(t, z), ref, 1e-13 * (1.0 + std::abs(ref))) << z;
        EXPECT_NEAR(laplace_derivative(t, z, 1), atom_J1(0.2, 0.0, kAtoms, z), 1e-12) << z;
        EXPECT_NEAR(laplace_derivative(t, z, 2), atom_J2(0.0, kAtoms, z), 1e-12) << z;
    }
}

TEST(LaplaceExponent, ExponentialDensityMatchesClosedForm) {
    const LevyTriplet t(0.0, 0.0, LevyMeasure({}, Density::exp_tilted(1.0, 1.0)));
    // Frozen value at z = 1: 1/2 - 1 + 1 - 2/e.
    EXPECT_NEAR(laplace_exponent(t, 1.0), -0.23575888234288467, 1e-10);
    for (double z : {0.1, 0.5, 2.0, 7.0, -0.5}) {
        EXPECT_NEAR(laplace_exponent(t, z), exp_J(1.0, 1.0, z), 1e-9) << z;
    }
}

TEST(LaplaceExponent, OutsideDomainIsInfinite) {
    const LevyTriplet t(0.0, 0.0, LevyMeasure({}, Density::exp_tilted(1.0, 1.0)));
    EXPECT_FALSE(in_domain(t, -1.5));
    EXPECT_TRUE(std::isinf(laplace_exponent(t, -1.5)));
    EXPECT_THROW(laplace_derivative(t, -1.5, 1), DomainError);
    EXPECT_TRUE(in_domain(t, -0.5));
}

TEST(LaplaceExponent, ZeroAtOriginAndConvex) {
    const LevyTriplet t(0.3, 0.2, LevyMeasure(kAtoms, Density::exp_tilted(2.0, 5.0)));
    EXPECT_EQ(laplace_exponent(t, 0.0), 0.0);
    double prev = laplace_derivative(t, 0.0, 1);
    for (double z = 0.1; z < 4.0; z += 0.1) {
        const double d = laplace_derivative(t, z, 1);
        EXPECT_GE(d, prev);
        EXPECT_GE(laplace_derivative(t, z, 2), 0.0);
        prev = d;
    }
}

TEST(LaplaceExponent, DerivativesMatchFiniteDifferences) {
    const LevyTriplet t(0.1, 0.0, LevyMeasure({{0.7, 0.4}}, Density::exp_tilted(2.0, 5.0)));
    for (double z : {0.3, 1.0, 2.5}) {
        const double h = 1e-4;
        const double fd1 = (laplace_exponent(t, z + h) - laplace_exponent(t, z - h)) / (2 * h);
        const double fd3 = (laplace_derivative(t, z + h, 2) - laplace_derivative(t, z - h, 2)) / (2 * h);
        EXPECT_NEAR(laplace_derivative(t, z, 1), fd1, 1e-6);
        EXPECT_NEAR(laplace_derivative(t, z, 3), fd3, 1e-5);
    }
}

TEST(LaplaceEvaluator, TableMatchesDirectQuadrature) {
    const LevyTriplet t(0.1, 0.5, LevyMeasure({{0.7, 0.4}}, Density::exp_tilted(1.0, 1.0)));
    LaplaceEvaluator ev(t);
    ev.tabulate(-0.5, 3.0);
    ASSERT_TRUE(ev.has_table());
    for (double x = -0.5; x <= 3.0; x += 0.0173) {
        EXPECT_NEAR(ev.first_derivative(x), laplace_derivative(t, x, 1), 1e-8) << x;
    }
    // Outside the table it falls back to quadrature.
    EXPECT_NEAR(ev.first_derivative(4.0), laplace_derivative(t, 4.0, 1), 1e-12);
}

TEST(Moments, ExponentialDensityPasses) {
    const LevyTriplet t(0.0, 0.0, LevyMeasure({}, Density::exp_tilted(1.0, 1.0)));
    const auto rep = check_moment_conditions(t, 0.5);
    EXPECT_EQ(rep.verdict("levy_integrability"), Verdict::Pass);
    EXPECT_EQ(rep.verdict("second_moment_tail"), Verdict::Pass);
    EXPECT_EQ(rep.verdict("exponential_moment"), Verdict::Pass);
}

TEST(Moments, ExponentialMomentFailsBeyondRate) {
    const LevyTriplet t(0.0, 0.0, LevyMeasure({}, Density::exp_tilted(1.0, 1.0)));
    EXPECT_EQ(check_moment_conditions(t, 1.5).verdict("exponential_moment"), Verdict::Fail);
}

TEST(Moments, NegativeSupportBelowMinusOneFails) {
    const LevyTriplet t(0.0, 0.0, LevyMeasure({{-2.0, 1.0}}, std::nullopt));
    EXPECT_EQ(check_moment_conditions(t).verdict("support_above_minus_one"), Verdict::Fail);
}

TEST(Subordinator, Classification) {
    EXPECT_FALSE(LevyTriplet::wiener().is_subordinator());
    EXPECT_TRUE(LevyTriplet::drift(0.5).is_subordinator());
    EXPECT_FALSE(LevyTriplet::drift(-0.5).is_subordinator());
    // Compensating small jumps leaves a negative drift.
    EXPECT_FALSE(LevyTriplet(0.0, 0.0, LevyMeasure({}, Density::exp_tilted(1.0, 1.0))).is_subordinator());
    EXPECT_TRUE(LevyTriplet(1.0, 0.0, LevyMeasure({}, Density::exp_tilted(1.0, 1.0))).is_subordinator());
    EXPECT_FALSE(LevyTriplet(1.0, 0.0, LevyMeasure({{-0.1, 1.0}}, std::nullopt)).is_subordinator());
}

TEST(Triplet, RejectsBadInput) {
    EXPECT_THROW(LevyTriplet(0.0, -1.0), ConfigError);
    EXPECT_THROW(LevyMeasure({{0.5, -1.0}}, std::nullopt), ConfigError);
    EXPECT_THROW(LevyMeasure({{0.0, 1.0}}, std::nullopt), ConfigError);
}

TEST(JumpSizeSampler, MeanMatchesMeasure) {
    const LevyMeasure nu({{2.0, 0.5}}, Density::exp_tilted(1.0, 2.0));
    const JumpSizeSampler s(nu, 1e-3);
    // Mass over y > 1e-3: 0.5 + e^{-0.002}/2; first moment: 1 + (1.002 e^{-0.002}) / 4.
    const double mass = 0.5 + 0.5 * std::exp(-0.002);
    const double first = 1.0 + 1.002 * std::exp(-0.002) / 4.0;
    EXPECT_NEAR(s.total_mass(), mass, 1e-9);
    Engine rng(11);
    double sum = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) sum += s.sample(rng);
    EXPECT_NEAR(sum / n, first / mass, 0.01);
}

TEST(IncrementSampler, MomentsOfIncrements) {
    const LevyTriplet t(0.3, 0.5, LevyMeasure({{0.8, 2.0}}, std::nullopt));
    const double dt = 0.01;
    const auto series = simulate_increments(t, dt, 200000, 1e-3, 3);
    const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) / series.values.size();
    double var = 0.0;
    for (double v : series.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(series.values.size() - 1);
    // E Z(dt) = (a + int_{|y|>=1} y nu) dt = a dt here; Var = (q + int y^2 nu) dt.
    const double se_mean = std::sqrt((0.5 + 2.0 * 0.64) * dt / series.values.size());
    EXPECT_NEAR(mean, 0.3 * dt, 4 * se_mean);
    EXPECT_NEAR(var, (0.5 + 2.0 * 0.64) * dt, 0.03 * var);
    EXPECT_GT(series.jump_count, 0u);
    EXPECT_FALSE(series.pure_diffusion);
}

TEST(IncrementSampler, CutoffAboveSupportLeavesDiffusion) {
    const LevyTriplet t(0.0, 1.0, LevyMeasure({}, Density::uniform(1.0, 0.0, 0.01)));
    const IncrementSampler s(t, 0.01, 0.05);
    EXPECT_TRUE(s.pure_diffusion());
    EXPECT_NEAR(s.dropped_variance(), 0.01 * 0.01 / 3.0, 1e-12);
}

TEST(IncrementSampler, SameSeedSameSeries) {
    const LevyTriplet t(0.0, 1.0, LevyMeasure({{0.5, 1.0}}, std::nullopt));
    EXPECT_EQ(simulate_increments(t, 0.01, 500, 1e-3, 9).values, simulate_increments(t, 0.01, 500, 1e-3, 9).values);
}
