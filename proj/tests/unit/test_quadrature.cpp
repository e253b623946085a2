#include <gtest/gtest.h>

#include <cmath>

#include "cdolab/quadrature.hpp"

using namespace cdolab;

TEST(Quadrature, PolynomialIsExact) {
    const auto r = quad::integrate([](double x) { return x * x * x - 2 * x; }, -1.0, 2.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 15.0 / 4.0 - 3.0, 1e-14);
}

TEST(Quadrature, EndpointKinkConverges) {
    const auto r = quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-9);
}

TEST(Quadrature, BudgetExhaustionIsReported) {
    quad::Options o;
    o.max_evals = 30;
    const auto r = quad::integrate([](double x) { return std::sin(1.0 / (x + 1e-4)); }, 0.0, 1.0, o);
    EXPECT_FALSE(r.converged);
}

TEST(QuadratureTail, ExponentialTail) {
    const auto r = quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 1.0);
    EXPECT_EQ(r.status, quad::TailStatus::Finite);
    EXPECT_NEAR(r.value, std::exp(-1.0), 1e-11);
}

TEST(QuadratureTail, PowerTailConverges) {
    const auto r = quad::integrate_to_infinity([](double x) { return 1.0 / (x * x * x); }, 1.0);
    EXPECT_EQ(r.status, quad::TailStatus::Finite);
    EXPECT_NEAR(r.value, 0.5, 1e-8);
}

TEST(QuadratureTail, HarmonicDiverges) {
    const auto r = quad::integrate_to_infinity([](double x) { return 1.0 / x; }, 1.0);
    EXPECT_EQ(r.status, quad::TailStatus::Divergent);
}

TEST(QuadratureTail, ExponentialGrowthDiverges) {
    const auto r = quad::integrate_to_infinity([](double x) { return std::exp(0.5 * x); }, 1.0);
    EXPECT_EQ(r.status, quad::TailStatus::Divergent);
}
