#include <gtest/gtest.h>

#include <cmath>

#include "cdolab/errors.hpp"
#include "cdolab/volatility.hpp"

using namespace cdolab;

TEST(ScalarFunction, Library) {
    EXPECT_EQ(ScalarFunction::constant(2.5)(7.0), 2.5);
    const auto lc = ScalarFunction::linear_capped(1.0, -0.5, 0.8);
    EXPECT_EQ(lc(0.0), 0.8);
    EXPECT_EQ(lc(1.0), 0.5);
    EXPECT_EQ(lc(5.0), 0.0);
    EXPECT_NEAR(ScalarFunction::exp_decay(2.0, 0.5)(2.0), 2.0 * std::exp(-1.0), 1e-15);
    const auto lg = ScalarFunction::logistic_concave(0.1, 20.0);
    EXPECT_EQ(lg(0.0), 0.0);
    EXPECT_NEAR(lg(1.0), 0.1 * std::tanh(10.0), 1e-15);
    EXPECT_NEAR(lg.bound(), 0.1, 1e-15);
    EXPECT_THROW(ScalarFunction("nope", {1.0}), ConfigError);
    EXPECT_THROW(ScalarFunction("exp_decay", {1.0}), ConfigError);
}

TEST(ScalarFunction, DeclaredBoundWins) {
    const ScalarFunction f("exp_decay", {2.0, 1.0}, 3.0);
    EXPECT_EQ(f.bound(), 3.0);
}

TEST(VolatilitySpec, MultiplicativeProduct) {
    const auto spec = VolatilitySpec::multiplicative(
        ScalarFunction::constant(2.0), ScalarFunction::exp_decay(1.0, 1.0), ScalarFunction::constant(0.5),
        {ScalarFunction::linear_capped(1.0, -0.1, 1.0), ScalarFunction::linear_capped(1.0, -0.2, 1.0)},
        ScalarFunction::linear_capped(0.0, 1.0, 10.0));
    const std::vector<double> r{1.0, 2.0};
    const double common = 2.0 * std::exp(-0.5) * 0.5 * 0.9 * 0.6;
    EXPECT_NEAR(spec.eval(0, 0.0, 0.5, 0.0, r), common * 1.0, 1e-15);
    EXPECT_NEAR(spec.eval(1, 0.0, 0.5, 0.0, r), common * 2.0, 1e-15);
    double out[2];
    spec.eval_all(0.0, 0.5, 0.0, r.data(), out);
    EXPECT_EQ(out[0], spec.eval(0, 0.0, 0.5, 0.0, r));
    EXPECT_EQ(out[1], spec.eval(1, 0.0, 0.5, 0.0, r));
    EXPECT_THROW(spec.eval(2, 0.0, 0.5, 0.0, r), ConfigError);
    ASSERT_TRUE(spec.declared_sup().has_value());
    EXPECT_NEAR(*spec.declared_sup(), 2.0 * 1.0 * 0.5 * 1.0 * 1.0 * 10.0, 1e-12);
}

TEST(VolatilitySpec, SeparableAndConstant) {
    const auto sep = VolatilitySpec::separable(ScalarFunction::constant(1.0), ScalarFunction::constant(1.0),
                                               ScalarFunction::constant(1.0),
                                               {ScalarFunction::linear_capped(0.0, 0.2, 5.0),
                                                ScalarFunction::linear_capped(0.0, 0.6, 5.0)});
    const std::vector<double> r{1.0, 1.0};
    EXPECT_NEAR(sep.eval(0, 0, 0, 0, r), 0.2, 1e-15);
    EXPECT_NEAR(sep.eval(1, 0, 0, 0, r), 0.6, 1e-15);
    const auto c = VolatilitySpec::constant(3, 0.1);
    EXPECT_EQ(c.eval(2, 1.0, 4.0, 0.5, std::vector<double>{-1, 5, 9}), 0.1);
    EXPECT_NEAR(*c.declared_sup(), 0.1, 1e-15);
}

TEST(VolatilitySpec, CustomCallback) {
    const auto spec = VolatilitySpec::custom(2, [](std::size_t i, double, double z, double, std::span<const double> r) {
        return r[i] * std::exp(-z);
    });
    EXPECT_EQ(spec.kind(), VolKind::Custom);
    EXPECT_FALSE(spec.declared_sup().has_value());
    EXPECT_NEAR(spec.eval(1, 0, 1.0, 0, std::vector<double>{1.0, 2.0}), 2.0 * std::exp(-1.0), 1e-15);
}
