#include <gtest/gtest.h>

#include <cmath>

#include "cdolab/errors.hpp"
#include "cdolab/hjmm.hpp"
#include "cdolab/path_runner.hpp"

using namespace cdolab;

namespace {

Geometry geom(std::vector<double> ladder, double dz = 0.01, std::size_t nz = 301) {
    return Geometry{dz, nz, 1.0, RatingLadder(std::move(ladder))};
}

ForwardSurface ramp(const Geometry& g) {
    return ForwardSurface::from_function(g.dz, g.n_z, g.gamma, g.ladder, [](double z, std::size_t i) {
        return 0.05 - 0.01 * static_cast<double>(i) + 0.002 * z;
    });
}

}  // namespace

TEST(Stepper, ZeroVolatilityIsExactTransport) {
    const auto g = geom({0.5, 1.0});
    const HjmmModel m(LevyTriplet(0.3, 1.0, LevyMeasure({{0.4, 2.0}}, std::nullopt)), VolatilitySpec::constant(2, 0.0), g);
    auto s = ramp(g);
    const auto expected = shift(s, 1);
    HjmmModel::Workspace ws;
    LevyIncrement inc;
    inc.continuous = 0.7;
    inc.jumps = {0.4, 0.4};
    m.step(0.0, 0.0, s, inc, ws);
    EXPECT_EQ(s.values(), expected.values());
}

TEST(Drift, ClassicalGaussianDrift) {
    const auto g = geom({1.0}, 0.01, 1001);
    const double sigma = 0.2;
    const HjmmModel m(LevyTriplet::wiener(), VolatilitySpec::constant(1, sigma), g);
    const auto f = m.drift(0.0, 0.0, ramp(g));
    for (std::size_t k = 0; k < g.n_z; ++k) {
        const double z = f.z(k);
        EXPECT_NEAR(f.at(k, 0), sigma * sigma * z, 1e-12 * (1.0 + z)) << z;
    }
}

TEST(Drift, JumpDriftUsesLaplaceDerivative) {
    const auto g = geom({1.0}, 0.01, 201);
    const LevyTriplet t(0.1, 0.0, LevyMeasure({{0.6, 1.5}}, Density::exp_tilted(1.0, 3.0)));
    const HjmmModel m(t, VolatilitySpec::constant(1, 0.3), g);
    const auto f = m.drift(0.0, 0.0, ramp(g));
    for (std::size_t k : {0u, 17u, 100u, 200u}) {
        const double z = f.z(k);
        EXPECT_NEAR(f.at(k, 0), laplace_derivative(t, 0.3 * z, 1) * 0.3, 1e-8) << z;
    }
}

TEST(Drift, ShiftedConventionOffsetsTheArgument) {
    const auto g = geom({1.0}, 0.01, 101);
    const LevyTriplet t(0.4, 0.0, LevyMeasure({{0.5, 1.0}}, std::nullopt));
    const HjmmModel bare(t, VolatilitySpec::constant(1, 0.3), g, 1e-3, DriftConvention::Bare);
    const HjmmModel shifted(t, VolatilitySpec::constant(1, 0.3), g, 1e-3, DriftConvention::Shifted);
    EXPECT_EQ(bare.jprime_shift(), 0.0);
    // m_eps = 0.5 from the single atom inside (eps, 1).
    EXPECT_NEAR(shifted.jprime_shift(), 0.4 - 0.5, 1e-14);
    const auto f = shifted.drift(0.0, 0.0, ramp(g));
    EXPECT_NEAR(f.at(50, 0), laplace_derivative(t, 0.3 * 0.5 - 0.1, 1) * 0.3, 1e-12);
}

TEST(Drift, NoDriftFlagZeroesTheField) {
    const auto g = geom({1.0}, 0.01, 101);
    const HjmmModel m(LevyTriplet::wiener(), VolatilitySpec::constant(1, 0.2), g, 1e-3, DriftConvention::Bare, true);
    const auto f = m.drift(0.0, 0.0, ramp(g));
    for (double v : f.values()) EXPECT_EQ(v, 0.0);
}

TEST(Path, ConstantVolatilityClosedForm) {
    const auto g = geom({1.0}, 0.01, 1001);
    const double sigma = 0.1;
    const HjmmModel m(LevyTriplet::wiener(), VolatilitySpec::constant(1, sigma), g);
    const auto r0 = ForwardSurface::from_function(g.dz, g.n_z, 1.0, g.ladder, [](double z, std::size_t) {
        return 0.03 + 0.004 * z;
    });
    PathOptions o;
    o.horizon = 1.0;
    o.snapshot_times = {1.0};
    const std::uint64_t seed = 31;
    const auto res = solve_path(m, r0, LossPath{}, o, seed);
    Engine rng(stream_seed(seed, 0));
    LevyIncrement inc;
    double W = 0.0;
    for (int k = 0; k < 100; ++k) {
        m.increments().draw(rng, inc);
        W += inc.continuous;
    }
    const auto& s = res.snapshots.at(0).surface;
    for (std::size_t k = 0; k + 100 < g.n_z; ++k) {
        const double z = s.z(k);
        const double ref = 0.03 + 0.004 * (z + 1.0) + sigma * sigma * (z + 0.5) + sigma * W;
        EXPECT_NEAR(s.at(k, 0), ref, 5 * g.dz * sigma * sigma * (1 + 10.0)) << z;
    }
}

TEST(Path, SerialAndParallelBatchesAgree) {
    const auto g = geom({0.3, 0.6, 1.0}, 0.01, 201);
    const HjmmModel m(LevyTriplet(0.2, 0.5, LevyMeasure({{0.5, 1.0}}, Density::exp_tilted(2.0, 5.0))),
                      VolatilitySpec::constant(3, 0.05), g);
    const auto r0 = ForwardSurface::from_function(g.dz, g.n_z, 1.0, g.ladder,
                                                  [](double, std::size_t i) { return 0.08 - 0.02 * i; });
    BatchOptions b;
    b.n_paths = 24;
    b.seed = 1234;
    b.path.horizon = 0.5;
    b.path.maturities = {1.0};
    b.path.price_times = {0.0, 0.25, 0.5};
    b.path.snapshot_times = {0.5};
    const auto a = run_batch_serial(m, r0, b);
    const auto c = run_batch(m, r0, b);
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t p = 0; p < a.size(); ++p) {
        EXPECT_EQ(a[p].snapshots[0].surface.values(), c[p].snapshots[0].surface.values());
        EXPECT_EQ(a[p].loss.jump_times, c[p].loss.jump_times);
        EXPECT_EQ(a[p].prices[2].prices, c[p].prices[2].prices);
        EXPECT_EQ(a[p].jumps, c[p].jumps);
    }
    // Different paths see different noise.
    EXPECT_NE(a[0].snapshots[0].surface.values(), a[1].snapshots[0].surface.values());
}

TEST(Path, OffGridTimesAreRejected) {
    const auto g = geom({1.0}, 0.01, 101);
    const HjmmModel m(LevyTriplet::wiener(), VolatilitySpec::constant(1, 0.1), g);
    PathOptions o;
    o.horizon = 0.5;
    o.snapshot_times = {0.2345};
    EXPECT_THROW(simulate_path(m, ramp(g), o, 1), ConfigError);
}

TEST(Path, NonFiniteSurfaceAborts) {
    const auto g = geom({1.0}, 0.01, 101);
    const auto spec = VolatilitySpec::custom(1, [](std::size_t, double t, double, double, std::span<const double>) {
        return t > 0.2 ? std::nan("") : 0.1;
    });
    const HjmmModel m(LevyTriplet::wiener(), spec, g);
    PathOptions o;
    o.horizon = 0.5;
    try {
        simulate_path(m, ramp(g), o, 1);
        FAIL() << "expected SimulationError";
    } catch (const SimulationError& e) {
        EXPECT_GT(e.time(), 0.2);
        EXPECT_LT(e.time(), 0.25);
    }
}

TEST(Path, FrozenLossFeedsVolatility) {
    const auto g = geom({0.5, 1.0}, 0.01, 101);
    // f3(l) = clamp(1 - l, 0, 1): noise switches off once the loss reaches 1.
    const auto spec = VolatilitySpec::multiplicative(
        ScalarFunction::constant(1.0), ScalarFunction::constant(1.0), ScalarFunction::linear_capped(1.0, -1.0, 1.0),
        {ScalarFunction::constant(1.0), ScalarFunction::constant(1.0)}, ScalarFunction::constant(0.1));
    const HjmmModel m(LevyTriplet::wiener(), spec, g);
    LossPath loss;
    loss.add(0.2, 1.0);
    PathOptions o;
    o.horizon = 0.4;
    o.snapshot_times = {0.2, 0.4};
    const auto r0 = ramp(g);
    const auto res = solve_path(m, r0, loss, o, 3);
    EXPECT_EQ(res.loss.levels, loss.levels);
    const auto moved = shift(res.snapshots[0].surface, 20);
    for (std::size_t k = 0; k + 20 < g.n_z; ++k) EXPECT_EQ(res.snapshots[1].surface.at(k, 0), moved.at(k, 0));
}

TEST(Model, RejectsMismatchedShapes) {
    EXPECT_THROW(HjmmModel(LevyTriplet::wiener(), VolatilitySpec::constant(2, 0.1), geom({1.0})), ConfigError);
}
