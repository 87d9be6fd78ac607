#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lcns/cost.hpp"
#include "lcns/error.hpp"
#include "lcns/ops.hpp"
#include "support.hpp"

using namespace lcns;

namespace {

StateTrajectory constant_traj(const Grid& g, const std::vector<double>& times, double rho, double u) {
    StateTrajectory t;
    t.times = times;
    for (std::size_t n = 0; n < times.size(); ++n) {
        t.rho.push_back(ScalarField(g, rho));
        VectorField v(g, true);
        for (double& x : v.values()) x = u;
        t.u.push_back(v);
    }
    return t;
}

}  // namespace

TEST(Cost, MatchingStateAndZeroControlIsZero) {
    const Grid g = Grid::unit(2, 6);
    const auto times = uniform_times(1.0, 8);
    const StateTrajectory y = constant_traj(g, times, 0.3, -0.2);
    Targets t = Targets::zero(g, times.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        t.rho_d[n] = y.rho[n];
        t.u_d[n] = y.u[n];
    }
    const CostReport r = evaluate_cost(y, ControlField(g, 8, 0.125, 1.0), t);
    EXPECT_EQ(r.J, 0.0);
    EXPECT_EQ(r.J_eps, 0.0);
}

TEST(Cost, UnitDensityOnUnitSquareGivesOneHalf) {
    const Grid g = Grid::unit(2, 8);
    const auto times = uniform_times(1.0, 10);
    const StateTrajectory y = constant_traj(g, times, 1.0, 0.0);
    const CostReport r = evaluate_cost(y, ControlField(g, 10, 0.1, 1.0), Targets::zero(g, times.size()));
    EXPECT_NEAR(r.J, 0.5, 1e-15);
    EXPECT_NEAR(r.tracking_rho, 1.0, 1e-15);
    EXPECT_EQ(r.tracking_u, 0.0);
}

TEST(Cost, ControlEnergyIsExact) {
    const Grid g = Grid::unit(1, 8);
    const auto times = uniform_times(1.0, 4);
    ControlField U(g, 4, 0.25, 10.0);
    for (std::size_t n = 0; n < 4; ++n)
        for (double& x : U[n].values()) x = 1.0 + n;
    const CostReport r = evaluate_cost(constant_traj(g, times, 0, 0), U, Targets::zero(g, 5));
    EXPECT_NEAR(r.control_energy, 0.25 * (1 + 4 + 9 + 16), 1e-13);
}

TEST(Cost, TrapezoidMatchesFineQuadratureOracleAtSecondOrder) {
    // Tracking term of sin(pi t / 2) g against the exact integral ||g||^2 / 2 over [0, 1].
    const double pi = std::numbers::pi;
    const Grid g = Grid::unit(1, 8);
    std::mt19937_64 rng(51);
    const VectorField base = lcns::testing::random_vector(g, rng, true);
    const double exact = 0.5 * inner(base, base);
    double prev = 0.0;
    for (int N : {8, 16, 32, 64}) {
        const auto times = uniform_times(1.0, N);
        StateTrajectory y = constant_traj(g, times, 0.0, 0.0);
        for (int n = 0; n <= N; ++n) y.u[n] = std::sin(0.5 * pi * times[n]) * base;
        const CostReport r = evaluate_cost(y, ControlField(g, N, 1.0 / N, 1.0), Targets::zero(g, N + 1));
        const double err = std::abs(r.tracking_u - exact);
        if (prev > 0.0) EXPECT_GT(prev / err, 3.5) << N;
        prev = err;
    }
}

TEST(Cost, PenaltyCombination) {
    CostReport r;
    r.J = 2.0;
    r.d_W = 0.0;
    penalize(r, 0.1, 2.0);
    EXPECT_DOUBLE_EQ(r.J_eps, 0.1);  // at the incumbent optimum J_eps = eps
    EXPECT_EQ(r.lambda_eps, 1.0);
    EXPECT_EQ(r.a_norm, 0.0);
    r.J = 3.0;
    penalize(r, 0.5, 2.0);
    EXPECT_DOUBLE_EQ(r.J_eps, 1.5);  // inactive constraint: J - J* + eps
    r.J = 1.0;
    r.d_W = 0.4;
    penalize(r, 0.25, 2.0);
    EXPECT_DOUBLE_EQ(r.J_eps, 0.4);
    EXPECT_EQ(r.lambda_eps, 0.0);
    EXPECT_EQ(r.a_norm, 1.0);
}

TEST(CostProperty, MultiplierBounds) {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int k = 0; k < 1000; ++k) {
        CostReport r;
        r.J = u(rng);
        r.d_W = k % 3 == 0 ? 0.0 : u(rng);
        penalize(r, 1e-3 + u(rng), u(rng));
        EXPECT_GE(r.lambda_eps, 0.0);
        EXPECT_LE(r.lambda_eps, 1.0);
        EXPECT_GE(r.a_norm, 0.0);
        EXPECT_LE(r.a_norm, 1.0);
        EXPECT_GE(r.lambda_eps + r.a_norm, 1.0 - 1e-12);
        EXPECT_LE(r.lambda_eps + r.a_norm, 2.0);
    }
}

TEST(Cost, PenalizedCostEmitsUnitSubgradientScaledByA) {
    const Grid g = Grid::unit(1, 6);
    const auto times = uniform_times(1.0, 4);
    const StateTrajectory y = constant_traj(g, times, 1.0, 0.0);
    ConstraintSpec s;
    s.set = SetKind::Ball;
    s.center = Observation::zeros(g, trapezoid_weights(times));
    s.radius = 0.5;
    Observation a;
    const CostReport r = penalized_cost(y, ControlField(g, 4, 0.25, 1.0), Targets::zero(g, 5), s, 0.1, 0.0, &a);
    EXPECT_NEAR(r.d_W, 0.5, 1e-14);
    EXPECT_NEAR(norm(a), r.a_norm, 1e-14);
    EXPECT_NEAR(r.J_eps, std::hypot(r.J + 0.1, 0.5), 1e-14);
    EXPECT_THROW(penalized_cost(y, ControlField(g, 4, 0.25, 1.0), Targets::zero(g, 5), s, 0.0, 0.0), Error);
}

TEST(Cost, TargetsFromExpressions) {
    const Grid g = Grid::unit(1, 4);
    const Targets t = Targets::from_expressions("t", {"x"}, g, uniform_times(1.0, 2));
    EXPECT_EQ(t.rho_d[2][0], 1.0);
    EXPECT_EQ(t.u_d[0].at(0, 1), 0.375);
}
