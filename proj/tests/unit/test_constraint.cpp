#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lcns/constraint.hpp"
#include "lcns/error.hpp"
#include "lcns/ops.hpp"
#include "support.hpp"

using namespace lcns;

namespace {

StateTrajectory random_traj(const Grid& g, std::size_t nodes, double T, std::mt19937_64& rng, double amp = 1.0) {
    StateTrajectory t;
    t.times = uniform_times(T, static_cast<int>(nodes) - 1);
    for (std::size_t n = 0; n < nodes; ++n) {
        t.rho.push_back(lcns::testing::random_scalar(g, rng, amp));
        t.u.push_back(lcns::testing::random_vector(g, rng, true, amp));
    }
    return t;
}

Observation random_obs(const Grid& g, std::size_t nodes, std::mt19937_64& rng, double amp = 1.0) {
    ConstraintSpec id;
    return observe(id, random_traj(g, nodes, 1.0, rng, amp));
}

ConstraintSpec ball_around(const Observation& c, double r) {
    ConstraintSpec s;
    s.set = SetKind::Ball;
    s.center = c;
    s.radius = r;
    return s;
}

ConstraintSpec box_spec(int dim) {
    ConstraintSpec s;
    s.set = SetKind::Box;
    s.box_lo.assign(dim + 1, -0.1);
    s.box_hi.assign(dim + 1, 0.2);
    s.box_hi[0] = std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace

TEST(Constraint, TrapezoidWeights) {
    const auto w = trapezoid_weights(uniform_times(1.0, 4));
    ASSERT_EQ(w.size(), 5u);
    EXPECT_DOUBLE_EQ(w[0], 0.125);
    EXPECT_DOUBLE_EQ(w[2], 0.25);
    EXPECT_DOUBLE_EQ(w[4], 0.125);
}

TEST(Constraint, ObservationAlgebra) {
    const Grid g = Grid::unit(1, 8);
    Observation a = Observation::zeros(g, trapezoid_weights(uniform_times(1.0, 4)));
    for (std::size_t n = 0; n < a.size(); ++n) {
        a.rho[n] = ScalarField(g, 1.0);
        a.u[n] = VectorField(g);
        for (std::size_t i = 0; i < 8; ++i) a.u[n].at(0, i) = 2.0;
    }
    // sum_n w_n (1 + 4) over a unit domain
    EXPECT_NEAR(inner(a, a), 5.0, 1e-14);
    EXPECT_NEAR(norm(a - a), 0.0, 0.0);
    a *= 2.0;
    EXPECT_NEAR(norm(a), 2 * std::sqrt(5.0), 1e-14);
}

TEST(ConstraintProperty, KernelIsSymmetricAndPreservesConstantsInTheInterior) {
    std::mt19937_64 rng(41);
    for (int dim = 1; dim <= 2; ++dim) {
        const Grid g = Grid::unit(dim, 10);
        for (int trial = 0; trial < 10; ++trial) {
            const ScalarField a = lcns::testing::random_scalar(g, rng), b = lcns::testing::random_scalar(g, rng);
            EXPECT_NEAR(inner(kernel_average(a, 0.1), b), inner(a, kernel_average(b, 0.1)), 1e-14);
        }
    }
    EXPECT_THROW(kernel_average(ScalarField(Grid::unit(1, 8)), 0.0), Error);
}

TEST(ConstraintProperty, ObserveAdjointIsTheTranspose) {
    std::mt19937_64 rng(42);
    const Grid g = Grid::unit(2, 6);
    for (auto kind : {ObservableKind::IdentityScaling, ObservableKind::KernelAverage}) {
        ConstraintSpec s;
        s.observable = kind;
        s.c_rho = 0.7;
        s.c_u = 1.3;
        const StateTrajectory y = random_traj(g, 5, 1.0, rng);
        const Observation a = random_obs(g, 5, rng);
        const Observation Fy = observe(s, y);
        const Observation Fa = observe_adjoint(s, a);
        double rhs = 0.0;
        for (std::size_t n = 0; n < 5; ++n) rhs += a.weight[n] * (inner(y.rho[n], Fa.rho[n]) + inner(y.u[n], Fa.u[n]));
        EXPECT_NEAR(inner(Fy, a), rhs, 1e-13);
    }
}

TEST(Constraint, BoxFunctionalsAreOrthonormal) {
    const Grid g = Grid::unit(2, 6);
    const auto psi = box_functionals(g, trapezoid_weights(uniform_times(0.5, 4)));
    ASSERT_EQ(psi.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(inner(psi[k], psi[l]), k == l ? 1.0 : 0.0, 1e-14);
}

TEST(ConstraintProperty, DistanceIsOneLipschitzAndConvex) {
    std::mt19937_64 rng(43);
    const Grid g = Grid::unit(1, 6);
    const Observation c = random_obs(g, 4, rng);
    for (const ConstraintSpec& s : {ball_around(c, 0.5), box_spec(1)}) {
        for (int trial = 0; trial < 100; ++trial) {
            const Observation x = random_obs(g, 4, rng, 2.0), y = random_obs(g, 4, rng, 2.0);
            const double dx = distance_to_W(s, x), dy = distance_to_W(s, y);
            EXPECT_LE(std::abs(dx - dy), norm(x - y) * (1 + 1e-12));
            // Projection lands in W and realizes the distance.
            const Observation px = project_to_W(s, x);
            EXPECT_LE(distance_to_W(s, px), 1e-12);
            EXPECT_NEAR(norm(x - px), dx, 1e-12 * (1 + dx));
            // Subgradient inequality of a convex function.
            const Observation eta = subgradient_dW(s, x);
            Observation diff = y - x;
            EXPECT_GE(dy, dx + inner(eta, diff) - 1e-12);
            if (dx > 0) EXPECT_NEAR(norm(eta), 1.0, 1e-12);
            else EXPECT_EQ(norm(eta), 0.0);
        }
    }
}

TEST(Constraint, BallGeometry) {
    std::mt19937_64 rng(44);
    const Grid g = Grid::unit(1, 6);
    const Observation c = random_obs(g, 3, rng);
    const ConstraintSpec s = ball_around(c, 0.25);
    EXPECT_EQ(distance_to_W(s, c), 0.0);
    Observation far = c;
    far.rho[0][0] += 10.0;
    const double r = norm(far - c);
    EXPECT_NEAR(distance_to_W(s, far), r - 0.25, 1e-12);
    const Observation eta = subgradient_dW(s, far);
    EXPECT_NEAR(inner(eta, far - c), r, 1e-12);
    ConstraintSpec whole;
    EXPECT_FALSE(whole.active());
    EXPECT_EQ(distance_to_W(whole, far), 0.0);
}

TEST(ConstraintProperty, SamplesLieInW) {
    std::mt19937_64 rng(45);
    const Grid g = Grid::unit(1, 6);
    const Observation c = random_obs(g, 4, rng);
    for (const ConstraintSpec& s : {ball_around(c, 0.5), box_spec(1)}) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const Observation w = sample_W(s, c, seed, seed % 2 == 0);
            EXPECT_LE(distance_to_W(s, w), 1e-12);
            if (s.set == SetKind::Ball && seed % 2 == 0) EXPECT_NEAR(norm(w - c), 0.5, 1e-12);
        }
        EXPECT_EQ(sample_W(s, c, 3, false).rho[1].values(), sample_W(s, c, 3, false).rho[1].values());
    }
    ConstraintSpec bad = box_spec(1);
    bad.box_lo.pop_back();
    EXPECT_THROW(distance_to_W(bad, c), Error);
}
