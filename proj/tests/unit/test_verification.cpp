#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"
#include "lcns/verification.hpp"
#include "support.hpp"

using namespace lcns;
using lcns::testing::rest_base;

namespace {

AdjointTrajectory random_adjoint(const BaseState& b, std::mt19937_64& rng, double amp) {
    AdjointTrajectory a;
    a.times = b.times();
    for (std::size_t n = 0; n < a.times.size(); ++n) {
        a.sigma.push_back(lcns::testing::random_scalar(b.grid(), rng, amp));
        a.xi.push_back(lcns::testing::random_vector(b.grid(), rng, true, amp));
    }
    return a;
}

ControlField interior_optimum(const BaseState& b, const AdjointTrajectory& a, double R) {
    ControlField U(b.grid(), b.steps(), b.dt(), R);
    for (std::size_t n = 0; n < U.samples(); ++n) {
        U[n] = a.xi[n];
        U[n].divide_by(b.at(n).rho);
        U[n].set_no_slip(false);
    }
    return U;
}

}  // namespace

TEST(Pontryagin, ZeroAdjointAndZeroControlGiveEquality) {
    const BaseState b = rest_base(1, 8, 0.25, 8);
    std::mt19937_64 rng(81);
    AdjointTrajectory a = random_adjoint(b, rng, 0.0);
    const CertificateReport r = check_pontryagin(ControlField(b.grid(), 8, b.dt(), 1.0), a, b, 1.0);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.get("Phi_star"), 0.0);
    EXPECT_EQ(r.get("Phi_dagger"), 0.0);
    EXPECT_EQ(r.get("max_excess"), 0.0);
}

TEST(Pontryagin, InteriorOptimumMatchesAnalyticMinimizer) {
    FamilySpec fs;
    fs.name = "density_wave";
    const BaseState b = make_family(fs, Grid::unit(1, 16), FluidParams::make(1, 0), uniform_times(0.25, 8));
    std::mt19937_64 rng(82);
    const AdjointTrajectory a = random_adjoint(b, rng, 0.1);
    const ControlField U = interior_optimum(b, a, 10.0);
    const CertificateReport r = check_pontryagin(U, a, b, 1.0);
    EXPECT_TRUE(r.pass) << r.violation;
    EXPECT_NEAR(r.get("Phi_star"), r.get("Phi_dagger"), 1e-15);
    EXPECT_LE(r.get("dagger_sanity_excess"), 0.0);
}

TEST(Pontryagin, SuboptimalControlFailsWithSample) {
    const BaseState b = rest_base(1, 8, 0.25, 8);
    std::mt19937_64 rng(83);
    const AdjointTrajectory a = random_adjoint(b, rng, 1.0);
    const CertificateReport r = check_pontryagin(ControlField(b.grid(), 8, b.dt(), 10.0), a, b, 1.0);
    EXPECT_FALSE(r.pass);
    EXPECT_GT(r.get("max_excess"), 0.0);
    EXPECT_NE(r.violation.find("undercuts"), std::string::npos);
}

TEST(Pontryagin, AbnormalMultiplierIsReported) {
    const BaseState b = rest_base(1, 8, 0.25, 8);
    std::mt19937_64 rng(84);
    const AdjointTrajectory a = random_adjoint(b, rng, 1.0);
    try {
        check_pontryagin(ControlField(b.grid(), 8, b.dt(), 1.0), a, b, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateMultiplier);
    }
}

TEST(NormalCone, InactiveAndActiveCases) {
    const Grid g = Grid::unit(1, 8);
    const auto w = trapezoid_weights(uniform_times(0.5, 4));
    Observation x = Observation::zeros(g, w);
    for (std::size_t n = 0; n < x.size(); ++n) x.rho[n] = ScalarField(g, 1.0);
    ConstraintSpec none;
    const CertificateReport r0 = check_normal_cone(none, x, Observation::zeros(g, w), 50, 1, 1e-6);
    EXPECT_TRUE(r0.pass);
    EXPECT_EQ(r0.get("max_pairing"), 0.0);

    ConstraintSpec ball;
    ball.set = SetKind::Ball;
    ball.center = Observation::zeros(g, w);
    ball.radius = 0.25;
    Observation a = subgradient_dW(ball, x);
    const CertificateReport r1 = check_normal_cone(ball, x, a, 100, 2, 1e-6);
    EXPECT_TRUE(r1.pass) << r1.violation;
    EXPECT_LT(r1.get("max_pairing"), 0.0);

    // Wrong sign: pairings become positive.
    a *= -1.0;
    const CertificateReport r2 = check_normal_cone(ball, x, a, 100, 2, 1e-6);
    EXPECT_FALSE(r2.pass);
    EXPECT_FALSE(r2.violation.empty());

    // Feasible x paired with itself vanishes.
    ball.radius = 10.0;
    const CertificateReport r3 = check_normal_cone(ball, x, Observation::zeros(g, w), 10, 3, 0.0);
    EXPECT_TRUE(r3.pass);
}

TEST(Sensitivity, VanishesBeforeTauAndWhenWEqualsU) {
    const BaseState b = rest_base(1, 16, 0.5, 32, 0.5);
    std::mt19937_64 rng(85);
    const ControlField U = lcns::testing::random_control(b.grid(), 32, b.dt(), 100.0, rng);
    const double tau = 16 * b.dt();
    const SensitivityPair same = solve_sensitivity(b, tau, U[15], U);
    for (std::size_t n = 0; n < same.v.size(); ++n) EXPECT_EQ(norm_max(same.v[n]), 0.0);

    const VectorField W1 = lcns::testing::random_vector(b.grid(), rng), W2 = lcns::testing::random_vector(b.grid(), rng);
    const SensitivityPair s1 = solve_sensitivity(b, tau, W1, U);
    const SensitivityPair s2 = solve_sensitivity(b, tau, W2, U);
    const SensitivityPair s12 = solve_sensitivity(b, tau, W1 + W2 - U[15], U);
    EXPECT_EQ(s1.tau_node, 16u);
    for (std::size_t n = 0; n < 16; ++n) {
        EXPECT_EQ(norm_max(s1.v[n]), 0.0);
        EXPECT_EQ(norm_max(s1.z[n]), 0.0);
    }
    EXPECT_EQ(norm_max(s1.z[16]), 0.0);
    for (std::size_t n = 16; n < s1.v.size(); ++n)
        EXPECT_LE(norm_l2(s12.v[n] - s1.v[n] - s2.v[n]), 1e-10 * (1 + norm_l2(s12.v[n])));
}

TEST(Sensitivity, RestBaseSingleModeMatchesSeparatedVariables) {
    // v = a(t) sin(pi x), z = b(t) cos(pi x): a' = pi b - kappa pi^2 a, b' = -pi a, a(tau) = 1, b(tau) = 0.
    const double pi = std::numbers::pi;
    const int n = 64, N = 2048;
    const BaseState base = rest_base(1, n, 0.5, N, 0.1);
    const Grid& g = base.grid();
    const double kappa = 2 * 0.1 + base.params().lam;
    const ControlField U(g, N, base.dt(), 10.0);
    VectorField W(g);
    for (int i = 0; i < n; ++i) W.at(0, i) = std::sin(pi * g.center(0, i));
    const std::size_t k = N / 2;
    const SensitivityPair s = solve_sensitivity(base, k * base.dt(), W, U);
    double a = 1.0, b = 0.0, err2 = 0.0, ref2 = 0.0;
    const int sub = 20;
    const double h = base.dt() / sub;
    auto rhs = [&](double a_, double b_, double& da, double& db) {
        da = pi * b_ - kappa * pi * pi * a_;
        db = -pi * a_;
    };
    for (std::size_t m = k; m < static_cast<std::size_t>(N); ++m) {
        for (int q = 0; q < sub; ++q) {
            double a1, b1, a2, b2, a3, b3, a4, b4;
            rhs(a, b, a1, b1);
            rhs(a + 0.5 * h * a1, b + 0.5 * h * b1, a2, b2);
            rhs(a + 0.5 * h * a2, b + 0.5 * h * b2, a3, b3);
            rhs(a + h * a3, b + h * b3, a4, b4);
            a += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
            b += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
        }
        for (int i = 0; i < n; ++i) {
            const double x = g.center(0, i);
            const double dv = s.v[m + 1].at(0, i) - a * std::sin(pi * x);
            const double dz = s.z[m + 1][i] - b * std::cos(pi * x);
            err2 += dv * dv + dz * dz;
            ref2 += a * a * std::sin(pi * x) * std::sin(pi * x) + b * b * std::cos(pi * x) * std::cos(pi * x);
        }
    }
    EXPECT_LE(std::sqrt(err2 / ref2), 1e-3);
}

TEST(Spike, ConstantSpikeValueIsTrivial) {
    const BaseState b = rest_base(1, 16, 0.5, 32, 0.5);
    ControlField U(b.grid(), 32, b.dt(), 10.0);
    for (auto& v : U.values())
        for (double& x : v.values()) x = 0.3;
    SpikeStudy st;
    st.base = &b;
    st.U = U;
    st.rho0 = ScalarField(b.grid());
    st.u0 = VectorField(b.grid(), true);
    st.tau = 16 * b.dt();
    st.W = U[0];
    st.h_list = {4 * b.dt(), 2 * b.dt(), b.dt()};
    const CertificateReport r = check_spike_convergence(st);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.get("e_max"), 0.0);
    EXPECT_EQ(r.get("pre_spike_max_diff"), 0.0);
    st.h_list = {1.5 * b.dt()};
    EXPECT_THROW(check_spike_convergence(st), Error);
}

TEST(Dependence, ZeroPerturbationIsSkippedAndScalingIsInvariant) {
    const BaseState b = rest_base(1, 16, 0.25, 16, 0.5);
    std::mt19937_64 rng(86);
    DependenceLevel L;
    L.base = &b;
    L.U = lcns::testing::random_control(b.grid(), 16, b.dt(), 10.0, rng);
    L.dU = ControlField(b.grid(), 16, b.dt(), 10.0);
    L.rho0 = ScalarField(b.grid());
    L.u0 = VectorField(b.grid(), true);
    const CertificateReport z = check_continuous_dependence({L}, 4);
    EXPECT_TRUE(z.pass);
    EXPECT_EQ(z.get("ratio_max"), 0.0);
    EXPECT_FALSE(z.note.empty());
    L.dU = lcns::testing::random_control(b.grid(), 16, b.dt(), 10.0, rng);
    const CertificateReport r = check_continuous_dependence({L}, 4);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.get("spread"), 1e-8);
}

TEST(Lame, ZeroForcingAndParameterViolation) {
    const Grid g = Grid::unit(2, 8);
    EXPECT_EQ(norm_max(solve_lame(VectorField(g), 1.0, 0.0)), 0.0);
    for (auto [mu, lam] : {std::pair{1.0, -4.0 / 3.0}, std::pair{1.0, -2.0}, std::pair{0.0, 1.0}}) {
        try {
            check_lame(2, mu, lam);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ParameterViolation);
        }
        EXPECT_THROW(solve_lame(VectorField(g), mu, lam), Error);
    }
}

TEST(Lame, ManufacturedSolutionIsSecondOrder) {
    LameOptions o;
    o.base_cells = 8;
    o.refinements = 2;
    const CertificateReport r = check_lame(2, 1.0, -0.5, o);
    EXPECT_TRUE(r.pass) << r.violation;
    EXPECT_GE(r.get("order"), 1.9);
    EXPECT_EQ(r.table.size(), 3u);
}

TEST(Energy, ZeroTrajectoryCertificate) {
    const BaseState b = rest_base(1, 8, 0.25, 8);
    const StateTrajectory y = solve_linearized(b, ControlField(b.grid(), 8, b.dt(), 1.0), ScalarField(b.grid()),
                                               VectorField(b.grid()));
    const EnergyReport e = energy_monitor(y, b, nullptr);
    const CertificateReport r = check_energy_certificates(e, &e);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.get("identity_residual"), 0.0);
    EXPECT_EQ(r.get("E_max"), 0.0);
}

TEST(GradientRefinement, FactorLogic) {
    CertificateReport c, f;
    c.measured = {{"max_rel_error", 4e-3}};
    f.measured = {{"max_rel_error", 2e-3}};
    EXPECT_TRUE(check_gradient_refinement(c, f, 1e-2).pass);
    f.measured = {{"max_rel_error", 3e-3}};
    EXPECT_FALSE(check_gradient_refinement(c, f, 1e-2).pass);
    c.measured = {{"max_rel_error", 0.0}};
    f.measured = {{"max_rel_error", 0.0}};
    EXPECT_TRUE(check_gradient_refinement(c, f, 1e-2).pass);
    c.measured = {{"max_rel_error", 4e-2}};
    f.measured = {{"max_rel_error", 1e-2}};
    EXPECT_FALSE(check_gradient_refinement(c, f, 1e-2).pass);
}

TEST(Gradient, SmoothDirectionsAreUnitAndSeeded) {
    const Grid g = Grid::unit(2, 6);
    const auto d1 = smooth_directions(g, 8, 0.1, 1.0, 3, 9);
    const auto d2 = smooth_directions(g, 8, 0.1, 1.0, 3, 9);
    ASSERT_EQ(d1.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(d1[k].norm(), 1.0, 1e-14);
        EXPECT_EQ(d1[k][5].values(), d2[k][5].values());
    }
}

TEST(Gradient, ExactModeCertificateOnDensityWave) {
    FamilySpec fs;
    fs.name = "density_wave";
    const BaseState b = make_family(fs, Grid::unit(1, 16), FluidParams::make(0.5, 0), uniform_times(0.25, 16));
    Problem p;
    p.base = &b;
    p.rho0 = ScalarField(b.grid());
    p.u0 = VectorField(b.grid(), true);
    p.targets = Targets::from_expressions("0", {"sin(pi*x)"}, b.grid(), b.times());
    GradientStudy st;
    st.problem = &p;
    st.U = ControlField(b.grid(), 16, b.dt(), 10.0);
    st.directions = smooth_directions(b.grid(), 16, b.dt(), 10.0, 4, 3);
    const CertificateReport r = check_gradient(st);
    EXPECT_TRUE(r.pass) << r.violation;
    EXPECT_LE(r.get("max_rel_error"), 1e-8);
}

TEST(EkelandMetric, SeededSpikesSatisfyIdentities) {
    std::mt19937_64 rng(87);
    const Grid g = Grid::unit(1, 8);
    const ControlField U = project_to_ball(lcns::testing::random_control(g, 64, 1.0 / 64, 1.0, rng));
    const CertificateReport r = check_ekeland_metric(U, 20, 5);
    EXPECT_TRUE(r.pass) << r.violation;
    EXPECT_EQ(r.get("max_dE_error"), 0.0);
    EXPECT_LE(r.get("max_distance_ratio"), 1.0);
    EXPECT_EQ(r.table.size(), 20u);
}

TEST(Reports, JsonIsSortedAndDeterministic) {
    CertificateReport a, b;
    a.name = "zeta";
    a.measured = {{"x", 0.1}};
    b.name = "alpha";
    b.pass = false;
    b.violation = "sample 3 has pairing 2";
    const std::string j1 = to_json({a, b}), j2 = to_json({a, b});
    EXPECT_EQ(j1, j2);
    EXPECT_LT(j1.find("alpha"), j1.find("zeta"));
    EXPECT_NE(j1.find("\"all_pass\": false"), std::string::npos);
    const std::string s = summary({a, b});
    EXPECT_EQ(s.rfind("FAIL alpha", 0), 0u);
    EXPECT_NE(s.find("violation: sample 3"), std::string::npos);
    EXPECT_THROW(a.get("missing"), Error);
    EXPECT_DOUBLE_EQ(default_tolerance(Grid::unit(1, 10), 0.01), 10 * (0.01 + 0.01));
    EXPECT_DOUBLE_EQ(default_tolerance(Grid::unit(1, 100000), 1e-12), 1e-8);
}
