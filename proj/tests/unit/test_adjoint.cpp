#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lcns/adjoint.hpp"
#include "lcns/ops.hpp"
#include "lcns/optimize.hpp"
#include "support.hpp"

using namespace lcns;
using lcns::testing::rest_base;

namespace {

double cost_at(const Problem& p, const ControlField& U) {
    const StateTrajectory y = solve_linearized(*p.base, U, p.rho0, p.u0);
    return evaluate_cost(y, U, p.targets).J;
}

Problem tracking_problem(const BaseState& b, std::mt19937_64& rng) {
    Problem p;
    p.base = &b;
    const Grid& g = b.grid();
    p.rho0 = lcns::testing::random_scalar(g, rng, 0.1);
    p.u0 = lcns::testing::random_vector(g, rng, true, 0.1);
    p.targets = Targets::zero(g, b.times().size());
    for (std::size_t n = 0; n < b.times().size(); ++n) {
        p.targets.u_d[n] = lcns::testing::random_vector(g, rng, true);
        p.targets.rho_d[n] = lcns::testing::random_scalar(g, rng);
    }
    return p;
}

}  // namespace

TEST(Adjoint, NoSourcesGiveZero) {
    const BaseState b = rest_base(1, 16, 0.25, 16);
    std::mt19937_64 rng(71);
    const Problem p = tracking_problem(b, rng);
    const StateTrajectory y = solve_linearized(b, lcns::testing::random_control(b.grid(), 16, b.dt(), 10, rng), p.rho0, p.u0);
    AdjointSources src;
    src.lambda_mult = 0.0;
    src.targets = &p.targets;
    for (AdjointMode m : {AdjointMode::ExactTranspose, AdjointMode::Continuous}) {
        AdjointOptions o;
        o.mode = m;
        const AdjointTrajectory a = solve_adjoint(b, y, src, o);
        for (std::size_t n = 0; n < a.size(); ++n) {
            EXPECT_EQ(norm_max(a.sigma[n]), 0.0);
            EXPECT_EQ(norm_max(a.xi[n]), 0.0);
        }
    }
}

TEST(Adjoint, TerminalDataAndReducedGradientIdentities) {
    const BaseState b = rest_base(1, 16, 0.25, 16);
    std::mt19937_64 rng(72);
    const Problem p = tracking_problem(b, rng);
    const ControlField U = lcns::testing::random_control(b.grid(), 16, b.dt(), 10, rng);
    const StateTrajectory y = solve_linearized(b, U, p.rho0, p.u0);
    AdjointSources src;
    src.targets = &p.targets;
    const AdjointTrajectory a = solve_adjoint(b, y, src);
    EXPECT_EQ(norm_max(a.sigma.back()), 0.0);
    EXPECT_EQ(norm_max(a.xi.back()), 0.0);

    // xi = 0 gives g = lambda U.
    AdjointTrajectory zero = a;
    for (auto& x : zero.xi) x *= 0.0;
    const ControlField g0 = reduced_gradient(U, zero, b, 0.5);
    ControlField half = U;
    half *= 0.5;
    EXPECT_EQ(norm_max((g0 - half)[3]), 0.0);

    // U = xi / rho~ with lambda = 1 gives g = 0.
    ControlField Ux = U;
    for (std::size_t n = 0; n < U.samples(); ++n) {
        Ux[n] = a.xi[n];
        Ux[n].divide_by(b.at(n).rho);
        Ux[n].set_no_slip(false);
    }
    EXPECT_EQ(reduced_gradient(Ux, a, b, 1.0).norm(), 0.0);
}

TEST(AdjointProperty, ExactTransposeGradientMatchesQuadraticDifferences) {
    // J is quadratic in U, so central differences are exact up to rounding.
    std::mt19937_64 rng(73);
    FamilySpec fs;
    fs.name = "density_wave";
    fs.amplitude = 0.5;
    const BaseState dw = make_family(fs, Grid::unit(1, 16), FluidParams::make(0.5, 0.1), uniform_times(0.25, 16));
    fs.name = "taylor";
    fs.omega = std::numbers::pi;
    const BaseState ty = make_family(fs, Grid::unit(2, 6), FluidParams::make(0.1, 0.05), uniform_times(0.125, 8));
    for (const BaseState* b : {&dw, &ty}) {
        const Problem p = tracking_problem(*b, rng);
        const ControlField U = lcns::testing::random_control(b->grid(), b->steps(), b->dt(), 10, rng);
        OptimizeOptions o;
        const Evaluation ev = evaluate(p, U, false, 0.0, 0.0, o);
        for (int k = 0; k < 4; ++k) {
            const ControlField d = lcns::testing::random_control(b->grid(), b->steps(), b->dt(), 10, rng);
            ControlField up = U, um = U;
            up.axpy(1.0, d);
            um.axpy(-1.0, d);
            const double fd = 0.5 * (cost_at(p, up) - cost_at(p, um));
            const double gd = inner(ev.gradient, d);
            EXPECT_NEAR(gd, fd, 1e-8 * ev.gradient.norm() * d.norm());
        }
    }
}

TEST(Adjoint, ContinuousModeMatchesSeparatedVariablesMode) {
    // Rest base, zero state, u_d = sin(pi x): xi = a(t) sin(pi x), sigma = b(t) cos(pi x) with
    // -b' = pi a and -a' = -pi b - kappa pi^2 a + 1, a(T) = b(T) = 0, kappa = 2 mu + lam.
    const double pi = std::numbers::pi;
    const int n = 64, N = 2048;
    const double T = 0.5, mu = 0.1;
    const BaseState base = rest_base(1, n, T, N, mu, 0.0);
    const Grid& g = base.grid();
    const double kappa = 2 * mu + base.params().lam;
    Targets t = Targets::zero(g, N + 1);
    for (auto& u : t.u_d)
        for (int i = 0; i < n; ++i) u.at(0, i) = std::sin(pi * g.center(0, i));
    const StateTrajectory y = solve_linearized(base, ControlField(g, N, base.dt(), 1.0), ScalarField(g), VectorField(g, true));
    AdjointSources src;
    src.targets = &t;
    AdjointOptions o;
    o.mode = AdjointMode::Continuous;
    const AdjointTrajectory adj = solve_adjoint(base, y, src, o);

    // RK4 in reversed time s = T - t with 20 substeps per interval.
    auto rhs = [&](double a, double b, double& da, double& db) {
        da = -pi * b - kappa * pi * pi * a + 1.0;
        db = pi * a;
    };
    double a = 0.0, b = 0.0, err2 = 0.0, ref2 = 0.0;
    const int sub = 20;
    const double k = base.dt() / sub;
    for (int m = N; m-- > 0;) {
        for (int s = 0; s < sub; ++s) {
            double a1, b1, a2, b2, a3, b3, a4, b4;
            rhs(a, b, a1, b1);
            rhs(a + 0.5 * k * a1, b + 0.5 * k * b1, a2, b2);
            rhs(a + 0.5 * k * a2, b + 0.5 * k * b2, a3, b3);
            rhs(a + k * a3, b + k * b3, a4, b4);
            a += k / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
            b += k / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
        }
        for (int i = 0; i < n; ++i) {
            const double ex = a * std::sin(pi * g.center(0, i));
            const double d = adj.xi[m].at(0, i) - ex;
            err2 += d * d;
            ref2 += ex * ex;
        }
    }
    EXPECT_LE(std::sqrt(err2 / ref2), 1e-3);
}
