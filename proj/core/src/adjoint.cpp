#include "lcns/adjoint.hpp"

#include <string>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

AdjointTrajectory solve_adjoint(const BaseState& base, const StateTrajectory& state, const AdjointSources& src,
                                const AdjointOptions& opts) {
    const Grid& g = base.grid();
    const std::size_t N = base.steps();
    if (state.start_node != 0 || state.size() != N + 1)
        raise(ErrorKind::GridMismatch, "adjoint needs a full state trajectory on the base time grid");
    if (src.targets && (src.targets->rho_d.size() != N + 1 || src.targets->u_d.size() != N + 1))
        raise(ErrorKind::GridMismatch, "targets do not match the time grid");
    if (src.constraint_source && src.constraint_source->size() != N + 1)
        raise(ErrorKind::GridMismatch, "constraint source does not match the time grid");
    require_same_grid(state.rho.front().grid(), g, "solve_adjoint");

    const bool exact = opts.mode == AdjointMode::ExactTranspose;
    const auto weights = trapezoid_weights(base.times());
    const std::size_t cells = g.cells();
    const int d = g.dim;
    const double lm = src.lambda_mult;

    AdjointTrajectory adj;
    adj.times = base.times();
    adj.sigma.assign(N + 1, ScalarField(g));
    adj.xi.assign(N + 1, VectorField(g, true));

    for (std::size_t n = N; n-- > 0;) {
        const std::size_t m = n + 1;
        const BaseSlot& b = base.at(m);
        const double dt = base.times()[m] - base.times()[n];
        const double w = exact ? weights[m] / dt : 1.0;
        const ScalarField& sig = adj.sigma[m];
        const VectorField& xi = adj.xi[m];

        // Source terms at node m.
        ScalarField s_rho(g);
        VectorField s_u(g, true);
        if (lm != 0.0 && src.targets) {
            s_rho.axpy(lm * w, src.targets->rho_d[m] - state.rho[m]);
            s_u.axpy(lm * w, src.targets->u_d[m] - state.u[m]);
        }
        if (src.constraint_source) {
            s_rho.axpy(-w, src.constraint_source->rho[m]);
            s_u.axpy(-w, src.constraint_source->u[m]);
        }

        // sigma^n
        VectorField v = xi;
        v.divide_by(b.rho);
        ScalarField ds = upwind_transport_transpose(b.u, sig);
        ds *= -1.0;
        const ScalarField divv = exact ? div_adjoint(v, Edge::OneSided) : div(v, Edge::Odd);
        for (std::size_t k = 0; k < cells; ++k) {
            double fa = 0.0;
            for (int c = 0; c < d; ++c) fa += v.at(c, k) * (b.f.at(c, k) - b.accel.at(c, k));
            ds[k] += fa + b.pprime[k] * divv[k] + s_rho[k];
        }
        adj.sigma[n] = sig;
        adj.sigma[n].axpy(dt, ds);

        // xi^n: explicit part, then the implicit viscous solve with the base at t_n.
        const VectorField gs = exact ? grad_adjoint(sig, Edge::Odd) : grad(sig, Edge::OneSided);
        const Edge flux_edge = exact ? Edge::Even : Edge::Odd;
        VectorField dx = velocity_gradient_transpose(b, xi);
        dx *= -1.0;
        std::vector<double> prod(cells), tmp(cells);
        for (int i = 0; i < d; ++i) {
            double* out = dx.comp(i);
            for (int j = 0; j < d; ++j) {
                for (std::size_t k = 0; k < cells; ++k) prod[k] = xi.at(i, k) * b.u.at(j, k);
                apply_d1(g, j, flux_edge, prod.data(), tmp.data());
                for (std::size_t k = 0; k < cells; ++k) out[k] += tmp[k];
            }
            for (std::size_t k = 0; k < cells; ++k) out[k] += b.rho[k] * gs.at(i, k) + s_u.at(i, k);
        }
        VectorField rhs = xi;
        rhs.axpy(dt, dx);
        const BaseSlot& bn = base.at(n);
        VectorField wsol = solve_viscous(&bn.rho, dt, base.params().mu, base.params().lam, rhs, opts.cg);
        wsol.scale_by(bn.rho);
        adj.xi[n] = std::move(wsol);
        if (!adj.sigma[n].all_finite() || !adj.xi[n].all_finite())
            raise(ErrorKind::NonFiniteState, "adjoint became non-finite at t = " + std::to_string(base.times()[n]));
    }
    return adj;
}

ControlField reduced_gradient(const ControlField& control, const AdjointTrajectory& adj, const BaseState& base,
                              double lambda_mult) {
    if (adj.size() != control.samples() + 1)
        raise(ErrorKind::GridMismatch, "adjoint and control time grids differ");
    require_same_grid(control.grid(), base.grid(), "reduced_gradient");
    ControlField g = control;
    for (std::size_t n = 0; n < control.samples(); ++n) {
        VectorField v = adj.xi[n];
        v.divide_by(base.at(n).rho);
        v.set_no_slip(false);
        g[n] *= lambda_mult;
        g[n] -= v;
    }
    return g;
}

}  // namespace lcns
