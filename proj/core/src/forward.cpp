#include "lcns/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

double cfl_bound(const BaseState& base, double cfl) {
    const Grid& g = base.grid();
    double hmin = g.h[0];
    for (int a = 1; a < g.dim; ++a) hmin = std::min(hmin, g.h[a]);
    return cfl * hmin / std::max(base.u_max(), 1.0);
}

void check_cfl(const BaseState& base, double dt, double cfl) {
    const double bound = cfl_bound(base, cfl);
    if (dt > bound * (1.0 + 1e-12))
        raise(ErrorKind::CflViolation, "dt = " + std::to_string(dt) + " exceeds the CFL bound " +
                                           std::to_string(bound) + " (cfl = " + std::to_string(cfl) + ")");
}

namespace {

// Visits interior faces along each axis: f(left, right, face_speed, 1/h).
template <class F>
void for_each_face(const VectorField& a, F&& f) {
    const Grid& g = a.grid();
    for (int ax = 0; ax < g.dim; ++ax) {
        const std::size_t s = g.stride(ax);
        const std::size_t n = static_cast<std::size_t>(g.n[ax]);
        const std::size_t outer = g.cells() / (n * s);
        const double inv_h = 1.0 / g.h[ax];
        const double* v = a.comp(ax);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < s; ++i) {
                const std::size_t b = o * n * s + i;
                for (std::size_t k = 0; k + 1 < n; ++k) {
                    const std::size_t l = b + k * s, r = l + s;
                    f(l, r, 0.5 * (v[l] + v[r]), inv_h);
                }
            }
    }
}

}  // namespace

ScalarField upwind_transport(const VectorField& a, const ScalarField& rho) {
    require_same_grid(a.grid(), rho.grid(), "upwind_transport");
    ScalarField out(rho.grid());
    for_each_face(a, [&](std::size_t l, std::size_t r, double s, double ih) {
        const double flux = (s > 0.0 ? s * rho[l] : s * rho[r]) * ih;
        out[l] += flux;
        out[r] -= flux;
    });
    return out;
}

ScalarField upwind_transport_transpose(const VectorField& a, const ScalarField& sig) {
    require_same_grid(a.grid(), sig.grid(), "upwind_transport_transpose");
    ScalarField out(sig.grid());
    for_each_face(a, [&](std::size_t l, std::size_t r, double s, double ih) {
        const double w = s * ih * (sig[l] - sig[r]);
        out[s > 0.0 ? l : r] += w;
    });
    return out;
}

VectorField velocity_gradient_action(const BaseSlot& b, const VectorField& u) {
    const Grid& g = u.grid();
    const int d = g.dim;
    VectorField r(g, u.no_slip());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const ScalarField& gij = b.grad_u[i * d + j];
            double* out = r.comp(i);
            const double* in = u.comp(j);
            for (std::size_t k = 0; k < g.cells(); ++k) out[k] += gij[k] * in[k];
        }
    return r;
}

VectorField velocity_gradient_transpose(const BaseSlot& b, const VectorField& w) {
    const Grid& g = w.grid();
    const int d = g.dim;
    VectorField r(g, w.no_slip());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const ScalarField& gij = b.grad_u[i * d + j];
            double* out = r.comp(j);
            const double* in = w.comp(i);
            for (std::size_t k = 0; k < g.cells(); ++k) out[k] += gij[k] * in[k];
        }
    return r;
}

VectorField convect(const BaseSlot& b, const VectorField& u) {
    const Grid& g = u.grid();
    const std::size_t n = g.cells();
    VectorField r(g, u.no_slip());
    std::vector<double> tmp(n);
    for (int i = 0; i < g.dim; ++i)
        for (int j = 0; j < g.dim; ++j) {
            apply_d1(g, j, Edge::Odd, u.comp(i), tmp.data());
            const double* uj = b.u.comp(j);
            double* out = r.comp(i);
            for (std::size_t k = 0; k < n; ++k) out[k] += uj[k] * tmp[k];
        }
    return r;
}

void forward_step(const BaseState& base, std::size_t n, const ScalarField& rho, const VectorField& u,
                  const VectorField* U, ScalarField& rho_next, VectorField& u_next, const CgOptions& cg,
                  CgResult* info) {
    const BaseSlot& b = base.at(n);
    const double dt = base.times()[n + 1] - base.times()[n];
    const Grid& g = base.grid();
    const std::size_t cells = g.cells();
    const int d = g.dim;

    // Mass: explicit upwind transport plus coupling.
    ScalarField drho = upwind_transport(b.u, rho);
    drho += div(pointwise(b.rho, u), Edge::Odd);
    rho_next = rho;
    rho_next.axpy(-dt, drho);

    // Momentum: explicit terms into rho~ * rhs, then the implicit viscous solve.
    VectorField expl = velocity_gradient_action(b, u);
    expl += convect(b, u);
    VectorField rhs(g, true);
    ScalarField prho = pointwise(b.pprime, rho);
    const VectorField gp = grad(prho, Edge::OneSided);
    for (int c = 0; c < d; ++c)
        for (std::size_t k = 0; k < cells; ++k) {
            const double r = b.rho[k];
            double val = r * (u.at(c, k) - dt * expl.at(c, k));
            val -= dt * (gp.at(c, k) + rho[k] * (b.accel.at(c, k) - b.f.at(c, k)));
            if (U) val += dt * U->at(c, k);
            rhs.at(c, k) = val;
        }
    u_next = solve_viscous(&b.rho, dt, base.params().mu, base.params().lam, rhs, cg, info);
}

StateTrajectory solve_linearized(const BaseState& base, const ControlField& control, const ScalarField& rho0,
                                 const VectorField& u0, const ForwardOptions& opts) {
    const Grid& g = base.grid();
    require_same_grid(rho0.grid(), g, "solve_linearized rho0");
    require_same_grid(u0.grid(), g, "solve_linearized u0");
    const std::size_t N = base.steps();
    if (!opts.zero_control) {
        require_same_grid(control.grid(), g, "solve_linearized control");
        if (control.samples() != N)
            raise(ErrorKind::GridMismatch, "control has " + std::to_string(control.samples()) +
                                               " samples but the time grid has " + std::to_string(N) + " steps");
    }
    if (opts.start_node > N) raise(ErrorKind::InvalidArgument, "start node beyond final time");
    check_cfl(base, base.dt(), opts.cfl);
    if (!rho0.all_finite() || !u0.all_finite()) raise(ErrorKind::NonFiniteState, "initial data is not finite");

    StateTrajectory tr;
    tr.start_node = opts.start_node;
    const std::size_t len = N - opts.start_node + 1;
    tr.times.assign(base.times().begin() + static_cast<long>(opts.start_node), base.times().end());
    tr.rho.reserve(len);
    tr.u.reserve(len);
    tr.rho.push_back(rho0);
    VectorField u_init = u0;
    u_init.set_no_slip(true);
    tr.u.push_back(u_init);
    for (std::size_t n = opts.start_node; n < N; ++n) {
        ScalarField rn;
        VectorField un;
        CgResult info;
        const VectorField* U = opts.zero_control ? nullptr : &control[n];
        forward_step(base, n, tr.rho.back(), tr.u.back(), U, rn, un, opts.cg, &info);
        if (!rn.all_finite() || !un.all_finite())
            raise(ErrorKind::NonFiniteState, "state became non-finite at t = " + std::to_string(base.times()[n + 1]));
        tr.cg_iterations.push_back(info.iterations);
        tr.max_cg_residual = std::max(tr.max_cg_residual, info.rel_residual);
        tr.rho.push_back(std::move(rn));
        tr.u.push_back(std::move(un));
    }
    return tr;
}

double dissipation(const VectorField& u, const FluidParams& p) {
    VectorField w = u;
    w.set_no_slip(true);
    return -inner(w, stress_div(w, p));
}

double full_energy(const ScalarField& rho, const VectorField& u, const FluidParams& p) {
    const VectorField gr = grad(rho, Edge::OneSided);
    return 0.5 * (inner(rho, rho) + inner(gr, gr) + inner(u, u) + dissipation(u, p));
}

double groenwall_rate(const CoefficientNorms& c, const BaseState& base) {
    const FluidParams& fp = base.params();
    const double mu_eff = std::min(fp.mu, fp.mu + fp.lam);
    const double m = base.m(), M = base.M();
    const double A = c.grad_u_linf + c.accel_l3 + c.f_l3 + c.grad_div_u_l3 + c.hess_rho_l3 + c.grad_rho_linf;
    const double B1 = (M + c.grad_rho_linf) * (M + c.grad_rho_linf) * (1.0 + 1.0 / mu_eff) / std::min(1.0, m);
    const double B2 = (c.pprime_linf + c.grad_pprime_l3) * (c.pprime_linf + c.grad_pprime_l3) * (1.0 + 1.0 / m);
    return 2.0 * (1.0 + A + B1 + B2);
}

namespace {

double weighted_energy(const ScalarField& rho, const VectorField& u, const ScalarField& rho_t) {
    const VectorField gr = grad(rho, Edge::OneSided);
    return 0.5 * (inner(rho, rho) + inner(gr, gr) + inner(pointwise(rho_t, u), u));
}

// I_1..I_14 at one level; see the energy section of the README for the pairing of each term.
std::array<double, EnergyReport::kTerms> identity_terms(const BaseSlot& b, const FluidParams&, const ScalarField& rho,
                                                        const VectorField& u, const VectorField* U) {
    const Grid& g = rho.grid();
    const int d = g.dim;
    const std::size_t cells = g.cells();
    const double vol = g.cell_volume();
    std::array<double, EnergyReport::kTerms> I{};
    const VectorField ru = pointwise(b.rho, u);

    I[0] = -inner(ru, velocity_gradient_action(b, u)) - inner(ru, convect(b, u)) +
           0.5 * inner(pointwise(b.dt_rho, u), u);
    I[1] = -inner(u, pointwise(rho, b.accel));
    I[2] = inner(u, pointwise(rho, b.f)) + (U ? inner(u, *U) : 0.0);
    I[3] = -inner(u, grad(pointwise(b.pprime, rho), Edge::OneSided));
    const ScalarField Trho = upwind_transport(b.u, rho);
    I[4] = -inner(rho, Trho);
    const ScalarField divu = div(u, Edge::Odd);
    const ScalarField Dru = div(ru, Edge::Odd);
    I[5] = -inner(rho, pointwise(b.rho, divu));
    I[6] = -inner(rho, Dru - pointwise(b.rho, divu));

    const VectorField Gr = grad(rho, Edge::OneSided);
    const VectorField GT = grad(Trho, Edge::OneSided);
    const VectorField GD = grad(Dru, Edge::OneSided);
    std::vector<ScalarField> du;  // du[k * d + j] = d_k u_j
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) du.push_back(partial(u.component(j), k, Edge::Odd));
    double i9 = 0, i10 = 0, i11 = 0, i13 = 0, i14 = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        double gdotgr = 0.0;
        for (int i = 0; i < d; ++i) {
            const double gi = Gr.at(i, c);
            i9 += rho[c] * gi * b.grad_div_u.at(i, c);
            gdotgr += gi * b.grad_rho.at(i, c);
            for (int j = 0; j < d; ++j) {
                i10 += gi * Gr.at(j, c) * b.grad_u[i * d + j][c];
                i13 += gi * u.at(j, c) * b.hess_rho[i * d + j][c];
                i14 += gi * b.grad_rho.at(j, c) * du[i * d + j][c];
            }
        }
        i11 += gdotgr * divu[c];
    }
    I[8] = -i9 * vol;
    I[9] = -i10 * vol;
    I[7] = -inner(Gr, GT) - I[8] - I[9];
    I[10] = -i11 * vol;
    I[12] = -i13 * vol;
    I[13] = -i14 * vol;
    I[11] = -inner(Gr, GD) - I[10] - I[12] - I[13];
    return I;
}

}  // namespace

EnergyReport energy_monitor(const StateTrajectory& traj, const BaseState& base, const ControlField* control) {
    EnergyReport rep;
    const FluidParams& fp = base.params();
    const std::size_t len = traj.size();
    const std::size_t s0 = traj.start_node;
    rep.C_E = 4.0 * std::max(1.0, 1.0 / base.m());
    rep.t = traj.times;
    rep.E.resize(len);
    rep.E_weighted.resize(len);
    rep.dissipation.resize(len);
    rep.cumulative_dissipation.assign(len, 0.0);
    rep.identity_residual.assign(len, 0.0);
    rep.groenwall_bound.resize(len);
    rep.terms.assign(len, {});
    for (std::size_t k = 0; k < len; ++k) {
        const BaseSlot& b = base.at(s0 + k);
        rep.E[k] = full_energy(traj.rho[k], traj.u[k], fp);
        rep.E_weighted[k] = weighted_energy(traj.rho[k], traj.u[k], b.rho);
        rep.dissipation[k] = dissipation(traj.u[k], fp);
    }
    std::vector<double> rate(len);
    if (base.steady()) {
        std::fill(rate.begin(), rate.end(), groenwall_rate(coefficient_norms(base.at(0), base.grid()), base));
    } else {
        for (std::size_t k = 0; k < len; ++k)
            rate[k] = groenwall_rate(coefficient_norms(base.at(s0 + k), base.grid()), base);
    }
    double kint = 0.0, uint = 0.0;
    rep.groenwall_bound[0] = rep.C_E * rep.E[0];
    rep.min_margin = rep.groenwall_bound[0] - rep.E[0];
    for (std::size_t k = 0; k + 1 < len; ++k) {
        const std::size_t n = s0 + k;
        const double dt = traj.times[k + 1] - traj.times[k];
        const VectorField* U = control ? &(*control)[n] : nullptr;
        const auto I = identity_terms(base.at(n), fp, traj.rho[k], traj.u[k], U);
        rep.terms[k + 1] = I;
        double sumI = 0.0;
        for (double x : I) sumI += x;
        rep.identity_residual[k + 1] =
            (rep.E_weighted[k + 1] - rep.E_weighted[k]) / dt + rep.dissipation[k + 1] - sumI;
        rep.cumulative_dissipation[k + 1] = rep.cumulative_dissipation[k] + dt * rep.dissipation[k + 1];
        kint += 0.5 * dt * (rate[k] + rate[k + 1]);
        if (U) uint += dt * inner(*U, *U);
        rep.groenwall_bound[k + 1] = rep.C_E * (rep.E[0] + uint) * std::exp(kint);
        rep.min_margin = std::min(rep.min_margin, rep.groenwall_bound[k + 1] - rep.E[k + 1]);
    }
    rep.kappa_integral = kint;
    for (std::size_t k = 0; k < len; ++k) {
        if (rep.E[k] > rep.groenwall_bound[k] || rep.cumulative_dissipation[k] > rep.groenwall_bound[k])
            rep.bound_holds = false;
    }
    return rep;
}

}  // namespace lcns
