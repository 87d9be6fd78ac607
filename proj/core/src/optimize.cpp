#include "lcns/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcns/error.hpp"

namespace lcns {

Evaluation evaluate(const Problem& p, const ControlField& U, bool penalized, double eps, double J_star,
                    const OptimizeOptions& opts) {
    Evaluation ev;
    ev.state = solve_linearized(*p.base, U, p.rho0, p.u0, opts.forward);
    double lm = 1.0;
    if (penalized) {
        ev.cost = penalized_cost(ev.state, U, p.targets, p.constraint, eps, J_star, &ev.a);
        lm = ev.cost.lambda_eps;
        ev.value = ev.cost.J_eps;
    } else {
        ev.cost = evaluate_cost(ev.state, U, p.targets);
        if (p.constraint.active()) ev.cost.d_W = distance_to_W(p.constraint, observe(p.constraint, ev.state));
        ev.value = ev.cost.J;
    }
    AdjointSources src;
    src.lambda_mult = lm;
    src.targets = &p.targets;
    Observation cs;
    if (penalized && ev.cost.a_norm > 0.0) {
        cs = observe_adjoint(p.constraint, ev.a);
        src.constraint_source = &cs;
    }
    AdjointOptions aopt;
    aopt.mode = opts.mode;
    aopt.cg = opts.forward.cg;
    ev.adjoint = solve_adjoint(*p.base, ev.state, src, aopt);
    ev.gradient = reduced_gradient(U, ev.adjoint, *p.base, lm);
    return ev;
}

double projected_gradient_residual(const ControlField& U, const ControlField& g) {
    ControlField trial = U;
    trial.axpy(-1.0, g);
    return (U - project_to_ball(trial)).norm();
}

namespace {

IterateRecord record(int iter, const CostReport& c, double res) {
    IterateRecord r;
    r.iter = iter;
    r.J = c.J;
    r.J_eps = c.J_eps;
    r.d_W = c.d_W;
    r.lambda_eps = c.lambda_eps;
    r.a_norm = c.a_norm;
    r.proj_grad_residual = res;
    return r;
}

// Runs projected-gradient iterations on U until the residual test passes.
Evaluation minimize(const Problem& p, ControlField& U, bool penalized, double eps, double J_star,
                    const OptimizeOptions& opts, std::vector<IterateRecord>& log, int& iter, double& residual) {
    Evaluation ev = evaluate(p, U, penalized, eps, J_star, opts);
    double gamma = opts.initial_step;
    for (int it = 0;; ++it) {
        residual = projected_gradient_residual(U, ev.gradient);
        log.push_back(record(iter++, ev.cost, residual));
        if (residual <= opts.tol) return ev;
        if (it >= opts.max_iter)
            raise(ErrorKind::StagnationWithoutConvergence,
                  "iteration cap " + std::to_string(opts.max_iter) + " reached with projected-gradient residual " +
                      std::to_string(residual));
        bool accepted = false;
        ControlField Un;
        Evaluation evn;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
            Un = U;
            Un.axpy(-gamma, ev.gradient);
            Un = project_to_ball(Un);
            evn = evaluate(p, Un, penalized, eps, J_star, opts);
            const ControlField s = Un - U;
            const double demand = opts.armijo_c / gamma * inner(s, s);
            if (evn.value <= ev.value - demand) {
                accepted = true;
                break;
            }
            // Below the cost's noise floor, estimate the decrease from the two gradients instead.
            const double noise = opts.noise_floor * std::max(1.0, std::abs(ev.value));
            if (demand < noise && evn.value <= ev.value + noise &&
                0.5 * (inner(ev.gradient, s) + inner(evn.gradient, s)) <= -demand) {
                accepted = true;
                break;
            }
            gamma *= opts.armijo_shrink;
        }
        if (!accepted)
            raise(ErrorKind::StagnationWithoutConvergence,
                  "line search failed with projected-gradient residual " + std::to_string(residual));
        const ControlField s = Un - U;
        const ControlField y = evn.gradient - ev.gradient;
        const double sy = inner(s, y);
        gamma = sy > 0.0 ? inner(s, s) / sy : opts.initial_step;
        gamma = std::clamp(gamma, 1e-10, 1e10);
        U = std::move(Un);
        ev = std::move(evn);
    }
}

}  // namespace

OptimizeResult optimize(const Problem& p, const ControlField& U0, const OptimizeOptions& opts) {
    if (!p.base) raise(ErrorKind::InvalidArgument, "optimize needs a base state");
    OptimizeResult out;
    ControlField U = project_to_ball(U0);
    int iter = 0;
    double residual = 0.0;
    Evaluation ev = minimize(p, U, false, 0.0, 0.0, opts, out.log, iter, residual);
    out.J_unconstrained = ev.cost.J;
    out.d_W_unconstrained = ev.cost.d_W;
    out.lambda_mult = 1.0;
    out.a = Observation::zeros(p.base->grid(), trapezoid_weights(p.base->times()));

    if (p.constraint.active() && ev.cost.d_W > 0.0) {
        if (!(opts.eps0 > 0.0) || opts.schedule_length < 1)
            raise(ErrorKind::InvalidArgument, "penalty schedule needs eps0 > 0 and at least one level");
        // J_star estimates the constrained optimal value from below. With s = J_star - eps the level
        // function v(s) = min hypot((J - s)^+, d_W) is convex and decreasing with its root at that value,
        // so a Newton step on v refines the estimate while every subproblem keeps a minimum of order eps.
        double J_star = ev.cost.J;
        for (int k = 0; k < opts.schedule_length; ++k) {
            const double eps = opts.eps0 * std::ldexp(1.0, -k);
            ev = minimize(p, U, true, eps, J_star, opts, out.log, iter, residual);
            const double s = J_star - eps;
            const double gap = ev.cost.J - s;
            if (gap > 0.0) J_star = std::max(J_star, s + ev.cost.J_eps * ev.cost.J_eps / gap);
        }
        if (!(ev.cost.d_W < out.d_W_unconstrained))
            raise(ErrorKind::InfeasiblePenalty, "distance to W did not decrease across the penalty schedule (" +
                                                    std::to_string(ev.cost.d_W) + " >= " +
                                                    std::to_string(out.d_W_unconstrained) + ")");
        out.lambda_mult = ev.cost.lambda_eps;
        out.a = ev.a;
    }
    out.control = std::move(U);
    out.state = std::move(ev.state);
    out.adjoint = std::move(ev.adjoint);
    out.cost = ev.cost;
    out.residual = residual;
    return out;
}

}  // namespace lcns
