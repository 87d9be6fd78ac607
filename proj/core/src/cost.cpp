#include "lcns/cost.hpp"

#include <cmath>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

Targets Targets::zero(const Grid& g, std::size_t nodes) {
    Targets t;
    t.rho_d.assign(nodes, ScalarField(g));
    t.u_d.assign(nodes, VectorField(g));
    return t;
}

Targets Targets::from_expressions(const std::string& rho, const std::vector<std::string>& u, const Grid& g,
                                  const std::vector<double>& times) {
    const Expr er = Expr::parse(rho);
    std::vector<Expr> eu;
    for (int c = 0; c < g.dim; ++c) eu.push_back(Expr::parse(c < static_cast<int>(u.size()) ? u[c] : "0"));
    Targets t = zero(g, times.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        for (std::size_t i = 0; i < g.cells(); ++i) {
            EvalPoint p;
            const auto c = g.coords(i);
            for (int a = 0; a < g.dim; ++a) p.x[a] = g.center(a, c[a]);
            p.t = times[n];
            t.rho_d[n][i] = er.eval(p);
            for (int k = 0; k < g.dim; ++k) t.u_d[n].at(k, i) = eu[k].eval(p);
        }
    }
    return t;
}

CostReport evaluate_cost(const StateTrajectory& state, const ControlField& control, const Targets& targets) {
    if (targets.rho_d.size() != state.size() || targets.u_d.size() != state.size())
        raise(ErrorKind::GridMismatch, "targets and trajectory have different node counts");
    if (control.samples() + 1 < state.size())
        raise(ErrorKind::GridMismatch, "control has fewer samples than trajectory steps");
    CostReport r;
    const auto w = trapezoid_weights(state.times);
    for (std::size_t n = 0; n < state.size(); ++n) {
        require_same_grid(state.rho[n].grid(), targets.rho_d[n].grid(), "evaluate_cost");
        const double eu = norm_l2(state.u[n] - targets.u_d[n]);
        const double er = norm_l2(state.rho[n] - targets.rho_d[n]);
        r.tracking_u += w[n] * eu * eu;
        r.tracking_rho += w[n] * er * er;
    }
    const double cn = control.norm();
    r.control_energy = cn * cn;
    r.J = 0.5 * (r.tracking_u + r.tracking_rho + r.control_energy);
    r.J_eps = r.J;
    return r;
}

void penalize(CostReport& r, double eps, double J_star) {
    const double gap = std::max(0.0, r.J - J_star + eps);
    r.J_eps = std::hypot(gap, r.d_W);
    if (r.J_eps > 0.0) {
        r.lambda_eps = gap / r.J_eps;
        r.a_norm = r.d_W / r.J_eps;
    } else {
        r.lambda_eps = 1.0;
        r.a_norm = 0.0;
    }
}

CostReport penalized_cost(const StateTrajectory& state, const ControlField& control, const Targets& targets,
                          const ConstraintSpec& constraint, double eps, double J_star, Observation* a_out) {
    if (!(eps > 0.0)) raise(ErrorKind::InvalidArgument, "penalty parameter must be positive");
    CostReport r = evaluate_cost(state, control, targets);
    Observation x;
    if (constraint.active()) {
        x = observe(constraint, state);
        r.d_W = distance_to_W(constraint, x);
    }
    penalize(r, eps, J_star);
    if (a_out) {
        if (constraint.active() && r.d_W > 0.0) {
            *a_out = subgradient_dW(constraint, x);
            *a_out *= r.a_norm;
        } else {
            *a_out = Observation::zeros(state.rho.front().grid(), trapezoid_weights(state.times));
        }
    }
    return r;
}

}  // namespace lcns
