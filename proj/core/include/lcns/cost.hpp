#pragma once

#include <string>
#include <vector>

#include "lcns/constraint.hpp"

namespace lcns {

/// Desired states on every time node.
struct Targets {
    std::vector<ScalarField> rho_d;
    std::vector<VectorField> u_d;

    static Targets zero(const Grid& g, std::size_t nodes);
    /// Samples expressions in (x, y, z, t) at cell centres and node times.
    static Targets from_expressions(const std::string& rho, const std::vector<std::string>& u, const Grid& g,
                                    const std::vector<double>& times);
};

struct CostReport {
    double tracking_u = 0.0;
    double tracking_rho = 0.0;
    double control_energy = 0.0;
    double J = 0.0;
    double J_eps = 0.0;
    double d_W = 0.0;
    double lambda_eps = 1.0;
    double a_norm = 0.0;
};

/// Trapezoid quadrature of the tracking terms; the control term is exact for
/// piecewise-constant samples.
CostReport evaluate_cost(const StateTrajectory& state, const ControlField& control, const Targets& targets);

/// J_eps = sqrt(((J - J_star + eps)^+)^2 + d_W^2) with lambda_eps and ||a_eps||.
/// Fills `a_out` with a_eps = (d_W / J_eps) eta when given.
CostReport penalized_cost(const StateTrajectory& state, const ControlField& control, const Targets& targets,
                          const ConstraintSpec& constraint, double eps, double J_star, Observation* a_out = nullptr);

/// The penalty combination alone, for a known J and d_W.
void penalize(CostReport& r, double eps, double J_star);

}  // namespace lcns
