#pragma once

#include <vector>

#include "lcns/adjoint.hpp"

namespace lcns {

struct OptimizeOptions {
    double tol = 1e-6;          // projected-gradient residual
    int max_iter = 500;         // per penalty level
    double armijo_c = 1e-4;
    double armijo_shrink = 0.5;
    int max_backtracks = 40;
    /// Relative size of the cost noise left by the inner linear solves; smaller Armijo demands switch
    /// to the gradient-based decrease estimate.
    double noise_floor = 1e-10;
    double initial_step = 1.0;
    double eps0 = 1e-2;
    int schedule_length = 6;
    AdjointMode mode = AdjointMode::ExactTranspose;
    ForwardOptions forward;
};

struct IterateRecord {
    int iter = 0;
    double J = 0.0;
    double J_eps = 0.0;
    double d_W = 0.0;
    double lambda_eps = 1.0;
    double a_norm = 0.0;
    double proj_grad_residual = 0.0;
};

struct OptimizeResult {
    ControlField control;
    StateTrajectory state;
    AdjointTrajectory adjoint;
    CostReport cost;
    std::vector<IterateRecord> log;
    /// Limit multipliers of the last penalty level; a is zero when the constraint is inactive.
    double lambda_mult = 1.0;
    Observation a;
    double d_W_unconstrained = 0.0;
    double J_unconstrained = 0.0;
    double residual = 0.0;
};

struct Problem {
    const BaseState* base = nullptr;
    ScalarField rho0;
    VectorField u0;
    Targets targets;
    ConstraintSpec constraint;
};

/// Objective value, state, adjoint and gradient at one control.
struct Evaluation {
    StateTrajectory state;
    AdjointTrajectory adjoint;
    CostReport cost;
    Observation a;
    ControlField gradient;
    double value = 0.0;
};

/// J (or J_eps when `penalized`) with its exact reduced gradient.
Evaluation evaluate(const Problem& p, const ControlField& U, bool penalized, double eps, double J_star,
                    const OptimizeOptions& opts);

/// || U - P(U - g) || in the control norm.
double projected_gradient_residual(const ControlField& U, const ControlField& g);

/// Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking;
/// penalty continuation eps_k = eps0 2^-k for active state constraints.
OptimizeResult optimize(const Problem& p, const ControlField& U0, const OptimizeOptions& opts = {});

}  // namespace lcns
