#pragma once

#include <functional>
#include <vector>

#include "lcns/field.hpp"

namespace lcns {

struct CgOptions {
    double rtol = 1e-12;
    int max_iter = 20000;
};

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
};

using LinearOperator = std::function<void(const std::vector<double>& in, std::vector<double>& out)>;

/// Conjugate gradients for a symmetric positive definite operator. `x` holds
/// the initial guess. Throws LinearSolveDiverged when the cap is reached.
CgResult conjugate_gradient(const LinearOperator& A, const std::vector<double>& b, std::vector<double>& x,
                            const CgOptions& opts = {});

/// Solves (diag - beta * (mu Lap + (mu + lam) grad div)) x = rhs with the
/// no-slip stencils. `diag` may be null (zero diagonal). Output is no-slip.
VectorField solve_viscous(const ScalarField* diag, double beta, double mu, double lam, const VectorField& rhs,
                          const CgOptions& opts = {}, CgResult* info = nullptr);

}  // namespace lcns
