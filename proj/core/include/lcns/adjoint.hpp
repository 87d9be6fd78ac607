#pragma once

#include <vector>

#include "lcns/cost.hpp"

namespace lcns {

/// ExactTranspose reproduces the transpose of the discrete forward map, so the
/// reduced gradient is the exact gradient of the discrete cost. Continuous
/// discretizes the adjoint equations directly with the forward stencils.
enum class AdjointMode { ExactTranspose, Continuous };

struct AdjointSources {
    double lambda_mult = 1.0;
    const Targets* targets = nullptr;
    /// (F_rho^* a, F_u^* a) per node; null when the constraint is inactive.
    const Observation* constraint_source = nullptr;
};

struct AdjointOptions {
    AdjointMode mode = AdjointMode::ExactTranspose;
    CgOptions cg;
};

/// (sigma, xi) on the same nodes as the state; sigma(T) = xi(T) = 0.
struct AdjointTrajectory {
    std::vector<double> times;
    std::vector<ScalarField> sigma;
    std::vector<VectorField> xi;

    std::size_t size() const { return times.size(); }
};

AdjointTrajectory solve_adjoint(const BaseState& base, const StateTrajectory& state, const AdjointSources& sources,
                                const AdjointOptions& opts = {});

/// g^n = lambda_mult U^n - xi^n / rho~(t_n).
ControlField reduced_gradient(const ControlField& control, const AdjointTrajectory& adj, const BaseState& base,
                              double lambda_mult);

}  // namespace lcns
