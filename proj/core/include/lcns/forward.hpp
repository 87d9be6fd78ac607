#pragma once

#include <array>
#include <vector>

#include "lcns/base_state.hpp"
#include "lcns/control.hpp"
#include "lcns/linsolve.hpp"

namespace lcns {

struct ForwardOptions {
    double cfl = 0.5;
    CgOptions cg;
    /// First time node; earlier nodes are not part of the trajectory.
    std::size_t start_node = 0;
    /// Omit the control source (homogeneous sensitivity runs).
    bool zero_control = false;
};

/// (rho, u) at the base time nodes start_node..N.
struct StateTrajectory {
    std::vector<double> times;
    std::size_t start_node = 0;
    std::vector<ScalarField> rho;
    std::vector<VectorField> u;
    std::vector<int> cg_iterations;
    double max_cg_residual = 0.0;

    std::size_t size() const { return times.size(); }
};

/// Throws CflViolation unless dt <= cfl * min h / max(|u~|_inf, 1).
void check_cfl(const BaseState& base, double dt, double cfl);
double cfl_bound(const BaseState& base, double cfl);

// Pieces of the linearized operator, shared with the adjoint and the energy monitor.

/// First-order upwind flux divergence of rho advected by a; face speeds are
/// neighbour averages and wall faces carry no flux.
ScalarField upwind_transport(const VectorField& a, const ScalarField& rho);
/// Exact transpose of upwind_transport in the plain cell inner product.
ScalarField upwind_transport_transpose(const VectorField& a, const ScalarField& s);
/// (grad u~) u, i.e. component i is sum_j d_j u~_i u_j.
VectorField velocity_gradient_action(const BaseSlot& b, const VectorField& u);
/// Transpose of velocity_gradient_action: component j is sum_i d_j u~_i w_i.
VectorField velocity_gradient_transpose(const BaseSlot& b, const VectorField& w);
/// (u~ . grad) u with odd-closure differences.
VectorField convect(const BaseSlot& b, const VectorField& u);

/// One step n -> n+1 with the base sampled at t_n. U may be null.
void forward_step(const BaseState& base, std::size_t n, const ScalarField& rho, const VectorField& u,
                  const VectorField* U, ScalarField& rho_next, VectorField& u_next, const CgOptions& cg = {},
                  CgResult* info = nullptr);

/// Integrates the controlled linearized system over the base time grid.
StateTrajectory solve_linearized(const BaseState& base, const ControlField& control, const ScalarField& rho0,
                                 const VectorField& u0, const ForwardOptions& opts = {});

/// Energy diagnostics of a trajectory.
struct EnergyReport {
    static constexpr int kTerms = 14;
    std::vector<double> t;
    std::vector<double> E;             // full energy functional
    std::vector<double> E_weighted;    // 1/2 (|rho|^2 + |grad rho|^2 + <rho~ u, u>)
    std::vector<double> dissipation;   // -<u, div S u>
    std::vector<double> cumulative_dissipation;
    std::vector<double> identity_residual;
    std::vector<double> groenwall_bound;
    std::vector<std::array<double, kTerms>> terms;  // I_1..I_14, level n, stored at t_{n+1}
    double kappa_integral = 0.0;
    double C_E = 1.0;
    bool bound_holds = true;
    double min_margin = 0.0;  // min over t of (bound - E)
};

/// Full energy 1/2 (rho^2 + |grad rho|^2 + |u|^2 + mu |grad u|^2 + (mu + lam) |div u|^2) integrated.
double full_energy(const ScalarField& rho, const VectorField& u, const FluidParams& p);
/// mu <u, -Lap u> + (mu + lam) |div u|^2 with the no-slip stencils.
double dissipation(const VectorField& u, const FluidParams& p);
/// Growth rate of the energy bound at one node, from the base coefficient norms.
double groenwall_rate(const CoefficientNorms& c, const BaseState& base);

EnergyReport energy_monitor(const StateTrajectory& traj, const BaseState& base, const ControlField* control);

}  // namespace lcns
