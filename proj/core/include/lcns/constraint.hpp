#pragma once

#include <cstdint>
#include <vector>

#include "lcns/forward.hpp"

namespace lcns {

/// Element of the observable space X: a (rho, u)-shaped trajectory on the
/// time nodes with quadrature weights w_n dt (trapezoid). The X inner product
/// is sum_n weight_n (<rho, rho'> + <u, u'>).
struct Observation {
    std::vector<double> weight;
    std::vector<ScalarField> rho;
    std::vector<VectorField> u;

    std::size_t size() const { return weight.size(); }
    static Observation zeros(const Grid& g, const std::vector<double>& weight);
    Observation& axpy(double a, const Observation& x);
    Observation& operator*=(double a);
};

double inner(const Observation& a, const Observation& b);
double norm(const Observation& a);
Observation operator-(const Observation& a, const Observation& b);

/// Trapezoid weights w_n dt on the given time nodes.
std::vector<double> trapezoid_weights(const std::vector<double>& times);

enum class ObservableKind { IdentityScaling, KernelAverage };
enum class SetKind { WholeSpace, Ball, Box };

/// Linear observable F and closed convex set W in X.
struct ConstraintSpec {
    ObservableKind observable = ObservableKind::IdentityScaling;
    double c_rho = 1.0;
    double c_u = 1.0;
    double kernel_width = 0.1;

    SetKind set = SetKind::WholeSpace;
    Observation center;   // ball center g
    double radius = 1.0;  // ball radius r_W
    /// Box bounds on the normalized means <psi_k, x>, k = 0 for rho and 1..dim for u components.
    std::vector<double> box_lo, box_hi;

    bool active() const { return set != SetKind::WholeSpace; }
};

/// Separable symmetric Gaussian smoothing with a constant normalization (K^T = K).
ScalarField kernel_average(const ScalarField& s, double width);

Observation observe(const ConstraintSpec& spec, const StateTrajectory& traj);
/// Pointwise adjoint (F_rho^* a, F_u^* a) per node; quadrature weights are not applied.
Observation observe_adjoint(const ConstraintSpec& spec, const Observation& a);

/// Orthonormal functionals psi_k used by the box set.
std::vector<Observation> box_functionals(const Grid& g, const std::vector<double>& weight);

Observation project_to_W(const ConstraintSpec& spec, const Observation& x);
double distance_to_W(const ConstraintSpec& spec, const Observation& x);
/// eta = (x - P x) / d_W(x) outside W, zero inside (including the boundary).
Observation subgradient_dW(const ConstraintSpec& spec, const Observation& x);

/// Seeded random element of W (interior or boundary).
Observation sample_W(const ConstraintSpec& spec, const Observation& like, std::uint64_t seed, bool on_boundary);

}  // namespace lcns
