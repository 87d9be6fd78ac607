#pragma once

#include <vector>

#include "lcns/field.hpp"

namespace lcns {

/// Boundary closure of the first-derivative stencil.
///  OneSided: second-order one-sided rows at the two end cells (no ghost).
///  Odd:      ghost = -value (homogeneous Dirichlet at the wall).
///  Even:     ghost = +value (zero normal derivative).
/// Interior rows are the central difference in every case. Odd and Even are
/// negative transposes of each other.
enum class Edge { OneSided, Odd, Even };

/// out (+)= scale * D_axis in, or its transpose, on a flat cell array.
void apply_d1(const Grid& g, int axis, Edge edge, const double* in, double* out, double scale = 1.0,
              bool transpose = false, bool accumulate = false);

ScalarField partial(const ScalarField& s, int axis, Edge edge = Edge::OneSided);

VectorField grad(const ScalarField& s, Edge edge = Edge::OneSided);
/// Odd closure for no-slip fields, OneSided otherwise.
ScalarField div(const VectorField& v);
ScalarField div(const VectorField& v, Edge edge);

/// Mirrored stencils: grad_adjoint(., e) = -(div(., e))^T and
/// div_adjoint(., e) = -(grad(., e))^T, so inner(grad(s,e), v) + inner(s, div_adjoint(v,e)) = 0 exactly.
VectorField grad_adjoint(const ScalarField& s, Edge edge);
ScalarField div_adjoint(const VectorField& v, Edge edge);

/// Compact 3-point Laplacian; scalars use even ghosts, vectors odd ghosts.
ScalarField laplacian(const ScalarField& s);
VectorField laplacian(const VectorField& v);
/// grad div as -D^T D with D the odd-closure divergence; symmetric negative semidefinite.
VectorField grad_div(const VectorField& v);
/// mu Lap u + (mu + lam) grad div u.
VectorField stress_div(const VectorField& u, const FluidParams& p);
VectorField stress_div(const VectorField& u, double mu, double lam);

double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double norm_l2(const ScalarField& a);
double norm_l2(const VectorField& a);
double norm_h1(const ScalarField& s);
/// Uses the odd closure for no-slip fields.
double norm_h1(const VectorField& v);
double norm_max(const ScalarField& a);
double norm_max(const VectorField& a);
/// Discrete H^2 norm of a no-slip vector field (values, first and second differences).
double norm_h2(const VectorField& v);

/// Trapezoid in time of squared spatial L2 norms, square-rooted.
double bochner_norm(const std::vector<ScalarField>& traj, double dt);
double bochner_norm(const std::vector<VectorField>& traj, double dt);

}  // namespace lcns
