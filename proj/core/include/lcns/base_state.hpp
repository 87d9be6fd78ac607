#pragma once

#include <array>
#include <string>
#include <vector>

#include "lcns/expr.hpp"
#include "lcns/field.hpp"

namespace lcns {

/// p(rho) with its first two derivatives, all symbolic in `rho`.
struct PressureLaw {
    Expr p, dp, d2p;
    static PressureLaw parse(const std::string& src);
};

/// Base quantities at one time node, all sampled analytically at cell centres.
struct BaseSlot {
    double time = 0.0;
    ScalarField rho;              // rho~
    VectorField u;                // u~ (no-slip)
    VectorField dt_u;             // d/dt u~
    VectorField f;                // manufactured body force
    VectorField accel;            // d/dt u~ + (u~ . grad) u~
    ScalarField pprime;           // p'(rho~)
    VectorField grad_pprime;
    VectorField grad_rho;
    std::vector<ScalarField> grad_u;    // [i * dim + j] = d_j u~_i
    std::vector<ScalarField> hess_rho;  // [i * dim + j] = d_i d_j rho~
    VectorField grad_div_u;
    ScalarField mass_residual;    // d/dt rho~ + div(rho~ u~)
    ScalarField dt_rho;
};

struct ManufactureOptions {
    double mass_tol = 1e-10;
    double rho_floor = 0.0;
    double trace_tol = 1e-10;
};

/// Time nodes t_n = n T / steps, n = 0..steps.
std::vector<double> uniform_times(double T, int steps);

/// Background state (rho~, u~) with the forcing f back-solved from the
/// nonlinear mass/momentum balance. Immutable. When nothing depends on t a
/// single slot serves every node.
class BaseState {
public:
    static BaseState manufacture(const Expr& rho_expr, const std::array<Expr, 3>& u_expr, const PressureLaw& law,
                                 const Grid& grid, const FluidParams& params, std::vector<double> times,
                                 const ManufactureOptions& opts = {});
    static BaseState manufacture(const std::string& rho_expr, const std::array<std::string, 3>& u_expr,
                                 const std::string& pressure, const Grid& grid, const FluidParams& params,
                                 std::vector<double> times, const ManufactureOptions& opts = {});

    const Grid& grid() const { return grid_; }
    const FluidParams& params() const { return params_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t steps() const { return times_.size() - 1; }
    double dt() const;
    double final_time() const { return times_.back(); }
    bool steady() const { return slots_.size() == 1; }
    const BaseSlot& at(std::size_t node) const { return slots_.size() == 1 ? slots_[0] : slots_.at(node); }
    double m() const { return m_; }
    double M() const { return M_; }
    /// max over nodes and cells of |u~|.
    double u_max() const { return u_max_; }

    const Expr& rho_expr() const { return rho_expr_; }
    const std::array<Expr, 3>& u_expr() const { return u_expr_; }
    const PressureLaw& pressure() const { return law_; }

private:
    Grid grid_;
    FluidParams params_;
    std::vector<double> times_;
    std::vector<BaseSlot> slots_;
    double m_ = 0.0, M_ = 0.0, u_max_ = 0.0;
    Expr rho_expr_;
    std::array<Expr, 3> u_expr_;
    PressureLaw law_;
};

/// Ingredients of the energy-growth coefficients at one time node.
struct CoefficientNorms {
    double grad_u_linf = 0.0;
    double accel_l3 = 0.0;
    double grad_rho_linf = 0.0;
    double hess_rho_l3 = 0.0;
    double pprime_linf = 0.0;
    double grad_pprime_l3 = 0.0;
    double grad_div_u_l3 = 0.0;
    double f_l3 = 0.0;
};

struct BaseReport {
    double rho_min = 0.0;
    double rho_max = 0.0;
    bool positive = true;
    double mass_residual = 0.0;      // max over nodes of the L2 norm
    double momentum_residual = 0.0;  // discrete-operator defect, max over nodes
    double boundary_trace = 0.0;     // L2 norm of u~ on the walls, max over nodes
    CoefficientNorms sup;
    std::vector<CoefficientNorms> per_node;
};

CoefficientNorms coefficient_norms(const BaseSlot& s, const Grid& g);
BaseReport validate(const BaseState& base);

/// Named families: rest, density_wave, taylor, custom.
struct FamilySpec {
    std::string name = "rest";
    double amplitude = 1.0;
    double omega = 0.0;
    double rho0 = 1.0;
    std::string rho = "1";
    std::array<std::string, 3> u{"0", "0", "0"};
    std::string pressure;  // empty: family default
};

BaseState make_family(const FamilySpec& spec, const Grid& grid, const FluidParams& params, std::vector<double> times,
                      const ManufactureOptions& opts = {});

/// Lp norm with cell-volume weight; p = 3 for the coefficient norms.
double norm_lp(const ScalarField& s, double p);
double norm_lp(const VectorField& v, double p);

}  // namespace lcns
