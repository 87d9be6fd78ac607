#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lcns/optimize.hpp"

namespace lcns {

struct CertificateReport {
    std::string name;
    bool pass = true;
    std::vector<std::pair<std::string, double>> measured;
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<std::string> table_columns;
    std::vector<std::vector<double>> table;
    std::string violation;  // sample and magnitude on FAIL
    std::string note;

    double get(const std::string& key) const;
};

/// max(1e-8, 10 (dx^2 + dt)) with dx the largest spacing.
double default_tolerance(const Grid& g, double dt);

/// Structured report (sorted keys) and a one-line-per-check summary.
std::string to_json(const std::vector<CertificateReport>& reports);
std::string summary(const std::vector<CertificateReport>& reports);

struct PontryaginOptions {
    int n_samples = 100;
    std::uint64_t seed = 1;
    /// Pass threshold added to every Phi(W); negative selects 1e-8 max(1, |Phi(U*)|).
    double tol = -1.0;
};

/// Phi(W) = 1/2 lambda ||W||^2 - <xi / rho~, W> over the control space.
double hamiltonian_integral(const ControlField& W, const AdjointTrajectory& adj, const BaseState& base,
                            double lambda_mult);

CertificateReport check_pontryagin(const ControlField& control_star, const AdjointTrajectory& adj,
                                   const BaseState& base, double lambda_mult, const PontryaginOptions& opts = {});

CertificateReport check_normal_cone(const ConstraintSpec& constraint, const Observation& observable_at_opt,
                                    const Observation& a, int n_samples, std::uint64_t seed, double tol);

/// Linearized response to a spike at tau: zero before tau, v(tau) = (W - U(tau^-)) / rho~(tau).
struct SensitivityPair {
    double tau = 0.0;
    std::size_t tau_node = 0;
    std::vector<double> times;
    std::vector<ScalarField> z;
    std::vector<VectorField> v;
};

SensitivityPair solve_sensitivity(const BaseState& base, double tau, const VectorField& W, const ControlField& U,
                                  const ForwardOptions& opts = {});

struct SpikeStudy {
    const BaseState* base = nullptr;
    ControlField U;
    ScalarField rho0;
    VectorField u0;
    double tau = 0.0;
    VectorField W;
    std::vector<double> h_list;
    ForwardOptions forward;
};

CertificateReport check_spike_convergence(const SpikeStudy& study);

/// One discretization level of the continuous-dependence study.
struct DependenceLevel {
    const BaseState* base = nullptr;
    ControlField U;
    ControlField dU;
    ScalarField rho0;
    VectorField u0;
};

/// Ratio sup_t E(delta y) / ||delta U||^2 for dU scaled by 2^-k, k < members, on every level.
CertificateReport check_continuous_dependence(const std::vector<DependenceLevel>& levels, int members,
                                              double max_spread = 0.2, const ForwardOptions& fwd = {});

struct GradientStudy {
    const Problem* problem = nullptr;
    ControlField U;
    std::vector<ControlField> directions;
    double step = 1e-3;
    AdjointMode mode = AdjointMode::ExactTranspose;
    double tol = 1e-8;
    ForwardOptions forward;
};

/// Central differences of J against <g, d>. The error of each direction is scaled by
/// max(||g|| ||d||, |fd|), which stays meaningful for directions nearly orthogonal to g; the plain
/// ratio to max(|fd|, |<g,d>|) is reported alongside.
CertificateReport check_gradient(const GradientStudy& study);

/// Both errors within tol and coarse / fine >= min_factor after halving dx and dt.
CertificateReport check_gradient_refinement(const CertificateReport& coarse, const CertificateReport& fine,
                                            double tol, double min_factor = 1.8);

/// Smooth seeded directions: low space and time Fourier modes, unit control norm.
std::vector<ControlField> smooth_directions(const Grid& g, std::size_t samples, double dt, double radius, int count,
                                            std::uint64_t seed);

struct LameOptions {
    int base_cells = 16;
    int refinements = 3;
    double ratio_spread = 0.2;
    double min_order = 1.9;
};

/// Discrete Lame solve with the manufactured field sin(pi x1) sin(pi x2) (times sin(pi x3) in 3D) per
/// component on the unit box. Throws ParameterViolation unless mu > 0 and 4 mu + 3 lam > 0.
CertificateReport check_lame(int dim, double mu, double lam, const LameOptions& opts = {});
/// Solves -mu Lap u - (mu + lam) grad div u = F with no-slip data.
VectorField solve_lame(const VectorField& F, double mu, double lam, const CgOptions& cg = {});

/// Growth bound and dissipation bound on `coarse`; identity-residual halving when `fine` has dt / 2.
CertificateReport check_energy_certificates(const EnergyReport& coarse, const EnergyReport* fine);

/// Seeded aligned spikes with random values in the ball: d_E(U_h, U) must equal h exactly and
/// ||U_h - U|| must not exceed 2 R sqrt(h).
CertificateReport check_ekeland_metric(const ControlField& U, int n_spikes, std::uint64_t seed);

/// Numeric analog of the epsilon-optimality inequality for spike candidates around the incumbent of a
/// penalty level: J_eps(spike) >= J_eps(U_eps) - sqrt(eps) d_E - tol.
CertificateReport check_ekeland(const Problem& p, const ControlField& U_eps, double eps, double J_star,
                                const std::vector<std::pair<double, double>>& spikes, std::uint64_t seed,
                                double tol, const OptimizeOptions& opts);

/// Orders a set of reports by name.
void sort_reports(std::vector<CertificateReport>& reports);

}  // namespace lcns
