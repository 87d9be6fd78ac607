#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lcns/optimize.hpp"

namespace lcns {

/// Everything a run needs, with defaults for every key. Expressions use the
/// closed grammar of Expr (x, y, z, t, pi, sin, cos, exp, integer powers).
struct ScenarioConfig {
    // [grid]
    int dim = 1;
    std::array<int, 3> cells{64, 64, 64};
    std::array<double, 3> lengths{1.0, 1.0, 1.0};

    // [time]
    double T = 0.5;
    int steps = 128;
    double cfl = 0.5;

    // [fluid]
    double mu = 1.0;
    double eta = 0.0;

    // [base]
    FamilySpec family;
    double mass_tol = 1e-10;

    // [initial]; a snapshot path overrides the matching expression.
    std::string rho0 = "0";
    std::array<std::string, 3> u0{"0", "0", "0"};
    std::string rho0_snapshot;
    std::string u0_snapshot;

    // [targets]
    std::string target_rho = "0";
    std::array<std::string, 3> target_u{"0", "0", "0"};

    // [control]
    double radius = 10.0;
    std::array<std::string, 3> control_u{"0", "0", "0"};

    // [constraint]
    std::string constraint_set = "none";         // none | ball | box
    std::string observable = "identity";         // identity | kernel
    double c_rho = 1.0;
    double c_u = 1.0;
    double kernel_width = 0.1;
    double constraint_radius = 1.0;
    std::string center = "targets";              // targets | zero
    std::vector<double> box_lo;
    std::vector<double> box_hi;

    // [optimizer]
    OptimizeOptions optimizer;

    // [verify]
    std::uint64_t seed = 1;
    int samples = 100;
    int directions = 5;
    double fd_step = 1e-3;
    double gradient_tol = -1.0;                  // negative: 1e-8 exact, 1e-2 continuous
    double tau = -1.0;                           // negative: T / 2
    std::vector<double> spike_h{8, 4, 2, 1};     // multiples of dt
    std::array<std::string, 3> spike_w{"sin(pi*x)", "0", "0"};
    int dependence_members = 4;
    std::array<std::string, 3> dependence_du{"sin(pi*x)*cos(pi*t)", "0", "0"};
    double dependence_spread = 0.2;
    int lame_dim = 2;
    int lame_cells = 16;
    int lame_refinements = 3;
    int ekeland_spikes = 20;
    double cone_tol = 1e-6;

    // [output]
    std::string out_dir = "out";
    bool snapshots = true;

    /// Path the config was read from; relative snapshot paths resolve against its directory.
    std::string source_path;

    Grid grid() const;
    FluidParams fluid() const;
    double dt() const { return T / steps; }
};

/// Reads and validates an INI-style file. Collects every problem before throwing;
/// the error kind is that of the first item (UnknownKey, TypeMismatch, ParseError, MissingFile,
/// InvalidArgument, CflViolation).
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& source_path = "");

/// Range checks, expression syntax, referenced files, and the CFL pre-flight on the declared base.
void validate_config(const ScenarioConfig& cfg);

/// Sorted "section.key = value" lines with every default filled in; reals at 17 digits.
std::string canonical_text(const ScenarioConfig& cfg);
/// Lower-case hex SHA-256 of canonical_text.
std::string config_hash(const ScenarioConfig& cfg);
std::string sha256_hex(const std::string& bytes);

/// Base state, initial data, targets, control and constraint built from the config.
struct Scenario {
    ScenarioConfig config;
    BaseState base;
    ScalarField rho0;
    VectorField u0;
    Targets targets;
    ControlField control;
    ConstraintSpec constraint;

    Problem problem() const;
};

Scenario build_scenario(const ScenarioConfig& cfg);
/// Control sampled at interval midpoints from per-component expressions in (x, y, z, t).
ControlField sample_control(const Grid& g, const std::vector<double>& times, const std::array<std::string, 3>& u,
                            double radius);
VectorField sample_vector(const Grid& g, const std::array<std::string, 3>& u, double t, bool no_slip);

}  // namespace lcns
