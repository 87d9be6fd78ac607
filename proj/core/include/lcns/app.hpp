#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcns/config.hpp"
#include "lcns/verification.hpp"

namespace lcns {

const char* tool_version();

/// Column-named table of reals.
struct CsvSeries {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Header line plus one row per entry, reals at 17 significant digits.
std::string format_csv(const CsvSeries& s);
void export_csv(const CsvSeries& s, const std::string& path);

/// (t, E, dissipation, residual, bound); the residual at t_0 is 0.
CsvSeries energy_series(const EnergyReport& r);
/// (iter, J, J_eps, d_W, lambda_eps, a_norm, proj_grad_residual)
CsvSeries iterate_series(const std::vector<IterateRecord>& log);

struct Artifact {
    std::string path;  // relative to the run directory
    std::string sha256;
    std::uint64_t bytes = 0;
};

/// Deterministic record of one run: no wall-clock data, so identical inputs give identical bytes.
/// `t_start` and `t_end` are the simulated time range covered by the run.
struct RunManifest {
    std::string subcommand;
    std::string target;
    std::string config_hash;
    std::string tool_version;
    std::uint64_t seed = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<Artifact> artifacts;
    std::vector<std::string> certificates;  // one summary line each
    bool all_pass = true;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
};

/// Subcommands: manufacture, forward, adjoint, optimize, verify (target: pontryagin, cone, spike,
/// dependence, gradient, lame, energy, ekeland, all), report. Output goes to
/// <out_dir>/<subcommand>[-<target>]/, staged in a sibling directory and renamed into place on
/// success; manifest.json is the last file written.
RunManifest run(const std::string& subcommand, const std::string& target, const ScenarioConfig& cfg);

/// Certificates for one verify target (or every target for "all"), sorted by name.
std::vector<CertificateReport> run_verification(const std::string& target, const ScenarioConfig& cfg);

const std::vector<std::string>& verify_targets();

}  // namespace lcns
