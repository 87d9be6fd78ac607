// One line per acceptance criterion; exit status is non-zero when any criterion fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lcns/adjoint.hpp"
#include "lcns/app.hpp"
#include "lcns/error.hpp"
#include "lcns/ops.hpp"

using namespace lcns;
namespace fs = std::filesystem;

namespace {

fs::path g_work = "acceptance_runs";

const std::vector<std::string> kShipped = {"constrained", "density_wave", "spike", "taylor2d",
                                           "tracking",    "tracking_binding", "zero"};

ScenarioConfig load(const std::string& name) {
    ScenarioConfig c = parse_config(std::string(LCNS_CONFIG_DIR) + "/" + name + ".ini");
    c.out_dir = (g_work / name).string();
    return c;
}

std::string g6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

const CertificateReport& find(const std::vector<CertificateReport>& rs, const std::string& name) {
    for (const auto& r : rs)
        if (r.name == name) return r;
    raise(ErrorKind::InvalidArgument, "missing certificate " + name);
}

// 1: adjoint gradient against central differences.
Outcome gradient() {
    Outcome o;
    ScenarioConfig c = load("tracking");
    c.directions = 5;
    c.optimizer.mode = AdjointMode::Continuous;
    c.gradient_tol = 1e-2;
    const auto cont = run_verification("gradient", c);
    const CertificateReport& ref = find(cont, "gradient_refinement");
    o.require(ref.pass && ref.get("rel_error_coarse") <= 1e-2 && ref.get("rel_error_fine") <= 1e-2 &&
                  ref.get("factor") >= 1.8,
              "continuous err " + g6(ref.get("rel_error_coarse")) + " -> " + g6(ref.get("rel_error_fine")) +
                  " (<= 1e-2), factor " + g6(ref.get("factor")) + " (>= 1.8)");
    c.optimizer.mode = AdjointMode::ExactTranspose;
    c.gradient_tol = 1e-8;
    const CertificateReport ex = find(run_verification("gradient", c), "gradient");
    o.require(ex.pass && ex.get("max_rel_error") <= 1e-8, "exact err " + g6(ex.get("max_rel_error")) + " (<= 1e-8)");
    return o;
}

// 2: Pontryagin minimum condition, interior and binding.
Outcome pontryagin() {
    Outcome o;
    for (const char* name : {"tracking", "tracking_binding"}) {
        ScenarioConfig c = load(name);
        c.samples = 100;
        const CertificateReport r = find(run_verification("pontryagin", c), "pontryagin");
        const double tol = r.tolerances.front().second;
        const double phi = r.get("Phi_star");
        const bool binding = r.get("ball_binding") > 0.5;
        const double pinned = binding ? default_tolerance(c.grid(), c.dt()) : 1e-8 * std::max(1.0, std::abs(phi));
        o.require(r.pass && r.get("optimizer_residual") <= 1e-6 && tol <= pinned * (1 + 1e-15),
                  std::string(name) + " excess " + g6(r.get("max_excess")) + " (tol " + g6(tol) + "), residual " +
                      g6(r.get("optimizer_residual")));
    }
    return o;
}

// 3: spike difference quotients converge to the sensitivity.
Outcome spike() {
    Outcome o;
    ScenarioConfig c = load("spike");
    c.spike_h = {8, 4, 2, 1};
    const CertificateReport r = find(run_verification("spike", c), "spike");
    o.require(r.pass && r.get("slope") >= 0.8 && r.get("monotone") == 1.0 && r.get("pre_spike_max_diff") == 0.0,
              "slope " + g6(r.get("slope")) + " (>= 0.8), monotone " + g6(r.get("monotone")) + ", pre-spike diff " +
                  g6(r.get("pre_spike_max_diff")) + " (== 0), dt = T/" + std::to_string(c.steps));
    return o;
}

// 4: Ekeland distance of aligned spikes.
Outcome ekeland() {
    Outcome o;
    double de = 0.0, ratio = 0.0;
    for (const auto& name : kShipped) {
        ScenarioConfig c = load(name);
        c.ekeland_spikes = 20;
        const CertificateReport r = find(run_verification("ekeland", c), "ekeland_metric");
        de = std::max(de, r.get("max_dE_error"));
        ratio = std::max(ratio, r.get("max_distance_ratio"));
        o.pass = o.pass && r.pass;
    }
    o.require(o.pass && de == 0.0 && ratio <= 1.0,
              "20 spikes per config: max |d_E - h| " + g6(de) + " (== 0), max dist / 2R sqrt(h) " + g6(ratio) +
                  " (<= 1)");
    return o;
}

// 5: multiplier bounds and the normal cone on the constrained config.
Outcome cone() {
    Outcome o;
    ScenarioConfig c = load("constrained");
    c.samples = 100;
    c.cone_tol = 1e-6;
    const CertificateReport r = find(run_verification("cone", c), "normal_cone");
    o.require(r.get("multiplier_bound_excess") <= 1e-12,
              "multiplier bound excess " + g6(r.get("multiplier_bound_excess")) + " (<= 1e-12)");
    o.require(r.pass && r.get("max_pairing") <= 1e-6,
              "max pairing " + g6(r.get("max_pairing")) + " (<= 1e-6), d_W " + g6(r.get("d_W")) + ", |a| " +
                  g6(r.get("a_norm")));
    return o;
}

// 6: energy identity, growth bound and continuous dependence.
Outcome energy() {
    Outcome o;
    double worst_margin = INFINITY, worst_spread = 0.0;
    std::string halving;
    for (const auto& name : kShipped) {
        ScenarioConfig c = load(name);
        c.dependence_members = 4;
        c.dependence_spread = 0.2;
        const CertificateReport e = find(run_verification("energy", c), "energy");
        const CertificateReport d = find(run_verification("dependence", c), "dependence");
        worst_margin = std::min(worst_margin, e.get("min_bound_margin"));
        worst_spread = std::max(worst_spread, d.get("spread"));
        if (!e.pass || !d.pass) o.pass = false;
        // A zero trajectory has a zero residual on both grids; there is nothing to halve.
        const bool exact = e.get("identity_residual") == 0.0 && e.get("identity_residual_fine") == 0.0;
        const double ratio = e.get("halving_ratio");
        halving += (halving.empty() ? "" : ",") + name + "=" + (exact ? std::string("exact") : g6(ratio));
        if (!exact) o.pass = o.pass && ratio >= 1.6 && ratio <= 2.4;
    }
    o.require(o.pass && worst_margin >= 0.0 && worst_spread <= 0.2,
              "min bound margin " + g6(worst_margin) + " (>= 0), dependence spread " + g6(worst_spread) +
                  " (<= 0.2), halving " + halving + " (in [1.6, 2.4])");
    return o;
}

// 7: Lame elliptic estimate.
Outcome lame() {
    Outcome o;
    LameOptions lo;
    lo.base_cells = 8;
    lo.refinements = 3;
    lo.ratio_spread = 0.2;
    lo.min_order = 1.9;
    for (int dim : {2, 3}) {
        if (dim == 3) lo.refinements = 2;
        const CertificateReport r = check_lame(dim, 1.0, -0.5, lo);
        o.require(r.pass && r.get("order") >= 1.9 && r.get("ratio_spread") <= 0.2,
                  std::to_string(dim) + "D order " + g6(r.get("order")) + " (>= 1.9), ratio spread " +
                      g6(r.get("ratio_spread")) + " (<= 0.2)");
    }
    bool rejected = false;
    try {
        check_lame(2, 1.0, -4.0 / 3.0);
    } catch (const Error& e) {
        rejected = e.kind() == ErrorKind::ParameterViolation;
    }
    o.require(rejected, "4 mu + 3 lam = 0 rejected");
    return o;
}

// 8: zero data gives zero state, adjoint and cost; every certificate passes.
Outcome zero() {
    Outcome o;
    const ScenarioConfig c = load("zero");
    const Scenario sc = build_scenario(c);
    const Problem p = sc.problem();
    const StateTrajectory y = solve_linearized(sc.base, sc.control, sc.rho0, sc.u0);
    AdjointSources src;
    src.targets = &p.targets;
    double ymax = 0.0, amax = 0.0;
    for (std::size_t n = 0; n < y.size(); ++n) ymax = std::max({ymax, norm_max(y.rho[n]), norm_max(y.u[n])});
    for (AdjointMode m : {AdjointMode::ExactTranspose, AdjointMode::Continuous}) {
        AdjointOptions ao;
        ao.mode = m;
        const AdjointTrajectory a = solve_adjoint(sc.base, y, src, ao);
        for (std::size_t n = 0; n < a.size(); ++n) amax = std::max({amax, norm_max(a.sigma[n]), norm_max(a.xi[n])});
    }
    const double J = evaluate_cost(y, sc.control, p.targets).J;
    const double eps = std::numeric_limits<double>::epsilon();
    o.require(ymax <= eps && amax <= eps && std::abs(J) <= eps,
              "max|y| " + g6(ymax) + ", max|adjoint| " + g6(amax) + ", J " + g6(J) + " (<= 2.2e-16)");
    int failed = 0, total = 0;
    for (const auto& r : run_verification("all", c)) {
        ++total;
        if (!r.pass) ++failed;
    }
    o.require(failed == 0, std::to_string(total - failed) + "/" + std::to_string(total) + " certificates PASS");
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 9: verify all is reproducible byte for byte.
Outcome reproducible() {
    Outcome o;
    for (const char* name : {"zero", "tracking"}) {
        const ScenarioConfig c = load(name);
        run("verify", "all", c);
        const std::string first = slurp(fs::path(c.out_dir) / "verify-all" / "manifest.json");
        run("verify", "all", c);
        const std::string second = slurp(fs::path(c.out_dir) / "verify-all" / "manifest.json");
        o.require(!first.empty() && first == second,
                  std::string(name) + " manifest " + std::to_string(first.size()) + " bytes identical");
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--work-dir" && i + 1 < argc) g_work = argv[++i];
        else {
            std::fprintf(stderr, "usage: %s [--work-dir DIR]\n", argv[0]);
            return 2;
        }
    }
    fs::create_directories(g_work);
    const std::vector<std::function<Outcome()>> criteria = {gradient, pontryagin, spike,  ekeland,     cone,
                                                            energy,   lame,       zero,   reproducible};
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("criterion %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
