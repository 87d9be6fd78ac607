#include "lcns/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"
#include "lcns/snapshot.hpp"

#ifndef LCNS_VERSION
#define LCNS_VERSION "0.0.0"
#endif

namespace lcns {

namespace fs = std::filesystem;

const char* tool_version() { return LCNS_VERSION; }

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string format_csv(const CsvSeries& s) {
    std::string out;
    for (std::size_t i = 0; i < s.columns.size(); ++i) out += (i ? "," : "") + s.columns[i];
    out += "\n";
    for (const auto& row : s.rows) {
        if (row.size() != s.columns.size()) raise(ErrorKind::InvalidArgument, "CSV row width differs from the header");
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + num(row[i]);
        out += "\n";
    }
    return out;
}

void export_csv(const CsvSeries& s, const std::string& path) { write_file_atomic(path, format_csv(s)); }

CsvSeries energy_series(const EnergyReport& r) {
    CsvSeries s;
    s.columns = {"t", "E", "dissipation", "residual", "bound"};
    for (std::size_t n = 0; n < r.t.size(); ++n) {
        const double res = (n < r.identity_residual.size()) ? r.identity_residual[n] : 0.0;
        s.rows.push_back({r.t[n], r.E[n], r.dissipation[n], res, r.groenwall_bound[n]});
    }
    return s;
}

CsvSeries iterate_series(const std::vector<IterateRecord>& log) {
    CsvSeries s;
    s.columns = {"iter", "J", "J_eps", "d_W", "lambda_eps", "a_norm", "proj_grad_residual"};
    for (const auto& r : log)
        s.rows.push_back({double(r.iter), r.J, r.J_eps, r.d_W, r.lambda_eps, r.a_norm, r.proj_grad_residual});
    return s;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["all_pass"] = all_pass;
    nlohmann::ordered_json arts = nlohmann::ordered_json::array();
    for (const auto& a : artifacts) arts.push_back({{"bytes", a.bytes}, {"path", a.path}, {"sha256", a.sha256}});
    j["artifacts"] = arts;
    j["certificates"] = certificates;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["subcommand"] = subcommand;
    j["target"] = target;
    j["timestamps"] = {{"simulated_end", num(t_end)}, {"simulated_start", num(t_start)}};
    j["tool_version"] = tool_version;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
    RunManifest m;
    try {
        const auto j = nlohmann::json::parse(text);
        m.all_pass = j.at("all_pass").get<bool>();
        for (const auto& a : j.at("artifacts"))
            m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>(),
                                   a.at("bytes").get<std::uint64_t>()});
        m.certificates = j.at("certificates").get<std::vector<std::string>>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.subcommand = j.at("subcommand").get<std::string>();
        m.target = j.at("target").get<std::string>();
        m.t_start = std::stod(j.at("timestamps").at("simulated_start").get<std::string>());
        m.t_end = std::stod(j.at("timestamps").at("simulated_end").get<std::string>());
        m.tool_version = j.at("tool_version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::ParseError, std::string("manifest: ") + e.what());
    }
    return m;
}

const std::vector<std::string>& verify_targets() {
    static const std::vector<std::string> t = {"pontryagin", "cone",   "spike",   "dependence",
                                               "gradient",   "lame",   "energy",  "ekeland"};
    return t;
}

namespace {

ScenarioConfig refined_config(const ScenarioConfig& cfg, bool space, bool time) {
    ScenarioConfig c = cfg;
    if (space)
        for (int& n : c.cells) n *= 2;
    if (time) c.steps *= 2;
    return c;
}

CertificateReport base_certificate(const BaseState& base, double mass_tol) {
    const BaseReport br = validate(base);
    CertificateReport r;
    r.name = "base";
    r.measured = {{"rho_min", br.rho_min},
                  {"rho_max", br.rho_max},
                  {"mass_residual", br.mass_residual},
                  {"momentum_residual", br.momentum_residual},
                  {"boundary_trace", br.boundary_trace}};
    r.tolerances = {{"mass_residual", mass_tol}, {"boundary_trace", 1e-10}};
    r.pass = br.positive && br.mass_residual <= mass_tol && br.boundary_trace <= 1e-10;
    if (!r.pass) r.violation = "base state fails positivity, mass balance or the wall trace";
    r.note = "momentum residual is the defect of the discrete operator on interior cells";
    return r;
}

// Shared lazily computed optimizer run for the Pontryagin and cone certificates.
struct VerifyContext {
    const ScenarioConfig& cfg;
    Scenario sc;
    std::optional<OptimizeResult> opt;

    explicit VerifyContext(const ScenarioConfig& c) : cfg(c), sc(build_scenario(c)) {}

    const OptimizeResult& optimum() {
        if (!opt) {
            OptimizeOptions oo = cfg.optimizer;
            oo.forward.cfl = cfg.cfl;
            opt = optimize(sc.problem(), sc.control, oo);
        }
        return *opt;
    }
};

CertificateReport verify_pontryagin(VerifyContext& ctx) {
    const OptimizeResult& res = ctx.optimum();
    const double R = res.control.radius();
    const bool binding = res.control.max_sample_norm() >= R * (1.0 - 1e-9);
    PontryaginOptions po;
    po.n_samples = ctx.cfg.samples;
    po.seed = ctx.cfg.seed;
    if (binding) po.tol = default_tolerance(ctx.sc.base.grid(), ctx.sc.base.dt());
    CertificateReport r = check_pontryagin(res.control, res.adjoint, ctx.sc.base, res.lambda_mult, po);
    r.measured.push_back({"optimizer_residual", res.residual});
    r.measured.push_back({"ball_binding", binding ? 1.0 : 0.0});
    return r;
}

CertificateReport verify_cone(VerifyContext& ctx) {
    const OptimizeResult& res = ctx.optimum();
    const Observation x = observe(ctx.sc.constraint, res.state);
    CertificateReport r = check_normal_cone(ctx.sc.constraint, x, res.a, ctx.cfg.samples, ctx.cfg.seed + 1,
                                            ctx.cfg.cone_tol);
    double worst = 0.0;
    for (const auto& it : res.log) {
        const double s = it.lambda_eps + it.a_norm;
        worst = std::max({worst, -it.lambda_eps, it.lambda_eps - 1.0, -it.a_norm, it.a_norm - 1.0, 1.0 - s, s - 2.0});
    }
    r.measured.push_back({"multiplier_bound_excess", worst});
    r.measured.push_back({"lambda", res.lambda_mult});
    r.tolerances.push_back({"multiplier_bounds", 1e-12});
    if (worst > 1e-12) {
        r.pass = false;
        r.violation += (r.violation.empty() ? "" : "; ") + std::string("multiplier bounds exceeded by ") + num(worst);
    }
    return r;
}

CertificateReport verify_spike(VerifyContext& ctx) {
    const Scenario& sc = ctx.sc;
    SpikeStudy st;
    st.base = &sc.base;
    st.U = sc.control;
    st.rho0 = sc.rho0;
    st.u0 = sc.u0;
    const double dt = sc.base.dt();
    const double tau = ctx.cfg.tau > 0.0 ? ctx.cfg.tau : 0.5 * ctx.cfg.T;
    st.tau = std::round(tau / dt) * dt;
    st.W = sample_vector(sc.base.grid(), ctx.cfg.spike_w, st.tau, false);
    for (double k : ctx.cfg.spike_h) st.h_list.push_back(k * dt);
    st.forward.cfl = ctx.cfg.cfl;
    return check_spike_convergence(st);
}

CertificateReport verify_dependence(VerifyContext& ctx) {
    const Scenario fine = build_scenario(refined_config(ctx.cfg, true, true));
    std::vector<DependenceLevel> levels;
    for (const Scenario* s : {static_cast<const Scenario*>(&ctx.sc), &fine}) {
        DependenceLevel L;
        L.base = &s->base;
        L.U = s->control;
        L.dU = sample_control(s->base.grid(), s->base.times(), ctx.cfg.dependence_du, s->control.radius());
        L.rho0 = s->rho0;
        L.u0 = s->u0;
        levels.push_back(std::move(L));
    }
    ForwardOptions fwd;
    fwd.cfl = ctx.cfg.cfl;
    return check_continuous_dependence(levels, ctx.cfg.dependence_members, ctx.cfg.dependence_spread, fwd);
}

CertificateReport gradient_at(const Scenario& sc, const ScenarioConfig& cfg, double tol) {
    const Problem p = sc.problem();
    GradientStudy st;
    st.problem = &p;
    st.U = sc.control;
    st.directions = smooth_directions(sc.base.grid(), sc.control.samples(), sc.base.dt(), sc.control.radius(),
                                      cfg.directions, cfg.seed + 2);
    st.step = cfg.fd_step;
    st.mode = cfg.optimizer.mode;
    st.tol = tol;
    st.forward.cfl = cfg.cfl;
    return check_gradient(st);
}

std::vector<CertificateReport> verify_gradient(VerifyContext& ctx) {
    const bool exact = ctx.cfg.optimizer.mode == AdjointMode::ExactTranspose;
    const double tol = ctx.cfg.gradient_tol > 0.0 ? ctx.cfg.gradient_tol : (exact ? 1e-8 : 1e-2);
    std::vector<CertificateReport> out{gradient_at(ctx.sc, ctx.cfg, tol)};
    if (!exact) {
        const Scenario fine = build_scenario(refined_config(ctx.cfg, true, true));
        const CertificateReport rf = gradient_at(fine, ctx.cfg, tol);
        out.push_back(check_gradient_refinement(out.front(), rf, tol));
    }
    return out;
}

CertificateReport verify_lame(VerifyContext& ctx) {
    LameOptions lo;
    lo.base_cells = ctx.cfg.lame_cells;
    lo.refinements = ctx.cfg.lame_refinements;
    const FluidParams fp = ctx.cfg.fluid();
    return check_lame(ctx.cfg.lame_dim, fp.mu, fp.lam, lo);
}

EnergyReport energy_of(const Scenario& sc, double cfl) {
    ForwardOptions fwd;
    fwd.cfl = cfl;
    const StateTrajectory y = solve_linearized(sc.base, sc.control, sc.rho0, sc.u0, fwd);
    return energy_monitor(y, sc.base, &sc.control);
}

CertificateReport verify_energy(VerifyContext& ctx) {
    const Scenario fine = build_scenario(refined_config(ctx.cfg, false, true));
    const EnergyReport ec = energy_of(ctx.sc, ctx.cfg.cfl);
    const EnergyReport ef = energy_of(fine, ctx.cfg.cfl);
    return check_energy_certificates(ec, &ef);
}

CertificateReport verify_ekeland(VerifyContext& ctx) {
    return check_ekeland_metric(ctx.sc.control, ctx.cfg.ekeland_spikes, ctx.cfg.seed + 3);
}

void run_target(const std::string& t, VerifyContext& ctx, std::vector<CertificateReport>& out) {
    if (t == "pontryagin") out.push_back(verify_pontryagin(ctx));
    else if (t == "cone") out.push_back(verify_cone(ctx));
    else if (t == "spike") out.push_back(verify_spike(ctx));
    else if (t == "dependence") out.push_back(verify_dependence(ctx));
    else if (t == "gradient") for (auto& r : verify_gradient(ctx)) out.push_back(std::move(r));
    else if (t == "lame") out.push_back(verify_lame(ctx));
    else if (t == "energy") out.push_back(verify_energy(ctx));
    else if (t == "ekeland") out.push_back(verify_ekeland(ctx));
    else raise(ErrorKind::InvalidArgument, "unknown verify target '" + t + "'");
}

// Collects artifacts in a staging directory and publishes it with one rename.
class RunWriter {
public:
    RunWriter(const fs::path& final_dir) : final_(final_dir), staging_(final_dir.string() + ".staging") {
        std::error_code ec;
        fs::remove_all(staging_, ec);
        fs::create_directories(staging_, ec);
        if (ec) raise(ErrorKind::IoError, "cannot create " + staging_.string() + ": " + ec.message());
    }
    ~RunWriter() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    void text(const std::string& rel, const std::string& body) {
        write_file_atomic((staging_ / rel).string(), body);
        record(rel, body);
    }
    void csv(const std::string& rel, const CsvSeries& s) { text(rel, format_csv(s)); }
    void snapshot(const std::string& rel, const ScalarField& f, double t) {
        const auto bytes = encode_snapshot(f, t);
        write_file_atomic((staging_ / rel).string(), bytes);
        record(rel, std::string(bytes.begin(), bytes.end()));
    }
    void snapshot(const std::string& rel, const VectorField& f, double t) {
        const auto bytes = encode_snapshot(f, t);
        write_file_atomic((staging_ / rel).string(), bytes);
        record(rel, std::string(bytes.begin(), bytes.end()));
    }

    RunManifest& manifest() { return m_; }

    void commit() {
        m_.all_pass = true;
        for (const auto& c : m_.certificates) m_.all_pass = m_.all_pass && c.rfind("PASS", 0) == 0;
        std::sort(m_.artifacts.begin(), m_.artifacts.end(),
                  [](const Artifact& a, const Artifact& b) { return a.path < b.path; });
        write_file_atomic((staging_ / "manifest.json").string(), m_.to_json());
        std::error_code ec;
        fs::remove_all(final_, ec);
        fs::rename(staging_, final_, ec);
        if (ec) raise(ErrorKind::IoError, "cannot publish " + final_.string() + ": " + ec.message());
        committed_ = true;
    }

private:
    void record(const std::string& rel, const std::string& bytes) {
        m_.artifacts.push_back({rel, sha256_hex(bytes), bytes.size()});
    }

    fs::path final_, staging_;
    RunManifest m_;
    bool committed_ = false;
};

void add_certificates(RunWriter& w, const std::vector<CertificateReport>& reports) {
    for (const auto& line : reports) {
        std::string s = summary({line});
        while (!s.empty() && s.back() == '\n') s.pop_back();
        w.manifest().certificates.push_back(s);
    }
}

void write_certificates(RunWriter& w, std::vector<CertificateReport> reports) {
    sort_reports(reports);
    w.text("certificates.json", to_json(reports));
    for (const auto& r : reports)
        if (!r.table.empty()) w.csv(r.name + ".csv", CsvSeries{r.table_columns, r.table});
    add_certificates(w, reports);
}

CsvSeries norms_series(const std::vector<double>& t, const std::vector<ScalarField>& s,
                       const std::vector<VectorField>& v, const std::string& sname, const std::string& vname) {
    CsvSeries out;
    out.columns = {"t", sname, vname};
    for (std::size_t n = 0; n < t.size(); ++n) out.rows.push_back({t[n], norm_l2(s[n]), norm_l2(v[n])});
    return out;
}

}  // namespace

std::vector<CertificateReport> run_verification(const std::string& target, const ScenarioConfig& cfg) {
    VerifyContext ctx(cfg);
    std::vector<CertificateReport> out;
    if (target == "all")
        for (const auto& t : verify_targets()) run_target(t, ctx, out);
    else
        run_target(target, ctx, out);
    sort_reports(out);
    return out;
}

RunManifest run(const std::string& subcommand, const std::string& target, const ScenarioConfig& cfg) {
    static const std::vector<std::string> subs = {"manufacture", "forward", "adjoint", "optimize", "verify", "report"};
    if (std::find(subs.begin(), subs.end(), subcommand) == subs.end())
        raise(ErrorKind::InvalidArgument, "unknown subcommand '" + subcommand + "'");
    if (subcommand == "verify" && target != "all" &&
        std::find(verify_targets().begin(), verify_targets().end(), target) == verify_targets().end())
        raise(ErrorKind::InvalidArgument, "unknown verify target '" + target + "'");

    const std::string label = subcommand == "verify" ? "verify-" + target : subcommand;
    const fs::path root(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) raise(ErrorKind::IoError, "cannot create output directory " + root.string() + ": " + ec.message());

    RunWriter w(root / label);
    RunManifest& m = w.manifest();
    m.subcommand = subcommand;
    m.target = subcommand == "verify" ? target : "";
    m.config_hash = config_hash(cfg);
    m.tool_version = tool_version();
    m.seed = cfg.seed;
    m.t_start = 0.0;
    m.t_end = cfg.T;
    w.text("config.ini", canonical_text(cfg));

    if (subcommand == "report") {
        std::string body;
        for (const auto& label_dir : {"manufacture", "forward", "adjoint", "optimize"}) {
            const fs::path p = root / label_dir / "manifest.json";
            if (!fs::exists(p)) continue;
            const auto bytes = read_file_bytes(p.string());
            const RunManifest rm = RunManifest::from_json(std::string(bytes.begin(), bytes.end()));
            body += "[" + std::string(label_dir) + "] config " + rm.config_hash.substr(0, 12) + "\n";
            for (const auto& c : rm.certificates) body += "  " + c + "\n";
        }
        std::vector<fs::path> verify_dirs;
        if (fs::is_directory(root))
            for (const auto& e : fs::directory_iterator(root))
                if (e.is_directory() && e.path().filename().string().rfind("verify-", 0) == 0 &&
                    e.path().extension() != ".staging")
                    verify_dirs.push_back(e.path());
        std::sort(verify_dirs.begin(), verify_dirs.end());
        for (const auto& d : verify_dirs) {
            const fs::path p = d / "manifest.json";
            if (!fs::exists(p)) continue;
            const auto bytes = read_file_bytes(p.string());
            const RunManifest rm = RunManifest::from_json(std::string(bytes.begin(), bytes.end()));
            body += "[" + d.filename().string() + "] config " + rm.config_hash.substr(0, 12) + "\n";
            for (const auto& c : rm.certificates) {
                body += "  " + c + "\n";
                m.certificates.push_back(c);
            }
        }
        if (body.empty()) body = "no manifests found under " + root.string() + "\n";
        w.text("report.txt", body);
        w.commit();
        return w.manifest();
    }

    if (subcommand == "verify") {
        write_certificates(w, run_verification(target, cfg));
        w.commit();
        return w.manifest();
    }

    const Scenario sc = build_scenario(cfg);
    const BaseState& base = sc.base;
    ForwardOptions fwd = cfg.optimizer.forward;
    fwd.cfl = cfg.cfl;

    if (subcommand == "manufacture") {
        const BaseReport br = validate(base);
        CsvSeries s;
        s.columns = {"t",        "grad_u_linf",   "accel_l3",      "grad_rho_linf", "hess_rho_l3",
                     "pprime_linf", "grad_pprime_l3", "grad_div_u_l3", "f_l3"};
        for (std::size_t n = 0; n < base.times().size(); ++n) {
            const CoefficientNorms& c = br.per_node.size() == 1 ? br.per_node[0] : br.per_node.at(n);
            s.rows.push_back({base.times()[n], c.grad_u_linf, c.accel_l3, c.grad_rho_linf, c.hess_rho_l3,
                              c.pprime_linf, c.grad_pprime_l3, c.grad_div_u_l3, c.f_l3});
        }
        w.csv("base_norms.csv", s);
        if (cfg.snapshots)
            for (std::size_t n : {std::size_t(0), base.steps()}) {
                const std::string tag = n == 0 ? "initial" : "final";
                w.snapshot("base_rho_" + tag + ".bin", base.at(n).rho, base.times()[n]);
                w.snapshot("base_u_" + tag + ".bin", base.at(n).u, base.times()[n]);
                w.snapshot("base_f_" + tag + ".bin", base.at(n).f, base.times()[n]);
            }
        add_certificates(w, {base_certificate(base, cfg.mass_tol)});
    } else if (subcommand == "forward") {
        const StateTrajectory y = solve_linearized(base, sc.control, sc.rho0, sc.u0, fwd);
        const EnergyReport er = energy_monitor(y, base, &sc.control);
        w.csv("energy.csv", energy_series(er));
        w.csv("state_norms.csv", norms_series(y.times, y.rho, y.u, "rho_l2", "u_l2"));
        if (cfg.snapshots) {
            w.snapshot("rho_final.bin", y.rho.back(), y.times.back());
            w.snapshot("u_final.bin", y.u.back(), y.times.back());
        }
        add_certificates(w, {check_energy_certificates(er, nullptr)});
    } else if (subcommand == "adjoint") {
        const StateTrajectory y = solve_linearized(base, sc.control, sc.rho0, sc.u0, fwd);
        AdjointSources src;
        src.targets = &sc.targets;
        AdjointOptions ao;
        ao.mode = cfg.optimizer.mode;
        ao.cg = fwd.cg;
        const AdjointTrajectory adj = solve_adjoint(base, y, src, ao);
        const ControlField g = reduced_gradient(sc.control, adj, base, 1.0);
        const CostReport cost = evaluate_cost(y, sc.control, sc.targets);
        w.csv("adjoint_norms.csv", norms_series(adj.times, adj.sigma, adj.xi, "sigma_l2", "xi_l2"));
        CsvSeries gs;
        gs.columns = {"t_mid", "gradient_l2"};
        for (std::size_t n = 0; n < g.samples(); ++n)
            gs.rows.push_back({0.5 * (base.times()[n] + base.times()[n + 1]), norm_l2(g[n])});
        w.csv("gradient.csv", gs);
        w.csv("cost.csv", CsvSeries{{"tracking_u", "tracking_rho", "control_energy", "J"},
                                    {{cost.tracking_u, cost.tracking_rho, cost.control_energy, cost.J}}});
        if (cfg.snapshots) {
            w.snapshot("sigma_initial.bin", adj.sigma.front(), adj.times.front());
            w.snapshot("xi_initial.bin", adj.xi.front(), adj.times.front());
        }
    } else if (subcommand == "optimize") {
        OptimizeOptions oo = cfg.optimizer;
        oo.forward.cfl = cfg.cfl;
        const OptimizeResult res = optimize(sc.problem(), sc.control, oo);
        w.csv("iterates.csv", iterate_series(res.log));
        const CostReport& c = res.cost;
        w.csv("cost.csv", CsvSeries{{"tracking_u", "tracking_rho", "control_energy", "J", "J_eps", "d_W",
                                     "lambda_eps", "a_norm", "residual"},
                                    {{c.tracking_u, c.tracking_rho, c.control_energy, c.J, c.J_eps, c.d_W,
                                      c.lambda_eps, c.a_norm, res.residual}}});
        CsvSeries cs;
        cs.columns = {"t_mid", "control_l2", "radius"};
        for (std::size_t n = 0; n < res.control.samples(); ++n)
            cs.rows.push_back(
                {0.5 * (base.times()[n] + base.times()[n + 1]), norm_l2(res.control[n]), res.control.radius()});
        w.csv("control_norms.csv", cs);
        if (cfg.snapshots) {
            w.snapshot("rho_final.bin", res.state.rho.back(), res.state.times.back());
            w.snapshot("u_final.bin", res.state.u.back(), res.state.times.back());
        }
        const bool binding = res.control.max_sample_norm() >= res.control.radius() * (1.0 - 1e-9);
        PontryaginOptions po;
        po.n_samples = cfg.samples;
        po.seed = cfg.seed;
        if (binding) po.tol = default_tolerance(base.grid(), base.dt());
        add_certificates(w, {check_pontryagin(res.control, res.adjoint, base, res.lambda_mult, po)});
    }
    w.commit();
    return w.manifest();
}

}  // namespace lcns
