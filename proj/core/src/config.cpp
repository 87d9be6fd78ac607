#include "lcns/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "lcns/error.hpp"
#include "lcns/snapshot.hpp"

namespace lcns {

namespace fs = std::filesystem;

Grid ScenarioConfig::grid() const { return Grid::make(dim, cells, lengths); }
FluidParams ScenarioConfig::fluid() const { return FluidParams::make(mu, eta); }

namespace {

struct Issue {
    ErrorKind kind;
    std::string msg;
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        s = s.substr(1, s.size() - 2);
    return s;
}

std::string real_str(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string list_str(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + real_str(v[i]);
    return s;
}

bool parse_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno != ERANGE && !std::isnan(out);
}

template <class I>
bool parse_int(const std::string& s, I& out) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

// One config key: how to read it and (for non-aliases) how to print it canonically.
struct Entry {
    std::string key;
    std::function<bool(const std::string&)> set;
    std::function<std::string()> get;  // empty for aliases
};

using Table = std::map<std::string, std::vector<Entry>>;

Entry real_entry(const std::string& k, double& ref) {
    return {k, [&ref](const std::string& s) { return parse_real(s, ref); }, [&ref] { return real_str(ref); }};
}
Entry int_entry(const std::string& k, int& ref) {
    return {k, [&ref](const std::string& s) { return parse_int(s, ref); }, [&ref] { return std::to_string(ref); }};
}
Entry u64_entry(const std::string& k, std::uint64_t& ref) {
    return {k, [&ref](const std::string& s) { return parse_int(s, ref); }, [&ref] { return std::to_string(ref); }};
}
Entry str_entry(const std::string& k, std::string& ref) {
    return {k, [&ref](const std::string& s) { ref = s; return true; }, [&ref] { return ref; }};
}
Entry bool_entry(const std::string& k, bool& ref) {
    return {k,
            [&ref](const std::string& s) {
                if (s == "true" || s == "1" || s == "yes" || s == "on") return ref = true, true;
                if (s == "false" || s == "0" || s == "no" || s == "off") return ref = false, true;
                return false;
            },
            [&ref] { return std::string(ref ? "true" : "false"); }};
}
Entry list_entry(const std::string& k, std::vector<double>& ref) {
    return {k,
            [&ref](const std::string& s) {
                std::vector<double> v;
                std::stringstream ss(s);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    double x;
                    if (!parse_real(trim(item), x)) return false;
                    v.push_back(x);
                }
                ref = std::move(v);
                return true;
            },
            [&ref] { return list_str(ref); }};
}
Entry choice_entry(const std::string& k, std::string& ref, std::vector<std::string> allowed) {
    return {k,
            [&ref, allowed](const std::string& s) {
                if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) return false;
                ref = s;
                return true;
            },
            [&ref] { return ref; }};
}
void vec3_entries(std::vector<Entry>& out, const std::string& prefix, std::array<std::string, 3>& ref) {
    for (int c = 0; c < 3; ++c) out.push_back(str_entry(prefix + std::to_string(c + 1), ref[c]));
}

Table make_table(ScenarioConfig& c) {
    Table t;
    auto& g = t["grid"];
    g.push_back(int_entry("dim", c.dim));
    g.push_back({"cells",
                 [&c](const std::string& s) {
                     int n;
                     if (!parse_int(s, n)) return false;
                     c.cells = {n, n, n};
                     return true;
                 },
                 {}});
    g.push_back({"length",
                 [&c](const std::string& s) {
                     double L;
                     if (!parse_real(s, L)) return false;
                     c.lengths = {L, L, L};
                     return true;
                 },
                 {}});
    const char* axes[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        g.push_back(int_entry(std::string("cells_") + axes[a], c.cells[a]));
        g.push_back(real_entry(std::string("length_") + axes[a], c.lengths[a]));
    }

    auto& tm = t["time"];
    tm.push_back(real_entry("T", c.T));
    tm.push_back(int_entry("steps", c.steps));
    tm.push_back(real_entry("cfl", c.cfl));

    auto& fl = t["fluid"];
    fl.push_back(real_entry("mu", c.mu));
    fl.push_back(real_entry("eta", c.eta));

    auto& b = t["base"];
    b.push_back(choice_entry("family", c.family.name, {"rest", "density_wave", "taylor", "custom"}));
    b.push_back(real_entry("amplitude", c.family.amplitude));
    b.push_back(real_entry("omega", c.family.omega));
    b.push_back(real_entry("rho0", c.family.rho0));
    b.push_back(str_entry("rho", c.family.rho));
    vec3_entries(b, "u", c.family.u);
    b.push_back(str_entry("pressure", c.family.pressure));
    b.push_back(real_entry("mass_tol", c.mass_tol));

    auto& in = t["initial"];
    in.push_back(str_entry("rho", c.rho0));
    vec3_entries(in, "u", c.u0);
    in.push_back(str_entry("rho_snapshot", c.rho0_snapshot));
    in.push_back(str_entry("u_snapshot", c.u0_snapshot));

    auto& tg = t["targets"];
    tg.push_back(str_entry("rho", c.target_rho));
    vec3_entries(tg, "u", c.target_u);

    auto& ct = t["control"];
    ct.push_back(real_entry("radius", c.radius));
    vec3_entries(ct, "u", c.control_u);

    auto& cs = t["constraint"];
    cs.push_back(choice_entry("set", c.constraint_set, {"none", "ball", "box"}));
    cs.push_back(choice_entry("observable", c.observable, {"identity", "kernel"}));
    cs.push_back(real_entry("c_rho", c.c_rho));
    cs.push_back(real_entry("c_u", c.c_u));
    cs.push_back(real_entry("kernel_width", c.kernel_width));
    cs.push_back(real_entry("radius", c.constraint_radius));
    cs.push_back(choice_entry("center", c.center, {"targets", "zero"}));
    cs.push_back(list_entry("box_lo", c.box_lo));
    cs.push_back(list_entry("box_hi", c.box_hi));

    auto& op = t["optimizer"];
    OptimizeOptions& o = c.optimizer;
    op.push_back(real_entry("tol", o.tol));
    op.push_back(int_entry("max_iter", o.max_iter));
    op.push_back(real_entry("armijo_c", o.armijo_c));
    op.push_back(real_entry("armijo_shrink", o.armijo_shrink));
    op.push_back(int_entry("max_backtracks", o.max_backtracks));
    op.push_back(real_entry("noise_floor", o.noise_floor));
    op.push_back(real_entry("initial_step", o.initial_step));
    op.push_back(real_entry("eps0", o.eps0));
    op.push_back(int_entry("schedule_length", o.schedule_length));
    op.push_back({"mode",
                  [&o](const std::string& s) {
                      if (s == "exact") return o.mode = AdjointMode::ExactTranspose, true;
                      if (s == "continuous") return o.mode = AdjointMode::Continuous, true;
                      return false;
                  },
                  [&o] { return std::string(o.mode == AdjointMode::ExactTranspose ? "exact" : "continuous"); }});
    op.push_back(real_entry("cg_rtol", o.forward.cg.rtol));
    op.push_back(int_entry("cg_max_iter", o.forward.cg.max_iter));

    auto& v = t["verify"];
    v.push_back(u64_entry("seed", c.seed));
    v.push_back(int_entry("samples", c.samples));
    v.push_back(int_entry("directions", c.directions));
    v.push_back(real_entry("fd_step", c.fd_step));
    v.push_back(real_entry("gradient_tol", c.gradient_tol));
    v.push_back(real_entry("tau", c.tau));
    v.push_back(list_entry("spike_h", c.spike_h));
    vec3_entries(v, "spike_w", c.spike_w);
    v.push_back(int_entry("dependence_members", c.dependence_members));
    vec3_entries(v, "dependence_du", c.dependence_du);
    v.push_back(real_entry("dependence_spread", c.dependence_spread));
    v.push_back(int_entry("lame_dim", c.lame_dim));
    v.push_back(int_entry("lame_cells", c.lame_cells));
    v.push_back(int_entry("lame_refinements", c.lame_refinements));
    v.push_back(int_entry("ekeland_spikes", c.ekeland_spikes));
    v.push_back(real_entry("cone_tol", c.cone_tol));

    auto& out = t["output"];
    out.push_back(str_entry("dir", c.out_dir));
    out.push_back(bool_entry("snapshots", c.snapshots));
    return t;
}

[[noreturn]] void throw_issues(const std::vector<Issue>& issues) {
    std::string msg = std::to_string(issues.size()) + " config problem(s):";
    for (const auto& i : issues) msg += "\n  [" + std::string(to_string(i.kind)) + "] " + i.msg;
    throw Error(issues.front().kind, msg);
}

std::string resolve(const ScenarioConfig& c, const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute() || c.source_path.empty()) return p;
    return (fs::path(c.source_path).parent_path() / p).string();
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& source_path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        raise(ErrorKind::ParseError, std::string("config syntax: ") + e.message() + " at line " +
                                         std::to_string(e.line()));
    }
    ScenarioConfig cfg;
    cfg.source_path = source_path;
    Table table = make_table(cfg);
    std::vector<Issue> issues;
    for (const auto& [section, body] : tree) {
        auto it = table.find(section);
        if (it == table.end()) {
            issues.push_back({ErrorKind::UnknownKey, body.empty() ? "key '" + section + "' outside any section"
                                                                  : "unknown section [" + section + "]"});
            continue;
        }
        for (const auto& [key, node] : body) {
            auto e = std::find_if(it->second.begin(), it->second.end(), [&](const Entry& x) { return x.key == key; });
            if (e == it->second.end()) {
                issues.push_back({ErrorKind::UnknownKey, "unknown key '" + key + "' in [" + section + "]"});
                continue;
            }
            const std::string value = trim(node.data());
            if (!e->set(value))
                issues.push_back({ErrorKind::TypeMismatch,
                                  section + "." + key + " = '" + value + "' has the wrong type or value"});
        }
    }
    if (!issues.empty()) throw_issues(issues);
    validate_config(cfg);
    return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
    if (!fs::is_regular_file(path)) raise(ErrorKind::MissingFile, "config file not found: " + path);
    const auto bytes = read_file_bytes(path);
    return parse_config_text(std::string(bytes.begin(), bytes.end()), path);
}

void validate_config(const ScenarioConfig& c) {
    std::vector<Issue> issues;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) issues.push_back({ErrorKind::InvalidArgument, msg});
    };
    need(c.dim >= 1 && c.dim <= 3, "grid.dim must be 1, 2 or 3");
    for (int a = 0; a < std::clamp(c.dim, 1, 3); ++a) {
        need(c.cells[a] >= 4, "grid cells must be at least 4 on every active axis");
        need(c.lengths[a] > 0.0, "grid lengths must be positive");
    }
    need(c.T > 0.0, "time.T must be positive");
    need(c.steps >= 1, "time.steps must be at least 1");
    need(c.cfl > 0.0, "time.cfl must be positive");
    if (!(c.mu > 0.0) || !(c.eta >= 0.0))
        issues.push_back({ErrorKind::ParameterViolation, "fluid needs mu > 0 and eta >= 0"});
    need(c.mass_tol > 0.0, "base.mass_tol must be positive");
    need(c.radius > 0.0, "control.radius must be positive");
    need(c.c_rho >= 0.0 && c.c_u >= 0.0, "constraint scalings must be non-negative");
    need(c.kernel_width > 0.0, "constraint.kernel_width must be positive");
    need(c.constraint_radius >= 0.0, "constraint.radius must be non-negative");
    if (c.constraint_set == "box") {
        const std::size_t n = static_cast<std::size_t>(c.dim) + 1;
        need(c.box_lo.size() == n && c.box_hi.size() == n, "box bounds need dim + 1 entries (rho, u components)");
        for (std::size_t k = 0; k < std::min(c.box_lo.size(), c.box_hi.size()); ++k)
            need(c.box_lo[k] <= c.box_hi[k], "box_lo must not exceed box_hi");
    }
    const OptimizeOptions& o = c.optimizer;
    need(o.tol > 0.0 && o.max_iter >= 0 && o.armijo_c > 0.0 && o.armijo_c < 1.0, "optimizer tolerances out of range");
    need(o.armijo_shrink > 0.0 && o.armijo_shrink < 1.0 && o.max_backtracks >= 1, "optimizer line search out of range");
    need(o.initial_step > 0.0 && o.eps0 > 0.0 && o.schedule_length >= 1, "optimizer steps and schedule out of range");
    need(o.noise_floor >= 0.0, "optimizer.noise_floor must be non-negative");
    need(o.forward.cg.rtol > 0.0 && o.forward.cg.max_iter >= 1, "optimizer CG settings out of range");
    need(c.samples >= 1 && c.directions >= 1 && c.ekeland_spikes >= 1, "verify sample counts must be positive");
    need(c.fd_step > 0.0, "verify.fd_step must be positive");
    need(c.tau < 0.0 || (c.tau > 0.0 && c.tau <= c.T), "verify.tau must lie in (0, T]");
    need(!c.spike_h.empty(), "verify.spike_h needs at least one width");
    for (double h : c.spike_h) need(h >= 1.0 && std::floor(h) == h, "verify.spike_h entries are positive integers");
    need(c.dependence_members >= 2, "verify.dependence_members must be at least 2");
    need(c.dependence_spread > 0.0, "verify.dependence_spread must be positive");
    need(c.lame_dim == 2 || c.lame_dim == 3, "verify.lame_dim must be 2 or 3");
    need(c.lame_cells >= 4 && c.lame_refinements >= 2, "verify Lame sizes out of range");
    need(c.cone_tol >= 0.0, "verify.cone_tol must be non-negative");
    need(!c.out_dir.empty(), "output.dir must not be empty");

    std::vector<std::string> exprs = {c.rho0, c.target_rho};
    for (int k = 0; k < 3; ++k)
        for (const auto* arr : {&c.u0, &c.target_u, &c.control_u, &c.spike_w, &c.dependence_du})
            exprs.push_back((*arr)[k]);
    if (c.family.name == "custom") {
        exprs.push_back(c.family.rho);
        for (const auto& s : c.family.u) exprs.push_back(s);
    }
    for (const auto& e : exprs) {
        try {
            const Expr x = Expr::parse(e);
            if (x.depends_on(Var::Rho)) issues.push_back({ErrorKind::ParseError, "'" + e + "' must not use rho"});
        } catch (const Error& err) {
            issues.push_back({err.kind(), err.what()});
        }
    }
    for (const auto* p : {&c.rho0_snapshot, &c.u0_snapshot})
        if (!p->empty() && !fs::is_regular_file(resolve(c, *p)))
            issues.push_back({ErrorKind::MissingFile, "snapshot not found: " + resolve(c, *p)});
    if (!issues.empty()) throw_issues(issues);

    // CFL pre-flight on the declared base.
    const BaseState base = make_family(c.family, c.grid(), c.fluid(), uniform_times(c.T, c.steps),
                                       ManufactureOptions{c.mass_tol, 0.0, 1e-10});
    check_cfl(base, c.dt(), c.cfl);
}

std::string canonical_text(const ScenarioConfig& cfg) {
    ScenarioConfig copy = cfg;
    const Table table = make_table(copy);
    std::vector<std::string> lines;
    for (const auto& [section, entries] : table)
        for (const auto& e : entries)
            if (e.get) lines.push_back(section + "." + e.key + " = " + e.get());
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        raise(ErrorKind::IoError, "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string config_hash(const ScenarioConfig& cfg) { return sha256_hex(canonical_text(cfg)); }

VectorField sample_vector(const Grid& g, const std::array<std::string, 3>& u, double t, bool no_slip) {
    VectorField v(g, no_slip);
    for (int c = 0; c < g.dim; ++c) {
        const Expr e = Expr::parse(u[c]);
        EvalPoint p;
        p.t = t;
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const auto ijk = g.coords(i);
            for (int a = 0; a < g.dim; ++a) p.x[a] = g.center(a, ijk[a]);
            v.at(c, i) = e.eval(p);
        }
    }
    return v;
}

ControlField sample_control(const Grid& g, const std::vector<double>& times, const std::array<std::string, 3>& u,
                            double radius) {
    if (times.size() < 2) raise(ErrorKind::InvalidArgument, "control needs at least one time interval");
    std::vector<VectorField> samples;
    samples.reserve(times.size() - 1);
    for (std::size_t n = 0; n + 1 < times.size(); ++n)
        samples.push_back(sample_vector(g, u, 0.5 * (times[n] + times[n + 1]), false));
    return ControlField(std::move(samples), times[1] - times[0], radius);
}

Problem Scenario::problem() const {
    Problem p;
    p.base = &base;
    p.rho0 = rho0;
    p.u0 = u0;
    p.targets = targets;
    p.constraint = constraint;
    return p;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    Scenario s;
    s.config = cfg;
    const Grid g = cfg.grid();
    const std::vector<double> times = uniform_times(cfg.T, cfg.steps);
    s.base = make_family(cfg.family, g, cfg.fluid(), times, ManufactureOptions{cfg.mass_tol, 0.0, 1e-10});
    check_cfl(s.base, cfg.dt(), cfg.cfl);

    if (!cfg.rho0_snapshot.empty()) {
        s.rho0 = read_snapshot(resolve(cfg, cfg.rho0_snapshot)).scalar();
        require_same_grid(s.rho0.grid(), g, "initial density snapshot");
    } else {
        s.rho0 = sample_vector(g, {cfg.rho0, "0", "0"}, 0.0, false).component(0);
    }
    if (!cfg.u0_snapshot.empty()) {
        s.u0 = read_snapshot(resolve(cfg, cfg.u0_snapshot)).vector(true);
        require_same_grid(s.u0.grid(), g, "initial velocity snapshot");
    } else {
        s.u0 = sample_vector(g, cfg.u0, 0.0, true);
    }

    std::vector<std::string> tu(cfg.target_u.begin(), cfg.target_u.begin() + g.dim);
    s.targets = Targets::from_expressions(cfg.target_rho, tu, g, times);
    s.control = project_to_ball(sample_control(g, times, cfg.control_u, cfg.radius));

    ConstraintSpec& c = s.constraint;
    c.observable = cfg.observable == "kernel" ? ObservableKind::KernelAverage : ObservableKind::IdentityScaling;
    c.c_rho = cfg.c_rho;
    c.c_u = cfg.c_u;
    c.kernel_width = cfg.kernel_width;
    c.set = cfg.constraint_set == "ball" ? SetKind::Ball
            : cfg.constraint_set == "box" ? SetKind::Box
                                          : SetKind::WholeSpace;
    c.radius = cfg.constraint_radius;
    c.box_lo = cfg.box_lo;
    c.box_hi = cfg.box_hi;
    if (c.set == SetKind::Ball) {
        if (cfg.center == "targets") {
            StateTrajectory tt;
            tt.times = times;
            tt.rho = s.targets.rho_d;
            tt.u = s.targets.u_d;
            c.center = observe(c, tt);
        } else {
            c.center = Observation::zeros(g, trapezoid_weights(times));
        }
    }
    return s;
}

}  // namespace lcns
