#include "lcns/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

double CertificateReport::get(const std::string& key) const {
    for (const auto& [k, v] : measured)
        if (k == key) return v;
    raise(ErrorKind::InvalidArgument, "report '" + name + "' has no measurement '" + key + "'");
}

double default_tolerance(const Grid& g, double dt) {
    double h = g.h[0];
    for (int a = 1; a < g.dim; ++a) h = std::max(h, g.h[a]);
    return std::max(1e-8, 10.0 * (h * h + dt));
}

void sort_reports(std::vector<CertificateReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(),
                     [](const CertificateReport& a, const CertificateReport& b) { return a.name < b.name; });
}

std::string to_json(const std::vector<CertificateReport>& reports) {
    std::vector<CertificateReport> sorted = reports;
    sort_reports(sorted);
    nlohmann::json arr = nlohmann::json::array();
    bool all = true;
    for (const auto& r : sorted) {
        nlohmann::json j;
        j["name"] = r.name;
        j["pass"] = r.pass;
        all = all && r.pass;
        nlohmann::json m = nlohmann::json::object(), t = nlohmann::json::object();
        for (const auto& [k, v] : r.measured) m[k] = v;
        for (const auto& [k, v] : r.tolerances) t[k] = v;
        j["measured"] = m;
        j["tolerances"] = t;
        if (!r.table_columns.empty()) j["table"] = {{"columns", r.table_columns}, {"rows", r.table}};
        if (!r.violation.empty()) j["violation"] = r.violation;
        if (!r.note.empty()) j["note"] = r.note;
        arr.push_back(std::move(j));
    }
    nlohmann::json root;
    root["certificates"] = std::move(arr);
    root["all_pass"] = all;
    return root.dump(2) + "\n";
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

std::string summary(const std::vector<CertificateReport>& reports) {
    std::vector<CertificateReport> sorted = reports;
    sort_reports(sorted);
    std::ostringstream os;
    for (const auto& r : sorted) {
        os << (r.pass ? "PASS " : "FAIL ") << r.name;
        for (const auto& [k, v] : r.measured) os << "  " << k << "=" << fmt(v);
        for (const auto& [k, v] : r.tolerances) os << "  tol." << k << "=" << fmt(v);
        if (!r.violation.empty()) os << "  violation: " << r.violation;
        os << "\n";
    }
    return os.str();
}

double hamiltonian_integral(const ControlField& W, const AdjointTrajectory& adj, const BaseState& base,
                            double lambda_mult) {
    double s = 0.0;
    for (std::size_t n = 0; n < W.samples(); ++n) {
        VectorField v = adj.xi[n];
        v.divide_by(base.at(n).rho);
        s += 0.5 * lambda_mult * inner(W[n], W[n]) - inner(v, W[n]);
    }
    return s * W.dt();
}

namespace {

VectorField random_ball_element(const Grid& g, double R, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    VectorField w(g);
    for (double& x : w.values()) x = normal(rng);
    w *= R * unif(rng) / norm_l2(w);
    return w;
}

}  // namespace

CertificateReport check_pontryagin(const ControlField& U, const AdjointTrajectory& adj, const BaseState& base,
                                   double lambda_mult, const PontryaginOptions& opts) {
    if (!(lambda_mult > 0.0))
        raise(ErrorKind::DegenerateMultiplier,
              "abnormal multiplier lambda = " + std::to_string(lambda_mult) + "; analytic minimizer skipped");
    CertificateReport r;
    r.name = "pontryagin";
    const double phi_star = hamiltonian_integral(U, adj, base, lambda_mult);
    const double tol = opts.tol >= 0.0 ? opts.tol : 1e-8 * std::max(1.0, std::abs(phi_star));

    ControlField Wd = U;
    for (std::size_t n = 0; n < U.samples(); ++n) {
        VectorField v = adj.xi[n];
        v.divide_by(base.at(n).rho);
        v.set_no_slip(false);
        v *= 1.0 / lambda_mult;
        Wd[n] = project_to_ball(v, U.radius());
    }
    const double phi_dagger = hamiltonian_integral(Wd, adj, base, lambda_mult);

    std::mt19937_64 rng(opts.seed);
    double min_sample = INFINITY, worst = -INFINITY, sanity = -INFINITY;
    int worst_idx = -1;
    auto consider = [&](double phi, int idx) {
        const double excess = phi_star - phi;
        if (excess > worst) {
            worst = excess;
            worst_idx = idx;
        }
    };
    consider(phi_dagger, -1);
    for (int s = 0; s < opts.n_samples; ++s) {
        ControlField W = U;
        for (std::size_t n = 0; n < U.samples(); ++n) W[n] = random_ball_element(U.grid(), U.radius(), rng);
        const double phi = hamiltonian_integral(W, adj, base, lambda_mult);
        min_sample = std::min(min_sample, phi);
        sanity = std::max(sanity, phi_dagger - phi);
        consider(phi, s);
    }
    r.measured = {{"Phi_star", phi_star},
                  {"Phi_dagger", phi_dagger},
                  {"min_sample_Phi", min_sample},
                  {"max_excess", worst},
                  {"dagger_sanity_excess", sanity},
                  {"lambda", lambda_mult},
                  {"samples", static_cast<double>(opts.n_samples)}};
    r.tolerances = {{"excess", tol}};
    r.pass = worst <= tol && sanity <= tol;
    if (!r.pass) {
        r.violation = (worst_idx < 0 ? std::string("analytic minimizer") : "sample " + std::to_string(worst_idx)) +
                      " undercuts Phi(U*) by " + fmt(worst);
        if (sanity > tol) r.violation += "; analytic minimizer exceeds a sample by " + fmt(sanity);
    }
    return r;
}

CertificateReport check_normal_cone(const ConstraintSpec& constraint, const Observation& x, const Observation& a,
                                    int n_samples, std::uint64_t seed, double tol) {
    CertificateReport r;
    r.name = "normal_cone";
    double worst = -INFINITY;
    int worst_idx = -1;
    const double a_norm = norm(a);
    auto consider = [&](const Observation& w, int idx) {
        const double p = inner(a, w - x);
        if (p > worst) {
            worst = p;
            worst_idx = idx;
        }
    };
    if (constraint.active()) consider(project_to_W(constraint, x), -1);
    else consider(x, -1);
    for (int s = 0; s < n_samples; ++s)
        consider(sample_W(constraint, x, seed + static_cast<std::uint64_t>(s), s % 2 == 1), s);
    r.measured = {{"max_pairing", worst}, {"a_norm", a_norm}, {"samples", static_cast<double>(n_samples)},
                  {"d_W", distance_to_W(constraint, x)}};
    r.tolerances = {{"pairing", tol}};
    r.pass = worst <= tol;
    if (!r.pass)
        r.violation = (worst_idx < 0 ? std::string("projection") : "sample " + std::to_string(worst_idx)) +
                      " has pairing " + fmt(worst);
    return r;
}

SensitivityPair solve_sensitivity(const BaseState& base, double tau, const VectorField& W, const ControlField& U,
                                  const ForwardOptions& opts) {
    const std::size_t N = base.steps();
    const std::size_t before = sample_before(base.dt(), U.samples(), tau);
    const std::size_t k = before + 1;
    SensitivityPair sp;
    sp.tau = tau;
    sp.tau_node = k;
    sp.times = base.times();
    const Grid& g = base.grid();
    sp.z.assign(N + 1, ScalarField(g));
    sp.v.assign(N + 1, VectorField(g, true));
    VectorField v0 = W - U[before];
    v0.divide_by(base.at(k).rho);
    v0.set_no_slip(true);
    ForwardOptions fo = opts;
    fo.start_node = k;
    fo.zero_control = true;
    const StateTrajectory tr = solve_linearized(base, U, ScalarField(g), v0, fo);
    for (std::size_t j = 0; j < tr.size(); ++j) {
        sp.z[k + j] = tr.rho[j];
        sp.v[k + j] = tr.u[j];
    }
    return sp;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

CertificateReport check_spike_convergence(const SpikeStudy& st) {
    CertificateReport r;
    r.name = "spike";
    const BaseState& base = *st.base;
    const SensitivityPair sens = solve_sensitivity(base, st.tau, st.W, st.U, st.forward);
    const StateTrajectory y = solve_linearized(base, st.U, st.rho0, st.u0, st.forward);
    std::vector<double> hs, es;
    double pre_diff = 0.0;
    r.table_columns = {"h", "e"};
    for (double h : st.h_list) {
        const ControlField Uh = spike_variation(st.U, st.tau, h, st.W);
        const auto [first, last] = spike_samples(base.dt(), st.U.samples(), st.tau, h);
        const StateTrajectory yh = solve_linearized(base, Uh, st.rho0, st.u0, st.forward);
        for (std::size_t n = 0; n <= first; ++n) {
            pre_diff = std::max(pre_diff, max_abs_diff(yh.rho[n].values(), y.rho[n].values()));
            pre_diff = std::max(pre_diff, max_abs_diff(yh.u[n].values(), y.u[n].values()));
        }
        double e = 0.0;
        for (std::size_t n = sens.tau_node; n < y.size(); ++n) {
            ScalarField z = yh.rho[n] - y.rho[n];
            z *= 1.0 / h;
            VectorField v = yh.u[n] - y.u[n];
            v *= 1.0 / h;
            const double ez = norm_l2(z - sens.z[n]);
            const double ev = norm_l2(v - sens.v[n]);
            e = std::max(e, std::sqrt(ez * ez + ev * ev));
        }
        hs.push_back(h);
        es.push_back(e);
        r.table.push_back({h, e});
        (void)last;
    }
    bool monotone = true;
    std::vector<std::size_t> order(hs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return hs[a] > hs[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) monotone = monotone && es[order[i]] < es[order[i - 1]];
    double scale = 0.0;
    for (const auto& v : sens.v) scale = std::max(scale, norm_l2(v));
    const double emax = *std::max_element(es.begin(), es.end());
    const bool trivial = emax <= 1e-12 * std::max(1.0, scale);
    const double slope = (trivial || hs.size() < 2) ? 0.0 : fit_slope(hs, es);
    r.measured = {{"slope", slope}, {"monotone", monotone ? 1.0 : 0.0}, {"pre_spike_max_diff", pre_diff},
                  {"e_max", emax}, {"sensitivity_scale", scale}};
    r.tolerances = {{"min_slope", 0.8}, {"pre_spike_max_diff", 0.0}};
    if (trivial) {
        r.pass = pre_diff == 0.0;
        r.note = "difference quotients match the sensitivity to rounding; slope not fitted";
    } else {
        r.pass = monotone && slope >= 0.8 && pre_diff == 0.0;
    }
    r.note += (r.note.empty() ? "" : "; ") + std::string("convergence rate is an empirical expectation (order one)");
    if (!r.pass)
        r.violation = "slope " + fmt(slope) + (monotone ? "" : ", non-monotone e(h)") +
                      (pre_diff != 0.0 ? ", trajectories differ before the spike by " + fmt(pre_diff) : "");
    return r;
}

CertificateReport check_continuous_dependence(const std::vector<DependenceLevel>& levels, int members,
                                              double max_spread, const ForwardOptions& fwd) {
    CertificateReport r;
    r.name = "dependence";
    r.table_columns = {"level", "member", "dU_norm", "sup_energy", "ratio"};
    double lo = INFINITY, hi = 0.0;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const DependenceLevel& L = levels[l];
        const StateTrajectory y = solve_linearized(*L.base, L.U, L.rho0, L.u0, fwd);
        for (int k = 0; k < members; ++k) {
            ControlField dU = L.dU;
            dU *= std::ldexp(1.0, -k);
            ControlField Up = L.U;
            Up.axpy(1.0, dU);
            const StateTrajectory yp = solve_linearized(*L.base, Up, L.rho0, L.u0, fwd);
            double sup = 0.0;
            for (std::size_t n = 0; n < y.size(); ++n)
                sup = std::max(sup, full_energy(yp.rho[n] - y.rho[n], yp.u[n] - y.u[n], L.base->params()));
            const double du = dU.norm();
            if (du == 0.0) {
                r.table.push_back({static_cast<double>(l), static_cast<double>(k), 0.0, sup, 0.0});
                continue;
            }
            const double ratio = sup / (du * du);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            r.table.push_back({static_cast<double>(l), static_cast<double>(k), du, sup, ratio});
        }
    }
    const double spread = (hi > 0.0 && std::isfinite(lo)) ? hi / lo - 1.0 : 0.0;
    r.measured = {{"ratio_min", std::isfinite(lo) ? lo : 0.0}, {"ratio_max", hi}, {"spread", spread}};
    r.tolerances = {{"spread", max_spread}};
    r.pass = spread <= max_spread && std::isfinite(hi);
    if (!std::isfinite(lo)) r.note = "zero perturbation: ratio skipped";
    if (!r.pass) r.violation = "ratio spread " + fmt(spread);
    return r;
}

std::vector<ControlField> smooth_directions(const Grid& g, std::size_t samples, double dt, double radius, int count,
                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> mode(1, 3), tmode(0, 2);
    const double T = dt * static_cast<double>(samples);
    std::vector<ControlField> out;
    for (int q = 0; q < count; ++q) {
        ControlField d(g, samples, dt, radius);
        for (int c = 0; c < g.dim; ++c) {
            for (int term = 0; term < 4; ++term) {
                int k[3] = {1, 1, 1};
                for (int a = 0; a < 3; ++a) k[a] = mode(rng);
                const int l = tmode(rng);
                const double coef = normal(rng);
                for (std::size_t n = 0; n < samples; ++n) {
                    const double t = (static_cast<double>(n) + 0.5) * dt;
                    const double ct = coef * std::cos(l * std::numbers::pi * t / T);
                    for (std::size_t i = 0; i < g.cells(); ++i) {
                        const auto ci = g.coords(i);
                        double s = ct;
                        for (int a = 0; a < g.dim; ++a)
                            s *= std::sin(k[a] * std::numbers::pi * g.center(a, ci[a]) / g.length(a));
                        d[n].at(c, i) += s;
                    }
                }
            }
        }
        d *= 1.0 / d.norm();
        out.push_back(std::move(d));
    }
    return out;
}

CertificateReport check_gradient(const GradientStudy& st) {
    CertificateReport r;
    r.name = "gradient";
    const Problem& p = *st.problem;
    OptimizeOptions oo;
    oo.mode = st.mode;
    oo.forward = st.forward;
    const Evaluation ev = evaluate(p, st.U, false, 0.0, 0.0, oo);
    const double gnorm = ev.gradient.norm();
    r.table_columns = {"direction", "fd", "adjoint", "rel_error", "directional_ratio"};
    double worst = 0.0, worst_dir = 0.0;
    int worst_idx = -1;
    for (std::size_t k = 0; k < st.directions.size(); ++k) {
        const ControlField& d = st.directions[k];
        ControlField Up = st.U, Um = st.U;
        Up.axpy(st.step, d);
        Um.axpy(-st.step, d);
        const double Jp = evaluate_cost(solve_linearized(*p.base, Up, p.rho0, p.u0, st.forward), Up, p.targets).J;
        const double Jm = evaluate_cost(solve_linearized(*p.base, Um, p.rho0, p.u0, st.forward), Um, p.targets).J;
        const double fd = (Jp - Jm) / (2.0 * st.step);
        const double gd = inner(ev.gradient, d);
        // Differences at the rounding level of the two cost values count as agreement.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(Jp) + std::abs(Jm)) / st.step;
        const double diff = std::abs(fd - gd);
        const double scale = gnorm * d.norm();
        const double rel = diff <= noise ? 0.0 : diff / std::max(scale, std::abs(fd));
        const double dir = diff <= noise ? 0.0 : diff / std::max(std::abs(fd), std::abs(gd));
        r.table.push_back({static_cast<double>(k), fd, gd, rel, dir});
        worst_dir = std::max(worst_dir, dir);
        if (rel > worst) {
            worst = rel;
            worst_idx = static_cast<int>(k);
        }
    }
    r.measured = {{"max_rel_error", worst},
                  {"max_directional_ratio", worst_dir},
                  {"gradient_norm", gnorm},
                  {"J", ev.cost.J},
                  {"mode_exact", st.mode == AdjointMode::ExactTranspose ? 1.0 : 0.0}};
    r.tolerances = {{"rel_error", st.tol}};
    r.pass = worst <= st.tol;
    r.note = "rel_error = |fd - <g,d>| / max(||g|| ||d||, |fd|)";
    if (!r.pass) r.violation = "direction " + std::to_string(worst_idx) + " has relative error " + fmt(worst);
    return r;
}

CertificateReport check_gradient_refinement(const CertificateReport& coarse, const CertificateReport& fine,
                                            double tol, double min_factor) {
    CertificateReport r;
    r.name = "gradient_refinement";
    const double ec = coarse.get("max_rel_error"), ef = fine.get("max_rel_error");
    const double factor = ef > 0.0 ? ec / ef : (ec > 0.0 ? INFINITY : 0.0);
    r.measured = {{"rel_error_coarse", ec}, {"rel_error_fine", ef}, {"factor", factor}};
    r.tolerances = {{"rel_error", tol}, {"min_factor", min_factor}};
    const bool exact = ec == 0.0 && ef == 0.0;
    r.pass = ec <= tol && ef <= tol && (exact || factor >= min_factor);
    if (exact) r.note = "finite differences agree to rounding on both levels";
    if (!r.pass)
        r.violation = "errors " + fmt(ec) + " -> " + fmt(ef) + " (factor " + fmt(factor) + ", tolerance " + fmt(tol) + ")";
    return r;
}

VectorField solve_lame(const VectorField& F, double mu, double lam, const CgOptions& cg) {
    if (!(mu > 0.0) || !(4.0 * mu + 3.0 * lam > 0.0))
        raise(ErrorKind::ParameterViolation, "Lame system needs mu > 0 and 4 mu + 3 lam > 0 (mu = " +
                                                 std::to_string(mu) + ", lam = " + std::to_string(lam) + ")");
    return solve_viscous(nullptr, 1.0, mu, lam, F, cg);
}

CertificateReport check_lame(int dim, double mu, double lam, const LameOptions& opts) {
    if (!(mu > 0.0) || !(4.0 * mu + 3.0 * lam > 0.0))
        raise(ErrorKind::ParameterViolation, "Lame system needs mu > 0 and 4 mu + 3 lam > 0 (mu = " +
                                                 std::to_string(mu) + ", lam = " + std::to_string(lam) + ")");
    if (dim < 2) raise(ErrorKind::InvalidArgument, "Lame certificate needs dim >= 2");
    CertificateReport r;
    r.name = "lame";
    r.table_columns = {"cells", "h", "error_l2", "ratio_h2"};
    const double pi = std::numbers::pi;
    std::vector<double> hs, errs, ratios;
    for (int level = 0; level <= opts.refinements; ++level) {
        const Grid g = Grid::unit(dim, opts.base_cells << level);
        VectorField exact(g, true), F(g);
        for (std::size_t i = 0; i < g.cells(); ++i) {
            const auto c = g.coords(i);
            double x[3] = {0.5, 0.5, 0.5};
            for (int a = 0; a < dim; ++a) x[a] = g.center(a, c[a]);
            const double s0 = std::sin(pi * x[0]), s1 = std::sin(pi * x[1]);
            const double c0 = std::cos(pi * x[0]), c1 = std::cos(pi * x[1]);
            const double s2 = dim == 3 ? std::sin(pi * x[2]) : 1.0, c2 = dim == 3 ? std::cos(pi * x[2]) : 0.0;
            const double u = s0 * s1 * s2;
            // Lap u_c = -dim pi^2 u; d_a div u = pi^2 (sum over b of d_a d_b phi / pi^2).
            const double hess[3][3] = {{-s0 * s1 * s2, c0 * c1 * s2, c0 * s1 * c2},
                                       {c0 * c1 * s2, -s0 * s1 * s2, s0 * c1 * c2},
                                       {c0 * s1 * c2, s0 * c1 * c2, -s0 * s1 * s2}};
            for (int a = 0; a < dim; ++a) {
                exact.at(a, i) = u;
                double gd = 0.0;
                for (int b = 0; b < dim; ++b) gd += hess[a][b];
                F.at(a, i) = -mu * (-dim * pi * pi * u) - (mu + lam) * pi * pi * gd;
            }
        }
        const VectorField uh = solve_lame(F, mu, lam);
        const double err = norm_l2(uh - exact);
        const double ratio = norm_h2(uh) / norm_l2(F);
        hs.push_back(g.h[0]);
        errs.push_back(err);
        ratios.push_back(ratio);
        r.table.push_back({static_cast<double>(g.n[0]), g.h[0], err, ratio});
    }
    const double order = fit_slope(hs, errs);
    const double rmin = *std::min_element(ratios.begin(), ratios.end());
    const double rmax = *std::max_element(ratios.begin(), ratios.end());
    const double spread = rmax / rmin - 1.0;
    r.measured = {{"order", order}, {"ratio_min", rmin}, {"ratio_max", rmax}, {"ratio_spread", spread}};
    r.tolerances = {{"min_order", opts.min_order}, {"ratio_spread", opts.ratio_spread}};
    r.pass = order >= opts.min_order && spread <= opts.ratio_spread;
    if (!r.pass) r.violation = "order " + fmt(order) + ", H2/L2 ratio spread " + fmt(spread);
    return r;
}

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

CertificateReport check_energy_certificates(const EnergyReport& coarse, const EnergyReport* fine) {
    CertificateReport r;
    r.name = "energy";
    const double res_c = max_abs(coarse.identity_residual);
    double margin = coarse.min_margin;
    bool bound = coarse.bound_holds;
    r.measured = {{"identity_residual", res_c}, {"min_bound_margin", margin}, {"kappa_integral", coarse.kappa_integral}};
    r.tolerances = {{"halving_low", 1.6}, {"halving_high", 2.4}};
    bool halving = true;
    if (fine) {
        const double res_f = max_abs(fine->identity_residual);
        bound = bound && fine->bound_holds;
        margin = std::min(margin, fine->min_margin);
        double ratio = 0.0;
        if (res_c == 0.0 && res_f == 0.0) {
            r.note = "identity residual vanishes on both grids";
        } else {
            ratio = res_f > 0.0 ? res_c / res_f : INFINITY;
            halving = ratio >= 1.6 && ratio <= 2.4;
        }
        r.measured.push_back({"identity_residual_fine", res_f});
        r.measured.push_back({"halving_ratio", ratio});
    }
    double emax = 0.0;
    for (double e : coarse.E) emax = std::max(emax, e);
    r.measured.push_back({"E_max", emax});
    r.measured.push_back({"bound_holds", bound ? 1.0 : 0.0});
    r.pass = bound && halving;
    if (!bound) r.violation = "energy or accumulated dissipation exceeds the growth bound (margin " + fmt(margin) + ")";
    if (!halving) r.violation += (r.violation.empty() ? "" : "; ") + std::string("identity residual does not halve");
    return r;
}

CertificateReport check_ekeland_metric(const ControlField& U, int n_spikes, std::uint64_t seed) {
    CertificateReport r;
    r.name = "ekeland_metric";
    const std::size_t N = U.samples();
    if (N < 2) raise(ErrorKind::InvalidArgument, "spike sampling needs at least two control samples");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> width(1, std::max<std::size_t>(1, N / 4));
    double max_de_error = 0.0, max_ratio = 0.0;
    r.table_columns = {"tau", "h", "d_E", "l2_distance", "bound"};
    for (int k = 0; k < n_spikes; ++k) {
        const std::size_t kh = width(rng);
        std::uniform_int_distribution<std::size_t> end(kh + 1, N);
        const std::size_t kt = end(rng);
        const double h = static_cast<double>(kh) * U.dt();
        const double tau = static_cast<double>(kt) * U.dt();
        const ControlField Uh = spike_variation(U, tau, h, random_ball_element(U.grid(), U.radius(), rng));
        const double dE = ekeland_distance(Uh, U);
        const double dist = (Uh - U).norm();
        const double bound = 2.0 * U.radius() * std::sqrt(h);
        max_de_error = std::max(max_de_error, std::abs(dE - h));
        max_ratio = std::max(max_ratio, dist / bound);
        r.table.push_back({tau, h, dE, dist, bound});
        if (r.violation.empty() && (dE != h || dist > bound * (1.0 + 1e-12)))
            r.violation = "spike tau=" + fmt(tau) + " h=" + fmt(h) + ": d_E=" + fmt(dE) + ", distance " + fmt(dist) +
                          " vs bound " + fmt(bound);
    }
    r.measured = {{"max_dE_error", max_de_error}, {"max_distance_ratio", max_ratio}, {"spikes", double(n_spikes)}};
    r.tolerances = {{"dE_error", 0.0}, {"distance_ratio", 1.0 + 1e-12}};
    r.pass = r.violation.empty();
    return r;
}

CertificateReport check_ekeland(const Problem& p, const ControlField& U_eps, double eps, double J_star,
                                const std::vector<std::pair<double, double>>& spikes, std::uint64_t seed, double tol,
                                const OptimizeOptions& opts) {
    CertificateReport r;
    r.name = "ekeland";
    const double J0 =
        penalized_cost(solve_linearized(*p.base, U_eps, p.rho0, p.u0, opts.forward), U_eps, p.targets, p.constraint,
                       eps, J_star)
            .J_eps;
    std::mt19937_64 rng(seed);
    double worst = -INFINITY;
    r.table_columns = {"tau", "h", "d_E", "J_eps"};
    for (const auto& [tau, h] : spikes) {
        const VectorField W = random_ball_element(U_eps.grid(), U_eps.radius(), rng);
        const ControlField Uh = spike_variation(U_eps, tau, h, W);
        const double dE = ekeland_distance(Uh, U_eps);
        const double Jh = penalized_cost(solve_linearized(*p.base, Uh, p.rho0, p.u0, opts.forward), Uh, p.targets,
                                         p.constraint, eps, J_star)
                              .J_eps;
        worst = std::max(worst, (J0 - std::sqrt(eps) * dE) - Jh);
        r.table.push_back({tau, h, dE, Jh});
    }
    r.measured = {{"J_eps_incumbent", J0}, {"max_violation", worst}};
    r.tolerances = {{"violation", tol}};
    r.pass = worst <= tol;
    if (!r.pass) r.violation = "spike candidate undercuts the incumbent by " + fmt(worst);
    return r;
}

}  // namespace lcns
