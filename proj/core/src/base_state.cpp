#include "lcns/base_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

PressureLaw PressureLaw::parse(const std::string& src) {
    PressureLaw law;
    law.p = Expr::parse(src);
    for (Var v : {Var::X1, Var::X2, Var::X3, Var::T})
        if (law.p.depends_on(v)) raise(ErrorKind::ParseError, "pressure law may only depend on rho: " + src);
    law.dp = law.p.diff(Var::Rho);
    law.d2p = law.dp.diff(Var::Rho);
    return law;
}

std::vector<double> uniform_times(double T, int steps) {
    if (!(T > 0.0) || steps < 1) raise(ErrorKind::InvalidArgument, "time grid needs T > 0 and at least one step");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int n = 0; n <= steps; ++n) t[n] = T * n / steps;
    return t;
}

double BaseState::dt() const { return times_.size() < 2 ? 0.0 : times_[1] - times_[0]; }

namespace {

constexpr Var kAxis[3] = {Var::X1, Var::X2, Var::X3};

struct Symbolic {
    int dim = 1;
    Expr rho, rho_t;
    std::array<Expr, 3> grad_rho;
    std::array<std::array<Expr, 3>, 3> hess_rho;
    std::array<Expr, 3> u, u_t;
    std::array<std::array<Expr, 3>, 3> du;                  // du[i][j] = d_j u_i
    std::array<std::array<std::array<Expr, 3>, 3>, 3> d2u;  // d2u[i][j][k] = d_j d_k u_i
};

Symbolic differentiate(const Expr& rho, const std::array<Expr, 3>& u, int dim) {
    Symbolic s;
    s.dim = dim;
    s.rho = rho;
    s.rho_t = rho.diff(Var::T);
    for (int i = 0; i < dim; ++i) {
        s.grad_rho[i] = rho.diff(kAxis[i]);
        s.u[i] = u[i];
        s.u_t[i] = u[i].diff(Var::T);
        for (int j = 0; j < dim; ++j) {
            s.hess_rho[i][j] = s.grad_rho[i].diff(kAxis[j]);
            s.du[i][j] = u[i].diff(kAxis[j]);
        }
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) s.d2u[i][j][k] = s.du[i][j].diff(kAxis[k]);
    return s;
}

EvalPoint point_at(const Grid& g, std::size_t idx, double t) {
    EvalPoint p;
    const auto c = g.coords(idx);
    for (int a = 0; a < g.dim; ++a) p.x[a] = g.center(a, c[a]);
    p.t = t;
    return p;
}

BaseSlot build_slot(const Symbolic& s, const PressureLaw& law, const Grid& g, const FluidParams& fp, double t) {
    const int d = g.dim;
    const std::size_t n = g.cells();
    BaseSlot b;
    b.time = t;
    b.rho = ScalarField(g);
    b.u = VectorField(g, true);
    b.dt_u = VectorField(g, true);
    b.f = VectorField(g);
    b.accel = VectorField(g);
    b.pprime = ScalarField(g);
    b.grad_pprime = VectorField(g);
    b.grad_rho = VectorField(g);
    b.grad_u.assign(static_cast<std::size_t>(d * d), ScalarField(g));
    b.hess_rho.assign(static_cast<std::size_t>(d * d), ScalarField(g));
    b.grad_div_u = VectorField(g);
    b.mass_residual = ScalarField(g);
    b.dt_rho = ScalarField(g);

    for (std::size_t idx = 0; idx < n; ++idx) {
        EvalPoint p = point_at(g, idx, t);
        const double r = s.rho.eval(p);
        p.rho = r;
        const double pp = law.dp.eval(p);
        const double ppp = law.d2p.eval(p);
        b.rho[idx] = r;
        b.pprime[idx] = pp;
        b.dt_rho[idx] = s.rho_t.eval(p);
        double uval[3] = {0, 0, 0};
        double du[3][3] = {};
        for (int i = 0; i < d; ++i) {
            uval[i] = s.u[i].eval(p);
            for (int j = 0; j < d; ++j) du[i][j] = s.du[i][j].eval(p);
        }
        double mass = b.dt_rho[idx];
        for (int i = 0; i < d; ++i) {
            const double gr = s.grad_rho[i].eval(p);
            b.grad_rho.at(i, idx) = gr;
            b.grad_pprime.at(i, idx) = ppp * gr;
            b.u.at(i, idx) = uval[i];
            const double ut = s.u_t[i].eval(p);
            b.dt_u.at(i, idx) = ut;
            double acc = ut;
            double lap = 0.0, gd = 0.0;
            for (int j = 0; j < d; ++j) {
                acc += uval[j] * du[i][j];
                b.grad_u[i * d + j][idx] = du[i][j];
                b.hess_rho[i * d + j][idx] = s.hess_rho[i][j].eval(p);
                lap += s.d2u[i][j][j].eval(p);
                gd += s.d2u[j][i][j].eval(p);
            }
            b.accel.at(i, idx) = acc;
            b.grad_div_u.at(i, idx) = gd;
            b.f.at(i, idx) = acc + (pp * gr - fp.mu * lap - (fp.mu + fp.lam) * gd) / r;
            mass += gr * uval[i] + r * du[i][i];
        }
        b.mass_residual[idx] = mass;
    }
    return b;
}

// L2 norm of u~ over the wall faces, evaluated from the expressions.
double wall_trace(const std::array<Expr, 3>& u, const Grid& g, double t) {
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const double area = g.cell_volume() / g.h[a];
        for (std::size_t idx = 0; idx < g.cells(); ++idx) {
            const auto c = g.coords(idx);
            if (c[a] != 0) continue;
            for (double wall : {0.0, g.length(a)}) {
                EvalPoint p = point_at(g, idx, t);
                p.x[a] = wall;
                for (int i = 0; i < g.dim; ++i) {
                    const double v = u[i].eval(p);
                    s += v * v * area;
                }
            }
        }
    }
    return std::sqrt(s);
}

}  // namespace

BaseState BaseState::manufacture(const Expr& rho_expr, const std::array<Expr, 3>& u_expr, const PressureLaw& law,
                                 const Grid& grid, const FluidParams& params, std::vector<double> times,
                                 const ManufactureOptions& opts) {
    if (times.size() < 2) raise(ErrorKind::InvalidArgument, "base state needs at least two time nodes");
    if (rho_expr.depends_on(Var::Rho)) raise(ErrorKind::ParseError, "density expression may not reference rho");
    for (int i = 0; i < 3; ++i) {
        if (u_expr[i].depends_on(Var::Rho)) raise(ErrorKind::ParseError, "velocity expression may not reference rho");
        if (i >= grid.dim && !u_expr[i].is_zero())
            raise(ErrorKind::InvalidArgument, "velocity component beyond grid dimension must be 0");
    }

    BaseState b;
    b.grid_ = grid;
    b.params_ = params;
    b.times_ = std::move(times);
    b.rho_expr_ = rho_expr;
    b.u_expr_ = u_expr;
    b.law_ = law;

    bool steady = !rho_expr.depends_on(Var::T);
    for (const auto& e : u_expr) steady = steady && !e.depends_on(Var::T);

    const Symbolic sym = differentiate(rho_expr, u_expr, grid.dim);
    const std::size_t nslots = steady ? 1 : b.times_.size();
    b.slots_.reserve(nslots);
    b.m_ = INFINITY;
    b.M_ = -INFINITY;
    for (std::size_t k = 0; k < nslots; ++k) {
        const double t = b.times_[k];
        b.slots_.push_back(build_slot(sym, law, grid, params, t));
        const BaseSlot& s = b.slots_.back();
        for (double r : s.rho.values()) {
            b.m_ = std::min(b.m_, r);
            b.M_ = std::max(b.M_, r);
        }
        b.u_max_ = std::max(b.u_max_, norm_max(s.u));
        if (!s.rho.all_finite() || !s.f.all_finite() || !s.u.all_finite())
            raise(ErrorKind::NonFiniteState, "base state is not finite at t = " + std::to_string(t));
        const double mres = norm_l2(s.mass_residual);
        if (mres > opts.mass_tol)
            raise(ErrorKind::MassResidual, "mass residual " + std::to_string(mres) + " exceeds tolerance at t = " +
                                               std::to_string(t));
        const double tr = wall_trace(u_expr, grid, t);
        if (tr > opts.trace_tol)
            raise(ErrorKind::InvalidArgument, "base velocity does not vanish on the walls (trace " +
                                                  std::to_string(tr) + ")");
    }
    if (!(b.m_ > opts.rho_floor))
        raise(ErrorKind::PositivityViolation, "min density " + std::to_string(b.m_) + " is not above " +
                                                  std::to_string(opts.rho_floor));
    return b;
}

BaseState BaseState::manufacture(const std::string& rho_expr, const std::array<std::string, 3>& u_expr,
                                 const std::string& pressure, const Grid& grid, const FluidParams& params,
                                 std::vector<double> times, const ManufactureOptions& opts) {
    std::array<Expr, 3> u{Expr::parse(u_expr[0]), Expr::parse(u_expr[1]), Expr::parse(u_expr[2])};
    return manufacture(Expr::parse(rho_expr), u, PressureLaw::parse(pressure), grid, params, std::move(times), opts);
}

double norm_lp(const ScalarField& s, double p) {
    double acc = 0.0;
    for (double x : s.values()) acc += std::pow(std::abs(x), p);
    return std::pow(acc * s.grid().cell_volume(), 1.0 / p);
}

double norm_lp(const VectorField& v, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.cells(); ++i) {
        double m = 0.0;
        for (int c = 0; c < v.dim(); ++c) m += v.at(c, i) * v.at(c, i);
        acc += std::pow(std::sqrt(m), p);
    }
    return std::pow(acc * v.grid().cell_volume(), 1.0 / p);
}

namespace {

double matrix_lp(const std::vector<ScalarField>& m, const Grid& g, double p, bool sup) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        double s = 0.0;
        for (const auto& e : m) s += e[i] * e[i];
        s = std::sqrt(s);
        acc = sup ? std::max(acc, s) : acc + std::pow(s, p);
    }
    return sup ? acc : std::pow(acc * g.cell_volume(), 1.0 / p);
}

// Discrete momentum defect on cells away from the walls.
double momentum_defect(const BaseState& base, const BaseSlot& s) {
    const Grid& g = base.grid();
    const int d = g.dim;
    ScalarField pr(g);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        EvalPoint p;
        p.rho = s.rho[i];
        pr[i] = base.pressure().p.eval(p);
    }
    VectorField r = grad(pr, Edge::OneSided);
    r -= stress_div(s.u, base.params());
    VectorField adv(g);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            ScalarField ui = s.u.component(i);
            ScalarField dj = partial(ui, j, Edge::OneSided);
            for (std::size_t k = 0; k < g.cells(); ++k) adv.at(i, k) += s.u.at(j, k) * dj[k];
        }
    }
    adv += s.dt_u;
    adv -= s.f;
    r += pointwise(s.rho, adv);
    double acc = 0.0;
    for (std::size_t k = 0; k < g.cells(); ++k) {
        const auto c = g.coords(k);
        bool inner_cell = true;
        for (int a = 0; a < d; ++a) inner_cell = inner_cell && c[a] > 0 && c[a] + 1 < g.n[a];
        if (!inner_cell) continue;
        for (int i = 0; i < d; ++i) acc += r.at(i, k) * r.at(i, k);
    }
    return std::sqrt(acc * g.cell_volume());
}

}  // namespace

CoefficientNorms coefficient_norms(const BaseSlot& s, const Grid& g) {
    CoefficientNorms c;
    c.grad_u_linf = matrix_lp(s.grad_u, g, 0.0, true);
    c.accel_l3 = norm_lp(s.accel, 3.0);
    c.grad_rho_linf = norm_max(s.grad_rho);
    c.hess_rho_l3 = matrix_lp(s.hess_rho, g, 3.0, false);
    c.pprime_linf = norm_max(s.pprime);
    c.grad_pprime_l3 = norm_lp(s.grad_pprime, 3.0);
    c.grad_div_u_l3 = norm_lp(s.grad_div_u, 3.0);
    c.f_l3 = norm_lp(s.f, 3.0);
    return c;
}

BaseReport validate(const BaseState& base) {
    BaseReport r;
    r.rho_min = base.m();
    r.rho_max = base.M();
    r.positive = base.m() > 0.0;
    const std::size_t nslots = base.steady() ? 1 : base.times().size();
    for (std::size_t k = 0; k < nslots; ++k) {
        const BaseSlot& s = base.at(k);
        r.mass_residual = std::max(r.mass_residual, norm_l2(s.mass_residual));
        r.momentum_residual = std::max(r.momentum_residual, momentum_defect(base, s));
        r.boundary_trace = std::max(r.boundary_trace, wall_trace(base.u_expr(), base.grid(), s.time));
        const CoefficientNorms c = coefficient_norms(s, base.grid());
        r.per_node.push_back(c);
        auto up = [](double& a, double b) { a = std::max(a, b); };
        up(r.sup.grad_u_linf, c.grad_u_linf);
        up(r.sup.accel_l3, c.accel_l3);
        up(r.sup.grad_rho_linf, c.grad_rho_linf);
        up(r.sup.hess_rho_l3, c.hess_rho_l3);
        up(r.sup.pprime_linf, c.pprime_linf);
        up(r.sup.grad_pprime_l3, c.grad_pprime_l3);
        up(r.sup.grad_div_u_l3, c.grad_div_u_l3);
        up(r.sup.f_l3, c.f_l3);
    }
    return r;
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

BaseState make_family(const FamilySpec& spec, const Grid& grid, const FluidParams& params, std::vector<double> times,
                      const ManufactureOptions& opts) {
    std::string rho = "1";
    std::array<std::string, 3> u{"0", "0", "0"};
    std::string pressure = spec.pressure;
    const std::string L1 = num(grid.length(0)), L2 = num(grid.length(1)), L3 = num(grid.length(2));
    if (spec.name == "rest") {
        rho = num(spec.rho0);
        if (pressure.empty()) pressure = "rho";
    } else if (spec.name == "density_wave") {
        rho = "2 + " + num(spec.amplitude) + "*sin(pi*x/" + L1 + ")";
        if (pressure.empty()) pressure = "rho^2";
    } else if (spec.name == "taylor") {
        if (grid.dim < 2) raise(ErrorKind::InvalidArgument, "taylor family needs dim >= 2");
        rho = num(spec.rho0);
        std::string tail;
        if (grid.dim == 3) tail += "*sin(pi*z/" + L3 + ")";
        if (spec.omega != 0.0) tail += "*cos(" + num(spec.omega) + "*t)";
        const std::string a = num(spec.amplitude);
        u[0] = a + "*sin(pi*x/" + L1 + ")^2*sin(2*pi*y/" + L2 + ")" + tail;
        u[1] = "-" + a + "*" + num(grid.length(1) / grid.length(0)) + "*sin(2*pi*x/" + L1 + ")*sin(pi*y/" + L2 +
               ")^2" + tail;
        if (pressure.empty()) pressure = "rho";
    } else if (spec.name == "custom") {
        rho = spec.rho;
        u = spec.u;
        if (pressure.empty()) pressure = "rho";
    } else {
        raise(ErrorKind::InvalidArgument, "unknown base family '" + spec.name + "'");
    }
    return BaseState::manufacture(rho, u, pressure, grid, params, std::move(times), opts);
}

}  // namespace lcns
