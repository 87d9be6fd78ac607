#include "lcns/ops.hpp"

#include <algorithm>
#include <cmath>

#include "lcns/error.hpp"

namespace lcns {

namespace {

// Calls f(base, stride, n) for every grid line running along `axis`.
template <class F>
void for_each_line(const Grid& g, int axis, F&& f) {
    const std::size_t s = g.stride(axis);
    const std::size_t n = static_cast<std::size_t>(g.n[axis]);
    const std::size_t outer = g.cells() / (n * s);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < s; ++i) f(o * n * s + i, s, n);
}

// Non-zero entries of the first-derivative row k (times 2h): pairs (column, weight).
int d1_row(Edge e, std::size_t k, std::size_t n, std::size_t* col, double* w) {
    if (k > 0 && k + 1 < n) {
        col[0] = k + 1, w[0] = 1.0;
        col[1] = k - 1, w[1] = -1.0;
        return 2;
    }
    const bool first = (k == 0);
    switch (e) {
        case Edge::OneSided:
            if (first) {
                col[0] = 0, w[0] = -3.0;
                col[1] = 1, w[1] = 4.0;
                col[2] = 2, w[2] = -1.0;
            } else {
                col[0] = n - 1, w[0] = 3.0;
                col[1] = n - 2, w[1] = -4.0;
                col[2] = n - 3, w[2] = 1.0;
            }
            return 3;
        case Edge::Odd:
            if (first) {
                col[0] = 1, w[0] = 1.0;
                col[1] = 0, w[1] = 1.0;
            } else {
                col[0] = n - 1, w[0] = -1.0;
                col[1] = n - 2, w[1] = -1.0;
            }
            return 2;
        case Edge::Even:
            if (first) {
                col[0] = 1, w[0] = 1.0;
                col[1] = 0, w[1] = -1.0;
            } else {
                col[0] = n - 1, w[0] = 1.0;
                col[1] = n - 2, w[1] = -1.0;
            }
            return 2;
    }
    return 0;
}

void require_active_axis(const Grid& g, int axis) {
    if (axis < 0 || axis >= g.dim) raise(ErrorKind::InvalidArgument, "axis outside grid dimension");
}

// out (+)= scale * second difference along axis with the given ghost parity.
void apply_d2(const Grid& g, int axis, bool odd, const double* in, double* out, double scale) {
    const double c = scale / (g.h[axis] * g.h[axis]);
    const double ghost = odd ? -1.0 : 1.0;
    for_each_line(g, axis, [&](std::size_t b, std::size_t s, std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            const double x = in[b + k * s];
            const double left = (k > 0) ? in[b + (k - 1) * s] : ghost * x;
            const double right = (k + 1 < n) ? in[b + (k + 1) * s] : ghost * x;
            out[b + k * s] += c * (left - 2.0 * x + right);
        }
    });
}

double sum_sq(const double* p, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i] * p[i];
    return s;
}

}  // namespace

void apply_d1(const Grid& g, int axis, Edge edge, const double* in, double* out, double scale, bool transpose,
              bool accumulate) {
    require_active_axis(g, axis);
    if (!accumulate) std::fill(out, out + g.cells(), 0.0);
    const double c = scale / (2.0 * g.h[axis]);
    for_each_line(g, axis, [&](std::size_t b, std::size_t s, std::size_t n) {
        std::size_t col[3];
        double w[3];
        for (std::size_t k = 0; k < n; ++k) {
            const int m = d1_row(edge, k, n, col, w);
            if (!transpose) {
                double acc = 0.0;
                for (int j = 0; j < m; ++j) acc += w[j] * in[b + col[j] * s];
                out[b + k * s] += c * acc;
            } else {
                const double x = c * in[b + k * s];
                for (int j = 0; j < m; ++j) out[b + col[j] * s] += w[j] * x;
            }
        }
    });
}

ScalarField partial(const ScalarField& s, int axis, Edge edge) {
    ScalarField r(s.grid());
    apply_d1(s.grid(), axis, edge, s.data(), r.data());
    return r;
}

VectorField grad(const ScalarField& s, Edge edge) {
    const Grid& g = s.grid();
    VectorField r(g);
    for (int a = 0; a < g.dim; ++a) apply_d1(g, a, edge, s.data(), r.comp(a));
    return r;
}

ScalarField div(const VectorField& v) { return div(v, v.no_slip() ? Edge::Odd : Edge::OneSided); }

ScalarField div(const VectorField& v, Edge edge) {
    const Grid& g = v.grid();
    ScalarField r(g);
    for (int a = 0; a < g.dim; ++a) apply_d1(g, a, edge, v.comp(a), r.data(), 1.0, false, true);
    return r;
}

VectorField grad_adjoint(const ScalarField& s, Edge edge) {
    const Grid& g = s.grid();
    VectorField r(g);
    for (int a = 0; a < g.dim; ++a) apply_d1(g, a, edge, s.data(), r.comp(a), -1.0, true);
    return r;
}

ScalarField div_adjoint(const VectorField& v, Edge edge) {
    const Grid& g = v.grid();
    ScalarField r(g);
    for (int a = 0; a < g.dim; ++a) apply_d1(g, a, edge, v.comp(a), r.data(), -1.0, true, true);
    return r;
}

ScalarField laplacian(const ScalarField& s) {
    const Grid& g = s.grid();
    ScalarField r(g);
    for (int a = 0; a < g.dim; ++a) apply_d2(g, a, false, s.data(), r.data(), 1.0);
    return r;
}

VectorField laplacian(const VectorField& v) {
    const Grid& g = v.grid();
    VectorField r(g, v.no_slip());
    for (int c = 0; c < g.dim; ++c)
        for (int a = 0; a < g.dim; ++a) apply_d2(g, a, true, v.comp(c), r.comp(c), 1.0);
    return r;
}

VectorField grad_div(const VectorField& v) {
    const Grid& g = v.grid();
    const ScalarField d = div(v, Edge::Odd);
    VectorField r(g, v.no_slip());
    for (int a = 0; a < g.dim; ++a) apply_d1(g, a, Edge::Even, d.data(), r.comp(a));
    return r;
}

VectorField stress_div(const VectorField& u, const FluidParams& p) { return stress_div(u, p.mu, p.lam); }

VectorField stress_div(const VectorField& u, double mu, double lam) {
    const Grid& g = u.grid();
    VectorField r(g, u.no_slip());
    const ScalarField d = div(u, Edge::Odd);
    for (int c = 0; c < g.dim; ++c) {
        for (int a = 0; a < g.dim; ++a) apply_d2(g, a, true, u.comp(c), r.comp(c), mu);
        apply_d1(g, c, Edge::Even, d.data(), r.comp(c), mu + lam, false, true);
    }
    return r;
}

double inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid(), "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s * a.grid().cell_volume();
}

double norm_l2(const ScalarField& a) { return std::sqrt(inner(a, a)); }
double norm_l2(const VectorField& a) { return std::sqrt(inner(a, a)); }

double norm_h1(const ScalarField& s) {
    const VectorField gs = grad(s, Edge::OneSided);
    return std::sqrt(inner(s, s) + inner(gs, gs));
}

double norm_h1(const VectorField& v) {
    const Grid& g = v.grid();
    const Edge e = v.no_slip() ? Edge::Odd : Edge::OneSided;
    std::vector<double> tmp(g.cells());
    double s = sum_sq(v.data(), v.size());
    for (int c = 0; c < g.dim; ++c)
        for (int a = 0; a < g.dim; ++a) {
            apply_d1(g, a, e, v.comp(c), tmp.data());
            s += sum_sq(tmp.data(), tmp.size());
        }
    return std::sqrt(s * g.cell_volume());
}

double norm_max(const ScalarField& a) {
    double m = 0.0;
    for (double x : a.values()) m = std::max(m, std::abs(x));
    return m;
}

double norm_max(const VectorField& a) {
    double m = 0.0;
    const std::size_t n = a.cells();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < a.dim(); ++c) s += a.at(c, i) * a.at(c, i);
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

double norm_h2(const VectorField& v) {
    const Grid& g = v.grid();
    const std::size_t n = g.cells();
    std::vector<double> d1(n), d2(n);
    double s = sum_sq(v.data(), v.size());
    for (int c = 0; c < g.dim; ++c) {
        for (int a = 0; a < g.dim; ++a) {
            apply_d1(g, a, Edge::Odd, v.comp(c), d1.data());
            s += sum_sq(d1.data(), n);
            for (int b = 0; b < g.dim; ++b) {
                if (a == b) {
                    std::fill(d2.begin(), d2.end(), 0.0);
                    apply_d2(g, a, true, v.comp(c), d2.data(), 1.0);
                } else {
                    apply_d1(g, b, Edge::Odd, d1.data(), d2.data());
                }
                s += sum_sq(d2.data(), n);
            }
        }
    }
    return std::sqrt(s * g.cell_volume());
}

namespace {

template <class F>
double trapezoid_sq(const std::vector<F>& traj, double dt) {
    if (traj.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double w = (k == 0 || k + 1 == traj.size()) ? 0.5 : 1.0;
        s += w * inner(traj[k], traj[k]);
    }
    return std::sqrt(s * dt);
}

}  // namespace

double bochner_norm(const std::vector<ScalarField>& traj, double dt) { return trapezoid_sq(traj, dt); }
double bochner_norm(const std::vector<VectorField>& traj, double dt) { return trapezoid_sq(traj, dt); }

}  // namespace lcns
