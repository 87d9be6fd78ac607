#include "lcns/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

Observation Observation::zeros(const Grid& g, const std::vector<double>& weight) {
    Observation o;
    o.weight = weight;
    o.rho.assign(weight.size(), ScalarField(g));
    o.u.assign(weight.size(), VectorField(g));
    return o;
}

Observation& Observation::axpy(double a, const Observation& x) {
    if (x.size() != size()) raise(ErrorKind::GridMismatch, "observation lengths differ");
    for (std::size_t n = 0; n < size(); ++n) {
        rho[n].axpy(a, x.rho[n]);
        u[n].axpy(a, x.u[n]);
    }
    return *this;
}

Observation& Observation::operator*=(double a) {
    for (std::size_t n = 0; n < size(); ++n) {
        rho[n] *= a;
        u[n] *= a;
    }
    return *this;
}

double inner(const Observation& a, const Observation& b) {
    if (a.size() != b.size()) raise(ErrorKind::GridMismatch, "observation lengths differ");
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a.weight[n] * (inner(a.rho[n], b.rho[n]) + inner(a.u[n], b.u[n]));
    return s;
}

double norm(const Observation& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

Observation operator-(const Observation& a, const Observation& b) {
    Observation r = a;
    r.axpy(-1.0, b);
    return r;
}

std::vector<double> trapezoid_weights(const std::vector<double>& times) {
    std::vector<double> w(times.size(), 0.0);
    for (std::size_t n = 0; n + 1 < times.size(); ++n) {
        const double h = 0.5 * (times[n + 1] - times[n]);
        w[n] += h;
        w[n + 1] += h;
    }
    return w;
}

ScalarField kernel_average(const ScalarField& s, double width) {
    if (!(width > 0.0)) raise(ErrorKind::InvalidArgument, "kernel width must be positive");
    const Grid& g = s.grid();
    ScalarField cur = s;
    for (int ax = 0; ax < g.dim; ++ax) {
        const int n = g.n[ax];
        const double h = g.h[ax];
        std::vector<double> k(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double r = j * h / width;
            k[j] = std::exp(-0.5 * r * r);
        }
        double z = k[0];
        for (int j = 1; j < n; ++j) z += 2.0 * k[j];
        ScalarField next(g);
        const std::size_t st = g.stride(ax);
        const std::size_t outer = g.cells() / (static_cast<std::size_t>(n) * st);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < st; ++i) {
                const std::size_t b = o * n * st + i;
                for (int p = 0; p < n; ++p) {
                    double acc = 0.0;
                    for (int q = 0; q < n; ++q) acc += k[std::abs(p - q)] * cur[b + q * st];
                    next[b + p * st] = acc / z;
                }
            }
        cur = std::move(next);
    }
    return cur;
}

namespace {

ScalarField apply_observable(const ConstraintSpec& spec, const ScalarField& s, double c) {
    ScalarField r = spec.observable == ObservableKind::KernelAverage ? kernel_average(s, spec.kernel_width) : s;
    r *= c;
    return r;
}

VectorField apply_observable(const ConstraintSpec& spec, const VectorField& v, double c) {
    VectorField r(v.grid());
    for (int k = 0; k < v.dim(); ++k) r.set_component(k, apply_observable(spec, v.component(k), c));
    return r;
}

}  // namespace

Observation observe(const ConstraintSpec& spec, const StateTrajectory& traj) {
    Observation o;
    o.weight = trapezoid_weights(traj.times);
    for (std::size_t n = 0; n < traj.size(); ++n) {
        o.rho.push_back(apply_observable(spec, traj.rho[n], spec.c_rho));
        o.u.push_back(apply_observable(spec, traj.u[n], spec.c_u));
    }
    return o;
}

Observation observe_adjoint(const ConstraintSpec& spec, const Observation& a) {
    Observation o;
    o.weight = a.weight;
    for (std::size_t n = 0; n < a.size(); ++n) {
        o.rho.push_back(apply_observable(spec, a.rho[n], spec.c_rho));
        o.u.push_back(apply_observable(spec, a.u[n], spec.c_u));
    }
    return o;
}

std::vector<Observation> box_functionals(const Grid& g, const std::vector<double>& weight) {
    std::vector<Observation> psi;
    for (int k = 0; k <= g.dim; ++k) {
        Observation p = Observation::zeros(g, weight);
        for (std::size_t n = 0; n < weight.size(); ++n) {
            if (k == 0) std::fill(p.rho[n].values().begin(), p.rho[n].values().end(), 1.0);
            else std::fill(p.u[n].comp(k - 1), p.u[n].comp(k - 1) + g.cells(), 1.0);
        }
        p *= 1.0 / norm(p);
        psi.push_back(std::move(p));
    }
    return psi;
}

namespace {

void require_box(const ConstraintSpec& spec, int dim) {
    const std::size_t m = static_cast<std::size_t>(dim) + 1;
    if (spec.box_lo.size() != m || spec.box_hi.size() != m)
        raise(ErrorKind::InvalidArgument, "box constraint needs dim + 1 lower and upper bounds");
    for (std::size_t k = 0; k < m; ++k)
        if (spec.box_lo[k] > spec.box_hi[k]) raise(ErrorKind::InvalidArgument, "box bounds are empty");
}

}  // namespace

Observation project_to_W(const ConstraintSpec& spec, const Observation& x) {
    switch (spec.set) {
        case SetKind::WholeSpace: return x;
        case SetKind::Ball: {
            Observation diff = x - spec.center;
            const double r = norm(diff);
            if (r <= spec.radius) return x;
            Observation p = spec.center;
            p.axpy(spec.radius / r, diff);
            return p;
        }
        case SetKind::Box: {
            const Grid& g = x.rho.front().grid();
            require_box(spec, g.dim);
            const auto psi = box_functionals(g, x.weight);
            Observation p = x;
            for (std::size_t k = 0; k < psi.size(); ++k) {
                const double l = inner(psi[k], x);
                const double c = std::clamp(l, spec.box_lo[k], spec.box_hi[k]);
                if (c != l) p.axpy(c - l, psi[k]);
            }
            return p;
        }
    }
    return x;
}

double distance_to_W(const ConstraintSpec& spec, const Observation& x) {
    switch (spec.set) {
        case SetKind::WholeSpace: return 0.0;
        case SetKind::Ball: return std::max(0.0, norm(x - spec.center) - spec.radius);
        case SetKind::Box: {
            const Grid& g = x.rho.front().grid();
            require_box(spec, g.dim);
            const auto psi = box_functionals(g, x.weight);
            double s = 0.0;
            for (std::size_t k = 0; k < psi.size(); ++k) {
                const double l = inner(psi[k], x);
                const double c = std::clamp(l, spec.box_lo[k], spec.box_hi[k]);
                s += (l - c) * (l - c);
            }
            return std::sqrt(s);
        }
    }
    return 0.0;
}

Observation subgradient_dW(const ConstraintSpec& spec, const Observation& x) {
    const double d = distance_to_W(spec, x);
    if (d <= 0.0) {
        Observation z = x;
        z *= 0.0;
        return z;
    }
    Observation eta = x - project_to_W(spec, x);
    eta *= 1.0 / norm(eta);
    return eta;
}

Observation sample_W(const ConstraintSpec& spec, const Observation& like, std::uint64_t seed, bool on_boundary) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Observation r = like;
    for (std::size_t n = 0; n < r.size(); ++n) {
        for (double& v : r.rho[n].values()) v = normal(rng);
        for (double& v : r.u[n].values()) v = normal(rng);
    }
    switch (spec.set) {
        case SetKind::WholeSpace: return r;
        case SetKind::Ball: {
            const double scale = on_boundary ? spec.radius : spec.radius * std::pow(unif(rng), 0.5);
            r *= scale / norm(r);
            r.axpy(1.0, spec.center);
            return r;
        }
        case SetKind::Box: {
            const Grid& g = like.rho.front().grid();
            require_box(spec, g.dim);
            const auto psi = box_functionals(g, like.weight);
            for (std::size_t k = 0; k < psi.size(); ++k) {
                const double l = inner(psi[k], r);
                const double lo = spec.box_lo[k], hi = spec.box_hi[k];
                double target = l;
                if (std::isfinite(lo) && std::isfinite(hi)) target = lo + (hi - lo) * unif(rng);
                else if (std::isfinite(lo)) target = lo + std::abs(normal(rng));
                else if (std::isfinite(hi)) target = hi - std::abs(normal(rng));
                if (on_boundary && k == 0) {
                    if (std::isfinite(lo) && (unif(rng) < 0.5 || !std::isfinite(hi))) target = lo;
                    else if (std::isfinite(hi)) target = hi;
                }
                r.axpy(target - l, psi[k]);
            }
            return r;
        }
    }
    return r;
}

}  // namespace lcns
