#include "lcns/linsolve.hpp"

#include <cmath>
#include <string>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

CgResult conjugate_gradient(const LinearOperator& A, const std::vector<double>& b, std::vector<double>& x,
                            const CgOptions& opts) {
    CgResult res;
    const std::size_t n = b.size();
    x.resize(n, 0.0);
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return res;
    }
    if (!std::isfinite(bnorm)) raise(ErrorKind::NonFiniteState, "linear solve right-hand side is not finite");
    std::vector<double> r(n), p(n), Ap(n);
    A(x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    double rr = dot(r, r);
    const double target = opts.rtol * bnorm;
    p = r;
    for (int it = 0; it < opts.max_iter; ++it) {
        res.iterations = it;
        res.rel_residual = std::sqrt(rr) / bnorm;
        if (std::sqrt(rr) <= target) return res;
        A(p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0))
            raise(ErrorKind::LinearSolveDiverged, "operator is not positive definite along a search direction");
        const double alpha = rr / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    res.iterations = opts.max_iter;
    res.rel_residual = std::sqrt(rr) / bnorm;
    if (std::sqrt(rr) <= target) return res;
    raise(ErrorKind::LinearSolveDiverged, "conjugate gradients hit the iteration cap (" +
                                              std::to_string(opts.max_iter) + ") at relative residual " +
                                              std::to_string(res.rel_residual));
}

VectorField solve_viscous(const ScalarField* diag, double beta, double mu, double lam, const VectorField& rhs,
                          const CgOptions& opts, CgResult* info) {
    const Grid& g = rhs.grid();
    if (diag) require_same_grid(diag->grid(), g, "solve_viscous");
    const std::size_t cells = g.cells();
    const int d = g.dim;
    VectorField work(g, true);
    LinearOperator A = [&](const std::vector<double>& in, std::vector<double>& out) {
        work.values() = in;
        const VectorField Lx = stress_div(work, mu, lam);
        out.resize(in.size());
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < cells; ++i) {
                const std::size_t k = c * cells + i;
                out[k] = (diag ? (*diag)[i] * in[k] : 0.0) - beta * Lx.data()[k];
            }
    };
    std::vector<double> x(rhs.size(), 0.0);
    const CgResult r = conjugate_gradient(A, rhs.values(), x, opts);
    if (info) *info = r;
    return VectorField(g, std::move(x), true);
}

}  // namespace lcns
