#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lcns/base_state.hpp"
#include "lcns/control.hpp"
#include "lcns/field.hpp"

namespace lcns::testing {

inline BaseState rest_base(int dim, int cells, double T, int steps, double mu = 1.0, double eta = 0.0) {
    FamilySpec fs;
    return make_family(fs, Grid::unit(dim, cells), FluidParams::make(mu, eta), uniform_times(T, steps));
}

inline ScalarField random_scalar(const Grid& g, std::mt19937_64& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> d(-amp, amp);
    ScalarField s(g);
    for (auto& x : s.values()) x = d(rng);
    return s;
}

inline VectorField random_vector(const Grid& g, std::mt19937_64& rng, bool no_slip = false, double amp = 1.0) {
    std::uniform_real_distribution<double> d(-amp, amp);
    VectorField v(g, no_slip);
    for (auto& x : v.values()) x = d(rng);
    return v;
}

inline ControlField random_control(const Grid& g, std::size_t samples, double dt, double R, std::mt19937_64& rng,
                                   double amp = 1.0) {
    ControlField c(g, samples, dt, R);
    for (auto& v : c.values()) v = random_vector(g, rng, false, amp);
    return c;
}

/// Row-major dense matrix with a partial-pivoting solve, used as an oracle.
struct Dense {
    int n = 0, m = 0;
    std::vector<double> a;
    Dense(int rows, int cols) : n(rows), m(cols), a(static_cast<std::size_t>(rows) * cols, 0.0) {}
    static Dense identity(int k) {
        Dense d(k, k);
        for (int i = 0; i < k; ++i) d(i, i) = 1.0;
        return d;
    }
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }
    Dense transpose() const {
        Dense t(m, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    Dense operator*(const Dense& b) const {
        Dense c(n, b.m);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < m; ++k)
                for (int j = 0; j < b.m; ++j) c(i, j) += (*this)(i, k) * b(k, j);
        return c;
    }
    Dense& add(const Dense& b, double s) {
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += s * b.a[k];
        return *this;
    }
    Dense inverse() const {
        Dense inv(n, n);
        for (int j = 0; j < n; ++j) {
            std::vector<double> e(n, 0.0);
            e[j] = 1.0;
            const auto c = solve(e);
            for (int i = 0; i < n; ++i) inv(i, j) = c[i];
        }
        return inv;
    }
    std::vector<double> solve(std::vector<double> b) const {
        Dense lu = *this;
        for (int c = 0; c < n; ++c) {
            int p = c;
            for (int r = c + 1; r < n; ++r)
                if (std::abs(lu(r, c)) > std::abs(lu(p, c))) p = r;
            if (p != c) {
                for (int j = 0; j < n; ++j) std::swap(lu(c, j), lu(p, j));
                std::swap(b[c], b[p]);
            }
            for (int r = c + 1; r < n; ++r) {
                const double f = lu(r, c) / lu(c, c);
                for (int j = c; j < n; ++j) lu(r, j) -= f * lu(c, j);
                b[r] -= f * b[c];
            }
        }
        for (int r = n - 1; r >= 0; --r) {
            for (int j = r + 1; j < n; ++j) b[r] -= lu(r, j) * b[j];
            b[r] /= lu(r, r);
        }
        return b;
    }
};

/// 1D central difference with the given ghost sign (-1 odd, +1 even) or one-sided end rows (0).
inline Dense d1_matrix(int n, double h, int ghost) {
    Dense d(n, n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) d(i, i - 1) -= 0.5 / h;
        if (i + 1 < n) d(i, i + 1) += 0.5 / h;
    }
    if (ghost == 0) {
        for (int j = 0; j < n; ++j) d(0, j) = d(n - 1, j) = 0.0;
        d(0, 0) = -1.5 / h;
        d(0, 1) = 2.0 / h;
        d(0, 2) = -0.5 / h;
        d(n - 1, n - 1) = 1.5 / h;
        d(n - 1, n - 2) = -2.0 / h;
        d(n - 1, n - 3) = 0.5 / h;
    } else {
        d(0, 0) -= ghost * 0.5 / h;
        d(n - 1, n - 1) += ghost * 0.5 / h;
    }
    return d;
}

/// 1D compact Laplacian with odd ghosts.
inline Dense lap_odd_matrix(int n, double h) {
    Dense d(n, n);
    const double s = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        d(i, i) = -2.0 * s;
        if (i > 0) d(i, i - 1) = s;
        if (i + 1 < n) d(i, i + 1) = s;
    }
    d(0, 0) -= s;
    d(n - 1, n - 1) -= s;
    return d;
}

}  // namespace lcns::testing
