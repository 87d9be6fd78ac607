#include "lcns/field.hpp"

#include <cmath>
#include <string>

#include "lcns/error.hpp"

namespace lcns {

namespace {

bool finite_all(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

ScalarField::ScalarField(const Grid& g, double value) : grid_(g), v_(g.cells(), value) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.cells()) raise(ErrorKind::InvalidArgument, "scalar field value count must equal cell count");
}

bool ScalarField::all_finite() const { return finite_all(v_); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField +=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField -=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
    require_same_grid(grid_, x.grid_, "ScalarField axpy");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * x.v_[i];
    return *this;
}

VectorField::VectorField(const Grid& g, bool no_slip)
    : grid_(g), v_(static_cast<std::size_t>(g.dim) * g.cells(), 0.0), no_slip_(no_slip) {}

VectorField::VectorField(const Grid& g, std::vector<double> values, bool no_slip)
    : grid_(g), v_(std::move(values)), no_slip_(no_slip) {
    if (v_.size() != static_cast<std::size_t>(g.dim) * g.cells())
        raise(ErrorKind::InvalidArgument, "vector field value count must equal dim x cell count");
}

bool VectorField::all_finite() const { return finite_all(v_); }

ScalarField VectorField::component(int c) const {
    return ScalarField(grid_, std::vector<double>(comp(c), comp(c) + cells()));
}

void VectorField::set_component(int c, const ScalarField& s) {
    require_same_grid(grid_, s.grid(), "VectorField::set_component");
    std::copy(s.data(), s.data() + cells(), comp(c));
}

VectorField& VectorField::operator+=(const VectorField& o) {
    require_same_grid(grid_, o.grid_, "VectorField +=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    require_same_grid(grid_, o.grid_, "VectorField -=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

VectorField& VectorField::operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
}

VectorField& VectorField::axpy(double a, const VectorField& x) {
    require_same_grid(grid_, x.grid_, "VectorField axpy");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * x.v_[i];
    return *this;
}

VectorField& VectorField::scale_by(const ScalarField& s) {
    require_same_grid(grid_, s.grid(), "VectorField scale_by");
    const std::size_t n = cells();
    for (int c = 0; c < dim(); ++c)
        for (std::size_t i = 0; i < n; ++i) v_[c * n + i] *= s[i];
    return *this;
}

VectorField& VectorField::divide_by(const ScalarField& s) {
    require_same_grid(grid_, s.grid(), "VectorField divide_by");
    const std::size_t n = cells();
    for (int c = 0; c < dim(); ++c)
        for (std::size_t i = 0; i < n; ++i) v_[c * n + i] /= s[i];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

ScalarField pointwise(const ScalarField& s, const ScalarField& a) {
    require_same_grid(s.grid(), a.grid(), "pointwise");
    ScalarField r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] *= s[i];
    return r;
}

VectorField pointwise(const ScalarField& s, const VectorField& a) {
    VectorField r(a);
    r.scale_by(s);
    return r;
}

FluidParams FluidParams::make(double mu, double eta) {
    if (!(mu > 0.0)) raise(ErrorKind::ParameterViolation, "shear viscosity mu must be positive");
    if (!(eta >= 0.0)) raise(ErrorKind::ParameterViolation, "bulk viscosity eta must be non-negative");
    FluidParams p;
    p.mu = mu;
    p.eta = eta;
    p.lam = eta - 2.0 * mu / 3.0;
    return p;
}

}  // namespace lcns
