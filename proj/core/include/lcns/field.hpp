#pragma once

#include <cstddef>
#include <vector>

#include "lcns/grid.hpp"

namespace lcns {

/// One real per cell.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double value = 0.0);
    ScalarField(const Grid& g, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a);
    /// this += a * x
    ScalarField& axpy(double a, const ScalarField& x);

private:
    Grid grid_;
    std::vector<double> v_;
};

/// `dim` reals per cell stored component-major: component c occupies
/// [c * cells, (c + 1) * cells). A no-slip field is extended oddly across
/// walls, so its face trace vanishes.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g, bool no_slip = false);
    VectorField(const Grid& g, std::vector<double> values, bool no_slip = false);

    const Grid& grid() const { return grid_; }
    int dim() const { return grid_.dim; }
    std::size_t cells() const { return grid_.cells(); }
    std::size_t size() const { return v_.size(); }
    bool no_slip() const { return no_slip_; }
    void set_no_slip(bool flag) { no_slip_ = flag; }

    double* comp(int c) { return v_.data() + c * cells(); }
    const double* comp(int c) const { return v_.data() + c * cells(); }
    double& at(int c, std::size_t i) { return v_[c * cells() + i]; }
    double at(int c, std::size_t i) const { return v_[c * cells() + i]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }
    bool all_finite() const;

    ScalarField component(int c) const;
    void set_component(int c, const ScalarField& s);

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double a);
    VectorField& axpy(double a, const VectorField& x);
    /// Pointwise scaling of every component by s.
    VectorField& scale_by(const ScalarField& s);
    VectorField& divide_by(const ScalarField& s);

private:
    Grid grid_;
    std::vector<double> v_;
    bool no_slip_ = false;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
/// Pointwise product s * a.
ScalarField pointwise(const ScalarField& s, const ScalarField& a);
VectorField pointwise(const ScalarField& s, const VectorField& a);

/// Viscosities: shear mu, bulk eta, and lam = eta - 2 mu / 3.
struct FluidParams {
    double mu = 1.0;
    double eta = 0.0;
    double lam = -2.0 / 3.0;

    /// Validates mu > 0, eta >= 0 (hence 4 mu + 3 lam > 0).
    static FluidParams make(double mu, double eta);
};

}  // namespace lcns
