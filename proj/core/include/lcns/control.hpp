#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lcns/field.hpp"

namespace lcns {

/// Piecewise-constant-in-time control: sample n acts on [t_n, t_{n+1}).
/// Admissible when every sample lies in the closed L2 ball of radius R.
class ControlField {
public:
    ControlField() = default;
    ControlField(const Grid& g, std::size_t samples, double dt, double radius);
    ControlField(std::vector<VectorField> values, double dt, double radius);

    const Grid& grid() const { return values_.front().grid(); }
    std::size_t samples() const { return values_.size(); }
    double dt() const { return dt_; }
    double radius() const { return radius_; }
    void set_radius(double R);

    VectorField& operator[](std::size_t n) { return values_[n]; }
    const VectorField& operator[](std::size_t n) const { return values_[n]; }
    std::vector<VectorField>& values() { return values_; }
    const std::vector<VectorField>& values() const { return values_; }

    /// sqrt(sum_n dt ||U^n||^2), exact for piecewise-constant samples.
    double norm() const;
    double max_sample_norm() const;
    bool admissible(double rel_tol = 1e-12) const;
    bool all_finite() const;

    ControlField& axpy(double a, const ControlField& x);
    ControlField& operator*=(double a);

private:
    std::vector<VectorField> values_;
    double dt_ = 0.0;
    double radius_ = 0.0;
};

/// sum_n dt <a^n, b^n>.
double inner(const ControlField& a, const ControlField& b);
ControlField operator-(const ControlField& a, const ControlField& b);

VectorField project_to_ball(const VectorField& g, double R);
/// Per-sample projection onto the ball of radius `c.radius()`.
ControlField project_to_ball(const ControlField& c);

/// Measure of the time set where two controls differ: count of differing samples times dt.
double ekeland_distance(const ControlField& a, const ControlField& b);

/// Sample index range [first, last) of the spike interval [tau - h, tau).
/// Throws Misaligned unless 0 < h < tau <= T with tau, h multiples of dt.
std::pair<std::size_t, std::size_t> spike_samples(double dt, std::size_t samples, double tau, double h);
/// Index of the sample just before tau, i.e. U(tau^-).
std::size_t sample_before(double dt, std::size_t samples, double tau);

/// U with the samples in [tau - h, tau) replaced by W. Throws OutsideBall if ||W|| > R.
ControlField spike_variation(const ControlField& U, double tau, double h, const VectorField& W);

}  // namespace lcns
