#include "lcns/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcns/error.hpp"
#include "lcns/ops.hpp"

namespace lcns {

ControlField::ControlField(const Grid& g, std::size_t samples, double dt, double radius)
    : ControlField(std::vector<VectorField>(samples, VectorField(g)), dt, radius) {}

ControlField::ControlField(std::vector<VectorField> values, double dt, double radius)
    : values_(std::move(values)), dt_(dt), radius_(radius) {
    if (values_.empty()) raise(ErrorKind::InvalidArgument, "control needs at least one sample");
    if (!(dt > 0.0)) raise(ErrorKind::InvalidArgument, "control time step must be positive");
    set_radius(radius);
    for (const auto& v : values_) require_same_grid(v.grid(), values_.front().grid(), "ControlField");
}

void ControlField::set_radius(double R) {
    if (!(R > 0.0)) raise(ErrorKind::InvalidArgument, "control ball radius must be positive");
    radius_ = R;
}

double ControlField::norm() const {
    double s = 0.0;
    for (const auto& v : values_) s += inner(v, v);
    return std::sqrt(s * dt_);
}

double ControlField::max_sample_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, norm_l2(v));
    return m;
}

bool ControlField::admissible(double rel_tol) const { return max_sample_norm() <= radius_ * (1.0 + rel_tol); }

bool ControlField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](const VectorField& v) { return v.all_finite(); });
}

ControlField& ControlField::axpy(double a, const ControlField& x) {
    if (x.samples() != samples()) raise(ErrorKind::GridMismatch, "control sample counts differ");
    for (std::size_t n = 0; n < samples(); ++n) values_[n].axpy(a, x.values_[n]);
    return *this;
}

ControlField& ControlField::operator*=(double a) {
    for (auto& v : values_) v *= a;
    return *this;
}

double inner(const ControlField& a, const ControlField& b) {
    if (a.samples() != b.samples()) raise(ErrorKind::GridMismatch, "control sample counts differ");
    double s = 0.0;
    for (std::size_t n = 0; n < a.samples(); ++n) s += inner(a[n], b[n]);
    return s * a.dt();
}

ControlField operator-(const ControlField& a, const ControlField& b) {
    ControlField r = a;
    r.axpy(-1.0, b);
    return r;
}

VectorField project_to_ball(const VectorField& g, double R) {
    const double n = norm_l2(g);
    if (n <= R) return g;
    VectorField r = g;
    r *= R / n;
    return r;
}

ControlField project_to_ball(const ControlField& c) {
    ControlField r = c;
    for (auto& v : r.values()) v = project_to_ball(v, c.radius());
    return r;
}

double ekeland_distance(const ControlField& a, const ControlField& b) {
    if (a.samples() != b.samples()) raise(ErrorKind::GridMismatch, "control sample counts differ");
    std::size_t count = 0;
    for (std::size_t n = 0; n < a.samples(); ++n) {
        require_same_grid(a[n].grid(), b[n].grid(), "ekeland_distance");
        if (a[n].values() != b[n].values()) ++count;
    }
    return static_cast<double>(count) * a.dt();
}

namespace {

long aligned_index(double x, double dt, const char* what) {
    const double q = x / dt;
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
        raise(ErrorKind::Misaligned, std::string(what) + " = " + std::to_string(x) + " is not a multiple of dt = " +
                                         std::to_string(dt));
    return static_cast<long>(r);
}

}  // namespace

std::pair<std::size_t, std::size_t> spike_samples(double dt, std::size_t samples, double tau, double h) {
    const long kt = aligned_index(tau, dt, "tau");
    const long kh = aligned_index(h, dt, "h");
    if (!(kh > 0 && kh < kt && kt <= static_cast<long>(samples)))
        raise(ErrorKind::Misaligned, "spike needs 0 < h < tau <= T (tau = " + std::to_string(tau) +
                                         ", h = " + std::to_string(h) + ")");
    return {static_cast<std::size_t>(kt - kh), static_cast<std::size_t>(kt)};
}

std::size_t sample_before(double dt, std::size_t samples, double tau) {
    const long kt = aligned_index(tau, dt, "tau");
    if (kt < 1 || kt > static_cast<long>(samples)) raise(ErrorKind::Misaligned, "tau outside (0, T]");
    return static_cast<std::size_t>(kt - 1);
}

ControlField spike_variation(const ControlField& U, double tau, double h, const VectorField& W) {
    require_same_grid(W.grid(), U.grid(), "spike_variation");
    if (norm_l2(W) > U.radius() * (1.0 + 1e-12))
        raise(ErrorKind::OutsideBall, "spike value has norm " + std::to_string(norm_l2(W)) + " > R = " +
                                          std::to_string(U.radius()));
    const auto [first, last] = spike_samples(U.dt(), U.samples(), tau, h);
    ControlField r = U;
    for (std::size_t n = first; n < last; ++n) r[n] = W;
    return r;
}

}  // namespace lcns
