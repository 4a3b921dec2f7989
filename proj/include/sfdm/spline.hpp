#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sfdm/errors.hpp"

namespace sfdm {

/// Interpolating cubic spline with zero second derivative at both ends.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::span<const double> x, std::span<const double> y)
        : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
        if (x_.size() != y_.size()) throw DomainError("spline abscissae and ordinates differ in length");
        if (x_.size() < 3) throw DomainError("spline needs at least three points");
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw DomainError("spline data must be finite");
            if (i > 0 && !(x_[i] > x_[i - 1])) throw DomainError("spline abscissae must be strictly increasing");
        }
        solve_second_derivatives();
    }

    std::size_t knots() const noexcept { return x_.size(); }
    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> y() const noexcept { return y_; }

    double operator()(double t) const {
        const std::size_t i = interval(t);
        const auto c = coefficients(i);
        const double s = t - x_[i];
        return ((c.d * s + c.c) * s + c.b) * s + c.a;
    }

    double derivative(double t) const {
        const std::size_t i = interval(t);
        const auto c = coefficients(i);
        const double s = t - x_[i];
        return (3.0 * c.d * s + 2.0 * c.c) * s + c.b;
    }

    /// Local polynomial on [x_i, x_{i+1}] in powers of (t - x_i).
    struct Piece {
        double a, b, c, d;
    };

    Piece coefficients(std::size_t i) const {
        const double h = x_[i + 1] - x_[i];
        return {y_[i],
                (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0,
                m_[i] / 2.0,
                (m_[i + 1] - m_[i]) / (6.0 * h)};
    }

private:
    std::size_t interval(double t) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - x_.begin());
        return std::clamp<std::size_t>(hi == 0 ? 0 : hi - 1, 0, x_.size() - 2);
    }

    // Thomas algorithm on the interior second derivatives.
    void solve_second_derivatives() {
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n == 3) {
            const double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
            const double rhs = 6.0 * ((y_[2] - y_[1]) / h1 - (y_[1] - y_[0]) / h0);
            m_[1] = rhs / (2.0 * (h0 + h1));
            return;
        }
        std::vector<double> diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double lower = x_[i] - x_[i - 1];
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 2] = rhs[n - 2] / diag[n - 2];
        for (std::size_t i = n - 2; i-- > 1;) m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

struct SplineMaximum {
    double argmax = 0.0;
    double value = 0.0;
};

/// Thrown when the largest spline value sits on a window edge.
class EdgeMaximumError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Global maximum of the natural cubic spline through (x, y). Critical points
/// come from the quadratic S'(t) = 0 on each interval; the maximum must be
/// strictly inside the sampled window.
inline SplineMaximum spline_max(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 5) throw DomainError("spline maximum needs at least five samples");
    const NaturalCubicSpline spline(x, y);
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; }))
        throw DomainError("samples are constant; spline has zero curvature and no isolated maximum");

    SplineMaximum best{x[0], y[0]};
    bool interior = false;
    auto consider = [&](double t, double v, bool inside) {
        if (v > best.value) {
            best = {t, v};
            interior = inside;
        }
    };
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const auto p = spline.coefficients(i);
        const double h = x[i + 1] - x[i];
        consider(x[i + 1], y[i + 1], i + 2 < x.size());
        // roots of 3d s^2 + 2c s + b on [0, h]
        const double qa = 3.0 * p.d, qb = 2.0 * p.c, qc = p.b;
        double roots[2];
        int count = 0;
        if (std::abs(qa) <= 1e-14 * (std::abs(qb) + std::abs(qc))) {
            if (qb != 0.0) roots[count++] = -qc / qb;
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
                if (q != 0.0) roots[count++] = q / qa;
                if (q != 0.0) roots[count++] = qc / q;
                else roots[count++] = 0.0;
            }
        }
        for (int r = 0; r < count; ++r) {
            const double s = roots[r];
            if (!(s > 0.0 && s < h)) continue;
            // second derivative negative: local maximum
            if (6.0 * p.d * s + 2.0 * p.c >= 0.0) continue;
            const double v = ((p.d * s + p.c) * s + p.b) * s + p.a;
            consider(x[i] + s, v, true);
        }
    }
    if (!interior)
        throw EdgeMaximumError("spline maximum lies on the window edge at " + std::to_string(best.argmax) +
                               "; the window is mis-centred");
    return best;
}

}  // namespace sfdm
