#pragma once

// One-dimensional closed form
//
//   u(x) = 2 ln( cosh(theta) / cosh(theta (1 - 2x)) ),   cosh(theta) = 4 theta / sqrt(2 lambda),
//
// the upper bound d pi^2 / e on lambda, and the rescaling to [-1, 1]^d.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sfdm/errors.hpp"

namespace sfdm {

struct ThetaRoots {
    double lambda = 0.0;
    double tangent = 0.0;      // where g'(theta) = 0
    double tangent_gap = 0.0;  // g(tangent); negative means two roots
    std::vector<double> roots;  // ascending; a double root appears once

    bool is_double() const noexcept { return roots.size() == 1; }
};

namespace detail {

inline double theta_gap(double theta, double c) { return std::cosh(theta) - c * theta; }

// g is convex, so on each bracket it is monotone.
inline double bisect_theta(double lo, double hi, double c) {
    double glo = theta_gap(lo, c);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = theta_gap(mid, c);
        if (std::abs(gm) <= 1e-13 || mid == lo || mid == hi) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// |g(tangent)| below this counts as a double root. At 9-decimal input
/// precision g(tangent) moves by about 1e-10.
inline constexpr double kDoubleRootGap = 1e-10;

/// Positive roots of cosh(theta) = 4 theta / sqrt(2 lambda).
inline ThetaRoots theta_roots(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("theta equation needs lambda > 0");
    const double c = 4.0 / std::sqrt(2.0 * lambda);
    ThetaRoots out;
    out.lambda = lambda;
    out.tangent = std::asinh(c);
    out.tangent_gap = detail::theta_gap(out.tangent, c);
    if (std::abs(out.tangent_gap) <= kDoubleRootGap) {
        out.roots = {out.tangent};
        return out;
    }
    if (out.tangent_gap > 0.0) return out;
    // g(0) = 1 > 0; grow the right bracket until g turns positive.
    double right = 2.0 * out.tangent + 1.0;
    while (detail::theta_gap(right, c) <= 0.0) right *= 2.0;
    out.roots = {detail::bisect_theta(0.0, out.tangent, c), detail::bisect_theta(out.tangent, right, c)};
    return out;
}

/// Fold of the 1D continuum problem: theta tanh(theta) = 1, lambda* = 8 / sinh^2(theta).
inline double critical_lambda_1d() {
    double lo = 1.0, hi = 1.5;  // f(1) < 0 < f(1.5)
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::tanh(mid) < 1.0 ? lo : hi) = mid;
    }
    const double s = std::sinh(0.5 * (lo + hi));
    return 8.0 / (s * s);
}

enum class SolutionBranch { lower, upper };

class Analytic1D {
public:
    explicit Analytic1D(double theta) : theta_(theta), log_cosh_(std::log(std::cosh(theta))) {}
    double theta() const noexcept { return theta_; }
    double operator()(double x) const { return 2.0 * (log_cosh_ - std::log(std::cosh(theta_ * (1.0 - 2.0 * x)))); }
    double max_value() const noexcept { return 2.0 * log_cosh_; }

private:
    double theta_;
    double log_cosh_;
};

inline Analytic1D analytic_1d(double lambda, SolutionBranch branch) {
    const ThetaRoots r = theta_roots(lambda);
    if (r.roots.empty())
        throw DomainError("no solution at lambda = " + std::to_string(lambda) + ": the theta equation has no roots");
    return Analytic1D(branch == SolutionBranch::lower || r.is_double() ? r.roots.front() : r.roots.back());
}

/// No solution exists for lambda above d pi^2 / e.
inline double lambda_upper_bound(int dim) {
    if (dim < 1) throw DomainError("dimension must be >= 1");
    return dim * std::numbers::pi * std::numbers::pi / std::numbers::e;
}

enum class ScaleDirection { unit_to_double, double_to_unit };

/// lambda on [0,1]^d corresponds to 4 lambda on [-1,1]^d.
inline double domain_scale(double lambda, ScaleDirection direction) {
    if (!(lambda > 0.0)) throw DomainError("domain scaling needs lambda > 0");
    return direction == ScaleDirection::unit_to_double ? 4.0 * lambda : lambda / 4.0;
}

}  // namespace sfdm
