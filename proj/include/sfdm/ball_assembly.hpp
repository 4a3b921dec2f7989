#pragma once

// Radial reduction of the Bratu problem on the unit d-ball,
//
//   u'' + (d-1)/rho u' + lambda e^u = 0,   u'(0) = 0,  u(1) = 0,
//
// discretised with three-point central differences at rho_i = i h,
// i = 1..n-1. The symmetry condition is imposed as u_0 = u_1 and substituted
// into the first row, so the system stays (n-1) x (n-1). In the
// fixed-amplitude formulation u_0 = u_1 = A and lambda replaces u_1.

#include <memory>
#include <string>
#include <vector>

#include "sfdm/errors.hpp"
#include "sfdm/split_system.hpp"

namespace sfdm {

class BallSystem : public SplitSystem {
public:
    BallSystem(int dim, Index n, std::shared_ptr<const SplitOperator> op, Formulation formulation)
        : SplitSystem(std::move(op), formulation), dim_(dim), n_(n) {}

    int dim() const noexcept { return dim_; }
    Index n() const noexcept { return n_; }
    double h() const noexcept { return 1.0 / static_cast<double>(n_); }

    BallSystem with_formulation(const Formulation& f) const {
        BallSystem copy = *this;
        copy.set_formulation(f);
        return copy;
    }

private:
    int dim_;
    Index n_;
};

inline BallSystem assemble_ball(int dim, Index n, const Formulation& formulation) {
    if (dim < 1) throw DomainError("ball dimension must be >= 1");
    if (n < 3) throw DomainError("ball grid needs n >= 3, got " + std::to_string(n));
    validate(formulation);

    const double h = 1.0 / static_cast<double>(n);
    const double inv_h2 = 1.0 / (h * h);
    const Index size = n - 1;
    std::vector<Eigen::Triplet<double, Index>> t;
    t.reserve(static_cast<std::size_t>(3 * size));
    for (Index i = 1; i <= size; ++i) {
        const double advect = (dim - 1) / (static_cast<double>(i) * h) / (2.0 * h);
        const double lower = inv_h2 - advect;
        double center = -2.0 * inv_h2;
        const double upper = inv_h2 + advect;
        const Index r = i - 1;
        if (i == 1)
            center += lower;  // u_0 = u_1
        else
            t.emplace_back(r, r - 1, lower);
        t.emplace_back(r, r, center);
        if (i < size) t.emplace_back(r, r + 1, upper);  // u_n = 0 drops the last upper entry
    }
    RowSparseMatrix linear(size, size);
    linear.setFromTriplets(t.begin(), t.end());
    linear.makeCompressed();
    auto op = std::make_shared<const SplitOperator>(std::move(linear), 1.0, Index{0});
    return BallSystem(dim, n, std::move(op), formulation);
}

}  // namespace sfdm
