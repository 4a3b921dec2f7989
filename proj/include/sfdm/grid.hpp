#pragma once

#include <cstdint>
#include <string>

#include "sfdm/errors.hpp"

namespace sfdm {

inline constexpr int kMaxDim = 5;

/// Uniform grid on the unit cube [0,1]^d with n subintervals per axis.
class GridSpec {
public:
    GridSpec(int dim, std::int64_t n) : dim_(dim), n_(n) {
        if (dim < 1 || dim > kMaxDim)
            throw DomainError("grid dimension must be in 1.." + std::to_string(kMaxDim) +
                              ", got " + std::to_string(dim));
        if (n < 2)
            throw DomainError("grid needs n >= 2 subintervals, got " + std::to_string(n));
    }

    int dim() const noexcept { return dim_; }
    std::int64_t n() const noexcept { return n_; }
    // recomputed from n on every call, never accumulated
    double h() const noexcept { return 1.0 / static_cast<double>(n_); }
    /// Largest reflected index, floor(n/2).
    std::int64_t half() const noexcept { return n_ / 2; }
    bool even() const noexcept { return n_ % 2 == 0; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int dim_;
    std::int64_t n_;
};

}  // namespace sfdm
