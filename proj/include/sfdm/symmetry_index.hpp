#pragma once

// Index maps that fold the full cube lattice onto the fundamental simplex
//   1 <= i_1 <= i_2 <= ... <= i_d <= floor(n/2)
// under the hyperoctahedral symmetry of the Bratu problem.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sfdm/errors.hpp"
#include "sfdm/grid.hpp"

namespace sfdm {

using Index = std::int64_t;

namespace detail {

// C(top, r); zero when top < r or top < 0.
inline Index binomial(Index top, Index r) {
    if (r < 0 || top < 0 || top < r) return 0;
    r = std::min(r, top - r);
    unsigned __int128 acc = 1;
    for (Index i = 1; i <= r; ++i) {
        acc = acc * static_cast<unsigned __int128>(top - r + i) / static_cast<unsigned __int128>(i);
        if (acc > static_cast<unsigned __int128>(std::numeric_limits<Index>::max()))
            throw CapacityError("binomial coefficient overflows 64 bits");
    }
    return static_cast<Index>(acc);
}

}  // namespace detail

/// f(i) = min(i, n - i): folds an axis index onto 0..floor(n/2).
inline Index reflect(Index i, Index n) {
    if (i < 0 || i > n)
        throw DomainError("axis index " + std::to_string(i) + " outside 0.." + std::to_string(n));
    return std::min(i, n - i);
}

/// Number of reduced unknowns, C(floor(n/2) + d - 1, d).
inline Index variable_count(int dim, Index n) {
    if (dim < 1) throw DomainError("dimension must be >= 1");
    if (n < 2) throw DomainError("n must be >= 2");
    return detail::binomial(n / 2 + dim - 1, dim);
}

/// Full-grid interior unknown count (n-1)^d.
inline Index full_count(int dim, Index n) {
    if (dim < 1) throw DomainError("dimension must be >= 1");
    if (n < 2) throw DomainError("n must be >= 2");
    Index total = 1;
    for (int a = 0; a < dim; ++a) {
        if (total > std::numeric_limits<Index>::max() / (n - 1))
            throw CapacityError("(n-1)^d overflows 64 bits");
        total *= n - 1;
    }
    return total;
}

/// Bijection between nondecreasing tuples over 1..k (lexicographic order)
/// and packed indices 1..m. Packed index 0 is the boundary sentinel.
class SymmetricIndexMap {
public:
    explicit SymmetricIndexMap(const GridSpec& grid)
        : grid_(grid), k_(grid.half()), m_(variable_count(grid.dim(), grid.n())) {}

    const GridSpec& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }
    Index half() const noexcept { return k_; }
    Index size() const noexcept { return m_; }

    /// Rank of a nondecreasing tuple with entries in 1..k. Rank is 1-based.
    Index rank(std::span<const Index> tuple) const {
        check_length(tuple.size());
        Index prev = 1;
        for (Index v : tuple) {
            if (v < prev || v > k_)
                throw DomainError("rank expects a nondecreasing tuple over 1.." + std::to_string(k_));
            prev = v;
        }
        return rank_unchecked(tuple);
    }

    /// Reflect, sort, rank. Any coordinate landing on the boundary gives 0.
    Index canonical_index(std::span<const Index> coords) const {
        check_length(coords.size());
        std::array<Index, kMaxDim> folded{};
        const int d = dim();
        for (int a = 0; a < d; ++a) {
            folded[a] = reflect(coords[a], grid_.n());
            if (folded[a] == 0) return 0;
        }
        std::sort(folded.begin(), folded.begin() + d);
        return rank_unchecked(std::span<const Index>(folded.data(), d));
    }

    std::vector<Index> unrank(Index p) const {
        std::vector<Index> out(dim());
        unrank_into(p, out);
        return out;
    }

    void unrank_into(Index p, std::span<Index> out) const {
        if (p < 1 || p > m_)
            throw DomainError("packed index " + std::to_string(p) + " outside 1.." + std::to_string(m_));
        check_length(out.size());
        const int d = dim();
        Index remaining = p - 1;
        Index prev = 1;
        for (int pos = 0; pos < d; ++pos) {
            const Index tail = d - pos - 1;
            // largest v with skipped(prev, v) <= remaining; skipped is nondecreasing in v
            Index lo = prev, hi = k_;
            while (lo < hi) {
                const Index mid = lo + (hi - lo + 1) / 2;
                if (skipped(prev, mid, tail) <= remaining)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            out[pos] = lo;
            remaining -= skipped(prev, lo, tail);
            prev = lo;
        }
    }

    /// Rank without validation; the tuple must already be sorted and inside 1..k.
    Index rank_unchecked(std::span<const Index> tuple) const {
        const int d = dim();
        Index r = 1;
        Index prev = 1;
        for (int pos = 0; pos < d; ++pos) {
            r += skipped(prev, tuple[pos], d - pos - 1);
            prev = tuple[pos];
        }
        return r;
    }

private:
    // Count of nondecreasing tails of length `tail` over [v, k] summed for v in [from, to).
    Index skipped(Index from, Index to, Index tail) const {
        return detail::binomial(k_ - from + tail + 1, tail + 1) -
               detail::binomial(k_ - to + tail + 1, tail + 1);
    }

    void check_length(std::size_t len) const {
        if (len != static_cast<std::size_t>(dim()))
            throw DomainError("tuple length " + std::to_string(len) + " does not match dimension " +
                              std::to_string(dim()));
    }

    GridSpec grid_;
    Index k_;
    Index m_;
};

}  // namespace sfdm
