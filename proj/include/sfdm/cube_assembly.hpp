#pragma once

// Second-order finite difference systems for  Delta u + lambda e^u = 0  on
// [0,1]^d with u = 0 on the boundary. Each equation is the 2d+1 point stencil
// multiplied through by h^2:
//
//   sum_neighbours u_q - 2d u_p + h^2 lambda e^{u_p} = 0.
//
// The symmetric scheme keeps one unknown per orbit of the lattice under axis
// reflections and permutations; the full scheme keeps every interior node and
// serves as the reference it is checked against.

#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sfdm/errors.hpp"
#include "sfdm/grid.hpp"
#include "sfdm/split_system.hpp"
#include "sfdm/symmetry_index.hpp"

namespace sfdm {

enum class Scheme { symmetric, full };

struct Neighbor {
    Index packed;      // 0 is the boundary
    int multiplicity;  // how many of the 2d axis neighbours fold onto `packed`

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// One assembled equation: diagonal * u_center + sum mult * u_packed + h^2 lambda e^{u_center}.
struct StencilRow {
    Index center = 0;
    int diagonal = 0;
    std::vector<Neighbor> neighbors;  // sorted by packed index, boundary entry kept

    int multiplicity_sum() const {
        int s = 0;
        for (const auto& nb : neighbors) s += nb.multiplicity;
        return s;
    }
};

/// Values on all (n+1)^d lattice nodes, row-major with the last coordinate fastest.
struct Field {
    int dim = 0;
    Index n = 0;
    std::vector<double> values;

    Index flat(std::span<const Index> coords) const {
        Index f = 0;
        for (int a = 0; a < dim; ++a) f = f * (n + 1) + coords[a];
        return f;
    }
    double at(std::span<const Index> coords) const { return values[flat(coords)]; }
    double at(std::initializer_list<Index> coords) const {
        return at(std::span<const Index>(coords.begin(), coords.size()));
    }
};

namespace detail {

// Advance an odometer over [lo, hi]^d, last coordinate fastest. False when exhausted.
inline bool next_coords(std::span<Index> c, Index lo, Index hi) {
    for (Index a = static_cast<Index>(c.size()) - 1; a >= 0; --a) {
        if (c[a] < hi) {
            ++c[a];
            return true;
        }
        c[a] = lo;
    }
    return false;
}

// Advance a nondecreasing tuple over [1, k] in lexicographic order.
inline bool next_sorted_tuple(std::span<Index> t, Index k) {
    for (Index a = static_cast<Index>(t.size()) - 1; a >= 0; --a) {
        if (t[a] < k) {
            ++t[a];
            for (Index b = a + 1; b < static_cast<Index>(t.size()); ++b) t[b] = t[a];
            return true;
        }
    }
    return false;
}

// Merge up to 2d neighbour indices into (index, multiplicity) pairs sorted by index.
inline std::vector<Neighbor> merge_neighbors(std::array<Index, 2 * kMaxDim> idx, int count) {
    std::sort(idx.begin(), idx.begin() + count);
    std::vector<Neighbor> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (!out.empty() && out.back().packed == idx[i])
            ++out.back().multiplicity;
        else
            out.push_back({idx[i], 1});
    }
    return out;
}

inline RowSparseMatrix linear_part(const std::vector<StencilRow>& rows) {
    const Index m = static_cast<Index>(rows.size());
    std::vector<Eigen::Triplet<double, Index>> t;
    t.reserve(rows.size() * 8);
    for (const auto& row : rows) {
        const Index i = row.center - 1;
        t.emplace_back(i, i, row.diagonal);
        for (const auto& nb : row.neighbors)
            if (nb.packed != 0) t.emplace_back(i, nb.packed - 1, nb.multiplicity);
    }
    RowSparseMatrix l(m, m);
    l.setFromTriplets(t.begin(), t.end());
    l.makeCompressed();
    return l;
}

}  // namespace detail

class AssembledSystem : public SplitSystem {
public:
    struct Layout {
        GridSpec grid;
        Scheme scheme;
        std::optional<SymmetricIndexMap> map;
        std::vector<StencilRow> rows;
    };

    AssembledSystem(std::shared_ptr<const Layout> layout, std::shared_ptr<const SplitOperator> op,
                    Formulation formulation)
        : SplitSystem(std::move(op), formulation), layout_(std::move(layout)) {}

    const GridSpec& grid() const noexcept { return layout_->grid; }
    Scheme scheme() const noexcept { return layout_->scheme; }
    /// Present for the symmetric scheme only.
    const std::optional<SymmetricIndexMap>& map() const noexcept { return layout_->map; }
    const std::vector<StencilRow>& rows() const noexcept { return layout_->rows; }
    double h2() const noexcept { return op().nonlinear_scale(); }

    AssembledSystem with_formulation(const Formulation& f) const {
        AssembledSystem copy = *this;
        copy.set_formulation(f);
        return copy;
    }

private:
    std::shared_ptr<const Layout> layout_;
};

/// Symmetric (orbit-reduced) system with m = C(floor(n/2)+d-1, d) unknowns.
/// The fixed-amplitude formulation pins the last packed index (k,...,k).
inline AssembledSystem assemble_sfdm(const GridSpec& grid, const Formulation& formulation) {
    validate(formulation);
    auto layout = std::make_shared<AssembledSystem::Layout>(
        AssembledSystem::Layout{grid, Scheme::symmetric, SymmetricIndexMap(grid), {}});
    const SymmetricIndexMap& map = *layout->map;
    const int d = grid.dim();
    const Index k = map.half();
    const Index m = map.size();

    layout->rows.reserve(static_cast<std::size_t>(m));
    std::array<Index, kMaxDim> t{};
    std::fill(t.begin(), t.begin() + d, Index{1});
    std::array<Index, kMaxDim> probe{};
    Index p = 0;
    do {
        ++p;
        std::array<Index, 2 * kMaxDim> hits{};
        int count = 0;
        for (int a = 0; a < d; ++a) {
            for (int step : {-1, 1}) {
                std::copy(t.begin(), t.begin() + d, probe.begin());
                probe[a] += step;
                hits[count++] = map.canonical_index(std::span<const Index>(probe.data(), d));
            }
        }
        layout->rows.push_back(StencilRow{p, -2 * d, detail::merge_neighbors(hits, count)});
    } while (detail::next_sorted_tuple(std::span<Index>(t.data(), d), k));

    auto op = std::make_shared<const SplitOperator>(detail::linear_part(layout->rows), grid.h() * grid.h(), m - 1);
    return AssembledSystem(std::move(layout), std::move(op), formulation);
}

/// Row-major flat index of an interior node (coordinates in 1..n-1), 0-based.
inline Index interior_flat_index(const GridSpec& grid, std::span<const Index> coords) {
    Index f = 0;
    for (int a = 0; a < grid.dim(); ++a) f = f * (grid.n() - 1) + (coords[a] - 1);
    return f;
}

/// Unreduced system over all (n-1)^d interior nodes. The fixed-amplitude
/// formulation pins the node (floor(n/2), ..., floor(n/2)).
inline AssembledSystem assemble_fdm(const GridSpec& grid, const Formulation& formulation,
                                    Index max_unknowns = 5'000'000) {
    validate(formulation);
    const Index total = full_count(grid.dim(), grid.n());
    if (total > max_unknowns)
        throw CapacityError("full-grid system with " + std::to_string(total) + " unknowns exceeds guard of " +
                            std::to_string(max_unknowns));
    auto layout = std::make_shared<AssembledSystem::Layout>(
        AssembledSystem::Layout{grid, Scheme::full, std::nullopt, {}});
    const int d = grid.dim();
    const Index n = grid.n();
    layout->rows.reserve(static_cast<std::size_t>(total));

    std::array<Index, kMaxDim> c{};
    std::fill(c.begin(), c.begin() + d, Index{1});
    std::array<Index, kMaxDim> probe{};
    do {
        const Index self = interior_flat_index(grid, std::span<const Index>(c.data(), d)) + 1;
        std::array<Index, 2 * kMaxDim> hits{};
        int count = 0;
        for (int a = 0; a < d; ++a) {
            for (int step : {-1, 1}) {
                std::copy(c.begin(), c.begin() + d, probe.begin());
                probe[a] += step;
                const bool boundary = probe[a] == 0 || probe[a] == n;
                hits[count++] = boundary ? 0 : interior_flat_index(grid, std::span<const Index>(probe.data(), d)) + 1;
            }
        }
        layout->rows.push_back(StencilRow{self, -2 * d, detail::merge_neighbors(hits, count)});
    } while (detail::next_coords(std::span<Index>(c.data(), d), 1, n - 1));

    std::array<Index, kMaxDim> center{};
    std::fill(center.begin(), center.begin() + d, grid.half());
    const Index pinned = interior_flat_index(grid, std::span<const Index>(center.data(), d));
    auto op = std::make_shared<const SplitOperator>(detail::linear_part(layout->rows), grid.h() * grid.h(), pinned);
    return AssembledSystem(std::move(layout), std::move(op), formulation);
}

/// Expand reduced grid values onto every lattice node through the symmetry maps.
inline Field reconstruct_full(const Vector& u, const SymmetricIndexMap& map) {
    if (u.size() != map.size()) throw DomainError("reduced vector length does not match index map");
    const int d = map.dim();
    const Index n = map.grid().n();
    Field field{d, n, {}};
    Index nodes = 1;
    for (int a = 0; a < d; ++a) nodes *= n + 1;
    field.values.resize(static_cast<std::size_t>(nodes));
    std::array<Index, kMaxDim> c{};
    Index f = 0;
    do {
        const Index p = map.canonical_index(std::span<const Index>(c.data(), d));
        field.values[f++] = p == 0 ? 0.0 : u[p - 1];
    } while (detail::next_coords(std::span<Index>(c.data(), d), 0, n));
    return field;
}

/// Embed full-scheme interior values into the lattice with zero boundary.
inline Field expand_interior(const Vector& u, const GridSpec& grid) {
    if (u.size() != full_count(grid.dim(), grid.n())) throw DomainError("interior vector has wrong length");
    const int d = grid.dim();
    const Index n = grid.n();
    Field field{d, n, {}};
    Index nodes = 1;
    for (int a = 0; a < d; ++a) nodes *= n + 1;
    field.values.assign(static_cast<std::size_t>(nodes), 0.0);
    std::array<Index, kMaxDim> c{};
    std::fill(c.begin(), c.begin() + d, Index{1});
    do {
        const std::span<const Index> cs(c.data(), d);
        field.values[field.flat(cs)] = u[interior_flat_index(grid, cs)];
    } while (detail::next_coords(std::span<Index>(c.data(), d), 1, n - 1));
    return field;
}

/// Lattice field of a solved cube system, whichever scheme produced it.
inline Field full_field(const AssembledSystem& system, const Vector& x) {
    const Vector u = system.values(x);
    if (system.scheme() == Scheme::symmetric) return reconstruct_full(u, *system.map());
    return expand_interior(u, system.grid());
}

/// Text format: a "d n" header line, then (n+1)^d values, one per line, 17 significant digits.
inline void write_field(std::ostream& out, const Field& field) {
    out << field.dim << ' ' << field.n << '\n';
    const auto old_precision = out.precision(17);
    for (double v : field.values) out << v << '\n';
    out.precision(old_precision);
}

inline Field read_field(std::istream& in) {
    Field field;
    if (!(in >> field.dim >> field.n)) throw DomainError("field header missing");
    if (field.dim < 1 || field.n < 1) throw DomainError("field header invalid");
    Index nodes = 1;
    for (int a = 0; a < field.dim; ++a) nodes *= field.n + 1;
    field.values.resize(static_cast<std::size_t>(nodes));
    for (auto& v : field.values)
        if (!(in >> v)) throw DomainError("field file truncated");
    return field;
}

}  // namespace sfdm
