#pragma once

// Brute-force check of the symmetric scheme against the full-grid one.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sfdm/cube_assembly.hpp"
#include "sfdm/errors.hpp"
#include "sfdm/newton.hpp"
#include "sfdm/symmetry_index.hpp"

namespace sfdm {

/// (n-1)^d / m: how many times fewer unknowns the symmetric scheme needs.
inline double reduction_ratio(int dim, Index n) {
    return static_cast<double>(full_count(dim, n)) / static_cast<double>(variable_count(dim, n));
}

inline constexpr Index kOracleLimit = 100000;

struct ComparisonReport {
    int dim = 0;
    Index n = 0;
    Index fdm_unknowns = 0;
    Index sfdm_unknowns = 0;
    double ratio = 0.0;
    double sup_norm_difference = 0.0;
    std::vector<Index> max_location;  // lattice coordinates of the largest difference
    double lambda_sfdm = 0.0;
    double lambda_fdm = 0.0;
    int iterations_sfdm = 0;
    int iterations_fdm = 0;
};

/// Solve both schemes from zeros and compare the lattice fields.
inline ComparisonReport compare_sfdm_fdm(const GridSpec& grid, const Formulation& formulation,
                                         const NewtonConfig& newton = {}) {
    if (full_count(grid.dim(), grid.n()) > kOracleLimit)
        throw CapacityError("oracle comparison limited to " + std::to_string(kOracleLimit) + " full-grid unknowns");
    const AssembledSystem sym = assemble_sfdm(grid, formulation);
    const AssembledSystem full = assemble_fdm(grid, formulation);
    const SolutionState a = newton_solve(sym, sym.zero_state(), newton);
    const SolutionState b = newton_solve(full, full.zero_state(), newton);
    if (!a.converged) throw NumericError(std::string("symmetric solve failed: ") + a.diagnostic);
    if (!b.converged) throw NumericError(std::string("full-grid solve failed: ") + b.diagnostic);

    const Field fa = full_field(sym, a.unknowns);
    const Field fb = full_field(full, b.unknowns);
    ComparisonReport out;
    out.dim = grid.dim();
    out.n = grid.n();
    out.fdm_unknowns = full.unknown_count();
    out.sfdm_unknowns = sym.unknown_count();
    out.ratio = reduction_ratio(grid.dim(), grid.n());
    out.lambda_sfdm = sym.lambda(a.unknowns);
    out.lambda_fdm = full.lambda(b.unknowns);
    out.iterations_sfdm = a.iterations;
    out.iterations_fdm = b.iterations;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < fa.values.size(); ++i) {
        const double diff = std::abs(fa.values[i] - fb.values[i]);
        if (diff > out.sup_norm_difference) {
            out.sup_norm_difference = diff;
            worst = i;
        }
    }
    out.max_location.assign(static_cast<std::size_t>(grid.dim()), 0);
    for (int axis = grid.dim(); axis-- > 0;) {
        out.max_location[axis] = static_cast<Index>(worst % static_cast<std::size_t>(grid.n() + 1));
        worst /= static_cast<std::size_t>(grid.n() + 1);
    }
    return out;
}

}  // namespace sfdm
