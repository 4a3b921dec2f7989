#pragma once

#include <Eigen/Core>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#if defined(SFDM_HAVE_UMFPACK)
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>
#include <concepts>
#include <mutex>
#include <string>
#include <vector>

#include "sfdm/errors.hpp"
#include "sfdm/split_system.hpp"

namespace sfdm {

template <class S>
concept NonlinearSystem = requires(const S& s, const Vector& x) {
    { s.unknown_count() } -> std::convertible_to<Index>;
    { s.residual(x) } -> std::convertible_to<Vector>;
    { s.jacobian(x) } -> std::convertible_to<SparseMatrix>;
};

struct NewtonConfig {
    double tolerance = 1e-6;  // sup-norm of the Newton update
    int max_iterations = 100;
    double divergence_cap = 1e12;  // sup-norm of the residual

    void validate() const {
        if (!(tolerance > 0.0)) throw DomainError("Newton tolerance must be positive");
        if (max_iterations < 1) throw DomainError("Newton needs at least one iteration");
    }
};

enum class NewtonStatus { converged, max_iterations, singular, diverged, non_finite };

inline const char* to_string(NewtonStatus s) {
    switch (s) {
        case NewtonStatus::converged: return "converged";
        case NewtonStatus::max_iterations: return "max_iterations";
        case NewtonStatus::singular: return "singular";
        case NewtonStatus::diverged: return "diverged";
        case NewtonStatus::non_finite: return "non_finite";
    }
    return "unknown";
}

struct SolutionState {
    Vector unknowns;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    NewtonStatus status = NewtonStatus::max_iterations;
    std::vector<double> update_norms;
    std::string diagnostic;
};

/// Sparse direct LU with fill-reducing ordering (UMFPACK with nested
/// dissection when available, Eigen's SparseLU with COLAMD otherwise). The
/// symbolic analysis is kept while successive matrices share one pattern.
class SparseDirectSolver {
public:
    void factorize(const SparseMatrix& a) {
        if (a.rows() != a.cols()) throw DomainError("sparse solve needs a square matrix");
        if (!a.isCompressed()) throw DomainError("sparse solve needs a compressed matrix");
        if (!same_pattern(a)) {
            check_structure(a);
#if defined(SFDM_HAVE_UMFPACK)
            lu_.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
            {
                // METIS keeps its random state in a global; concurrent orderings
                // interleave it and the result then depends on thread timing.
                static std::mutex ordering_mutex;
                std::lock_guard lock(ordering_mutex);
                lu_.analyzePattern(a);
            }
#else
            lu_.analyzePattern(a);
#endif
            outer_.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
            inner_.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
        }
        lu_.factorize(a);
        if (lu_.info() != Eigen::Success)
            throw SingularMatrixError(SingularMatrixError::Kind::numerical, "LU factorisation reports a singular matrix");
    }

    Vector solve(const Vector& rhs) {
        Vector x = lu_.solve(rhs);
        if (lu_.info() != Eigen::Success || !x.allFinite())
            throw SingularMatrixError(SingularMatrixError::Kind::numerical, "LU solve produced non-finite values");
        return x;
    }

private:
    bool same_pattern(const SparseMatrix& a) const {
        if (static_cast<std::size_t>(a.outerSize() + 1) != outer_.size()) return false;
        if (static_cast<std::size_t>(a.nonZeros()) != inner_.size()) return false;
        return std::equal(outer_.begin(), outer_.end(), a.outerIndexPtr()) &&
               std::equal(inner_.begin(), inner_.end(), a.innerIndexPtr());
    }

    static void check_structure(const SparseMatrix& a) {
        std::vector<char> row_seen(static_cast<std::size_t>(a.rows()), 0);
        for (Index c = 0; c < a.outerSize(); ++c) {
            if (a.outerIndexPtr()[c] == a.outerIndexPtr()[c + 1])
                throw SingularMatrixError(SingularMatrixError::Kind::structural,
                                          "column " + std::to_string(c) + " has no entries");
            for (Index p = a.outerIndexPtr()[c]; p < a.outerIndexPtr()[c + 1]; ++p)
                row_seen[a.innerIndexPtr()[p]] = 1;
        }
        for (Index r = 0; r < a.rows(); ++r)
            if (!row_seen[r])
                throw SingularMatrixError(SingularMatrixError::Kind::structural,
                                          "row " + std::to_string(r) + " has no entries");
    }

#if defined(SFDM_HAVE_UMFPACK)
    Eigen::UmfPackLU<SparseMatrix> lu_;
#else
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<Index>> lu_;
#endif
    std::vector<Index> outer_;
    std::vector<Index> inner_;
};

/// Solve J v = rhs by sparse direct factorisation.
inline Vector sparse_solve(const SparseMatrix& j, const Vector& rhs) {
    if (rhs.size() != j.rows()) throw DomainError("right-hand side length does not match matrix");
    if (!rhs.allFinite()) throw NumericError("right-hand side contains non-finite entries");
    SparseMatrix a = j;
    a.makeCompressed();
    SparseDirectSolver solver;
    solver.factorize(a);
    return solver.solve(rhs);
}

/// Plain Newton iteration: solve J(x_k) v_k = F(x_k), x_{k+1} = x_k - v_k,
/// stop once ||v_k||_inf < tolerance. Failures come back as a non-converged state.
template <NonlinearSystem System>
SolutionState newton_solve(const System& system, const Vector& initial, const NewtonConfig& config,
                           SparseDirectSolver& linear_solver) {
    config.validate();
    if (initial.size() != system.unknown_count())
        throw DomainError("initial state length " + std::to_string(initial.size()) + " does not match system size " +
                          std::to_string(system.unknown_count()));
    SolutionState state;
    state.unknowns = initial;

    auto fail = [&](NewtonStatus status, std::string why) {
        state.status = status;
        state.converged = false;
        state.diagnostic = std::move(why);
        return state;
    };

    for (int k = 0; k < config.max_iterations; ++k) {
        Vector f;
        SparseMatrix j;
        try {
            f = system.residual(state.unknowns);
            if (!f.allFinite()) return fail(NewtonStatus::non_finite, "residual is not finite");
            state.residual_norm = f.lpNorm<Eigen::Infinity>();
            if (state.residual_norm > config.divergence_cap)
                return fail(NewtonStatus::diverged, "residual norm exceeded divergence cap");
            j = system.jacobian(state.unknowns);
        } catch (const NumericError& e) {
            return fail(NewtonStatus::non_finite, e.what());
        }

        Vector v;
        try {
            linear_solver.factorize(j);
            v = linear_solver.solve(f);
        } catch (const SingularMatrixError& e) {
            return fail(NewtonStatus::singular, e.what());
        }

        state.unknowns -= v;
        state.iterations = k + 1;
        const double step = v.lpNorm<Eigen::Infinity>();
        state.update_norms.push_back(step);
        if (!state.unknowns.allFinite()) return fail(NewtonStatus::non_finite, "iterate is not finite");
        if (step < config.tolerance) {
            try {
                const Vector r = system.residual(state.unknowns);
                if (!r.allFinite()) return fail(NewtonStatus::non_finite, "final residual is not finite");
                state.residual_norm = r.lpNorm<Eigen::Infinity>();
            } catch (const NumericError& e) {
                return fail(NewtonStatus::non_finite, e.what());
            }
            state.status = NewtonStatus::converged;
            state.converged = true;
            return state;
        }
    }
    return fail(NewtonStatus::max_iterations, "no convergence within " + std::to_string(config.max_iterations) +
                                                  " iterations");
}

template <NonlinearSystem System>
SolutionState newton_solve(const System& system, const Vector& initial, const NewtonConfig& config = {}) {
    SparseDirectSolver solver;
    return newton_solve(system, initial, config, solver);
}

}  // namespace sfdm
