#pragma once

// Linear stability of steady states of u_t = Delta u + lambda e^u: the
// eigenvalue of largest real part of the fixed-lambda linearisation.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sfdm/continuation.hpp"
#include "sfdm/errors.hpp"
#include "sfdm/newton.hpp"
#include "sfdm/parallel.hpp"
#include "sfdm/split_system.hpp"

namespace sfdm {

enum class EigenMethod { automatic, dense, iterative };

struct EigenConfig {
    EigenMethod method = EigenMethod::automatic;
    Index dense_limit = 5000;
    double tolerance = 1e-8;  // residual ||A x - sigma x|| / ||x||, relative to max(1, |sigma|)
    int krylov_dimension = 30;
    int max_restarts = 200;
};

class EigenSolverError : public NumericError {
public:
    EigenSolverError(const std::string& what, double residual) : NumericError(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

namespace detail {

inline bool is_symmetric(const SparseMatrix& a) {
    const SparseMatrix t = a.transpose();
    if (t.nonZeros() != a.nonZeros()) return false;
    for (Index c = 0; c < a.outerSize(); ++c) {
        SparseMatrix::InnerIterator x(a, c), y(t, c);
        for (; x && y; ++x, ++y)
            if (x.index() != y.index() || x.value() != y.value()) return false;
        if (x || y) return false;
    }
    return true;
}

inline double dense_largest_real(const SparseMatrix& a) {
    const Eigen::MatrixXd dense(a);
    if (is_symmetric(a)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw EigenSolverError("dense symmetric eigensolver failed", NAN);
        return es.eigenvalues().maxCoeff();
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
    if (es.info() != Eigen::Success) throw EigenSolverError("dense eigensolver failed", NAN);
    return es.eigenvalues().real().maxCoeff();
}

// Upper bound on the real part of every eigenvalue.
inline double gershgorin_upper(const SparseMatrix& a) {
    Vector bound = Vector::Zero(a.rows());
    for (Index c = 0; c < a.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(a, c); it; ++it)
            bound[it.row()] += it.row() == c ? it.value() : std::abs(it.value());
    return bound.maxCoeff();
}

// Shift-invert Arnoldi with the shift above the spectrum: the eigenvalue
// nearest the shift is the dominant one of (A - sI)^{-1}. For the real
// spectra met here that is the rightmost eigenvalue.
inline double iterative_largest_real(const SparseMatrix& a, const EigenConfig& config) {
    using cvec = Eigen::VectorXcd;
    const Index n = a.rows();
    const double g = gershgorin_upper(a);
    const double shift = g + 1e-2 * (1.0 + std::abs(g));

    SparseMatrix shifted = a;
    for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= shift;
    shifted.makeCompressed();
    SparseDirectSolver lu;
    lu.factorize(shifted);

    const int k = static_cast<int>(std::min<Index>(config.krylov_dimension, n));
    std::mt19937_64 rng(20240527);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Vector start(n);
    for (Index i = 0; i < n; ++i) start[i] = dist(rng);

    double achieved = INFINITY;
    for (int restart = 0; restart <= config.max_restarts; ++restart) {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, k + 1);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k + 1, k);
        v.col(0) = start / start.norm();
        int built = k;
        for (int j = 0; j < k; ++j) {
            Vector w = lu.solve(v.col(j));
            for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalise once
                const Vector c = v.leftCols(j + 1).transpose() * w;
                w -= v.leftCols(j + 1) * c;
                h.col(j).head(j + 1) += c;
            }
            h(j + 1, j) = w.norm();
            if (h(j + 1, j) < 1e-14 * h.col(j).head(j + 1).norm()) {
                built = j + 1;  // invariant subspace
                break;
            }
            v.col(j + 1) = w / h(j + 1, j);
        }
        Eigen::EigenSolver<Eigen::MatrixXd> ritz(h.topLeftCorner(built, built), true);
        if (ritz.info() != Eigen::Success) throw EigenSolverError("Hessenberg eigensolver failed", achieved);
        Index best = 0;
        ritz.eigenvalues().cwiseAbs().maxCoeff(&best);
        const std::complex<double> mu = ritz.eigenvalues()[best];
        const std::complex<double> sigma = shift + 1.0 / mu;
        const cvec y = ritz.eigenvectors().col(best);
        const cvec x = v.leftCols(built).cast<std::complex<double>>() * y;

        const Vector xr = x.real(), xi = x.imag();
        const Vector ar = a * xr, ai = a * xi;
        const cvec r = ar.cast<std::complex<double>>() + std::complex<double>(0, 1) * ai.cast<std::complex<double>>() -
                       sigma * x;
        achieved = r.norm() / x.norm();
        if (achieved <= config.tolerance * std::max(1.0, std::abs(sigma))) return sigma.real();
        start = xr.norm() > xi.norm() ? xr : xi;
    }
    throw EigenSolverError("shift-invert Arnoldi did not reach residual tolerance (achieved " +
                               std::to_string(achieved) + ")",
                           achieved);
}

}  // namespace detail

/// Largest real part over the spectrum of a square matrix. Dense up to
/// `dense_limit` unknowns, shift-invert Arnoldi above.
inline double largest_real_eigenvalue(const SparseMatrix& a, const EigenConfig& config = {}) {
    if (a.rows() != a.cols()) throw DomainError("eigenvalues need a square matrix");
    if (a.rows() == 0) throw DomainError("eigenvalues of an empty matrix");
    for (Index p = 0; p < a.nonZeros(); ++p)
        if (!std::isfinite(a.valuePtr()[p])) throw NumericError("matrix has non-finite entries");
    SparseMatrix m = a;
    m.makeCompressed();
    const bool dense = config.method == EigenMethod::dense ||
                       (config.method == EigenMethod::automatic && m.rows() <= config.dense_limit);
    return dense ? detail::dense_largest_real(m) : detail::iterative_largest_real(m, config);
}

enum class SystemKind { sfdm, fdm, ball };

inline const char* to_string(SystemKind k) {
    switch (k) {
        case SystemKind::sfdm: return "SFDM";
        case SystemKind::fdm: return "FDM";
        case SystemKind::ball: return "ball";
    }
    return "unknown";
}

struct StabilityPoint {
    double amplitude = 0.0;
    double lambda = 0.0;
    double sigma_max = 0.0;
};

struct StabilityResult {
    SystemKind kind = SystemKind::sfdm;
    std::vector<StabilityPoint> points;

    /// Index of the first point with sigma_max >= 0, or points.size().
    std::size_t first_nonnegative() const {
        for (std::size_t i = 0; i < points.size(); ++i)
            if (points[i].sigma_max >= 0.0) return i;
        return points.size();
    }
};

/// sigma_max at every point of a branch traced with keep_states.
template <ContinuableSystem S>
StabilityResult branch_stability(const Branch& branch, const S& system, SystemKind kind,
                                 const EigenConfig& config = {}, unsigned threads = 1) {
    StabilityResult out{kind, std::vector<StabilityPoint>(branch.points.size())};
    for (const auto& p : branch.points) {
        if (!p.converged) throw DomainError("stability needs converged branch points; A = " + std::to_string(p.amplitude));
        if (p.values.size() != system.unknown_count())
            throw DomainError("branch was traced without stored states");
    }
    parallel_for(branch.points.size(), threads, [&](std::size_t i) {
        const auto& p = branch.points[i];
        out.points[i] = {p.amplitude, p.lambda, largest_real_eigenvalue(system.linearization(p.values, p.lambda), config)};
    });
    return out;
}

}  // namespace sfdm
