#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "sfdm/continuation.hpp"
#include "sfdm/cube_assembly.hpp"
#include "sfdm/newton.hpp"
#include "sfdm/stability.hpp"

using namespace sfdm;

namespace {

EigenConfig with_method(EigenMethod m) {
    EigenConfig c;
    c.method = m;
    return c;
}

Vector solve_values(const AssembledSystem& sys) {
    const auto s = newton_solve(sys, sys.zero_state());
    EXPECT_TRUE(s.converged);
    return sys.values(s.unknowns);
}

}  // namespace

TEST(LargestRealEigenvalue, DirichletLaplacian) {
    const double h = 0.1;
    const double expected = -(4.0 / (h * h)) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2);
    for (auto scheme : {0, 1}) {
        const auto sys = scheme ? assemble_fdm(GridSpec(1, 10), FixedLambda{0.0})
                                : assemble_sfdm(GridSpec(1, 10), FixedLambda{0.0});
        const SparseMatrix j = sys.linearization(Vector::Zero(sys.unknown_count()), 0.0);
        EXPECT_NEAR(largest_real_eigenvalue(j, with_method(EigenMethod::dense)), expected, 1e-10);
        EXPECT_NEAR(largest_real_eigenvalue(j, with_method(EigenMethod::iterative)), expected, 1e-10);
    }
}

TEST(LargestRealEigenvalue, IterativeMatchesDense) {
    for (double a : {0.5, 1.6, 3.0}) {
        const auto sys = assemble_sfdm(GridSpec(3, 20), FixedAmplitude{a});
        const auto s = newton_solve(sys, sys.zero_state());
        ASSERT_TRUE(s.converged);
        const SparseMatrix j = sys.linearization(sys.values(s.unknowns), sys.lambda(s.unknowns));
        EXPECT_NEAR(largest_real_eigenvalue(j, with_method(EigenMethod::dense)),
                    largest_real_eigenvalue(j, with_method(EigenMethod::iterative)), 1e-8)
            << a;
    }
}

TEST(LargestRealEigenvalue, NonSymmetricDenseMatrix) {
    Eigen::MatrixXd m(3, 3);
    m << 1, 2, 0, -2, 1, 0, 0, 0, -5;  // eigenvalues 1 +- 2i and -5
    const SparseMatrix s = m.sparseView();
    EXPECT_NEAR(largest_real_eigenvalue(s), 1.0, 1e-12);
}

TEST(LargestRealEigenvalue, Errors) {
    SparseMatrix rect(2, 3);
    EXPECT_THROW(largest_real_eigenvalue(rect), DomainError);
    const auto sys = assemble_fdm(GridSpec(2, 30), FixedLambda{0.0});
    const SparseMatrix j = sys.linearization(Vector::Zero(sys.unknown_count()), 0.0);
    EigenConfig starved = with_method(EigenMethod::iterative);
    starved.krylov_dimension = 2;
    starved.max_restarts = 0;
    starved.tolerance = 1e-14;
    try {
        largest_real_eigenvalue(j, starved);
        FAIL() << "expected the iterative eigensolver to give up";
    } catch (const EigenSolverError& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(Linearization, FullGridIsSymmetric) {
    for (int d = 1; d <= 3; ++d) {
        const auto sys = assemble_fdm(GridSpec(d, 8), FixedAmplitude{1.5});
        const auto s = newton_solve(sys, sys.zero_state());
        ASSERT_TRUE(s.converged);
        const Eigen::MatrixXd j(sys.linearization(sys.values(s.unknowns), sys.lambda(s.unknowns)));
        EXPECT_EQ(j, j.transpose());
    }
}

// The reduced operator acts on the symmetric invariant subspace, so each of
// its eigenvalues is an eigenvalue of the full operator.
TEST(Linearization, SpectralContainment) {
    for (int d = 1; d <= 3; ++d)
        for (Index n : {5, 8, 10}) {
            for (double a : {0.8, 2.5}) {
                const GridSpec grid(d, n);
                const auto sym = assemble_sfdm(grid, FixedAmplitude{a});
                const auto full = assemble_fdm(grid, FixedAmplitude{a});
                const auto ss = newton_solve(sym, sym.zero_state());
                const auto sf = newton_solve(full, full.zero_state());
                ASSERT_TRUE(ss.converged && sf.converged);
                const Eigen::MatrixXd js(sym.linearization(sym.values(ss.unknowns), sym.lambda(ss.unknowns)));
                const Eigen::MatrixXd jf(full.linearization(full.values(sf.unknowns), full.lambda(sf.unknowns)));
                const Eigen::VectorXcd es = Eigen::EigenSolver<Eigen::MatrixXd>(js, false).eigenvalues();
                const Eigen::VectorXd ef = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jf).eigenvalues();
                for (Index i = 0; i < es.size(); ++i) {
                    EXPECT_NEAR(es[i].imag(), 0.0, 1e-8);
                    const double gap = (ef.array() - es[i].real()).abs().minCoeff();
                    EXPECT_LE(gap, 1e-8 * std::max(1.0, std::abs(es[i].real()))) << d << ' ' << n << ' ' << a;
                }
            }
        }
}

TEST(BranchStability, FullAndReducedAgree) {
    const GridSpec grid(2, 10);
    ContinuationConfig cfg;
    cfg.keep_states = true;
    const auto sym = assemble_sfdm(grid, FixedAmplitude{0.2});
    const auto full = assemble_fdm(grid, FixedAmplitude{0.2});
    const auto rs = branch_stability(trace_branch(sym, 0.2, 0.2, 4.0, cfg), sym, SystemKind::sfdm);
    const auto rf = branch_stability(trace_branch(full, 0.2, 0.2, 4.0, cfg), full, SystemKind::fdm);
    ASSERT_EQ(rs.points.size(), rf.points.size());
    for (std::size_t i = 0; i < rs.points.size(); ++i)
        EXPECT_NEAR(rs.points[i].sigma_max, rf.points[i].sigma_max, 1e-8) << rs.points[i].amplitude;
    EXPECT_EQ(rs.kind, SystemKind::sfdm);
    EXPECT_LT(rs.points.front().sigma_max, 0.0);
    EXPECT_GT(rs.points.back().sigma_max, 0.0);
}

TEST(BranchStability, PureDiffusionIsStable) {
    const auto sys = assemble_sfdm(GridSpec(3, 12), FixedLambda{0.0});
    const Vector u = solve_values(sys);
    EXPECT_LT(largest_real_eigenvalue(sys.linearization(u, 0.0)), 0.0);
}

TEST(BranchStability, SignChangeAtTheFold) {
    ContinuationConfig cfg;
    cfg.keep_states = true;
    const auto sys = assemble_sfdm(GridSpec(3, 20), FixedAmplitude{0.1});
    const Branch b = trace_branch(sys, 0.1, 0.1, 3.0, cfg);
    const auto r = branch_stability(b, sys, SystemKind::sfdm);
    // discrete argmax of lambda along the branch
    std::size_t peak = 0;
    for (std::size_t i = 1; i < b.points.size(); ++i)
        if (b.points[i].lambda > b.points[peak].lambda) peak = i;
    const std::size_t cross = r.first_nonnegative();
    ASSERT_LT(cross, r.points.size());
    EXPECT_LE(std::abs(static_cast<long>(cross) - static_cast<long>(peak)), 1);
    for (std::size_t i = 1; i < r.points.size(); ++i) EXPECT_GT(r.points[i].sigma_max, r.points[i - 1].sigma_max);
}

TEST(BranchStability, NeedsStoredConvergedStates) {
    const auto sys = assemble_sfdm(GridSpec(2, 8), FixedAmplitude{0.5});
    const Branch b = trace_branch(sys, 0.5, 0.5, 1.0);
    EXPECT_THROW(branch_stability(b, sys, SystemKind::sfdm), DomainError);
}
