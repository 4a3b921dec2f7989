#include <gtest/gtest.h>

#include <cmath>

#include "sfdm/analytic.hpp"
#include "sfdm/ball_assembly.hpp"
#include "sfdm/continuation.hpp"
#include "sfdm/cube_assembly.hpp"

using namespace sfdm;

namespace {

Branch synthetic(std::initializer_list<double> lambdas) {
    Branch b{0.1, 0.1, 0.1 * lambdas.size(), {}};
    int i = 1;
    for (double l : lambdas) {
        BranchPoint p;
        p.amplitude = 0.1 * i++;
        p.lambda = l;
        p.converged = true;
        b.points.push_back(p);
    }
    return b;
}

}  // namespace

TEST(AmplitudeGrid, CountsAndValues) {
    const auto g = amplitude_grid(0.1, 0.1, 16.0);
    EXPECT_EQ(g.size(), 160u);
    EXPECT_DOUBLE_EQ(g.back(), 16.0);
    EXPECT_EQ(amplitude_grid(0.1, 0.1, 0.1).size(), 1u);
    EXPECT_EQ(amplitude_grid(1.1, 0.002, 1.3).size(), 101u);
    EXPECT_THROW(amplitude_grid(0.1, 0.0, 1.0), DomainError);
    EXPECT_THROW(amplitude_grid(0.0, 0.1, 1.0), DomainError);
    EXPECT_THROW(amplitude_grid(2.0, 0.1, 1.0), DomainError);
}

TEST(TraceBranch, SinglePointNearLinearRegime) {
    const auto sys = assemble_sfdm(GridSpec(3, 10), FixedAmplitude{0.1});
    const Branch b = trace_branch(sys, 0.1, 0.1, 0.1);
    ASSERT_EQ(b.points.size(), 1u);
    EXPECT_TRUE(b.points[0].converged);
    EXPECT_GT(b.points[0].lambda, 0.0);
    EXPECT_LT(b.points[0].lambda, lambda_upper_bound(3));
    EXPECT_NEAR(b.points[0].max_u, 0.1, 1e-15);
}

TEST(TraceBranch, ThreeDimensionalCubeHasThreeFolds) {
    const auto sys = assemble_sfdm(GridSpec(3, 20), FixedAmplitude{0.1});
    const Branch b = trace_branch(sys, 0.1, 0.1, 16.0);
    ASSERT_EQ(b.points.size(), 160u);
    EXPECT_EQ(fold_count(b), 3);
    double best = 0.0;
    for (const auto& p : b.points) {
        ASSERT_TRUE(p.converged) << p.amplitude;
        EXPECT_GT(p.lambda, 0.0);
        EXPECT_LT(p.lambda, lambda_upper_bound(3));
        best = std::max(best, p.lambda);
    }
    EXPECT_NEAR(best, 9.9019, 2e-3);
    EXPECT_LE(best, 9.901885432 + 1e-9);
}

TEST(TraceBranch, WarmAndColdStartsAgree) {
    const auto sys = assemble_sfdm(GridSpec(3, 20), FixedAmplitude{0.1});
    ContinuationConfig cold;
    cold.warm_start = false;
    const Branch w = trace_branch(sys, 0.1, 0.1, 16.0);
    const Branch c = trace_branch(sys, 0.1, 0.1, 16.0, cold);
    ASSERT_EQ(w.points.size(), c.points.size());
    std::size_t compared = 0;
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        if (!w.points[i].converged || !c.points[i].converged) continue;
        EXPECT_NEAR(w.points[i].lambda, c.points[i].lambda, 1e-9) << w.points[i].amplitude;
        ++compared;
    }
    EXPECT_GT(compared, 150u);
    EXPECT_LE(compare_branches(w, c).max_difference, 1e-9);
}

TEST(TraceBranch, OneFoldInOneAndTwoDimensions) {
    const Branch b1 = trace_branch(assemble_sfdm(GridSpec(1, 200), FixedAmplitude{0.1}), 0.1, 0.1, 16.0);
    EXPECT_EQ(fold_count(b1), 1);
    // coarser 2D grids pick up spurious folds once the peak is narrower than h
    const Branch b2 = trace_branch(assemble_sfdm(GridSpec(2, 200), FixedAmplitude{0.1}), 0.1, 0.1, 16.0);
    EXPECT_EQ(fold_count(b2), 1);
    for (const Branch* b : {&b1, &b2})
        for (const auto& p : b->points) ASSERT_TRUE(p.converged);
}

TEST(TraceBranch, KeepsStatesOnRequest) {
    const auto sys = assemble_sfdm(GridSpec(2, 10), FixedAmplitude{0.5});
    ContinuationConfig cfg;
    cfg.keep_states = true;
    const Branch b = trace_branch(sys, 0.5, 0.5, 2.0, cfg);
    for (const auto& p : b.points) {
        ASSERT_EQ(p.values.size(), sys.unknown_count());
        EXPECT_NEAR(p.values.maxCoeff(), p.amplitude, 1e-15);
    }
    EXPECT_TRUE(trace_branch(sys, 0.5, 0.5, 2.0).points[0].values.size() == 0);
}

TEST(TraceBranch, UnconvergedPointsAreKept) {
    const auto sys = assemble_sfdm(GridSpec(2, 10), FixedAmplitude{0.5});
    ContinuationConfig cfg;
    cfg.newton.max_iterations = 1;
    const Branch b = trace_branch(sys, 0.5, 0.5, 2.0, cfg);
    ASSERT_EQ(b.points.size(), 4u);
    for (const auto& p : b.points) EXPECT_FALSE(p.converged);
    EXPECT_FALSE(b.points[0].reset_used);  // the first point already starts from zeros
    EXPECT_FALSE(b.points[1].reset_used);  // nothing converged to warm-start from
}

TEST(FoldCount, SignChanges) {
    EXPECT_EQ(fold_count(synthetic({1, 2, 3, 2, 1})), 1);
    EXPECT_EQ(fold_count(synthetic({1, 2, 2, 3})), 0);
    EXPECT_EQ(fold_count(synthetic({1, 3, 2, 4, 3})), 3);
    EXPECT_EQ(fold_count(synthetic({})), 0);
}

TEST(CompareBranches, MutuallyConvergedOnly) {
    Branch a = synthetic({1.0, 2.0, 3.0, 4.0});
    Branch b = synthetic({1.001, 2.002, 3.5, 4.0});
    b.points[1].converged = false;
    const auto r = compare_branches(a, b, 0.005);
    EXPECT_EQ(r.compared, 3u);
    EXPECT_NEAR(r.max_difference, 0.5, 1e-12);
    EXPECT_NEAR(r.accurate_up_to, 0.1, 1e-12);
}

TEST(LocateTurningPoint, OneDimensional) {
    const auto sys = assemble_sfdm(GridSpec(1, 10000), FixedAmplitude{1.0});
    const auto t = locate_turning_point(sys, 1.2, 0.1);
    EXPECT_NEAR(t.lambda_star, 3.513830701, 1e-7);
    EXPECT_EQ(t.samples, 101);
    EXPECT_GT(t.a_star, 1.1);
    EXPECT_LT(t.a_star, 1.3);
    for (double l : t.lambdas) EXPECT_GE(t.lambda_star, l);
}

TEST(LocateTurningPoint, ThreeAndFiveDimensions) {
    const auto s3 = assemble_sfdm(GridSpec(3, 20), FixedAmplitude{1.0});
    const auto w3 = auto_window(s3);
    EXPECT_NEAR(locate_turning_point(s3, w3.center, w3.halfwidth).lambda_star, 9.901885432, 1e-6);

    const auto s5 = assemble_sfdm(GridSpec(5, 10), FixedAmplitude{1.0});
    const auto w5 = auto_window(s5);
    EXPECT_NEAR(locate_turning_point(s5, w5.center, w5.halfwidth).lambda_star, 15.617855802, 1e-6);
}

TEST(LocateTurningPoint, ThreadCountDoesNotChangeTheResult) {
    const auto sys = assemble_sfdm(GridSpec(2, 30), FixedAmplitude{1.0});
    const auto a = locate_turning_point(sys, 1.4, 0.2, 101, {}, 1);
    const auto b = locate_turning_point(sys, 1.4, 0.2, 101, {}, 4);
    EXPECT_EQ(a.lambdas, b.lambdas);
    EXPECT_EQ(a.lambda_star, b.lambda_star);
    EXPECT_EQ(a.a_star, b.a_star);
}

TEST(LocateTurningPoint, Errors) {
    const auto sys = assemble_sfdm(GridSpec(2, 10), FixedAmplitude{1.0});
    EXPECT_THROW(locate_turning_point(sys, 1.2, 0.1, 4), DomainError);
    EXPECT_THROW(locate_turning_point(sys, 0.05, 0.1), DomainError);
    NewtonConfig one;
    one.max_iterations = 1;
    try {
        locate_turning_point(sys, 1.2, 0.1, 11, one);
        FAIL() << "expected a failed sample";
    } catch (const TurningPointError& e) {
        EXPECT_GE(e.amplitude(), 1.1 - 1e-12);
        EXPECT_LE(e.amplitude(), 1.3);
    }
    // window far from the fold: the maximum is on the edge
    EXPECT_THROW(locate_turning_point(sys, 0.5, 0.2), EdgeMaximumError);
}

TEST(AutoWindow, CentresOnTheCoarseMaximum) {
    const auto w = auto_window(assemble_sfdm(GridSpec(1, 1000), FixedAmplitude{1.0}));
    EXPECT_NEAR(w.center, 1.2, 1e-12);
    EXPECT_EQ(w.halfwidth, 0.1);
    EXPECT_THROW(auto_window(assemble_ball(10, 200, FixedAmplitude{1.0}), {}, 0.5, 0.1, 5.0), DomainError);
}
