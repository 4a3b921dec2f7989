#pragma once

// Bifurcation branches by sweeping the amplitude A = ||u||_inf in the
// fixed-amplitude formulation, and first-fold location by spline
// interpolation of lambda(A) over a window of cold-started solves.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sfdm/errors.hpp"
#include "sfdm/newton.hpp"
#include "sfdm/parallel.hpp"
#include "sfdm/spline.hpp"
#include "sfdm/split_system.hpp"

namespace sfdm {

template <class S>
concept ContinuableSystem = NonlinearSystem<S> && requires(const S& s, const Formulation& f, const Vector& x) {
    { s.with_formulation(f) } -> std::same_as<S>;
    { s.lambda(x) } -> std::convertible_to<double>;
    { s.max_value(x) } -> std::convertible_to<double>;
    { s.values(x) } -> std::convertible_to<Vector>;
    { s.zero_state() } -> std::convertible_to<Vector>;
};

struct BranchPoint {
    double amplitude = 0.0;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    bool reset_used = false;
    double max_u = 0.0;
    Vector values;  // reduced grid values; empty unless states are kept
};

struct Branch {
    double a_start = 0.0;
    double a_step = 0.0;
    double a_end = 0.0;
    std::vector<BranchPoint> points;  // increasing amplitude

    std::vector<const BranchPoint*> converged_points() const {
        std::vector<const BranchPoint*> out;
        for (const auto& p : points)
            if (p.converged) out.push_back(&p);
        return out;
    }
};

struct ContinuationConfig {
    NewtonConfig newton;
    bool warm_start = true;
    bool keep_states = false;
};

/// start, start + step, ..., up to end (inclusive within rounding). Each entry
/// is computed from its index, not accumulated.
inline std::vector<double> amplitude_grid(double start, double step, double end) {
    if (!(step > 0.0)) throw DomainError("amplitude step must be positive");
    if (!(start > 0.0) || !(end >= start)) throw DomainError("amplitude range must satisfy 0 < start <= end");
    const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

/// Solve the fixed-amplitude problem on each A of the grid, warm-started from
/// the last converged point. A failed solve is retried once from zeros;
/// points that still fail are recorded with converged = false.
template <ContinuableSystem S>
Branch trace_branch(const S& problem, double a_start, double a_step, double a_end,
                    const ContinuationConfig& config = {}) {
    Branch branch{a_start, a_step, a_end, {}};
    const auto grid = amplitude_grid(a_start, a_step, a_end);
    branch.points.reserve(grid.size());
    SparseDirectSolver solver;
    std::optional<Vector> previous;
    for (double a : grid) {
        const S system = problem.with_formulation(FixedAmplitude{a});
        const Vector zero = system.zero_state();
        const bool warm = config.warm_start && previous.has_value();
        SolutionState state = newton_solve(system, warm ? *previous : zero, config.newton, solver);
        BranchPoint point;
        point.amplitude = a;
        if (!state.converged && warm) {
            state = newton_solve(system, zero, config.newton, solver);
            point.reset_used = true;
        }
        point.iterations = state.iterations;
        point.converged = state.converged;
        if (state.unknowns.allFinite()) {
            point.lambda = system.lambda(state.unknowns);
            point.max_u = system.max_value(state.unknowns);
        } else {
            point.lambda = std::nan("");
            point.max_u = std::nan("");
        }
        if (state.converged) {
            previous = state.unknowns;
            if (config.keep_states) point.values = system.values(state.unknowns);
        }
        branch.points.push_back(std::move(point));
    }
    return branch;
}

/// Number of sign changes of lambda(A_{i+1}) - lambda(A_i) over consecutive
/// converged points; each one marks a fold.
inline int fold_count(const Branch& branch) {
    const auto pts = branch.converged_points();
    int folds = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double delta = pts[i]->lambda - pts[i - 1]->lambda;
        const int sign = (delta > 0.0) - (delta < 0.0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++folds;
        last_sign = sign;
    }
    return folds;
}

struct BranchDifference {
    double max_difference = 0.0;
    std::size_t compared = 0;
    /// Largest A up to which every compared point differs by less than the threshold.
    double accurate_up_to = 0.0;
};

/// Compare two branches on their mutually converged amplitudes.
inline BranchDifference compare_branches(const Branch& a, const Branch& b, double threshold = 0.005) {
    BranchDifference out;
    bool still_accurate = true;
    std::size_t j = 0;
    for (const auto& p : a.points) {
        while (j < b.points.size() && b.points[j].amplitude < p.amplitude - 1e-9) ++j;
        if (j == b.points.size()) break;
        const auto& q = b.points[j];
        if (std::abs(q.amplitude - p.amplitude) > 1e-9 || !p.converged || !q.converged) continue;
        const double diff = std::abs(p.lambda - q.lambda);
        ++out.compared;
        out.max_difference = std::max(out.max_difference, diff);
        if (still_accurate && diff < threshold)
            out.accurate_up_to = p.amplitude;
        else
            still_accurate = false;
    }
    return out;
}

struct TurningPointEstimate {
    double lambda_star = 0.0;
    double a_star = 0.0;
    double a_center = 0.0;
    double a_halfwidth = 0.0;
    int samples = 0;
    std::vector<double> amplitudes;
    std::vector<double> lambdas;
};

class TurningPointError : public NumericError {
public:
    TurningPointError(double amplitude, const std::string& why)
        : NumericError("turning-point sample at A = " + std::to_string(amplitude) + " failed: " + why),
          amplitude_(amplitude) {}
    double amplitude() const noexcept { return amplitude_; }

private:
    double amplitude_;
};

/// Solve at `samples` evenly spaced A in [center - halfwidth, center + halfwidth],
/// each from zeros, then take the maximum of the natural cubic spline through lambda(A).
template <ContinuableSystem S>
TurningPointEstimate locate_turning_point(const S& problem, double a_center, double a_halfwidth, int samples = 101,
                                          const NewtonConfig& newton = {}, unsigned threads = 1) {
    if (samples < 5) throw DomainError("turning-point search needs at least five samples");
    if (!(a_halfwidth > 0.0) || !(a_center - a_halfwidth > 0.0))
        throw DomainError("turning-point window must have positive half-width and lie in A > 0");
    TurningPointEstimate est;
    est.a_center = a_center;
    est.a_halfwidth = a_halfwidth;
    est.samples = samples;
    est.amplitudes.resize(static_cast<std::size_t>(samples));
    est.lambdas.resize(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
        est.amplitudes[i] = a_center - a_halfwidth + 2.0 * a_halfwidth * i / (samples - 1);

    parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
        const double a = est.amplitudes[i];
        const S system = problem.with_formulation(FixedAmplitude{a});
        const SolutionState state = newton_solve(system, system.zero_state(), newton);
        if (!state.converged) throw TurningPointError(a, state.diagnostic);
        est.lambdas[i] = system.lambda(state.unknowns);
    });

    const SplineMaximum peak = spline_max(est.amplitudes, est.lambdas);
    est.a_star = peak.argmax;
    est.lambda_star = peak.value;
    return est;
}

struct AmplitudeWindow {
    double center = 0.0;
    double halfwidth = 0.0;
};

/// Coarse sweep from A = step until lambda first decreases; the window is
/// centred on the discrete argmax.
template <ContinuableSystem S>
AmplitudeWindow auto_window(const S& problem, const NewtonConfig& newton = {}, double step = 0.1,
                            double halfwidth = 0.1, double a_max = 20.0) {
    SparseDirectSolver solver;
    std::optional<Vector> previous;
    double best_a = 0.0, best_lambda = -1.0;
    const auto grid = amplitude_grid(step, step, a_max);
    for (double a : grid) {
        const S system = problem.with_formulation(FixedAmplitude{a});
        SolutionState state = newton_solve(system, previous ? *previous : system.zero_state(), newton, solver);
        if (!state.converged && previous) state = newton_solve(system, system.zero_state(), newton, solver);
        if (!state.converged) throw TurningPointError(a, "coarse sweep: " + state.diagnostic);
        previous = state.unknowns;
        const double lambda = system.lambda(state.unknowns);
        if (lambda > best_lambda) {
            best_lambda = lambda;
            best_a = a;
        } else {
            return {best_a, halfwidth};
        }
    }
    throw DomainError("lambda(A) did not turn within A <= " + std::to_string(a_max));
}

}  // namespace sfdm
