#pragma once

// Nonlinear systems of the form
//
//   F_i(u) = sum_j L_ij u_j + s * lambda * exp(u_i) = 0
//
// with a constant sparse linear part L and a scalar nonlinear weight s. The
// Jacobian is kept split: L is laid out once into a fixed sparsity pattern and
// each evaluation only rewrites the exponential diagonal (and, for the
// fixed-amplitude formulation, the dense d/d(lambda) column).

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sfdm/errors.hpp"
#include "sfdm/symmetry_index.hpp"

namespace sfdm {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;
using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;

/// lambda is given; the unknowns are the grid values.
struct FixedLambda {
    double lambda = 0.0;
};

/// ||u||_inf = A is given by pinning the maximiser; the unknowns are
/// (lambda, grid values without the pinned one).
struct FixedAmplitude {
    double amplitude = 0.0;
};

using Formulation = std::variant<FixedLambda, FixedAmplitude>;

inline void validate(const Formulation& f) {
    if (const auto* fl = std::get_if<FixedLambda>(&f)) {
        if (!std::isfinite(fl->lambda)) throw DomainError("lambda must be finite");
    } else {
        const double a = std::get<FixedAmplitude>(f).amplitude;
        if (!std::isfinite(a) || a < 0.0) throw DomainError("amplitude A must be finite and >= 0");
    }
}

class SplitOperator {
public:
    SplitOperator(RowSparseMatrix linear, double nonlinear_scale, Index pinned)
        : linear_(std::move(linear)), scale_(nonlinear_scale), pinned_(pinned) {
        if (linear_.rows() != linear_.cols()) throw DomainError("linear part must be square");
        if (pinned_ < 0 || pinned_ >= linear_.rows()) throw DomainError("pinned index out of range");
        linear_.makeCompressed();
        build_fixed_lambda_layout();
        build_fixed_amplitude_layout();
    }

    Index size() const noexcept { return linear_.rows(); }
    const RowSparseMatrix& linear() const noexcept { return linear_; }
    double nonlinear_scale() const noexcept { return scale_; }
    Index pinned() const noexcept { return pinned_; }

    Vector residual(const Vector& u, double lambda) const {
        Vector r = linear_ * u;
        r.array() += scale_ * lambda * u.array().exp();
        return r;
    }

    /// dF/du at (u, lambda).
    SparseMatrix jacobian_fixed_lambda(const Vector& u, double lambda) const {
        SparseMatrix j = fixed_lambda_.base;
        double* values = j.valuePtr();
        for (Index i = 0; i < size(); ++i)
            values[fixed_lambda_.diagonal[i]] += scale_ * lambda * std::exp(u[i]);
        return j;
    }

    /// d F / d(lambda, u without pinned) at (u, lambda).
    SparseMatrix jacobian_fixed_amplitude(const Vector& u, double lambda) const {
        SparseMatrix j = fixed_amplitude_.base;
        double* values = j.valuePtr();
        for (Index i = 0; i < size(); ++i) {
            const double e = std::exp(u[i]);
            values[fixed_amplitude_.lambda_column[i]] = scale_ * e;
            if (i != pinned_) values[fixed_amplitude_.diagonal[i]] += scale_ * lambda * e;
        }
        return j;
    }

    /// Unknown slot of grid value i in the fixed-amplitude vector; -1 for the pinned one.
    Index amplitude_slot(Index i) const noexcept {
        if (i == pinned_) return -1;
        return i < pinned_ ? i + 1 : i;
    }

private:
    struct Layout {
        SparseMatrix base;
        std::vector<Index> diagonal;       // value offset of the exp(u_i) slot per row
        std::vector<Index> lambda_column;  // value offset of (i, lambda) per row
    };

    static Index find_offset(const SparseMatrix& m, Index row, Index col) {
        const Index* inner = m.innerIndexPtr();
        const Index begin = m.outerIndexPtr()[col];
        const Index end = m.outerIndexPtr()[col + 1];
        const Index* hit = std::lower_bound(inner + begin, inner + end, row);
        if (hit == inner + end || *hit != row) throw NumericError("jacobian layout entry missing");
        return static_cast<Index>(hit - inner);
    }

    void build_fixed_lambda_layout() {
        const Index m = size();
        std::vector<Eigen::Triplet<double, Index>> t;
        t.reserve(linear_.nonZeros() + m);
        for (Index i = 0; i < m; ++i) {
            for (RowSparseMatrix::InnerIterator it(linear_, i); it; ++it) t.emplace_back(i, it.col(), it.value());
            t.emplace_back(i, i, 0.0);
        }
        fixed_lambda_.base.resize(m, m);
        fixed_lambda_.base.setFromTriplets(t.begin(), t.end());
        fixed_lambda_.base.makeCompressed();
        fixed_lambda_.diagonal.resize(m);
        for (Index i = 0; i < m; ++i) fixed_lambda_.diagonal[i] = find_offset(fixed_lambda_.base, i, i);
    }

    void build_fixed_amplitude_layout() {
        const Index m = size();
        std::vector<Eigen::Triplet<double, Index>> t;
        t.reserve(linear_.nonZeros() + 2 * m);
        for (Index i = 0; i < m; ++i) {
            for (RowSparseMatrix::InnerIterator it(linear_, i); it; ++it) {
                const Index slot = amplitude_slot(it.col());
                if (slot >= 0) t.emplace_back(i, slot, it.value());
            }
            t.emplace_back(i, 0, 0.0);
            if (i != pinned_) t.emplace_back(i, amplitude_slot(i), 0.0);
        }
        fixed_amplitude_.base.resize(m, m);
        fixed_amplitude_.base.setFromTriplets(t.begin(), t.end());
        fixed_amplitude_.base.makeCompressed();
        fixed_amplitude_.diagonal.assign(m, -1);
        fixed_amplitude_.lambda_column.resize(m);
        for (Index i = 0; i < m; ++i) {
            fixed_amplitude_.lambda_column[i] = find_offset(fixed_amplitude_.base, i, 0);
            if (i != pinned_) fixed_amplitude_.diagonal[i] = find_offset(fixed_amplitude_.base, i, amplitude_slot(i));
        }
    }

    RowSparseMatrix linear_;
    double scale_;
    Index pinned_;
    Layout fixed_lambda_;
    Layout fixed_amplitude_;
};

inline void require_finite(const Vector& x) {
    if (!x.allFinite()) throw NumericError("state contains non-finite entries");
}

/// A SplitOperator bound to one formulation. Cheap to copy; the operator is shared.
class SplitSystem {
public:
    SplitSystem(std::shared_ptr<const SplitOperator> op, Formulation formulation)
        : op_(std::move(op)), formulation_(formulation) {
        validate(formulation_);
    }

    const SplitOperator& op() const noexcept { return *op_; }
    const std::shared_ptr<const SplitOperator>& shared_op() const noexcept { return op_; }
    const Formulation& formulation() const noexcept { return formulation_; }
    bool fixed_amplitude() const noexcept { return std::holds_alternative<FixedAmplitude>(formulation_); }

    /// Same count of unknowns and equations in both formulations.
    Index unknown_count() const noexcept { return op_->size(); }

    Vector zero_state() const { return Vector::Zero(unknown_count()); }

    /// Grid values (reduced numbering) carried by unknown vector x.
    Vector values(const Vector& x) const {
        check_length(x);
        if (!fixed_amplitude()) return x;
        const Index m = op_->size();
        Vector u(m);
        for (Index i = 0; i < m; ++i) {
            const Index slot = op_->amplitude_slot(i);
            u[i] = slot < 0 ? std::get<FixedAmplitude>(formulation_).amplitude : x[slot];
        }
        return u;
    }

    double lambda(const Vector& x) const {
        check_length(x);
        return fixed_amplitude() ? x[0] : std::get<FixedLambda>(formulation_).lambda;
    }

    /// Inverse of values()/lambda(): unknown vector for grid values u and parameter lambda.
    Vector pack(const Vector& u, double lambda) const {
        if (u.size() != op_->size()) throw DomainError("grid value vector has wrong length");
        if (!fixed_amplitude()) return u;
        Vector x(op_->size());
        x[0] = lambda;
        for (Index i = 0; i < op_->size(); ++i) {
            const Index slot = op_->amplitude_slot(i);
            if (slot >= 0) x[slot] = u[i];
        }
        return x;
    }

    Vector residual(const Vector& x) const {
        check_length(x);
        require_finite(x);
        return op_->residual(values(x), lambda(x));
    }

    SparseMatrix jacobian(const Vector& x) const {
        check_length(x);
        require_finite(x);
        const Vector u = values(x);
        return fixed_amplitude() ? op_->jacobian_fixed_amplitude(u, lambda(x))
                                 : op_->jacobian_fixed_lambda(u, lambda(x));
    }

    /// Linearisation of u_t = (1/s) F(u) about (u, lambda): the fixed-lambda
    /// Jacobian divided by the nonlinear weight, i.e. the discrete operator
    /// Delta + lambda e^u in physical units.
    SparseMatrix linearization(const Vector& u, double lambda) const {
        require_finite(u);
        SparseMatrix j = op_->jacobian_fixed_lambda(u, lambda);
        j /= op_->nonlinear_scale();
        return j;
    }

    double max_value(const Vector& x) const {
        const Vector u = values(x);
        return u.size() == 0 ? 0.0 : std::max(0.0, u.maxCoeff());
    }

protected:
    void set_formulation(const Formulation& f) {
        validate(f);
        formulation_ = f;
    }

private:
    void check_length(const Vector& x) const {
        if (x.size() != op_->size())
            throw DomainError("state length " + std::to_string(x.size()) + " does not match system size " +
                              std::to_string(op_->size()));
    }

    std::shared_ptr<const SplitOperator> op_;
    Formulation formulation_;
};

}  // namespace sfdm
