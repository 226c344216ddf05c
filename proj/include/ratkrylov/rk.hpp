#pragma once

/// \file rk.hpp
/// Block rational Arnoldi and Galerkin evaluation x = U f(U*AU) U*v.

#include <ratkrylov/core.hpp>
#include <ratkrylov/functions.hpp>
#include <ratkrylov/operators.hpp>
#include <ratkrylov/poles.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace ratkrylov {

inline constexpr double kDeflationTolerance = 1e-12;

class RKDecomposition;
inline RKDecomposition rk_build(const HermitianOperator&, const BlockVector&, const PoleSequence&);
inline RKDecomposition rk_extend(const HermitianOperator&, RKDecomposition, const PoleSequence&);
inline void detail_rk_step(const HermitianOperator&, RKDecomposition&, double);

/// Orthonormal basis of RK_m(A, v, poles) with its Galerkin data.
///
/// The basis is nested: the first `dims[j]` columns span the space after j
/// poles, so any prefix can be evaluated without rebuilding.
class RKDecomposition {
public:
    /// U, n x dim.
    auto basis() const { return storage_.leftCols(dim_); }
    /// A_m = U*AU, dim x dim, symmetric.
    auto projected() const { return projected_.topLeftCorner(dim_, dim_); }
    /// v_m = U*v, dim x s.
    BlockVector projected_rhs() const { return projected_rhs(steps()); }

    BlockVector projected_rhs(std::size_t steps) const {
        const Index d = dim_after(steps);
        BlockVector r = BlockVector::Zero(d, rhs_coeffs_.cols());
        r.topRows(rhs_coeffs_.rows()) = rhs_coeffs_;
        return r;
    }

    const PoleSequence& poles() const { return poles_; }
    Index dim() const { return dim_; }
    Index rows() const { return storage_.rows(); }
    /// Block width of the starting block after deflation.
    Index block_width() const { return rhs_coeffs_.rows(); }
    std::size_t steps() const { return dims_.size() - 1; }
    /// Dimension after j poles (j = 0 is the starting block).
    Index dim_after(std::size_t j) const { return dims_.at(j); }
    /// Set when a step deflated every new direction; the space is invariant.
    bool flagged() const { return flagged_; }
    double rhs_norm() const { return rhs_norm_; }

private:
    friend RKDecomposition rk_build(const HermitianOperator&, const BlockVector&, const PoleSequence&);
    friend RKDecomposition rk_extend(const HermitianOperator&, RKDecomposition, const PoleSequence&);
    friend void detail_rk_step(const HermitianOperator&, RKDecomposition&, double);

    void reserve(Index cols) {
        if (cols <= storage_.cols()) return;
        const Index cap = std::max(cols, 2 * storage_.cols());
        storage_.conservativeResize(Eigen::NoChange, cap);
        projected_.conservativeResize(cap, cap);
    }

    Matrix storage_;
    Matrix projected_;
    BlockVector rhs_coeffs_;
    PoleSequence poles_;
    std::vector<Index> dims_;
    Index dim_ = 0;
    Index last_begin_ = 0;
    bool flagged_ = false;
    double rhs_norm_ = 0.0;
};

namespace detail {

// Orthonormalizes the columns of w against basis(:, 0:dim) and against each
// other, two Gram-Schmidt passes per column; columns whose norm drops below
// tol times their incoming norm are discarded. Returns accepted columns.
inline Matrix orthonormalize_block(const Eigen::Ref<const Matrix>& basis, Matrix w, double abs_floor) {
    Matrix accepted(w.rows(), 0);
    for (Index j = 0; j < w.cols(); ++j) {
        Vector c = w.col(j);
        const double before = c.norm();
        for (int pass = 0; pass < 2; ++pass) {
            if (basis.cols() > 0) c.noalias() -= basis * (basis.transpose() * c);
            if (accepted.cols() > 0) c.noalias() -= accepted * (accepted.transpose() * c);
        }
        const double after = c.norm();
        if (!(after > kDeflationTolerance * before) || !(after > abs_floor)) continue;
        accepted.conservativeResize(Eigen::NoChange, accepted.cols() + 1);
        accepted.col(accepted.cols() - 1) = c / after;
    }
    return accepted;
}

}  // namespace detail

// One rational Arnoldi step with pole xi.
inline void detail_rk_step(const HermitianOperator& op, RKDecomposition& d, double xi) {
    d.poles_.poles.push_back(xi);
    if (d.flagged_) {
        d.dims_.push_back(d.dim_);
        return;
    }
    const Matrix last = d.storage_.middleCols(d.last_begin_, d.dim_ - d.last_begin_);
    Matrix w = is_infinite_pole(xi) ? op.apply(last) : op.shifted_solve(xi, last);
    Matrix fresh = detail::orthonormalize_block(d.storage_.leftCols(d.dim_), std::move(w), 0.0);
    if (fresh.cols() == 0) {
        d.flagged_ = true;
        d.dims_.push_back(d.dim_);
        return;
    }
    const Index old = d.dim_;
    const Index add = fresh.cols();
    d.reserve(old + add);
    d.storage_.middleCols(old, add) = fresh;
    d.dim_ = old + add;
    d.last_begin_ = old;
    const Matrix a_fresh = op.apply(fresh);
    const Matrix cross = d.storage_.leftCols(d.dim_).transpose() * a_fresh;
    d.projected_.block(0, old, d.dim_, add) = cross;
    d.projected_.block(old, 0, add, old) = cross.topRows(old).transpose();
    Matrix diag = cross.bottomRows(add);
    d.projected_.block(old, old, add, add) = 0.5 * (diag + diag.transpose());
    d.dims_.push_back(d.dim_);
}

/// Builds RK_m(A, v, poles) by block rational Arnoldi: w = A W for an
/// infinite pole, w = (A - xi I)^{-1} W otherwise, where W is the newest
/// block; classical Gram-Schmidt with one re-orthogonalization pass.
inline RKDecomposition rk_build(const HermitianOperator& op, const BlockVector& v, const PoleSequence& poles) {
    if (v.rows() != op.size())
        throw DimensionError(detail::concat("rk_build: operator order ", op.size(), " but v has ", v.rows(),
                                            " rows"));
    detail::require(v.cols() >= 1, "rk_build: v needs at least one column");
    detail::require(!poles.empty(), "rk_build: pole count must be at least 1");
    RKDecomposition d;
    d.rhs_norm_ = v.norm();
    detail::require(d.rhs_norm_ > 0.0 && std::isfinite(d.rhs_norm_), "rk_build: v must be nonzero and finite");
    d.poles_ = poles.prefix(0);

    Matrix first = detail::orthonormalize_block(Matrix(op.size(), 0), v, kDeflationTolerance * d.rhs_norm_);
    d.storage_.resize(op.size(), std::max<Index>(first.cols() * static_cast<Index>(poles.size() + 1), 1));
    d.projected_.resize(d.storage_.cols(), d.storage_.cols());
    const Index s = first.cols();
    d.storage_.leftCols(s) = first;
    d.dim_ = s;
    d.last_begin_ = 0;
    d.rhs_coeffs_ = first.transpose() * v;
    const Matrix af = op.apply(first);
    const Matrix pf = first.transpose() * af;
    d.projected_.topLeftCorner(s, s) = 0.5 * (pf + pf.transpose());
    d.dims_.push_back(s);
    for (double xi : poles.poles) detail_rk_step(op, d, xi);
    return d;
}

/// Continues the recurrence of `decomp` with further poles. Refuses a
/// decomposition whose space has already become invariant.
inline RKDecomposition rk_extend(const HermitianOperator& op, RKDecomposition decomp, const PoleSequence& more) {
    if (decomp.rows() != op.size()) throw DimensionError("rk_extend: operator does not match decomposition");
    if (more.empty()) return decomp;
    if (decomp.flagged_)
        throw Error("rk_extend: decomposition is flagged (total deflation); the space cannot grow");
    decomp.reserve(decomp.dim_ + decomp.block_width() * static_cast<Index>(more.size()));
    for (double xi : more.poles) detail_rk_step(op, decomp, xi);
    return decomp;
}

/// x = U_j f(A_j) v_j for the space after j poles, via the symmetric
/// eigendecomposition of the projected matrix. `f` is any real callable.
template <typename F>
BlockVector rk_funv(const RKDecomposition& d, const F& f, std::size_t steps) {
    const Index k = d.dim_after(steps);
    const Matrix a = d.projected().topLeftCorner(k, k);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw Error("rk_funv: projected eigensolver did not converge");
    Vector fl(k);
    for (Index i = 0; i < k; ++i) {
        const double ritz = es.eigenvalues()(i);
        double y;
        try {
            y = f(ritz);
        } catch (const DomainError& e) {
            throw DomainError(detail::concat("rk_funv: f undefined at Ritz value ", ritz, ": ", e.what()));
        }
        if (!std::isfinite(y)) throw DomainError(detail::concat("rk_funv: f undefined at Ritz value ", ritz));
        fl(i) = y;
    }
    const BlockVector coeff =
        es.eigenvectors() * (fl.asDiagonal() * (es.eigenvectors().transpose() * d.projected_rhs(steps)));
    return d.basis().leftCols(k) * coeff;
}

template <typename F>
BlockVector rk_funv(const RKDecomposition& d, const F& f) {
    return rk_funv(d, f, d.steps());
}

// ---------------------------------------------------------------------------
// Exactness of the projection on the rational functions the space reproduces.

/// Max relative error of the projection over partial fractions
/// 1/(z - xi_j), products 1/((z - xi_i)(z - xi_j)), z/(z - xi_j) and
/// monomials z^p up to the number of infinite poles.
inline double exactness_check(const HermitianOperator& op, const BlockVector& v, const PoleSequence& poles,
                              Index dense_limit = kDefaultDenseLimit) {
    const RKDecomposition d = rk_build(op, v, poles);
    std::vector<double> finite;
    int infinite = 0;
    for (double xi : poles.poles) {
        if (is_infinite_pole(xi))
            ++infinite;
        else
            finite.push_back(xi);
    }
    double worst = 0.0;
    auto probe = [&](auto f) {
        const BlockVector exact = oracle_funv(op, f, v, dense_limit);
        const BlockVector approx = rk_funv(d, f);
        const double scale = exact.norm();
        worst = std::max(worst, (exact - approx).norm() / (scale > 0.0 ? scale : 1.0));
    };
    for (std::size_t i = 0; i < finite.size(); ++i) {
        const double xi = finite[i];
        probe([xi](double z) { return 1.0 / (z - xi); });
        probe([xi](double z) { return z / (z - xi); });
        for (std::size_t j = i + 1; j < finite.size(); ++j) {
            const double xj = finite[j];
            probe([xi, xj](double z) { return 1.0 / ((z - xi) * (z - xj)); });
        }
    }
    for (int p = 0; p <= infinite; ++p) probe([p](double z) { return std::pow(z, p); });
    return worst;
}

}  // namespace ratkrylov
