#pragma once

/// \file operators.hpp
/// Real symmetric operators (dense, diagonal, tridiagonal) with matvec,
/// shifted solves, spectral-interval estimates and the dense
/// eigendecomposition used as ground truth.

#include <ratkrylov/core.hpp>
#include <ratkrylov/sine_transform.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace ratkrylov {

inline constexpr Index kDefaultDenseLimit = 4000;

enum class OperatorKind { dense, diagonal, tridiagonal };

inline const char* to_string(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::dense: return "dense";
    case OperatorKind::diagonal: return "diagonal";
    case OperatorKind::tridiagonal: return "tridiagonal";
    }
    return "?";
}

namespace detail {

// LU with partial pivoting for a tridiagonal system, same elimination order
// as LAPACK ?gtsv. `lower`, `main`, `upper` are consumed; `rhs` is
// overwritten with the solution. Returns the index of the first pivot whose
// magnitude is below `pivot_tol`, or -1.
template <typename T>
Index gtsv(std::vector<T> lower, std::vector<T> main, std::vector<T> upper,
           Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& rhs, double pivot_tol) {
    const Index n = static_cast<Index>(main.size());
    const Index nrhs = rhs.cols();
    if (n == 1) {
        if (std::abs(main[0]) <= pivot_tol) return 0;
        rhs.row(0) /= main[0];
        return -1;
    }
    // After elimination `lower[i]` holds the second superdiagonal fill-in.
    for (Index i = 0; i < n - 1; ++i) {
        if (std::abs(main[i]) >= std::abs(lower[i])) {
            if (std::abs(main[i]) <= pivot_tol) return i;
            const T fact = lower[i] / main[i];
            main[i + 1] -= fact * upper[i];
            for (Index j = 0; j < nrhs; ++j) rhs(i + 1, j) -= fact * rhs(i, j);
            lower[i] = T(0);
        } else {
            const T fact = main[i] / lower[i];
            main[i] = lower[i];
            const T tmp = main[i + 1];
            main[i + 1] = upper[i] - fact * tmp;
            if (i < n - 2) {
                lower[i] = upper[i + 1];
                upper[i + 1] = -fact * lower[i];
            } else {
                lower[i] = T(0);
            }
            upper[i] = tmp;
            for (Index j = 0; j < nrhs; ++j) {
                const T t = rhs(i, j);
                rhs(i, j) = rhs(i + 1, j);
                rhs(i + 1, j) = t - fact * rhs(i + 1, j);
            }
        }
    }
    if (std::abs(main[n - 1]) <= pivot_tol) return n - 1;
    for (Index j = 0; j < nrhs; ++j) {
        rhs(n - 1, j) /= main[n - 1];
        rhs(n - 2, j) = (rhs(n - 2, j) - upper[n - 2] * rhs(n - 1, j)) / main[n - 2];
        for (Index i = n - 3; i >= 0; --i)
            rhs(i, j) = (rhs(i, j) - upper[i] * rhs(i + 1, j) - lower[i] * rhs(i + 2, j)) /
                        main[i];
    }
    return -1;
}

inline constexpr double kPivotTolerance = 1e-14;

}  // namespace detail

/// Eigenpairs with ascending eigenvalues; columns of `vectors` are orthonormal.
struct EigenDecomposition {
    Vector values;
    Matrix vectors;
};

/// Real symmetric operator. Storage per kind: the full matrix (dense), the
/// diagonal (diagonal), or main and first off-diagonal (tridiagonal).
class HermitianOperator {
public:
    static HermitianOperator dense(Matrix a) {
        if (a.rows() != a.cols() || a.rows() == 0)
            throw DimensionError("dense operator must be square and non-empty");
        HermitianOperator op(OperatorKind::dense, a.rows());
        // Keep exactly symmetric storage.
        op.dense_ = 0.5 * (a + a.transpose());
        return op;
    }

    static HermitianOperator diagonal(Vector d) {
        if (d.size() == 0) throw DimensionError("diagonal operator must be non-empty");
        HermitianOperator op(OperatorKind::diagonal, d.size());
        op.main_ = std::move(d);
        return op;
    }

    static HermitianOperator tridiagonal(Vector main, Vector off) {
        if (main.size() == 0 || off.size() != std::max<Index>(main.size() - 1, 0))
            throw DimensionError("tridiagonal operator needs n main and n-1 off-diagonal entries");
        HermitianOperator op(OperatorKind::tridiagonal, main.size());
        op.main_ = std::move(main);
        op.off_ = std::move(off);
        return op;
    }

    /// tridiag(off, diag, off) of order n.
    static HermitianOperator toeplitz_tridiagonal(Index n, double diag, double off) {
        return tridiagonal(Vector::Constant(n, diag), Vector::Constant(std::max<Index>(n - 1, 0), off));
    }

    OperatorKind kind() const { return kind_; }
    Index size() const { return n_; }

    const Matrix& dense_storage() const { return dense_; }
    const Vector& main_diagonal() const { return main_; }
    const Vector& off_diagonal() const { return off_; }

    /// (diag, off) when this is a constant-coefficient tridiagonal operator
    /// (order-1 and diagonal-constant operators included).
    std::optional<std::pair<double, double>> toeplitz_coefficients() const {
        if (kind_ == OperatorKind::dense) return std::nullopt;
        const double d = main_(0);
        if ((main_.array() != d).any()) return std::nullopt;
        if (kind_ == OperatorKind::diagonal || n_ == 1) return std::make_pair(d, 0.0);
        const double e = off_(0);
        if ((off_.array() != e).any()) return std::nullopt;
        return std::make_pair(d, e);
    }

    Matrix to_dense() const {
        switch (kind_) {
        case OperatorKind::dense: return dense_;
        case OperatorKind::diagonal: return main_.asDiagonal();
        case OperatorKind::tridiagonal: {
            Matrix a = Matrix::Zero(n_, n_);
            a.diagonal() = main_;
            if (n_ > 1) {
                a.diagonal(1) = off_;
                a.diagonal(-1) = off_;
            }
            return a;
        }
        }
        return {};
    }

    /// A - c I.
    HermitianOperator shifted(double c) const {
        HermitianOperator op = *this;
        if (kind_ == OperatorKind::dense)
            op.dense_.diagonal().array() -= c;
        else
            op.main_.array() -= c;
        return op;
    }

    BlockVector apply(const BlockVector& x) const {
        if (x.rows() != n_)
            throw DimensionError(detail::concat("matvec: operator order ", n_, " but block has ",
                                                x.rows(), " rows"));
        switch (kind_) {
        case OperatorKind::dense: return dense_ * x;
        case OperatorKind::diagonal: return main_.asDiagonal() * x;
        case OperatorKind::tridiagonal: {
            BlockVector y = main_.asDiagonal() * x;
            if (n_ > 1) {
                y.topRows(n_ - 1).array() += (x.bottomRows(n_ - 1).array().colwise() * off_.array());
                y.bottomRows(n_ - 1).array() += (x.topRows(n_ - 1).array().colwise() * off_.array());
            }
            return y;
        }
        }
        return {};
    }

    /// Solves (A - sigma I) y = rhs. An infinite sigma returns rhs unchanged.
    BlockVector shifted_solve(double sigma, const BlockVector& rhs) const {
        if (is_infinite_pole(sigma)) return rhs;
        check_rows(rhs);
        switch (kind_) {
        case OperatorKind::diagonal: {
            const Vector shifted = main_.array() - sigma;
            const double scale = std::max(main_.cwiseAbs().maxCoeff(), std::abs(sigma));
            for (Index i = 0; i < n_; ++i)
                if (std::abs(shifted(i)) <= detail::kPivotTolerance * std::max(scale, 1e-300))
                    throw singular(sigma);
            return shifted.cwiseInverse().asDiagonal() * rhs;
        }
        case OperatorKind::tridiagonal: {
            BlockVector y = rhs;
            const auto info = detail::gtsv<double>(off_vec(), shifted_main<double>(sigma), off_vec(), y,
                                                   pivot_tolerance(std::abs(sigma)));
            if (info >= 0) throw singular(sigma);
            return y;
        }
        case OperatorKind::dense: return dense_solve(sigma, rhs);
        }
        return {};
    }

    /// Complex-shift variant; used for custom pole files and tests.
    ComplexMatrix shifted_solve(Complex sigma, const ComplexMatrix& rhs) const {
        if (rhs.rows() != n_)
            throw DimensionError(detail::concat("shifted_solve: operator order ", n_,
                                                " but block has ", rhs.rows(), " rows"));
        switch (kind_) {
        case OperatorKind::diagonal: {
            Eigen::VectorXcd shifted = main_.cast<Complex>().array() - sigma;
            const double scale = std::max(main_.cwiseAbs().maxCoeff(), std::abs(sigma));
            for (Index i = 0; i < n_; ++i)
                if (std::abs(shifted(i)) <= detail::kPivotTolerance * scale) throw singular(sigma);
            return shifted.cwiseInverse().asDiagonal() * rhs;
        }
        case OperatorKind::tridiagonal: {
            ComplexMatrix y = rhs;
            std::vector<Complex> off(off_.data(), off_.data() + off_.size());
            const auto info = detail::gtsv<Complex>(off, shifted_main<Complex>(sigma), off, y,
                                                    pivot_tolerance(std::abs(sigma)));
            if (info >= 0) throw singular(sigma);
            return y;
        }
        case OperatorKind::dense: {
            ComplexMatrix shifted = dense_.cast<Complex>();
            shifted.diagonal().array() -= sigma;
            Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
            if (!(lu.rcond() > detail::kPivotTolerance)) throw singular(sigma);
            return lu.solve(rhs);
        }
        }
        return {};
    }

    /// Union of Gershgorin discs: (lower, upper).
    std::pair<double, double> gershgorin() const {
        Vector radius = Vector::Zero(n_);
        Vector centre;
        switch (kind_) {
        case OperatorKind::dense:
            centre = dense_.diagonal();
            radius = dense_.cwiseAbs().rowwise().sum() - centre.cwiseAbs();
            break;
        case OperatorKind::diagonal: centre = main_; break;
        case OperatorKind::tridiagonal:
            centre = main_;
            if (n_ > 1) {
                radius.head(n_ - 1) += off_.cwiseAbs();
                radius.tail(n_ - 1) += off_.cwiseAbs();
            }
            break;
        }
        return {(centre - radius).minCoeff(), (centre + radius).maxCoeff()};
    }

    /// Max absolute entry; used to scale pivot tolerances.
    double max_abs_entry() const {
        if (kind_ == OperatorKind::dense) return dense_.cwiseAbs().maxCoeff();
        double m = main_.cwiseAbs().maxCoeff();
        if (off_.size() > 0) m = std::max(m, off_.cwiseAbs().maxCoeff());
        return m;
    }

private:
    HermitianOperator(OperatorKind kind, Index n) : kind_(kind), n_(n) {}

    void check_rows(const BlockVector& x) const {
        if (x.rows() != n_)
            throw DimensionError(detail::concat("shifted_solve: operator order ", n_,
                                                " but block has ", x.rows(), " rows"));
    }

    std::vector<double> off_vec() const { return {off_.data(), off_.data() + off_.size()}; }

    template <typename T>
    std::vector<T> shifted_main(T sigma) const {
        std::vector<T> m(static_cast<std::size_t>(n_));
        for (Index i = 0; i < n_; ++i) m[static_cast<std::size_t>(i)] = T(main_(i)) - sigma;
        return m;
    }

    double pivot_tolerance(double sigma_abs) const {
        return detail::kPivotTolerance * std::max(max_abs_entry(), sigma_abs);
    }

    static SingularShiftError singular(Complex sigma) {
        return SingularShiftError(sigma, detail::concat("shifted solve: A - sigma I is singular to "
                                                        "working precision for sigma = ",
                                                        sigma.real(),
                                                        sigma.imag() != 0.0
                                                            ? detail::concat(" + ", sigma.imag(), "i")
                                                            : std::string()));
    }

    BlockVector dense_solve(double sigma, const BlockVector& rhs) const {
        Matrix shifted = dense_;
        shifted.diagonal().array() -= sigma;
        // Definite shifts (the usual case: poles outside [a,b]) go through Cholesky.
        Eigen::LLT<Matrix> pos(shifted);
        if (pos.info() == Eigen::Success && pos.rcond() > detail::kPivotTolerance)
            return pos.solve(rhs);
        Eigen::LLT<Matrix> neg(-shifted);
        if (neg.info() == Eigen::Success && neg.rcond() > detail::kPivotTolerance)
            return -neg.solve(rhs);
        Eigen::PartialPivLU<Matrix> lu(shifted);
        if (!(lu.rcond() > detail::kPivotTolerance)) throw singular(sigma);
        return lu.solve(rhs);
    }

    OperatorKind kind_;
    Index n_;
    Matrix dense_;
    Vector main_;
    Vector off_;
};

// Free-function spellings of the operator surface.

inline BlockVector matvec(const HermitianOperator& op, const BlockVector& x) { return op.apply(x); }

inline BlockVector shifted_solve(const HermitianOperator& op, double sigma, const BlockVector& rhs) {
    return op.shifted_solve(sigma, rhs);
}

inline ComplexMatrix shifted_solve(const HermitianOperator& op, Complex sigma,
                                   const ComplexMatrix& rhs) {
    return op.shifted_solve(sigma, rhs);
}

/// Eigenvalues of tridiag(off, diag, off) of order n, ascending.
inline Vector toeplitz_tridiagonal_eigenvalues(Index n, double diag, double off) {
    Vector lam(n);
    for (Index k = 1; k <= n; ++k)
        lam(k - 1) = diag + 2.0 * off * std::cos(static_cast<double>(k) * kPi / static_cast<double>(n + 1));
    std::sort(lam.data(), lam.data() + n);
    return lam;
}

inline EigenDecomposition dense_eig(const HermitianOperator& op, Index dense_limit = kDefaultDenseLimit) {
    const Index n = op.size();
    if (n > dense_limit)
        throw Error(detail::concat("dense_eig: order ", n, " exceeds the dense limit ", dense_limit));
    EigenDecomposition out;
    if (op.kind() == OperatorKind::diagonal) {
        std::vector<Index> perm(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        const Vector& d = op.main_diagonal();
        std::stable_sort(perm.begin(), perm.end(), [&](Index i, Index j) { return d(i) < d(j); });
        out.values.resize(n);
        out.vectors = Matrix::Zero(n, n);
        for (Index k = 0; k < n; ++k) {
            out.values(k) = d(perm[static_cast<std::size_t>(k)]);
            out.vectors(perm[static_cast<std::size_t>(k)], k) = 1.0;
        }
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    if (op.kind() == OperatorKind::tridiagonal) {
        Vector main = op.main_diagonal();
        Vector off = n > 1 ? Vector(op.off_diagonal()) : Vector(Vector::Zero(0));
        solver.computeFromTridiagonal(main, off, Eigen::ComputeEigenvectors);
    } else {
        solver.compute(op.dense_storage(), Eigen::ComputeEigenvectors);
    }
    if (solver.info() != Eigen::Success) throw Error("dense_eig: symmetric eigensolver did not converge");
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    return out;
}

enum class IntervalMode { gershgorin, exact, user };

/// How to obtain [a,b]. `floor` only matters for gershgorin; `a`,`b` for user.
struct IntervalRequest {
    IntervalMode mode = IntervalMode::exact;
    double floor = 0.0;
    double a = 0.0;
    double b = 0.0;
    Index dense_limit = kDefaultDenseLimit;
};

/// Enclosing interval for the spectrum of op. The exact mode uses the closed
/// form for constant tridiagonal operators (any order) and otherwise a dense
/// eigendecomposition within the dense limit.
inline SpectralInterval spectral_interval(const HermitianOperator& op, const IntervalRequest& req = {}) {
    switch (req.mode) {
    case IntervalMode::user: return {req.a, req.b};
    case IntervalMode::gershgorin: {
        auto [lo, hi] = op.gershgorin();
        if (req.floor > 0.0)
            lo = std::max(lo, req.floor);
        else if (!(lo > 0.0))
            throw DomainError(detail::concat("gershgorin lower bound ", lo,
                                             " is not positive; supply an explicit lower bound a"));
        return {lo, std::max(lo, hi)};
    }
    case IntervalMode::exact: {
        if (op.kind() == OperatorKind::diagonal) {
            const Vector& d = op.main_diagonal();
            return {d.minCoeff(), d.maxCoeff()};
        }
        if (auto tc = op.toeplitz_coefficients()) {
            const Vector lam = toeplitz_tridiagonal_eigenvalues(op.size(), tc->first, tc->second);
            return {lam(0), lam(lam.size() - 1)};
        }
        const EigenDecomposition eig = dense_eig(op, req.dense_limit);
        return {eig.values(0), eig.values(eig.values.size() - 1)};
    }
    }
    throw DomainError("unknown interval mode");
}

namespace detail {

template <typename F>
double checked_eval(const F& f, double lambda) {
    double y;
    try {
        y = f(lambda);
    } catch (const DomainError& e) {
        throw DomainError(concat("f undefined at eigenvalue ", lambda, ": ", e.what()));
    }
    if (!std::isfinite(y)) throw DomainError(concat("f undefined at eigenvalue ", lambda));
    return y;
}

}  // namespace detail

/// Reference f(A) v. Diagonal and constant tridiagonal operators are handled
/// at any order (the latter by the sine transform); everything else goes
/// through dense_eig and is refused above the dense limit.
template <typename F>
BlockVector oracle_funv(const HermitianOperator& op, const F& f, const BlockVector& v,
                        Index dense_limit = kDefaultDenseLimit) {
    if (v.rows() != op.size()) throw DimensionError("oracle_funv: dimension mismatch");
    const Index n = op.size();
    if (op.kind() == OperatorKind::diagonal) {
        Vector fd(n);
        for (Index i = 0; i < n; ++i) fd(i) = detail::checked_eval(f, op.main_diagonal()(i));
        return fd.asDiagonal() * v;
    }
    if (auto tc = op.toeplitz_coefficients(); tc && n > 1) {
        // Eigenvectors sqrt(2/(n+1)) sin(i k pi/(n+1)), eigenvalue d + 2e cos(k pi/(n+1)).
        Vector fl(n);
        for (Index k = 1; k <= n; ++k)
            fl(k - 1) = detail::checked_eval(
                f, tc->first + 2.0 * tc->second *
                                   std::cos(static_cast<double>(k) * kPi / static_cast<double>(n + 1)));
        SineTransform dst(n);
        BlockVector out(n, v.cols());
        for (Index j = 0; j < v.cols(); ++j) {
            Vector c = dst.apply(v.col(j));
            c.array() *= fl.array();
            out.col(j) = dst.apply(c);
        }
        return out;
    }
    const EigenDecomposition eig = dense_eig(op, dense_limit);
    Vector fl(n);
    for (Index i = 0; i < n; ++i) fl(i) = detail::checked_eval(f, eig.values(i));
    return eig.vectors * (fl.asDiagonal() * (eig.vectors.transpose() * v));
}

}  // namespace ratkrylov
