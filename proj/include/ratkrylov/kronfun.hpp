#pragma once

/// \file kronfun.hpp
/// f(I (x) A - B^T (x) I) vec(U_F V_F^T) by tensorized rational Krylov
/// projection. -B is stored as the SPD operator `bneg`, so both sides share
/// the SPD solve path and B = -bneg.

#include <ratkrylov/bounds.hpp>
#include <ratkrylov/core.hpp>
#include <ratkrylov/functions.hpp>
#include <ratkrylov/operators.hpp>
#include <ratkrylov/poles.hpp>
#include <ratkrylov/rk.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <future>
#include <utility>
#include <vector>

namespace ratkrylov {

inline constexpr Index kKronDenseLimit = 1500;

struct KroneckerProblem {
    HermitianOperator a;
    HermitianOperator bneg;
    Matrix uf;
    Matrix vf;
    StieltjesFunction f;

    Index rank() const { return uf.cols(); }

    void validate() const {
        if (a.size() != uf.rows() || bneg.size() != vf.rows())
            throw DimensionError("KroneckerProblem: factor rows must match the operator orders");
        if (uf.cols() != vf.cols() || uf.cols() < 1)
            throw DimensionError("KroneckerProblem: U_F and V_F need the same number k >= 1 of columns");
    }
};

/// X_l = U Y V^T.
struct KroneckerResult {
    Matrix u;
    Matrix y;
    Matrix v;
    std::size_t ell = 0;

    Matrix dense() const { return u * y * v.transpose(); }
};

/// 2-norm via the eigenvalues of the smaller Gram matrix.
inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const Matrix g = m.rows() >= m.cols() ? Matrix(m.transpose() * m) : Matrix(m * m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

/// 2-norm of L R^T without forming it: QR of both factors.
inline double lowrank_norm(const Matrix& left, const Matrix& right) {
    if (left.cols() != right.cols()) throw DimensionError("lowrank_norm: factor widths differ");
    if (left.cols() == 0) return 0.0;
    if (left.cols() >= left.rows() || right.cols() >= right.rows()) return spectral_norm(left * right.transpose());
    Eigen::HouseholderQR<Matrix> ql(left);
    Eigen::HouseholderQR<Matrix> qr(right);
    const Index m = left.cols();
    const Matrix rl = ql.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const Matrix rr = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    return spectral_norm(rl * rr.transpose());
}

namespace detail {

template <typename F>
Matrix funm_from_eig(const F& f, const Vector& la, const Matrix& qa, const Vector& lb, const Matrix& qb,
                     const Matrix& fw) {
    Matrix c = qa.transpose() * fw * qb;
    for (Index j = 0; j < c.cols(); ++j)
        for (Index i = 0; i < c.rows(); ++i) {
            const double d = la(i) - lb(j);
            double y;
            try {
                y = f(d);
            } catch (const DomainError& e) {
                throw DomainError(concat("funm_diag: f undefined at Ritz difference ", d, " = ", la(i), " - (",
                                         lb(j), "): ", e.what()));
            }
            if (!std::isfinite(y)) throw DomainError(concat("funm_diag: f undefined at Ritz difference ", d));
            c(i, j) *= y;
        }
    return qa * c * qb.transpose();
}

}  // namespace detail

/// Y = Q_A [f(D) o (Q_A^T F_W Q_B)] Q_B^T with D_ij = lambda_i(A_U) - lambda_j(B_V).
template <typename F>
Matrix funm_diag(const F& f, const Matrix& au, const Matrix& bv, const Matrix& fw) {
    if (au.rows() != au.cols() || bv.rows() != bv.cols() || fw.rows() != au.rows() || fw.cols() != bv.rows())
        throw DimensionError("funm_diag: shapes must be m x m, p x p and m x p");
    Eigen::SelfAdjointEigenSolver<Matrix> ea(0.5 * (au + au.transpose()));
    Eigen::SelfAdjointEigenSolver<Matrix> eb(0.5 * (bv + bv.transpose()));
    if (ea.info() != Eigen::Success || eb.info() != Eigen::Success)
        throw Error("funm_diag: eigensolver did not converge");
    return detail::funm_from_eig(f, ea.eigenvalues(), ea.eigenvectors(), eb.eigenvalues(), eb.eigenvectors(), fw);
}

/// Nested bases for both sides; any prefix of steps can be evaluated.
struct KroneckerSpaces {
    RKDecomposition u;
    RKDecomposition v;
};

/// U from RK(A, U_F, psi) and V from RK(B^T, V_F, xi). Since
/// (B - xi I)^{-1} = -(bneg + xi I)^{-1}, the B side runs on bneg with poles -xi.
inline KroneckerSpaces build_kron_spaces(const KroneckerProblem& prob, const PoleSequence& psi,
                                         const PoleSequence& xi, std::size_t ell, bool concurrent = false) {
    prob.validate();
    if (psi.size() < ell || xi.size() < ell)
        throw DomainError(detail::concat("kron_fun: need at least ", ell, " poles on each side"));
    detail::require(ell >= 1, "kron_fun: ell must be at least 1");
    const PoleSequence pa = psi.prefix(ell);
    const PoleSequence pb = xi.prefix(ell).negated();
    if (concurrent) {
        auto fu = std::async(std::launch::async, [&] { return rk_build(prob.a, prob.uf, pa); });
        RKDecomposition v = rk_build(prob.bneg, prob.vf, pb);
        return {fu.get(), std::move(v)};
    }
    return {rk_build(prob.a, prob.uf, pa), rk_build(prob.bneg, prob.vf, pb)};
}

inline KroneckerResult kron_eval(const KroneckerProblem& prob, const KroneckerSpaces& sp, std::size_t ell) {
    const Index du = sp.u.dim_after(ell);
    const Index dv = sp.v.dim_after(ell);
    KroneckerResult r;
    r.ell = ell;
    r.u = sp.u.basis().leftCols(du);
    r.v = sp.v.basis().leftCols(dv);
    const Matrix au = sp.u.projected().topLeftCorner(du, du);
    const Matrix bv = -sp.v.projected().topLeftCorner(dv, dv);
    const Matrix fw = (r.u.transpose() * prob.uf) * (prob.vf.transpose() * r.v);
    r.y = funm_diag(prob.f, au, bv, fw);
    return r;
}

inline KroneckerResult kron_fun(const KroneckerProblem& prob, const PoleSequence& psi, const PoleSequence& xi,
                                std::size_t ell, bool concurrent = false) {
    return kron_eval(prob, build_kron_spaces(prob, psi, xi, ell, concurrent), ell);
}

/// Reference X by dense diagonalization of both operators.
inline Matrix kron_oracle(const KroneckerProblem& prob, Index dense_limit = kKronDenseLimit) {
    prob.validate();
    const EigenDecomposition ea = dense_eig(prob.a, dense_limit);
    const EigenDecomposition eb = dense_eig(prob.bneg, dense_limit);
    const Vector lb = -eb.values;
    return detail::funm_from_eig(prob.f, ea.values, ea.vectors, lb, eb.vectors, prob.uf * prob.vf.transpose());
}

/// |A X_l - X_l B - F|_2 from the thin form
/// [A U Y, U Y, -U_F] [V, bneg V, V_F]^T.
inline double sylvester_residual(const KroneckerProblem& prob, const KroneckerResult& r) {
    const Matrix uy = r.u * r.y;
    const Matrix auy = prob.a.apply(r.u) * r.y;
    Matrix left(uy.rows(), auy.cols() + uy.cols() + prob.uf.cols());
    left << auy, uy, -prob.uf;
    const Matrix bv = prob.bneg.apply(r.v);
    Matrix right(r.v.rows(), r.v.cols() + bv.cols() + prob.vf.cols());
    right << r.v, bv, prob.vf;
    return lowrank_norm(left, right);
}

/// U^T (A X_l - X_l B - F) V; zero for z^{-1} by the Galerkin condition.
inline Matrix galerkin_projection(const KroneckerProblem& prob, const KroneckerResult& r) {
    const Matrix ua = r.u.transpose() * prob.a.apply(r.u);
    const Matrix vb = r.v.transpose() * prob.bneg.apply(r.v);
    const Matrix fw = (r.u.transpose() * prob.uf) * (prob.vf.transpose() * r.v);
    return ua * r.y + r.y * vb - fw;
}

struct SingularDecayRow {
    std::size_t ell;
    Index index;  // 1-based: 1 + ell k
    double sigma;
    double bound;
    bool ok;
};

struct SingularDecayReport {
    Vector singular_values;
    std::vector<SingularDecayRow> rows;

    bool all_ok() const {
        for (const auto& r : rows)
            if (!r.ok) return false;
        return true;
    }
};

/// Singular values of X against the class bound at indices 1 + ell k.
inline SingularDecayReport singular_decay_report(const KroneckerProblem& prob, const Matrix& x,
                                                 const SpectralInterval& interval, std::size_t ell_max,
                                                 bool conjectured_gamma = false) {
    SingularDecayReport rep;
    Eigen::BDCSVD<Matrix> svd(x);
    rep.singular_values = svd.singularValues();
    const double fnorm = lowrank_norm(prob.uf, prob.vf);
    const Index k = prob.rank();
    for (std::size_t ell = 1; ell <= ell_max; ++ell) {
        const Index j = 1 + static_cast<Index>(ell) * k;
        if (j > rep.singular_values.size()) break;
        const double sigma = rep.singular_values(j - 1);
        const double bound = prob.f.is_cauchy()
                                 ? bounds::singular_cauchy(prob.f, interval, ell, fnorm)
                                 : bounds::singular_laplace(prob.f, interval, ell, fnorm, conjectured_gamma);
        rep.rows.push_back({ell, j, sigma, bound, sigma <= bound});
    }
    return rep;
}

}  // namespace ratkrylov
