#include <ratkrylov/driver.hpp>
#include <ratkrylov/io.hpp>
#include <ratkrylov/rk.hpp>

#include <gtest/gtest.h>

#include <future>
#include <random>

using namespace ratkrylov;

namespace {

Vector random_unit(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = nd(rng);
    return v / v.norm();
}

HermitianOperator random_diag(Index n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(std::log(lo), std::log(hi));
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = std::exp(ud(rng));
    d(0) = lo;
    d(n - 1) = hi;
    return HermitianOperator::diagonal(d);
}

void expect_invariants(const RKDecomposition& d, const BlockVector& v) {
    const Matrix u = d.basis();
    const double m = static_cast<double>(d.dim());
    EXPECT_LE((u.transpose() * u - Matrix::Identity(d.dim(), d.dim())).norm(), m * 1e-12);
    const Matrix a = d.projected();
    EXPECT_LE((a - a.transpose()).norm(), 1e-12 * a.norm());
    EXPECT_LE((u * (u.transpose() * v) - v).norm(), 1e-12 * v.norm());
}

PoleSequence seq(std::vector<double> p) { return {std::move(p), PoleProvenance::custom, std::nullopt}; }

}  // namespace

TEST(RkBuild, PolynomialStepSpansVAndAv) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(30, 2.0, -1.0);
    const Vector v = random_unit(30, 1);
    const auto d = rk_build(op, v, seq({kInf}));
    EXPECT_EQ(d.dim(), 2);
    const Matrix u = d.basis();
    const Vector av = matvec(op, v);
    EXPECT_LE((u * (u.transpose() * av) - av).norm(), 1e-13 * av.norm());
    expect_invariants(d, v);
}

TEST(RkBuild, RationalStepSpansResolvent) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(30, 2.0, -1.0);
    const Vector v = random_unit(30, 2);
    const auto d = rk_build(op, v, seq({-0.7}));
    Matrix w(30, 4);
    w << v, shifted_solve(op, -0.7, v), d.basis();
    Eigen::JacobiSVD<Matrix> svd(w);
    EXPECT_EQ(d.dim(), 2);
    EXPECT_LE(svd.singularValues()(2), 1e-13 * svd.singularValues()(0));
    EXPECT_GT(svd.singularValues()(1), 1e-3 * svd.singularValues()(0));
}

TEST(RkBuild, ZolotarevExactnessOnRandomDiagonal) {
    const auto op = random_diag(100, 0.1, 50.0, 3);
    const auto poles = zolotarev_poles(SpectralInterval(0.1, 50.0), 6);
    EXPECT_LE(exactness_check(op, random_unit(100, 4), poles), 1e-9);
    expect_invariants(rk_build(op, random_unit(100, 4), poles), random_unit(100, 4));
}

TEST(RkBuild, BlockVectorAndDeflation) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(40, 2.0, -1.0);
    Matrix v(40, 3);
    v.col(0) = random_unit(40, 5);
    v.col(1) = random_unit(40, 6);
    v.col(2) = 2.0 * v.col(0) - v.col(1);
    const auto d = rk_build(op, v, cauchy_poles(SpectralInterval(0.005, 4.0), 4));
    EXPECT_EQ(d.block_width(), 2);
    EXPECT_EQ(d.dim(), 10);
    expect_invariants(d, v);
}

TEST(RkBuild, TotalDeflationFlagsAndRefusesExtension) {
    Vector dvals(3);
    dvals << 1, 2, 3;
    const auto op = HermitianOperator::diagonal(dvals);
    const Vector v = Vector::Ones(3);
    const auto d = rk_build(op, v, seq({-1.0, -2.0, -3.0, -4.0}));
    EXPECT_TRUE(d.flagged());
    EXPECT_EQ(d.dim(), 3);
    EXPECT_THROW(rk_extend(op, d, seq({-5.0})), Error);
    // Invariant space: projection is exact for any f.
    auto f = [](double z) { return std::exp(-z); };
    EXPECT_LE((rk_funv(d, f) - oracle_funv(op, f, v)).norm(), 1e-14);
}

TEST(RkBuild, Errors) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(5, 2.0, -1.0);
    EXPECT_THROW(rk_build(op, Vector::Ones(4), seq({kInf})), DimensionError);
    EXPECT_THROW(rk_build(op, Vector::Ones(5), seq({})), DomainError);
    EXPECT_THROW(rk_build(op, Vector::Zero(5), seq({kInf})), DomainError);
    Vector dvals(2);
    dvals << 1, 2;
    EXPECT_THROW(rk_build(HermitianOperator::diagonal(dvals), Vector::Ones(2), seq({2.0})), SingularShiftError);
}

TEST(RkExtend, ZeroPolesUnchanged) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(20, 2.0, -1.0);
    const auto d = rk_build(op, random_unit(20, 7), seq({kInf, -1.0}));
    const auto e = rk_extend(op, d, seq({}));
    EXPECT_EQ(e.dim(), d.dim());
    EXPECT_EQ(Matrix(e.basis()), Matrix(d.basis()));
}

TEST(RkExtend, MatchesSingleBuild) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(500, 2.0, -1.0);
    const Vector v = random_unit(500, 8);
    const SpectralInterval i(2 - 2 * std::cos(kPi / 501), 2 - 2 * std::cos(500 * kPi / 501));
    const auto p = eds_poles(i, 8, EdsVariant::cauchy);
    auto d = rk_build(op, v, p.prefix(4));
    PoleSequence rest = p;
    rest.poles.erase(rest.poles.begin(), rest.poles.begin() + 4);
    d = rk_extend(op, std::move(d), rest);
    const auto full = rk_build(op, v, p);
    const auto f = catalog::power(0.5);
    const Vector x1 = rk_funv(d, f), x2 = rk_funv(full, f);
    EXPECT_LE((x1 - x2).norm(), 1e-10 * x2.norm());
    EXPECT_EQ(d.steps(), 8u);
    expect_invariants(d, v);
}

TEST(RkFunv, IdentityIsProjectedMultiply) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(50, 2.0, -1.0);
    const Vector v = random_unit(50, 9);
    const auto d = rk_build(op, v, seq({kInf, -0.5, 0.0}));
    const Matrix u = d.basis();
    const Vector expected = u * (u.transpose() * (op.apply(u) * (u.transpose() * v)));
    EXPECT_LE((rk_funv(d, [](double z) { return z; }) - expected).norm(), 1e-13);
}

TEST(RkFunv, PrefixEvaluationMatchesShorterBuild) {
    const auto op = random_diag(80, 0.01, 10.0, 10);
    const Vector v = random_unit(80, 11);
    const auto p = extended_poles(10);
    const auto d = rk_build(op, v, p);
    const auto f = catalog::power(0.5);
    EXPECT_LE((rk_funv(d, f, 4) - rk_funv(rk_build(op, v, p.prefix(4)), f)).norm(), 1e-12);
}

TEST(RkFunv, SmallDiagonalBelowCauchyBound) {
    Vector dv(4);
    dv << 1, 2, 3, 4;
    const auto op = HermitianOperator::diagonal(dv);
    const Vector v = Vector::Ones(4);
    const auto f = catalog::power(0.5);
    const SpectralInterval i(1, 4);
    const auto d = rk_build(op, v, cauchy_poles(i, 3));
    const double err = (rk_funv(d, f) - oracle_funv(op, f, v)).norm();
    EXPECT_LE(err, bounds::cauchy_1d(f, i, 3, v.norm()));
}

TEST(RkFunv, UndefinedAtRitzValue) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(10, 2.0, -1.0);
    const auto d = rk_build(op, random_unit(10, 12), seq({kInf}));
    EXPECT_THROW(rk_funv(d, catalog::power(0.5).with_shift(-10.0)), DomainError);
}

TEST(Exactness, Examples) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(60, 2.0, -1.0);
    const Vector v = random_unit(60, 13);
    EXPECT_LE(exactness_check(op, v, seq({-0.3})), 1e-11);
    const auto d = rk_build(op, v, seq({kInf, kInf}));
    auto sq = [](double z) { return z * z; };
    EXPECT_LE((rk_funv(d, sq) - oracle_funv(op, sq, v)).norm() / oracle_funv(op, sq, v).norm(), 1e-11);
    const auto m = rk_build(op, v, seq({kInf, -0.3}));
    auto r = [](double z) { return z / (z + 0.3); };
    EXPECT_LE((rk_funv(m, r) - oracle_funv(op, r, v)).norm() / oracle_funv(op, r, v).norm(), 1e-10);
    EXPECT_LE(exactness_check(op, v, seq({kInf, -0.3, 0.0, kInf, -2.5})), 1e-10);
}

TEST(Galerkin, InverseResidualOrthogonal) {
    const auto op = random_diag(120, 0.01, 20.0, 14);
    const Vector v = random_unit(120, 15);
    const auto d = rk_build(op, v, eds_poles(SpectralInterval(0.01, 20), 6, EdsVariant::cauchy));
    const Vector x = rk_funv(d, catalog::inverse());
    EXPECT_LE((Matrix(d.basis()).transpose() * (matvec(op, x) - v)).norm(), 1e-10 * v.norm());
}

TEST(Galerkin, RitzValuesInsideSpectrum) {
    std::mt19937_64 rng(16);
    std::normal_distribution<double> nd;
    Matrix g(60, 60);
    for (Index i = 0; i < 60; ++i)
        for (Index j = 0; j < 60; ++j) g(i, j) = nd(rng);
    Matrix a = g * g.transpose();
    a.diagonal().array() += 0.5;
    const auto op = HermitianOperator::dense(a);
    const auto lam = dense_eig(op).values;
    const auto d = rk_build(op, random_unit(60, 17), zolotarev_poles(SpectralInterval(lam(0), lam(59)), 8));
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(d.projected()));
    EXPECT_GE(es.eigenvalues().minCoeff(), lam(0) * (1 - 1e-12));
    EXPECT_LE(es.eigenvalues().maxCoeff(), lam(59) * (1 + 1e-12));
}

TEST(Concurrency, IndependentBuildsOnSharedOperator) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(2000, 2.0, -1.0);
    const SpectralInterval i(2 - 2 * std::cos(kPi / 2001), 4.0);
    auto job = [&](std::uint64_t seed) {
        return rk_funv(rk_build(op, random_unit(2000, seed), cauchy_poles(i, 10)), catalog::power(0.5));
    };
    auto f1 = std::async(std::launch::async, job, 1);
    auto f2 = std::async(std::launch::async, job, 2);
    EXPECT_EQ(f1.get(), job(1));
    EXPECT_EQ(f2.get(), job(2));
}

// ---------------------------------------------------------------------------
// Driver.

TEST(Driver, InverseConvergesToSolve) {
    const auto op = random_diag(200, 0.05, 40.0, 18);
    const Vector v = random_unit(200, 19);
    const SpectralInterval i(0.05, 40.0);
    DriverOptions opt;
    opt.tol = 1e-10;
    opt.maxiter = 40;
    opt.reference = oracle_funv(op, catalog::inverse(), v);
    const auto r = funv_driver(op, v, catalog::inverse(), Strategy::eds_cauchy, i, opt);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.trace.back().rel_true_error, 1e-9);
    // Steps needed by the Cauchy bound to reach 1e-10 relative to f(a)|v|.
    const double need = std::log(1e-10 / 8.0) / std::log(rate_rho(0.05, 160.0));
    EXPECT_LE(static_cast<double>(r.iterations), need + 3);
}

TEST(Driver, InfiniteToleranceStopsAfterFirstStep) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(50, 2.0, -1.0);
    DriverOptions opt;
    opt.tol = kInf;
    for (Strategy s : {Strategy::extended, Strategy::cauchy}) {
        const auto r = funv_driver(op, random_unit(50, 20), catalog::power(0.5), s,
                                   SpectralInterval(2 - 2 * std::cos(kPi / 51), 4.0), opt);
        EXPECT_EQ(r.trace.size(), 1u);
        EXPECT_TRUE(r.converged);
    }
}

TEST(Driver, NonConvergenceFlagged) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(400, 2.0, -1.0);
    DriverOptions opt;
    opt.tol = 1e-14;
    opt.maxiter = 3;
    const auto r = funv_driver(op, random_unit(400, 21), catalog::power(0.5), Strategy::extended,
                               SpectralInterval(2 - 2 * std::cos(kPi / 401), 4.0), opt);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 3u);
}

namespace {

// Least-squares slope of log(error) against ell over errors above 1e-13.
double log_error_slope(const std::vector<TraceRow>& trace) {
    std::vector<double> xs, ys;
    for (const auto& row : trace)
        if (row.true_error > 1e-13) {
            xs.push_back(static_cast<double>(row.ell));
            ys.push_back(std::log(row.true_error));
        }
    const double nx = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
    mx /= nx;
    my /= nx;
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) sxy += (xs[k] - mx) * (ys[k] - my), sxx += (xs[k] - mx) * (xs[k] - mx);
    return sxy / sxx;
}

}  // namespace

TEST(Driver, Phi1DecayAtLeastBoundRate) {
    const Index n = 2000;
    const auto op = io::diffusion_1d(n);
    const auto tc = *op.toeplitz_coefficients();
    const Vector lam = toeplitz_tridiagonal_eigenvalues(n, tc.first, tc.second);
    const SpectralInterval i(lam(0), lam(n - 1));
    const Vector v = random_unit(n, 22);
    DriverOptions opt;
    opt.stop = StopRule::never;
    opt.maxiter = 30;
    opt.fixed_stride = 1;
    opt.reference = oracle_funv(op, catalog::phi(1), v);
    const auto zol = funv_driver(op, v, catalog::phi(1), Strategy::zolotarev, i, opt);
    const auto eds = funv_driver(op, v, catalog::phi(1), Strategy::eds_laplace, i, opt);
    const double expected = 0.5 * std::log(rate_rho(i));
    const double sz = log_error_slope(zol.trace), se = log_error_slope(eds.trace);
    // The rate is an upper bound; phi_1 decays faster on this fixture (ratio ~1.4).
    EXPECT_GE(sz / expected, 0.8) << "slope " << sz << " rate " << expected;
    EXPECT_NEAR(se / sz, 1.0, 0.2) << "eds " << se << " zolotarev " << sz;
    for (const auto& row : zol.trace) EXPECT_LE(row.true_error, row.bound) << row.ell;
    for (const auto& row : eds.trace) EXPECT_LE(row.true_error, row.bound) << row.ell;
}

TEST(Driver, ShiftedFunctionRunsOnShiftedOperator) {
    const auto op = random_diag(150, 0.1, 10.0, 23);
    const Vector v = random_unit(150, 24);
    const SpectralInterval i(0.1, 10.0);
    const auto g = catalog::power(0.5).with_shift(0.05);
    DriverOptions opt;
    opt.stop = StopRule::never;
    opt.maxiter = 12;
    opt.fixed_stride = 1;
    opt.reference = oracle_funv(op, catalog::power(0.5), v);
    const auto r = funv_driver(op, v, g, Strategy::cauchy, i, opt);
    EXPECT_LE(r.trace.back().rel_true_error, 1e-6);
    for (const auto& row : r.trace) EXPECT_LE(row.true_error, row.bound);
}

TEST(Driver, CustomPolesAndMissingReference) {
    const auto op = HermitianOperator::toeplitz_tridiagonal(30, 2.0, -1.0);
    DriverOptions opt;
    opt.custom = seq({kInf, 0.0, -1.0});
    opt.maxiter = 3;
    opt.tol = 0.0;
    const auto r = funv_driver(op, random_unit(30, 25), catalog::power(0.5), Strategy::custom,
                               SpectralInterval(0.009, 4.0), opt);
    EXPECT_EQ(r.trace.size(), 3u);
    opt.stop = StopRule::true_error;
    EXPECT_THROW(funv_driver(op, random_unit(30, 25), catalog::power(0.5), Strategy::custom,
                             SpectralInterval(0.009, 4.0), opt),
                 DomainError);
    EXPECT_EQ(parse_strategy("eds", FunctionClass::laplace), Strategy::eds_laplace);
    EXPECT_THROW(parse_strategy("greedy"), DomainError);
}
