#include <ratkrylov/elliptic.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace ratkrylov;

namespace {

// K(k) by quadrature of the defining integral.
double k_quadrature(double k) {
    boost::math::quadrature::gauss_kronrod<double, 61> gk;
    return gk.integrate([k](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); }, 0.0,
                        kPi / 2.0, 15, 1e-15);
}

// F(phi, k) by quadrature in the Legendre form.
double f_quadrature(double phi, double k) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([k](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); }, 0.0,
                        phi);
}

}  // namespace

TEST(EllipticK, ZeroModulus) { EXPECT_DOUBLE_EQ(elliptic_K(0.0), kPi / 2.0); }

TEST(EllipticK, LemniscaticValue) {
    EXPECT_NEAR(elliptic_K(1.0 / std::sqrt(2.0)), 1.8540746773013719, 1e-14);
    EXPECT_NEAR(elliptic_K(1.0 / std::sqrt(2.0)), k_quadrature(1.0 / std::sqrt(2.0)), 1e-14);
}

TEST(EllipticK, AgreesWithQuadrature) {
    for (double k : {0.1, 0.5, 0.9, 0.99, 0.999})
        EXPECT_NEAR(elliptic_K(k), k_quadrature(k), 1e-14 * k_quadrature(k)) << k;
}

TEST(EllipticK, NearSingularFlag) {
    const auto r = elliptic_K_checked(1.0 - 1e-12);
    EXPECT_TRUE(r.near_singular);
    EXPECT_TRUE(std::isfinite(r.value));
    EXPECT_GT(r.value, 10.0);
    EXPECT_FALSE(elliptic_K_checked(0.5).near_singular);
    EXPECT_THROW(elliptic_K(1.0), DomainError);
}

TEST(EllipticK, TinyComplementMatchesAsymptotics) {
    // K ~ log(4/k') + (k'^2/4)(log(4/k') - 1) as k' -> 0.
    for (double kc : {1e-6, 1e-9, 1e-12}) {
        const double l = std::log(4.0 / kc);
        EXPECT_NEAR(elliptic_K(EllipticModulus::from_complement(kc)), l + 0.25 * kc * kc * (l - 1.0), 1e-14 * l);
    }
}

TEST(EllipticF, AgreesWithQuadrature) {
    for (double k : {0.3, 0.8, 0.999})
        for (double phi : {0.1, 0.7, 1.3, kPi / 2.0}) {
            const double ref = f_quadrature(phi, k);
            EXPECT_NEAR(elliptic_F(phi, EllipticModulus::from_k(k)), ref, 1e-13 * ref) << k << " " << phi;
        }
}

TEST(CarlsonRF, SpecialValues) {
    EXPECT_NEAR(carlson_rf(1.0, 1.0, 1.0), 1.0, 1e-15);
    // R_F(0, 1, 2) = 1.3110287771461 (tabulated).
    EXPECT_NEAR(carlson_rf(0.0, 1.0, 2.0), 1.3110287771461, 1e-13);
    EXPECT_NEAR(carlson_rf(0.0, 1.0, 1.0), kPi / 2.0, 1e-15);
}

TEST(JacobiDn, Trivial) {
    for (double k : {0.0, 0.3, 0.99}) EXPECT_DOUBLE_EQ(jacobi_dn(0.0, k), 1.0);
    for (double u : {0.0, 0.5, 3.0, -7.0}) EXPECT_DOUBLE_EQ(jacobi_dn(u, 0.0), 1.0);
}

TEST(JacobiDn, HalfPeriodIdentity) {
    for (double k : {0.2, 0.7, 0.99, 0.999999}) {
        const auto m = EllipticModulus::from_k(k);
        EXPECT_NEAR(jacobi_dn(elliptic_K(m) / 2.0, m), std::sqrt(m.kc()), 1e-13) << k;
    }
}

TEST(JacobiDn, QuarterPeriodAndReflection) {
    for (double kc : {1e-3, 1e-6, 1e-9}) {
        const auto m = EllipticModulus::from_complement(kc);
        const double kk = elliptic_K(m);
        EXPECT_NEAR(jacobi_dn(kk, m) / kc, 1.0, 1e-12) << kc;
        for (double u : {0.1, 0.3, 0.45})
            EXPECT_NEAR(jacobi_dn(u * kk, m) * jacobi_dn((1 - u) * kk, m) / kc, 1.0, 1e-12) << kc;
        // Periodic and even.
        EXPECT_NEAR(jacobi_dn(0.3 * kk + 2 * kk, m), jacobi_dn(0.3 * kk, m), 1e-12);
        EXPECT_NEAR(jacobi_dn(-0.3 * kk, m), jacobi_dn(0.3 * kk, m), 1e-15);
    }
}

// dn(F(phi), k) = sqrt(1 - k^2 sin^2 phi), with F from quadrature.
TEST(JacobiDn, InvertsIncompleteIntegral) {
    for (double k : {0.5, 0.95, 0.99999}) {
        const auto m = EllipticModulus::from_k(k);
        for (double phi : {0.2, 0.9, 1.4}) {
            const double u = f_quadrature(phi, k);
            const double ref = std::sqrt(1.0 - k * k * std::sin(phi) * std::sin(phi));
            EXPECT_NEAR(jacobi_dn(u, m), ref, 1e-12 * ref + 1e-13) << k << " " << phi;
        }
    }
}

TEST(JacobiDn, RangeWithinComplementAndOne) {
    const auto m = EllipticModulus::from_k(0.9);
    for (int i = 0; i < 100; ++i) {
        const double d = jacobi_dn(0.173 * i, m);
        EXPECT_GE(d, m.kc() * (1 - 1e-15));
        EXPECT_LE(d, 1.0 + 1e-15);
    }
}
