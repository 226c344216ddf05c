#include <ratkrylov/functions.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace ratkrylov;

TEST(Catalog, Phi1Limit) {
    const auto f = catalog::phi(1);
    EXPECT_DOUBLE_EQ(f.at_zero_plus(), 1.0);
    EXPECT_NEAR(f(1e-12), 1.0, 1e-12);
}

TEST(Catalog, PowerAtFour) { EXPECT_DOUBLE_EQ(catalog::power(0.5)(4.0), 0.5); }

TEST(Catalog, Log1pLimit) {
    const auto f = catalog::log1p_over_z();
    EXPECT_DOUBLE_EQ(f.at_zero_plus(), 1.0);
    EXPECT_NEAR(f(1e-13), 1.0, 1e-13);
}

TEST(Catalog, ClassTags) {
    EXPECT_EQ(catalog::phi(1).function_class(), FunctionClass::laplace);
    EXPECT_EQ(catalog::lambertw_scaled().function_class(), FunctionClass::laplace);
    EXPECT_EQ(catalog::power(0.3).function_class(), FunctionClass::cauchy);
    EXPECT_EQ(catalog::log1p_over_z().function_class(), FunctionClass::cauchy);
    EXPECT_EQ(catalog::one_minus_exp_sqrt_over_z().function_class(), FunctionClass::cauchy);
    EXPECT_EQ(catalog::rational_negpoles({{1.0, -2.0}}).function_class(), FunctionClass::cauchy);
    EXPECT_TRUE(catalog::power(0.3).is_laplace());
}

TEST(Catalog, ParameterValidation) {
    EXPECT_THROW(catalog::phi(0), DomainError);
    EXPECT_THROW(catalog::power(1.0), DomainError);
    EXPECT_THROW(catalog::power(0.0), DomainError);
    EXPECT_THROW(catalog::rational_negpoles({{1.0, 0.5}}), DomainError);
    EXPECT_THROW(catalog::rational_negpoles({{-1.0, -0.5}}), DomainError);
    EXPECT_THROW(make_catalog_function("expm"), DomainError);
    EXPECT_THROW(make_catalog_function("power:-1.5"), DomainError);
}

TEST(Catalog, ParseSpecs) {
    EXPECT_DOUBLE_EQ(make_catalog_function("power:-0.5")(4.0), 0.5);
    EXPECT_EQ(make_catalog_function("phi:2").label(), "phi2");
    EXPECT_DOUBLE_EQ(make_catalog_function("inverse")(4.0), 0.25);
    const auto r = make_catalog_function("rational:1,-1;2,-3");
    EXPECT_DOUBLE_EQ(r(1.0), 0.5 + 0.5);
    EXPECT_DOUBLE_EQ(r.at_zero_plus(), 1.0 + 2.0 / 3.0);
}

TEST(EvalScalar, ReferenceValues) {
    EXPECT_NEAR(eval_scalar(catalog::phi(1), 1.0), 0.63212055882855767, 1e-15);
    EXPECT_DOUBLE_EQ(eval_scalar(catalog::power(0.2), 1.0), 1.0);
    // (1 - e^{-2})/4 from a 30-digit evaluation.
    EXPECT_NEAR(eval_scalar(catalog::one_minus_exp_sqrt_over_z(), 4.0), 0.21616617919084683, 1e-16);
}

TEST(EvalScalar, DomainViolation) {
    EXPECT_THROW(eval_scalar(catalog::power(0.5), 0.0), DomainError);
    EXPECT_THROW(eval_scalar(catalog::power(0.5).with_shift(-1.0), 0.5), DomainError);
    EXPECT_DOUBLE_EQ(eval_scalar(catalog::power(0.5).with_shift(2.0), 2.0), 0.5);
}

TEST(EvalScalar, Phi1SmallArgumentAccurate) {
    // Series 1 - z/2 + z^2/6 as the oracle near zero.
    for (double z : {1e-10, 1e-7, 1e-4}) {
        const double ref = 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
        EXPECT_NEAR(catalog::phi(1)(z), ref, 1e-15 * ref);
    }
}

// phi_j(z) = int_0^1 e^{-tz} (1-t)^{j-1}/(j-1)! dt.
TEST(EvalScalar, PhiAgreesWithQuadrature) {
    boost::math::quadrature::gauss_kronrod<double, 31> gk;
    for (int j : {1, 2, 3}) {
        const auto f = catalog::phi(j);
        for (double z : {0.1, 1.0, 10.0, 30.0}) {
            double fact = 1.0;
            for (int i = 2; i < j; ++i) fact *= i;
            const double ref = gk.integrate(
                [&](double t) { return std::exp(-t * z) * std::pow(1.0 - t, j - 1) / fact; }, 0.0, 1.0, 10,
                1e-14);
            EXPECT_NEAR(f(z), ref, 1e-8 * std::abs(ref)) << "j=" << j << " z=" << z;
            EXPECT_NEAR(f(z), ref, 1e-13 * std::abs(ref)) << "j=" << j << " z=" << z;
        }
    }
}

// z^{-alpha} = sin(alpha pi)/pi int_0^inf t^{-alpha}/(t + z) dt.
TEST(EvalScalar, PowerAgreesWithCauchyIntegral) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    for (double alpha : {0.2, 0.5, 0.8}) {
        for (double z : {0.5, 2.0}) {
            auto g = [&](double t) { return std::pow(t, -alpha) / (t + z); };
            const double ref = std::sin(alpha * kPi) / kPi * (ts.integrate(g, 0.0, 1.0) + es.integrate(g, 1.0, kInf));
            EXPECT_NEAR(catalog::power(alpha)(z), ref, 1e-6 * ref);
        }
    }
}

TEST(CompleteMonotonicity, SampledSignPattern) {
    const std::vector<StieltjesFunction> fs{catalog::phi(1),
                                            catalog::phi(2),
                                            catalog::power(0.5),
                                            catalog::inverse(),
                                            catalog::log1p_over_z(),
                                            catalog::one_minus_exp_sqrt_over_z(),
                                            catalog::lambertw_scaled(),
                                            catalog::rational_negpoles({{1.0, -0.5}, {0.25, -4.0}})};
    for (const auto& f : fs) {
        for (int k = 0; k <= 60; ++k) {
            const double z = std::pow(10.0, -3.0 + 6.0 * k / 60.0);
            const double h = 1e-3 * z;
            const double f0 = f(z - h), f1 = f(z), f2 = f(z + h);
            EXPECT_GT(f1, 0.0) << f.label() << " z=" << z;
            EXPECT_LE(f2 - f0, 0.0) << f.label() << " z=" << z;
            EXPECT_GE(f2 - 2.0 * f1 + f0, -1e-14 * std::abs(f1)) << f.label() << " z=" << z;
        }
    }
}

TEST(LambertW, Examples) {
    EXPECT_EQ(lambert_w(0.0), 0.0);
    EXPECT_NEAR(lambert_w(std::exp(1.0)), 1.0, 1e-15);
    // Bisection oracle on w e^w - 1.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (m * std::exp(m) < 1.0 ? lo : hi) = m;
    }
    EXPECT_NEAR(lambert_w(1.0), lo, 4e-16);
    EXPECT_NEAR(lambert_w(1.0), 0.5671432904097838, 1e-15);
}

TEST(LambertW, DefiningIdentityOnLogGrid) {
    for (int k = 0; k <= 200; ++k) {
        const double x = std::pow(10.0, -12.0 + 24.0 * k / 200.0);
        const double w = lambert_w(x);
        EXPECT_NEAR(w * std::exp(w), x, 1e-13 * x) << "x=" << x;
    }
}

TEST(BoundAnchor, Examples) {
    const SpectralInterval i(2.0, 10.0);
    EXPECT_DOUBLE_EQ(bound_anchor(catalog::phi(1), Anchor::f0plus, i), 1.0);
    EXPECT_TRUE(std::isinf(bound_anchor(catalog::power(0.5), Anchor::f0plus, i)));
    EXPECT_DOUBLE_EQ(bound_anchor(catalog::power(0.5), Anchor::at_2a, i), 0.5);
    EXPECT_DOUBLE_EQ(bound_anchor(catalog::power(0.5), Anchor::at_a, SpectralInterval(4.0, 5.0)), 0.5);
}

TEST(BoundAnchor, HonoursShift) {
    const auto g = catalog::power(0.5).with_shift(3.0);
    EXPECT_DOUBLE_EQ(bound_anchor(g, Anchor::f0plus, SpectralInterval(1.0, 2.0)), 1.0 / std::sqrt(3.0));
    EXPECT_DOUBLE_EQ(bound_anchor(g, Anchor::at_a, SpectralInterval(1.0, 2.0)), 0.5);
    EXPECT_TRUE(std::isinf(catalog::phi(1).with_shift(-0.5).at_zero_plus()));
}
