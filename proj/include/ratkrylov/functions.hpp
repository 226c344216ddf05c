#pragma once

/// \file functions.hpp
/// Catalog of Laplace-Stieltjes and Cauchy-Stieltjes scalar functions.

#include <ratkrylov/core.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ratkrylov {

/// Cauchy-Stieltjes functions are also Laplace-Stieltjes; the tag records
/// the strongest class, which selects the applicable error bounds.
enum class FunctionClass { laplace, cauchy };

inline const char* to_string(FunctionClass c) { return c == FunctionClass::laplace ? "laplace" : "cauchy"; }

/// Principal branch of the Lambert W function on [0, inf), by Halley iteration.
inline double lambert_w(double x) {
    detail::require(x >= 0.0 && !std::isnan(x), detail::concat("lambert_w: x = ", x, " must be >= 0"));
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return kInf;
    if (x < 1e-8) return x * (1.0 - x * (1.0 - 1.5 * x));
    double w;
    if (x <= 3.0) {
        w = std::log1p(x) * (1.0 - 0.2 * std::log1p(x));
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }
    for (int it = 0; it < 50; ++it) {
        const double ew = std::exp(w);
        const double resid = w * ew - x;
        const double wp1 = w + 1.0;
        const double step = resid / (ew * wp1 - (w + 2.0) * resid / (2.0 * wp1));
        w -= step;
        if (std::abs(step) <= 4e-16 * std::abs(w)) break;
    }
    return w;
}

namespace detail {

inline double factorial(int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return f;
}

// phi_j(z) = int_0^1 e^{-tz} (1-t)^{j-1}/(j-1)! dt = sum_k (-z)^k / (k+j)!.
inline double phi_function(int j, double z) {
    if (j == 1) return z == 0.0 ? 1.0 : -std::expm1(-z) / z;
    if (z <= 1.0) {
        double term = 1.0 / factorial(j);
        double sum = term;
        for (int k = 1; k < 60; ++k) {
            term *= -z / static_cast<double>(k + j);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    double phi = -std::expm1(-z) / z;
    for (int i = 2; i <= j; ++i) phi = (1.0 / factorial(i - 1) - phi) / z;
    return phi;
}

}  // namespace detail

/// Evaluable Stieltjes function z -> base(z + shift).
///
/// The shift implements the usual trick for functions that blow up at 0:
/// with shift eta, the object stands for g(z) = f(z + eta), and f(A) v equals
/// g(A - eta I) v. Bound anchors are reported for g.
class StieltjesFunction {
public:
    StieltjesFunction(std::string label, FunctionClass cls, std::function<double(double)> base,
                      double base_at_zero, double shift = 0.0)
        : label_(std::move(label)), class_(cls), base_(std::move(base)), base_at_zero_(base_at_zero),
          shift_(shift) {}

    const std::string& label() const { return label_; }
    FunctionClass function_class() const { return class_; }
    double shift() const { return shift_; }

    bool is_cauchy() const { return class_ == FunctionClass::cauchy; }
    /// Every catalog function is Laplace-Stieltjes.
    bool is_laplace() const { return true; }

    StieltjesFunction with_shift(double eta) const {
        StieltjesFunction f = *this;
        f.shift_ = eta;
        return f;
    }

    /// g(z) = f(z + shift); requires z + shift > 0.
    double operator()(double z) const {
        const double x = z + shift_;
        if (!(x > 0.0))
            throw DomainError(detail::concat(label_, ": argument z + eta = ", x, " is not positive"));
        return base_(x);
    }

    /// lim_{z -> 0+} g(z), possibly +inf.
    double at_zero_plus() const {
        if (shift_ == 0.0) return base_at_zero_;
        if (shift_ < 0.0) return kInf;
        return base_(shift_);
    }

private:
    std::string label_;
    FunctionClass class_;
    std::function<double(double)> base_;
    double base_at_zero_;
    double shift_;
};

inline double eval_scalar(const StieltjesFunction& f, double z) { return f(z); }

/// A term alpha / (z - beta) of a rational function with negative poles.
struct NegativePoleTerm {
    double alpha;
    double beta;
};

namespace catalog {

inline StieltjesFunction phi(int j) {
    detail::require(j >= 1, detail::concat("phi_j needs j >= 1, got ", j));
    return {detail::concat("phi", j), FunctionClass::laplace,
            [j](double z) { return detail::phi_function(j, z); }, 1.0 / detail::factorial(j)};
}

/// z^{-alpha}, 0 < alpha < 1.
inline StieltjesFunction power(double alpha) {
    detail::require(alpha > 0.0 && alpha < 1.0,
                    detail::concat("power(-alpha) needs 0 < alpha < 1, got alpha = ", alpha));
    return {detail::concat("power:-", alpha), FunctionClass::cauchy,
            [alpha](double z) { return std::pow(z, -alpha); }, kInf};
}

/// z^{-1}; Cauchy-Stieltjes with a point mass at t = 0.
inline StieltjesFunction inverse() {
    return {"inverse", FunctionClass::cauchy, [](double z) { return 1.0 / z; }, kInf};
}

inline StieltjesFunction log1p_over_z() {
    return {"log1p_over_z", FunctionClass::cauchy, [](double z) { return std::log1p(z) / z; }, 1.0};
}

inline StieltjesFunction one_minus_exp_sqrt_over_z() {
    return {"one_minus_exp_sqrt_over_z", FunctionClass::cauchy,
            [](double z) { return -std::expm1(-std::sqrt(z)) / z; }, kInf};
}

/// z^{-3/2} W(z).
inline StieltjesFunction lambertw_scaled() {
    return {"lambertw", FunctionClass::laplace, [](double z) { return lambert_w(z) / (z * std::sqrt(z)); },
            kInf};
}

/// sum_j alpha_j / (z - beta_j) with alpha_j > 0 and beta_j < 0.
inline StieltjesFunction rational_negpoles(std::vector<NegativePoleTerm> terms) {
    detail::require(!terms.empty(), "rational_negpoles needs at least one term");
    double at0 = 0.0;
    for (const auto& t : terms) {
        detail::require(t.alpha > 0.0 && t.beta < 0.0,
                        detail::concat("rational_negpoles needs alpha > 0 and beta < 0, got (", t.alpha,
                                       ", ", t.beta, ")"));
        at0 += t.alpha / -t.beta;
    }
    return {"rational", FunctionClass::cauchy,
            [terms](double z) {
                double s = 0.0;
                for (const auto& t : terms) s += t.alpha / (z - t.beta);
                return s;
            },
            at0};
}

}  // namespace catalog

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError(concat("cannot parse ", what, " from '", s, "'"));
    }
}

}  // namespace detail

/// Builds a catalog function from a `name[:params]` spec:
/// `phi:J`, `power:-ALPHA`, `inverse`, `log1p_over_z`,
/// `one_minus_exp_sqrt_over_z`, `lambertw`, `rational:A1,B1;A2,B2;...`.
inline StieltjesFunction make_catalog_function(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string params = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (name == "phi") {
        const double j = detail::parse_double(params.empty() ? "1" : params, "phi index");
        detail::require(j == std::floor(j), "phi index must be an integer");
        return catalog::phi(static_cast<int>(j));
    }
    if (name == "power") {
        const double e = detail::parse_double(params, "power exponent");
        return catalog::power(-e);
    }
    if (name == "inverse") return catalog::inverse();
    if (name == "log1p_over_z") return catalog::log1p_over_z();
    if (name == "one_minus_exp_sqrt_over_z") return catalog::one_minus_exp_sqrt_over_z();
    if (name == "lambertw" || name == "lambertw_scaled") return catalog::lambertw_scaled();
    if (name == "rational" || name == "rational_negpoles") {
        std::vector<NegativePoleTerm> terms;
        for (const auto& term : detail::split(params, ';')) {
            const auto ab = detail::split(term, ',');
            detail::require(ab.size() == 2, "rational term must be 'alpha,beta'");
            terms.push_back({detail::parse_double(ab[0], "alpha"), detail::parse_double(ab[1], "beta")});
        }
        return catalog::rational_negpoles(std::move(terms));
    }
    throw DomainError(detail::concat("unknown function '", spec, "'"));
}

}  // namespace ratkrylov

namespace ratkrylov {

enum class Anchor { f0plus, at_a, at_2a };

/// Constants entering the a-priori bounds: f(0+), f(a) or f(2a) of the
/// (possibly shifted) function. +inf from f0plus means the Laplace-type bound
/// is unusable without a positive shift.
inline double bound_anchor(const StieltjesFunction& f, Anchor which, const SpectralInterval& interval) {
    switch (which) {
    case Anchor::f0plus: return f.at_zero_plus();
    case Anchor::at_a: return f(interval.a());
    case Anchor::at_2a: return f(2.0 * interval.a());
    }
    return kInf;
}

}  // namespace ratkrylov
