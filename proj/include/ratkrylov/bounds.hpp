#pragma once

/// \file bounds.hpp
/// A-priori error bounds for projected Stieltjes matrix functions. All
/// bounds take the working interval, i.e. after any shift of the function.

#include <ratkrylov/core.hpp>
#include <ratkrylov/functions.hpp>
#include <ratkrylov/poles.hpp>

#include <cmath>
#include <cstddef>

namespace ratkrylov::bounds {

/// 8 gamma_{l,kappa} f(0+) |v| rho_[a,b]^{l/2}; Zolotarev poles of [a,b].
inline double laplace_1d(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell, double vnorm,
                         bool conjectured_gamma = false) {
    return 8.0 * gamma_const(ell, i.condition(), conjectured_gamma) *
           bound_anchor(f, Anchor::f0plus, i) * vnorm * std::pow(rate_rho(i), 0.5 * static_cast<double>(ell));
}

/// 8 f(a) |v| rho_[a,4b]^l; Cauchy-mapped poles.
inline double cauchy_1d(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell, double vnorm) {
    return 8.0 * bound_anchor(f, Anchor::at_a, i) * vnorm *
           std::pow(rate_rho(i.a(), 4.0 * i.b()), static_cast<double>(ell));
}

/// 16 gamma_{l,kappa} f(0+) rho_[a,b]^{l/2} |F|; Kronecker sum, Laplace class.
inline double kron_laplace(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell, double fnorm,
                           bool conjectured_gamma = false) {
    return 16.0 * gamma_const(ell, i.condition(), conjectured_gamma) *
           bound_anchor(f, Anchor::f0plus, i) * fnorm * std::pow(rate_rho(i), 0.5 * static_cast<double>(ell));
}

/// 4 f(2a) (1 + kappa) rho_[a,2b]^l |F|; Kronecker sum, Cauchy class.
inline double kron_cauchy(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell, double fnorm) {
    return 4.0 * bound_anchor(f, Anchor::at_2a, i) * (1.0 + i.condition()) * fnorm *
           std::pow(rate_rho(i.a(), 2.0 * i.b()), static_cast<double>(ell));
}

/// (1 + kappa) 4 rho_[a,b]^l |F|: Galerkin residual of the Sylvester
/// equation with Zolotarev poles on both sides.
inline double sylvester_residual(const SpectralInterval& i, std::size_t ell, double fnorm) {
    return (1.0 + i.condition()) * 4.0 * std::pow(rate_rho(i), static_cast<double>(ell)) * fnorm;
}

/// Bound on sigma_{1 + l k}(X), Cauchy class: 4 f(2a) rho_[a,2b]^l |F|.
inline double singular_cauchy(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell,
                              double fnorm) {
    return 4.0 * bound_anchor(f, Anchor::at_2a, i) * std::pow(rate_rho(i.a(), 2.0 * i.b()), static_cast<double>(ell)) *
           fnorm;
}

/// Bound on sigma_{1 + l k}(X), Laplace class: 16 gamma f(0+) rho^{l/2} |F|.
inline double singular_laplace(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell,
                               double fnorm, bool conjectured_gamma = false) {
    return kron_laplace(f, i, ell, fnorm, conjectured_gamma);
}

/// The bound matching the function class for a single vector.
inline double for_class_1d(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell, double vnorm,
                           bool conjectured_gamma = false) {
    return f.is_cauchy() ? cauchy_1d(f, i, ell, vnorm) : laplace_1d(f, i, ell, vnorm, conjectured_gamma);
}

inline double for_class_kron(const StieltjesFunction& f, const SpectralInterval& i, std::size_t ell, double fnorm,
                             bool conjectured_gamma = false) {
    return f.is_cauchy() ? kron_cauchy(f, i, ell, fnorm) : kron_laplace(f, i, ell, fnorm, conjectured_gamma);
}

}  // namespace ratkrylov::bounds
