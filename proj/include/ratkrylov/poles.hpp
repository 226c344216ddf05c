#pragma once

/// \file poles.hpp
/// Pole selection for rational Krylov projections: Zolotarev pole sets,
/// Moebius-mapped sets for Cauchy-Stieltjes functions (plain and
/// Kronecker-structured), nested equidistributed sequences, extended Krylov,
/// and the rate constants that appear in the error bounds.

#include <ratkrylov/core.hpp>
#include <ratkrylov/elliptic.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ratkrylov {

enum class PoleProvenance {
    zolotarev,
    cauchy,
    cauchy_kron,
    eds_laplace,
    eds_cauchy,
    eds_cauchy_kron,
    extended,
    polynomial,
    custom
};

inline const char* to_string(PoleProvenance p) {
    switch (p) {
    case PoleProvenance::zolotarev: return "zolotarev";
    case PoleProvenance::cauchy: return "cauchy";
    case PoleProvenance::cauchy_kron: return "cauchy-kron";
    case PoleProvenance::eds_laplace: return "eds-laplace";
    case PoleProvenance::eds_cauchy: return "eds-cauchy";
    case PoleProvenance::eds_cauchy_kron: return "eds-cauchy-kron";
    case PoleProvenance::extended: return "extended";
    case PoleProvenance::polynomial: return "polynomial";
    case PoleProvenance::custom: return "custom";
    }
    return "?";
}

/// Ordered extended-real poles; +inf encodes the pole at infinity.
struct PoleSequence {
    std::vector<double> poles;
    PoleProvenance provenance = PoleProvenance::custom;
    std::optional<SpectralInterval> interval;

    std::size_t size() const { return poles.size(); }
    bool empty() const { return poles.empty(); }
    double operator[](std::size_t i) const { return poles[i]; }

    PoleSequence prefix(std::size_t count) const {
        PoleSequence p = *this;
        p.poles.resize(std::min(count, poles.size()));
        return p;
    }

    /// Elementwise negation; infinite poles stay infinite.
    PoleSequence negated() const {
        PoleSequence p = *this;
        for (double& x : p.poles)
            if (!is_infinite_pole(x)) x = -x;
        return p;
    }

    /// Elementwise translation by c; infinite poles stay infinite.
    PoleSequence translated(double c) const {
        PoleSequence p = *this;
        for (double& x : p.poles)
            if (!is_infinite_pole(x)) x += c;
        return p;
    }
};

/// r(z) = prod (z - zeros_j) / prod (z - poles_j).
struct RationalFunctionFactored {
    std::vector<double> zeros;
    std::vector<double> poles;

    Complex operator()(Complex z) const {
        Complex r(1.0, 0.0);
        for (std::size_t j = 0; j < std::max(zeros.size(), poles.size()); ++j) {
            if (j < zeros.size()) r *= (z - zeros[j]);
            if (j < poles.size()) r /= (z - poles[j]);
        }
        return r;
    }

    /// log|r(x)| for real x; handles x = +-inf by the degree limit.
    double log_abs(double x) const {
        if (std::isinf(x)) {
            if (zeros.size() == poles.size()) return 0.0;
            return zeros.size() > poles.size() ? kInf : -kInf;
        }
        double s = 0.0;
        for (double zj : zeros) s += std::log(std::abs(x - zj));
        for (double pj : poles) s -= std::log(std::abs(x - pj));
        return s;
    }
};

/// r(z) = p(z)/p(-z) with p(z) = prod (z + xi_j): zeros -xi_j, poles xi_j.
inline RationalFunctionFactored as_rational(const PoleSequence& seq) {
    RationalFunctionFactored r;
    for (double xi : seq.poles) {
        if (is_infinite_pole(xi)) throw DomainError("as_rational: infinite poles have no reflected zero");
        r.poles.push_back(xi);
        r.zeros.push_back(-xi);
    }
    return r;
}

namespace detail {

// Zolotarev poles for [lo, hi] with 0 < lo <= hi, taking the complementary
// modulus lo/hi directly so that extreme ratios keep full precision.
inline std::vector<double> zolotarev_raw(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    const EllipticModulus m = EllipticModulus::from_complement(std::min(lo / hi, 1.0));
    const double kk = elliptic_K(m);
    for (std::size_t j = 1; j <= count; ++j) {
        const double u = static_cast<double>(2 * j - 1) * kk / static_cast<double>(2 * count);
        out[j - 1] = -hi * jacobi_dn(u, m);
    }
    return out;
}

inline void require_count(std::size_t count, const char* who) {
    if (count == 0) throw DomainError(concat(who, ": pole count must be at least 1"));
}

}  // namespace detail

/// Poles of the Zolotarev function for [a,b] vs [-b,-a]:
/// sigma_j = -b dn((2j-1) K / (2 count), k), k' = a/b. All lie in [-b,-a],
/// ordered by decreasing magnitude.
inline PoleSequence zolotarev_poles(const SpectralInterval& interval, std::size_t count) {
    detail::require_count(count, "zolotarev_poles");
    return {detail::zolotarev_raw(interval.a(), interval.b(), count), PoleProvenance::zolotarev, interval};
}

/// z -> (alpha z + beta) / (gamma z + delta) on the extended real line.
class MobiusMap {
public:
    MobiusMap(double alpha, double beta, double gamma, double delta, double delta_param, double endpoint)
        : alpha_(alpha), beta_(beta), gamma_(gamma), delta_(delta), delta_param_(delta_param),
          endpoint_(endpoint) {
        if (alpha * delta - beta * gamma == 0.0) throw DomainError("MobiusMap: singular coefficients");
    }

    double apply(double z) const {
        if (std::isinf(z)) return gamma_ == 0.0 ? z : alpha_ / gamma_;
        const double den = gamma_ * z + delta_;
        if (den == 0.0) return kInf;
        return (alpha_ * z + beta_) / den;
    }

    double inverse(double w) const {
        // Inverse map: (delta w - beta) / (-gamma w + alpha).
        if (std::isinf(w)) return gamma_ == 0.0 ? w : -delta_ / gamma_;
        const double den = -gamma_ * w + alpha_;
        if (den == 0.0) return kInf;
        return (delta_ * w - beta_) / den;
    }

    /// The Delta constant of the construction.
    double delta_param() const { return delta_param_; }
    /// Image endpoint in (0,1): the image set is [-1,-e] U [e,1].
    double endpoint() const { return endpoint_; }

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }
    double delta() const { return delta_; }

private:
    double alpha_, beta_, gamma_, delta_;
    double delta_param_;
    double endpoint_;
};

/// T_C(z) = (Delta + z - b)/(Delta - z + b), Delta = sqrt(b^2 - ab); maps
/// [-inf,0] U [a,b] onto [-1,-e] U [e,1] with e = (b - Delta)/(b + Delta).
inline MobiusMap mobius_cauchy(const SpectralInterval& interval) {
    const double a = interval.a();
    const double b = interval.b();
    const double d = b * std::sqrt(1.0 - a / b);
    // Delta - b without cancellation.
    const double dmb = -a * b / (b + d);
    const double e = a * b / ((b + d) * (b + d));
    return {1.0, dmb, -1.0, d + b, d, e};
}

/// T(z) = (Delta + z - b)/(Delta - z + b), Delta = sqrt(b^2 - a^2); maps
/// [-inf,-a] U [a,b] onto [-1,-e] U [e,1] with e = a / (b + Delta).
inline MobiusMap mobius_kron(const SpectralInterval& interval) {
    const double a = interval.a();
    const double b = interval.b();
    const double d = std::sqrt((b - a) * (b + a));
    const double dmb = -a * a / (b + d);
    const double e = a / (b + d);
    return {1.0, dmb, -1.0, d + b, d, e};
}

/// T_C^{-1} applied to the Zolotarev poles of [e, 1]; all negative.
inline PoleSequence cauchy_poles(const SpectralInterval& interval, std::size_t count) {
    detail::require_count(count, "cauchy_poles");
    const MobiusMap t = mobius_cauchy(interval);
    PoleSequence out{detail::zolotarev_raw(t.endpoint(), 1.0, count), PoleProvenance::cauchy, interval};
    for (double& p : out.poles) p = t.inverse(p);
    return out;
}

/// (Psi, Xi) for the Kronecker-structured Cauchy case: Psi is T^{-1} of the
/// Zolotarev poles of [e,1] (all in [-inf,-a]), Xi = -Psi.
inline std::pair<PoleSequence, PoleSequence> cauchy_kron_poles(const SpectralInterval& interval,
                                                                std::size_t count) {
    detail::require_count(count, "cauchy_kron_poles");
    const MobiusMap t = mobius_kron(interval);
    PoleSequence psi{detail::zolotarev_raw(t.endpoint(), 1.0, count), PoleProvenance::cauchy_kron, interval};
    for (double& p : psi.poles) p = t.inverse(p);
    PoleSequence xi = psi.negated();
    return {std::move(psi), std::move(xi)};
}

/// Alternating (inf, 0, inf, 0, ...).
inline PoleSequence extended_poles(std::size_t count) {
    detail::require_count(count, "extended_poles");
    PoleSequence out{std::vector<double>(count), PoleProvenance::extended, std::nullopt};
    for (std::size_t j = 0; j < count; ++j) out.poles[j] = (j % 2 == 0) ? kInf : 0.0;
    return out;
}

inline PoleSequence polynomial_poles(std::size_t count) {
    detail::require_count(count, "polynomial_poles");
    return {std::vector<double>(count, kInf), PoleProvenance::polynomial, std::nullopt};
}

// ---------------------------------------------------------------------------
// Equidistributed sequences.

/// State of the equidistributed sequence on the normalized interval
/// [lower, 1]. Advancing is functional: eds_next returns a new state.
struct EdsState {
    double lower = 0.5;
    double zeta = 1.0 / std::sqrt(2.0);
    /// Complete elliptic normalization M = K(k) with k' = lower.
    double norm = 0.0;
    std::vector<double> emitted;
    std::size_t next_index = 0;
};

inline EdsState make_eds_state(double lower, double zeta = 1.0 / std::sqrt(2.0)) {
    detail::require(lower > 0.0 && lower <= 1.0,
                    detail::concat("EDS lower endpoint ", lower, " outside (0,1]"));
    detail::require(zeta > 0.0, "EDS seed zeta must be positive");
    EdsState s;
    s.lower = lower;
    s.zeta = zeta;
    s.norm = lower < 1.0 ? elliptic_K(EllipticModulus::from_complement(lower)) : kPi / 2.0;
    return s;
}

/// s_j = frac(j zeta).
inline double eds_fraction(std::size_t j, double zeta) {
    const double x = static_cast<double>(j) * zeta;
    return x - std::floor(x);
}

/// g(t) = (1/2M) int_{a^2}^t dy / sqrt((y - a^2) y (1 - y)) for a = lower,
/// evaluated in closed form as 1 - F(phi_t, k)/K(k) with k' = a and
/// sin^2 phi_t = (1 - t)/(1 - a^2).
inline double eds_g(double t, const EdsState& state) {
    const double a2 = state.lower * state.lower;
    if (t <= a2) return 0.0;
    if (t >= 1.0) return 1.0;
    const double one_minus_a2 = (1.0 - state.lower) * (1.0 + state.lower);
    const double sin2 = (1.0 - t) / one_minus_a2;
    const double cos2 = (t - a2) / one_minus_a2;
    const EllipticModulus m = EllipticModulus::from_complement(state.lower);
    return 1.0 - elliptic_F_sincos2(sin2, cos2, m) / state.norm;
}

inline double eds_g_derivative(double t, const EdsState& state) {
    const double a2 = state.lower * state.lower;
    return 1.0 / (2.0 * state.norm * std::sqrt((t - a2) * t * (1.0 - t)));
}

struct EdsSolveInfo {
    double t;
    int newton_steps;
    bool used_bisection;
};

/// Solves g(t) = s on (a^2, 1). Newton runs in log t, started from the root
/// of the line through (log a^2, g(a^2) - s) and (log a, g(a) - s); steps
/// leaving the current bracket are replaced by bisection in log t.
inline EdsSolveInfo eds_solve(double s, const EdsState& state) {
    const double a = state.lower;
    const double a2 = a * a;
    if (s <= 0.0 || a >= 1.0) return {a >= 1.0 ? 1.0 : a2, 0, false};
    const double tau_lo0 = std::log(a2);
    const double tau_mid = std::log(a);
    const double g_mid = eds_g(a, state);
    double tau = tau_lo0 + s * (tau_mid - tau_lo0) / g_mid;
    double lo = tau_lo0;
    double hi = 0.0;
    tau = std::clamp(tau, lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo));
    EdsSolveInfo info{std::exp(tau), 0, false};
    for (int it = 0; it < 300; ++it) {
        const double t = std::exp(tau);
        const double h = eds_g(t, state) - s;
        if (std::abs(h) <= 1e-15) {
            info.t = t;
            return info;
        }
        if (h < 0.0)
            lo = tau;
        else
            hi = tau;
        double next = tau;
        bool newton_ok = false;
        if (info.newton_steps < 100) {
            const double dh = t * eds_g_derivative(t, state);
            if (std::isfinite(dh) && dh > 0.0) {
                next = tau - h / dh;
                newton_ok = next > lo && next < hi;
            }
            ++info.newton_steps;
        }
        if (!newton_ok) {
            next = 0.5 * (lo + hi);
            info.used_bisection = true;
        }
        if (std::abs(next - tau) <= 1e-15 * std::max(1.0, std::abs(tau)) || hi - lo <= 1e-15) {
            info.t = std::exp(next);
            return info;
        }
        tau = next;
    }
    info.t = std::exp(tau);
    return info;
}

/// Emits sigma_j = sqrt(t_j) with g(t_j) = frac(j zeta) and advances.
inline std::pair<double, EdsState> eds_next(const EdsState& state) {
    EdsState next = state;
    const double s = eds_fraction(state.next_index, state.zeta);
    const double sigma = std::sqrt(eds_solve(s, state).t);
    next.emitted.push_back(sigma);
    ++next.next_index;
    return {sigma, std::move(next)};
}

enum class EdsVariant { laplace, cauchy, cauchy_kron };

/// First `count` poles of the equidistributed sequence for the requested
/// variant. laplace: -b sigma_j with sigma on [a/b, 1]; cauchy: T_C^{-1}(-sigma_j)
/// with sigma on [e_C, 1]; cauchy_kron: T^{-1}(-sigma_j) with sigma on [e_T, 1].
/// Longer requests extend shorter ones (nested).
inline PoleSequence eds_poles(const SpectralInterval& interval, std::size_t count, EdsVariant variant,
                              double zeta = 1.0 / std::sqrt(2.0)) {
    detail::require_count(count, "eds_poles");
    std::optional<MobiusMap> map;
    double lower = interval.a() / interval.b();
    PoleProvenance prov = PoleProvenance::eds_laplace;
    if (variant == EdsVariant::cauchy) {
        map = mobius_cauchy(interval);
        prov = PoleProvenance::eds_cauchy;
    } else if (variant == EdsVariant::cauchy_kron) {
        map = mobius_kron(interval);
        prov = PoleProvenance::eds_cauchy_kron;
    }
    if (map) lower = map->endpoint();
    EdsState state = make_eds_state(std::min(lower, 1.0), zeta);
    PoleSequence out{{}, prov, interval};
    out.poles.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        auto [sigma, next] = eds_next(state);
        state = std::move(next);
        out.poles.push_back(map ? map->inverse(-sigma) : -interval.b() * sigma);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rate constants.

/// rho_[alpha,beta] = exp(-pi^2 / log(4 beta / alpha)).
inline double rate_rho(double alpha, double beta) {
    detail::require(alpha > 0.0 && alpha <= beta, "rate_rho needs 0 < alpha <= beta");
    return std::exp(-kPi * kPi / std::log(4.0 * (beta / alpha)));
}

inline double rate_rho(const SpectralInterval& i) { return rate_rho(i.a(), i.b()); }

/// gamma_{l,kappa} = 2.23 + (2/pi) log(4 l sqrt(kappa/pi)). With
/// `conjectured`, returns 1 (observed experimentally, not proven).
inline double gamma_const(std::size_t count, double kappa, bool conjectured = false) {
    detail::require(count >= 1 && kappa >= 1.0, "gamma_const needs l >= 1 and kappa >= 1");
    if (conjectured) return 1.0;
    return 2.23 + (2.0 / kPi) * std::log(4.0 * static_cast<double>(count) * std::sqrt(kappa / kPi));
}

// ---------------------------------------------------------------------------
// Witness ratios max_{I1}|r| / min_{I2}|r|.

/// Closed real interval; one endpoint may be infinite.
struct RealSet {
    double lo;
    double hi;

    bool contains(double x) const { return lo <= x && x <= hi; }
};

namespace detail {

inline std::vector<double> sample_set(const RealSet& set, std::size_t n) {
    std::vector<double> pts;
    n = std::max<std::size_t>(n, 3);
    if (std::isinf(set.lo) || std::isinf(set.hi)) {
        // Reciprocal change of variable: u in [0,1] -> finite end + sign * s u/(1-u).
        const bool left_infinite = std::isinf(set.lo);
        const double end = left_infinite ? set.hi : set.lo;
        const double scale = std::max(std::abs(end), 1.0);
        const double sign = left_infinite ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double u = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(k) / static_cast<double>(n - 1)));
            pts.push_back(u >= 1.0 ? sign * kInf : end + sign * scale * u / (1.0 - u));
        }
        // Log-spaced distances from the finite end resolve structure near it.
        {
            const double dmin = 1e-12 * scale;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = dmin * std::pow(1e24, static_cast<double>(k) / static_cast<double>(n - 1));
                pts.push_back(end + sign * d);
            }
        }
    } else {
        const double mid = 0.5 * (set.lo + set.hi);
        const double rad = 0.5 * (set.hi - set.lo);
        for (std::size_t k = 0; k < n; ++k)
            pts.push_back(mid + rad * std::cos(kPi * static_cast<double>(k) / static_cast<double>(n - 1)));
        if (set.lo > 0.0 || set.hi < 0.0) {
            const double s = set.lo > 0.0 ? 1.0 : -1.0;
            const double l0 = std::log(std::min(std::abs(set.lo), std::abs(set.hi)));
            const double l1 = std::log(std::max(std::abs(set.lo), std::abs(set.hi)));
            for (std::size_t k = 0; k < n; ++k)
                pts.push_back(s * std::exp(l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(n - 1)));
        }
        pts.push_back(set.lo);
        pts.push_back(set.hi);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> kept;
    for (double p : pts)
        if (std::isinf(p) || set.contains(p)) kept.push_back(p);
    return kept;
}

// Extremum of sign * log|r| over the set (sign = +1: max, -1: min), grid
// search followed by golden-section refinement between the neighbours.
inline double extremum_log_abs(const RationalFunctionFactored& r, const RealSet& set, std::size_t n,
                               double sign) {
    const std::vector<double> pts = sample_set(set, n);
    std::size_t best = 0;
    double best_val = -kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = sign * r.log_abs(pts[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (std::isinf(pts[best])) return sign * best_val;
    double lo = best > 0 ? pts[best - 1] : pts[best];
    double hi = best + 1 < pts.size() ? pts[best + 1] : pts[best];
    if (std::isinf(lo) || std::isinf(hi) || lo == hi) return sign * best_val;
    constexpr double golden = 0.6180339887498949;
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = sign * r.log_abs(x1);
    double f2 = sign * r.log_abs(x2);
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(std::abs(lo), std::abs(hi)); ++it) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = sign * r.log_abs(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = sign * r.log_abs(x2);
        }
    }
    best_val = std::max({best_val, f1, f2});
    return sign * best_val;
}

}  // namespace detail

/// max_{I1} |r| / min_{I2} |r| over Chebyshev (plus log-spaced) grids with
/// local refinement. A pole inside I1 makes the maximum infinite and throws;
/// poles inside I2 are where |r| is largest and do not affect the minimum.
inline double zolotarev_ratio(const RationalFunctionFactored& r, const RealSet& i1, const RealSet& i2,
                              std::size_t gridsize = 2000) {
    for (double p : r.poles)
        if (i1.contains(p))
            throw DomainError(detail::concat("zolotarev_ratio: pole ", p, " lies inside the maximized interval"));
    if (r.poles.empty() && r.zeros.empty()) return 1.0;
    const double log_max = detail::extremum_log_abs(r, i1, gridsize, 1.0);
    const double log_min = detail::extremum_log_abs(r, i2, gridsize, -1.0);
    return std::exp(log_max - log_min);
}

}  // namespace ratkrylov
