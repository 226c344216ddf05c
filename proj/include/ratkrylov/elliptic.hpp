#pragma once

/// \file elliptic.hpp
/// Complete and incomplete elliptic integrals of the first kind and the
/// Jacobi dn function.
///
/// Everything is parameterized by an EllipticModulus that carries both the
/// modulus k and its complement k' = sqrt(1 - k^2). Pole formulas for
/// intervals with condition number 1e9 and beyond need k' ~ 1e-10 to full
/// relative precision, which is lost if only k is stored.

#include <ratkrylov/core.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace ratkrylov {

class EllipticModulus {
public:
    static EllipticModulus from_k(double k) {
        detail::require(k >= 0.0 && k < 1.0, detail::concat("elliptic modulus k = ", k, " outside [0,1)"));
        return EllipticModulus(k, std::sqrt((1.0 - k) * (1.0 + k)));
    }

    static EllipticModulus from_complement(double kc) {
        detail::require(kc > 0.0 && kc <= 1.0,
                        detail::concat("complementary modulus k' = ", kc, " outside (0,1]"));
        return EllipticModulus(std::sqrt((1.0 - kc) * (1.0 + kc)), kc);
    }

    double k() const { return k_; }
    double kc() const { return kc_; }

private:
    EllipticModulus(double k, double kc) : k_(k), kc_(kc) {}
    double k_;
    double kc_;
};

/// K(k) = int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta) = pi / (2 AGM(1, k')).
inline double elliptic_K(const EllipticModulus& m) {
    double a = 1.0;
    double b = m.kc();
    for (int it = 0; it < 64 && std::abs(a - b) > 1e-16 * a; ++it) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return kPi / (a + b);
}

inline double elliptic_K(double k) { return elliptic_K(EllipticModulus::from_k(k)); }

struct EllipticKResult {
    double value;
    /// Set when k is so close to 1 that k' (and hence K) carries few correct digits.
    bool near_singular;
};

inline EllipticKResult elliptic_K_checked(double k) {
    return {elliptic_K(k), (1.0 - k) < 1e-8};
}

/// Carlson's symmetric integral R_F(x,y,z) by duplication; at most one
/// argument may be zero.
inline double carlson_rf(double x, double y, double z) {
    detail::require(x >= 0.0 && y >= 0.0 && z >= 0.0 && (x + y > 0.0) && (x + z > 0.0) && (y + z > 0.0),
                    "carlson_rf: arguments must be nonnegative with at most one zero");
    constexpr double errtol = 1e-3;
    double mu = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double sx = std::sqrt(x);
        const double sy = std::sqrt(y);
        const double sz = std::sqrt(z);
        const double lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        mu = (x + y + z) / 3.0;
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < errtol) break;
    }
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mu);
}

/// F(phi, k) for 0 <= phi <= pi/2, given sin^2 and cos^2 of phi separately
/// so callers can keep both to full relative precision.
inline double elliptic_F_sincos2(double sin2, double cos2, const EllipticModulus& m) {
    const double kc2 = m.kc() * m.kc();
    return std::sqrt(sin2) * carlson_rf(cos2, cos2 + kc2 * sin2, 1.0);
}

inline double elliptic_F(double phi, const EllipticModulus& m) {
    detail::require(phi >= 0.0 && phi <= 0.5 * kPi + 1e-15, "elliptic_F: phi outside [0, pi/2]");
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    return elliptic_F_sincos2(s * s, c * c, m);
}

struct JacobiSnCnDn {
    double sn;
    double cn;
    double dn;
};

namespace detail {

// Descending Landen transformation in Bulirsch's AGM form, accurate for
// u in [0, K].
inline JacobiSnCnDn sncndn_landen(double u, const EllipticModulus& m) {
    if (m.kc() == 1.0) return {std::sin(u), std::cos(u), 1.0};
    std::array<double, 32> am{};
    std::array<double, 32> gm{};
    double emc = m.kc() * m.kc();
    double a = 1.0;
    double c = 1.0;
    int last = 0;
    for (int i = 0; i < 32; ++i) {
        last = i;
        am[static_cast<std::size_t>(i)] = a;
        emc = std::sqrt(emc);
        gm[static_cast<std::size_t>(i)] = emc;
        c = 0.5 * (a + emc);
        // Quadratic convergence: one more step would be below 1e-16.
        if (std::abs(a - emc) <= 1e-8 * a) break;
        emc *= a;
        a = c;
    }
    u *= c;
    double sn = std::sin(u);
    double cn = std::cos(u);
    double dn = 1.0;
    if (sn != 0.0) {
        double t = cn / sn;
        c *= t;
        for (int i = last; i >= 0; --i) {
            const double b = am[static_cast<std::size_t>(i)];
            t *= c;
            c *= dn;
            dn = (gm[static_cast<std::size_t>(i)] + t) / (b + t);
            t = c / b;
        }
        t = 1.0 / std::sqrt(c * c + 1.0);
        sn = sn >= 0.0 ? t : -t;
        cn = c * sn;
    }
    return {sn, cn, dn};
}

}  // namespace detail

/// dn(u, k) for any real u. Values lie in [k', 1]. Arguments are reduced to
/// [0, K/2] with dn(-u) = dn(u), dn(u + 2K) = dn(u) and dn(K - u) = k'/dn(u),
/// which keeps small values of dn accurate in the relative sense.
inline double jacobi_dn(double u, const EllipticModulus& m) {
    if (m.kc() == 1.0) return 1.0;
    const double kk = elliptic_K(m);
    double r = std::fmod(std::abs(u), 2.0 * kk);
    if (r > kk) r = 2.0 * kk - r;
    if (r > 0.5 * kk) return m.kc() / detail::sncndn_landen(kk - r, m).dn;
    return detail::sncndn_landen(r, m).dn;
}

inline double jacobi_dn(double u, double k) { return jacobi_dn(u, EllipticModulus::from_k(k)); }

}  // namespace ratkrylov
