#pragma once

/// \file core.hpp
/// Shared types for the ratkrylov library: dense aliases, the error
/// hierarchy and the spectral interval.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ratkrylov {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// n x s block of right-hand sides; a plain vector is the s = 1 case.
using BlockVector = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown for out-of-domain arguments (bad parameters, z + eta <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Thrown when a shifted system (A - sigma I) is singular to working precision.
class SingularShiftError : public Error {
public:
    SingularShiftError(Complex sigma, const std::string& what)
        : Error(what), sigma_(sigma) {}
    Complex sigma() const { return sigma_; }

private:
    Complex sigma_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <typename... Args>
std::string concat(const Args&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << args);
    return os.str();
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

}  // namespace detail

/// Closed interval 0 < a <= b enclosing the spectrum of an SPD operator.
class SpectralInterval {
public:
    SpectralInterval(double a, double b) : a_(a), b_(b) {
        if (!(a > 0.0) || !(a <= b) || !std::isfinite(b))
            throw DomainError(detail::concat("invalid spectral interval [", a, ", ", b,
                                             "]: need 0 < a <= b < inf"));
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double condition() const { return b_ / a_; }
    bool contains(double x) const { return a_ <= x && x <= b_; }

    /// Interval of A - eta I.
    SpectralInterval shifted(double eta) const { return {a_ - eta, b_ - eta}; }

private:
    double a_;
    double b_;
};

inline bool is_infinite_pole(double xi) { return std::isinf(xi); }

}  // namespace ratkrylov
