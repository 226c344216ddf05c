#pragma once

/// \file driver.hpp
/// Tolerance-driven evaluation of f(A) v with a chosen pole strategy.

#include <ratkrylov/bounds.hpp>
#include <ratkrylov/core.hpp>
#include <ratkrylov/functions.hpp>
#include <ratkrylov/operators.hpp>
#include <ratkrylov/poles.hpp>
#include <ratkrylov/rk.hpp>

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ratkrylov {

enum class Strategy { zolotarev, cauchy, eds_laplace, eds_cauchy, extended, polynomial, custom };

inline const char* to_string(Strategy s) {
    switch (s) {
    case Strategy::zolotarev: return "zolotarev";
    case Strategy::cauchy: return "cauchy";
    case Strategy::eds_laplace: return "eds-laplace";
    case Strategy::eds_cauchy: return "eds-cauchy";
    case Strategy::extended: return "extended";
    case Strategy::polynomial: return "polynomial";
    case Strategy::custom: return "custom";
    }
    return "?";
}

/// Accepts the names above; "eds" resolves by function class.
inline Strategy parse_strategy(const std::string& name, FunctionClass cls = FunctionClass::cauchy) {
    if (name == "zolotarev" || name == "laplace") return Strategy::zolotarev;
    if (name == "cauchy") return Strategy::cauchy;
    if (name == "eds-laplace") return Strategy::eds_laplace;
    if (name == "eds-cauchy") return Strategy::eds_cauchy;
    if (name == "eds") return cls == FunctionClass::cauchy ? Strategy::eds_cauchy : Strategy::eds_laplace;
    if (name == "extended") return Strategy::extended;
    if (name == "polynomial") return Strategy::polynomial;
    if (name == "custom") return Strategy::custom;
    throw DomainError(detail::concat("unknown pole strategy '", name, "'"));
}

/// Optimal fixed-size sets are not nested and are rebuilt per checkpoint.
inline bool is_nested(Strategy s) { return s != Strategy::zolotarev && s != Strategy::cauchy; }

enum class StopRule { estimator, true_error, never };

struct DriverOptions {
    double tol = 1e-8;
    std::size_t maxiter = 50;
    /// Checkpoint spacing for non-nested strategies.
    std::size_t fixed_stride = 4;
    StopRule stop = StopRule::estimator;
    /// f(A) v, enables the true_error column.
    std::optional<BlockVector> reference;
    /// Pole list for Strategy::custom, in the coordinates of A - shift I.
    PoleSequence custom;
    bool conjectured_gamma = false;
};

struct TraceRow {
    std::size_t ell;
    Index dim;
    double est_error;  // lag-2 iterate difference, relative; inf before it exists
    double true_error;  // absolute; NaN without reference
    double rel_true_error;
    double bound;  // class bound; inf when the anchor is infinite
    double seconds = 0.0;  // wall-clock since the driver started, excluding the true-error column
};

struct DriverResult {
    BlockVector x;
    std::vector<TraceRow> trace;
    bool converged = false;
    std::size_t iterations = 0;
};

inline double block_norm2(const BlockVector& v) {
    if (v.cols() == 1) return v.norm();
    return Eigen::JacobiSVD<Matrix>(v).singularValues()(0);
}

namespace detail {

inline PoleSequence nested_poles(Strategy s, const SpectralInterval& wi, std::size_t count,
                                 const PoleSequence& custom) {
    switch (s) {
    case Strategy::eds_laplace: return eds_poles(wi, count, EdsVariant::laplace);
    case Strategy::eds_cauchy: return eds_poles(wi, count, EdsVariant::cauchy);
    case Strategy::extended: return extended_poles(count);
    case Strategy::polynomial: return polynomial_poles(count);
    case Strategy::custom:
        require(!custom.empty(), "custom strategy needs a non-empty pole list");
        return custom.prefix(count);
    default: break;
    }
    throw DomainError("nested_poles: strategy is not nested");
}

}  // namespace detail

/// Runs the projection for growing l and stops when the relative lag-2
/// iterate difference |x_l - x_{l-2}| / |x_l| drops to tol (or on the true
/// error, or never, per options.stop). With shift eta in f, the work is done
/// on A - eta I over interval.shifted(eta), where f(z) = base(z + eta).
/// Without convergence the last iterate is returned with converged = false.
inline DriverResult funv_driver(const HermitianOperator& op, const BlockVector& v, const StieltjesFunction& f,
                                Strategy strategy, const SpectralInterval& interval,
                                const DriverOptions& opt = {}) {
    detail::require(opt.maxiter >= 1, "funv_driver: maxiter must be at least 1");
    if (opt.stop == StopRule::true_error && !opt.reference)
        throw DomainError("funv_driver: stopping on the true error needs a reference solution");
    const double eta = f.shift();
    std::optional<HermitianOperator> shifted_op;
    if (eta != 0.0) shifted_op = op.shifted(eta);
    const HermitianOperator& work = shifted_op ? *shifted_op : op;
    const SpectralInterval wi = interval.shifted(eta);
    const double vnorm = block_norm2(v);
    const double ref_norm = opt.reference ? opt.reference->norm() : 0.0;

    DriverResult out;
    const auto start = std::chrono::steady_clock::now();
    double excluded = 0.0;
    std::deque<BlockVector> history;
    const std::size_t stride = std::max<std::size_t>(opt.fixed_stride, 1);
    const std::size_t lag = is_nested(strategy) ? 2 : std::max<std::size_t>(1, (2 + stride - 1) / stride);

    auto record = [&](std::size_t ell, Index dim, BlockVector x) {
        const double xn = x.norm();
        double est = kInf;
        if (history.size() >= lag) est = (x - history[history.size() - lag]).norm() / (xn > 0.0 ? xn : 1.0);
        TraceRow row{ell, dim, est, std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN(), kInf};
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() - excluded;
        const auto t0 = std::chrono::steady_clock::now();
        if (opt.reference) {
            row.true_error = (*opt.reference - x).norm();
            row.rel_true_error = row.true_error / (ref_norm > 0.0 ? ref_norm : 1.0);
        }
        const double anchor = f.is_cauchy() ? bound_anchor(f, Anchor::at_a, wi) : f.at_zero_plus();
        if (std::isfinite(anchor)) row.bound = bounds::for_class_1d(f, wi, ell, vnorm, opt.conjectured_gamma);
        excluded += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.trace.push_back(row);
        history.push_back(x);
        if (history.size() > lag + 1) history.pop_front();
        out.x = std::move(x);
        out.iterations = ell;
        switch (opt.stop) {
        case StopRule::estimator: return est <= opt.tol;
        case StopRule::true_error: return row.rel_true_error <= opt.tol;
        case StopRule::never: return false;
        }
        return false;
    };

    if (is_nested(strategy)) {
        const PoleSequence seq = detail::nested_poles(strategy, wi, opt.maxiter, opt.custom);
        RKDecomposition d = rk_build(work, v, seq.prefix(1));
        for (std::size_t ell = 1; ell <= seq.size(); ++ell) {
            if (record(ell, d.dim(), rk_funv(d, f))) {
                out.converged = true;
                break;
            }
            if (ell == seq.size()) break;
            if (d.flagged()) {
                // Invariant space: the projection is already exact.
                out.converged = true;
                break;
            }
            PoleSequence one = seq;
            one.poles.assign(1, seq.poles[ell]);
            d = rk_extend(work, std::move(d), one);
        }
        return out;
    }

    std::vector<std::size_t> checkpoints;
    for (std::size_t ell = stride; ell <= opt.maxiter; ell += stride) checkpoints.push_back(ell);
    if (checkpoints.empty() || checkpoints.back() != opt.maxiter) checkpoints.push_back(opt.maxiter);
    for (std::size_t ell : checkpoints) {
        const PoleSequence poles =
            strategy == Strategy::zolotarev ? zolotarev_poles(wi, ell) : cauchy_poles(wi, ell);
        const RKDecomposition d = rk_build(work, v, poles);
        if (record(ell, d.dim(), rk_funv(d, f))) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace ratkrylov
