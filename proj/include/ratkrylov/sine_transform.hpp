#pragma once

/// \file sine_transform.hpp
/// Orthonormal DST-I, S_{ik} = sqrt(2/(n+1)) sin(i k pi / (n+1)), which
/// diagonalizes every constant-coefficient symmetric tridiagonal matrix.
/// S is symmetric and orthogonal, so it is its own inverse.

#include <ratkrylov/core.hpp>

#include <memory>

namespace ratkrylov {

class SineTransform {
public:
    explicit SineTransform(Index n);
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;
    ~SineTransform();

    Index size() const { return n_; }

    /// Not reentrant on one instance; separate instances may run concurrently.
    Vector apply(const Eigen::Ref<const Vector>& x) const;

private:
    struct Plan;
    Index n_;
    std::unique_ptr<Plan> plan_;
};

}  // namespace ratkrylov
