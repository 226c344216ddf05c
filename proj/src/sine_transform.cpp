#include <ratkrylov/sine_transform.hpp>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace ratkrylov {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(double* p) const { fftw_free(p); }
};
using Buffer = std::unique_ptr<double, FftwFree>;

Buffer alloc(Index n) {
    return Buffer(static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<std::size_t>(std::max<Index>(n, 1)))));
}

}  // namespace

struct SineTransform::Plan {
    Buffer in;
    Buffer out;
    fftw_plan plan = nullptr;
};

SineTransform::SineTransform(Index n) : n_(n) {
    if (n < 1) throw DimensionError("SineTransform: order must be positive");
    plan_ = std::make_unique<Plan>();
    plan_->in = alloc(n);
    plan_->out = alloc(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_->plan = fftw_plan_r2r_1d(static_cast<int>(n), plan_->in.get(), plan_->out.get(), FFTW_RODFT00,
                                   FFTW_ESTIMATE);
    if (plan_->plan == nullptr) throw Error("SineTransform: FFTW planning failed");
}

SineTransform::~SineTransform() {
    if (!plan_ || plan_->plan == nullptr) return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_->plan);
}

Vector SineTransform::apply(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != n_) throw DimensionError("SineTransform: length mismatch");
    std::copy(x.data(), x.data() + n_, plan_->in.get());
    fftw_execute(plan_->plan);
    // RODFT00 computes 2 * sum_j x_j sin(pi (j+1)(k+1)/(n+1)).
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(n_ + 1));
    Vector y(n_);
    for (Index k = 0; k < n_; ++k) y(k) = scale * plan_->out.get()[k];
    return y;
}

}  // namespace ratkrylov
