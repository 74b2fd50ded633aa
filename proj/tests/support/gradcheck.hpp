#pragma once

#include <volgraph/tensor.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>

namespace volgraph::testing {

/// Relative error used for gradient checks: |a - b| / max(|a|, |b|, floor).
///
/// Central differences at step 1e-5 carry roughly 1e-10 absolute error, so the floor keeps
/// near-zero gradient entries from turning that noise into a large ratio.
inline constexpr double kGradientFloor = 1e-6;

struct GradientCheck {
    double max_relative_error = 0.0;
    std::size_t entries = 0;
};

/// Compares reverse-mode gradients of the scalar built by `loss` with central differences.
inline GradientCheck check_gradients(const std::function<ad::Var(ad::Tape&)>& loss,
                                     std::span<ad::Parameter* const> params, double step = 1e-5,
                                     double floor = kGradientFloor) {
    for (auto* p : params) p->zero_grad();
    {
        ad::Tape tape;
        tape.backward(loss(tape));
    }
    auto value = [&] {
        ad::Tape tape;
        return loss(tape).value().item();
    };
    GradientCheck out;
    for (auto* p : params) {
        const ad::Tensor numeric = ad::finite_difference_gradient(value, *p, step);
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            const double a = p->grad[k];
            const double b = numeric[k];
            out.max_relative_error =
                std::max(out.max_relative_error, std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor}));
            ++out.entries;
        }
    }
    return out;
}

}  // namespace volgraph::testing
