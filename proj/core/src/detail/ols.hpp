#pragma once

#include "volgraph/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace volgraph::detail {

struct OlsResult {
    Eigen::MatrixXd coef;       // k x m
    Eigen::MatrixXd residuals;  // n x m
    Eigen::MatrixXd xtx_inv;    // k x k
    double condition_number = 0.0;
};

inline constexpr double kMaxConditionNumber = 1e12;

// Least squares for every column of y against design x, via SVD so that a
// near-singular design is reported instead of producing garbage.
inline OlsResult ols(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    const double smin = s.size() ? s(s.size() - 1) : 0.0;
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond < kMaxConditionNumber)) {
        throw NumericalError("singular regressor matrix (condition number " + std::to_string(cond) + ")");
    }
    OlsResult r;
    r.condition_number = cond;
    r.coef = svd.solve(y);
    r.residuals = y - x * r.coef;
    const Eigen::VectorXd inv_s2 = s.array().square().inverse();
    r.xtx_inv = svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose();
    return r;
}

}  // namespace volgraph::detail
