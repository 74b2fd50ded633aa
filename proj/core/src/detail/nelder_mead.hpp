#pragma once

#include <Eigen/Dense>

#include <functional>

namespace volgraph::detail {

struct NelderMeadOptions {
    int max_iterations = 2000;
    double f_tolerance = 1e-10;  // relative spread of simplex values
    double x_tolerance = 1e-8;   // simplex diameter
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Minimises `f` starting from `x0` with per-coordinate initial steps.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& steps, const NelderMeadOptions& options = {});

}  // namespace volgraph::detail
