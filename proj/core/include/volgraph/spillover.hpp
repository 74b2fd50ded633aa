#pragma once

#include <Eigen/Dense>

#include <vector>

namespace volgraph {

struct VarModel {
    int lag_p = 0;
    Eigen::VectorXd intercept;                  // N
    std::vector<Eigen::MatrixXd> coefficients;  // lag_p matrices, (i, j) = effect of y_j,t-k on y_i,t
    Eigen::MatrixXd residual_cov;               // N x N, ML scaling 1/(T-p)
    Eigen::MatrixXd residuals;                  // N x (T-p)
    double condition_number = 0.0;
    double spectral_radius = 0.0;               // of the companion matrix; >= 1 means unstable

    [[nodiscard]] Eigen::Index dim() const noexcept { return intercept.size(); }
    [[nodiscard]] bool stable() const noexcept { return spectral_radius < 1.0; }
};

/// How the sigma_jj scaling in the generalized FEVD numerator is read.
enum class SigmaConvention {
    Variance,  // sigma_jj = Sigma(j, j), the Pesaran-Shin form (default)
    StdDev,    // sigma_jj = sqrt(Sigma(j, j))
};

struct SpilloverDecomposition {
    int horizon_h = 0;
    Eigen::MatrixXd theta;             // raw generalized FEVD shares
    Eigen::MatrixXd theta_normalized;  // rows sum to 1
    double total_index = 0.0;          // percent
};

/// Equation-by-equation OLS with intercept on an N x T panel (rows are series).
VarModel fit_var(const Eigen::MatrixXd& panel, int lag_p);

/// Spectral radius of the VAR companion matrix built from `coefficients`.
double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& coefficients);

/// Wold moving-average matrices A_0 .. A_{horizon-1}.
std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int horizon);

SpilloverDecomposition gfevd(const VarModel& model, int horizon, SigmaConvention convention = SigmaConvention::Variance);

/// Entry (i, j): share of i's forecast-error variance due to shocks in j; percent when requested.
Eigen::MatrixXd pairwise_spillover_matrix(const SpilloverDecomposition& decomp, bool percent = true);

}  // namespace volgraph
