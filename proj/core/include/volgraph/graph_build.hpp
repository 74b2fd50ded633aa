#pragma once

#include "volgraph/data_ingest.hpp"
#include "volgraph/spillover.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace volgraph {

enum class GraphMethod { Correlation, Spillover };

std::string to_string(GraphMethod m);
GraphMethod graph_method_from_string(const std::string& s);

/// Directed weighted market graph; adjacency(i, j) is the weight of the edge j -> i.
struct MarketGraph {
    std::vector<std::string> tickers;
    Eigen::MatrixXd adjacency;
    GraphMethod method = GraphMethod::Correlation;
    bool self_loops = true;

    [[nodiscard]] Eigen::Index size() const noexcept { return adjacency.rows(); }
};

/// Pearson correlation of the rows of `rv_train` (N x T). Diagonal is exactly 1.
MarketGraph correlation_adjacency(const Eigen::MatrixXd& rv_train, const std::vector<std::string>& tickers);

/// NCI_i = sum of row i's off-diagonal correlations.
Eigen::VectorXd net_correlation_index(const MarketGraph& graph);

/// adjacency(i, j) = percent of i's forecast-error variance attributable to shocks in j.
MarketGraph spillover_adjacency(const SpilloverDecomposition& decomp, const std::vector<std::string>& tickers);

/// D^{-1/2} (A + I) D^{-1/2} with D_ii = sum_j |(A + I)_ij|.
Eigen::MatrixXd gcn_normalize(const MarketGraph& graph);

/// Neighbourhood mask used by attention: non-zero entries of A + I.
Eigen::MatrixXd attention_support(const MarketGraph& graph);

struct SpilloverGraphOptions {
    int var_lag = 4;
    int horizon = 5;
    SigmaConvention convention = SigmaConvention::Variance;
};

/// Graph estimated from the panel's training partition only.
MarketGraph build_graph(const VolatilityPanel& panel, GraphMethod method, const SpilloverGraphOptions& options = {});

/// Same as build_graph but on an arbitrary column range (for per-partition diagnostics).
MarketGraph build_graph_on(const Eigen::MatrixXd& block, const std::vector<std::string>& tickers, GraphMethod method,
                           const SpilloverGraphOptions& options = {});

enum class FeatureKind { RealizedVolatility, Volume, GarchVolatility, Custom };

std::string to_string(FeatureKind k);

/// One supervised example: standardised lookback windows and the rv target h steps later.
struct Sample {
    Eigen::MatrixXd features;  // N x w
    Eigen::VectorXd target;    // N
    std::size_t time_index = 0;    // last feature column (panel index)
    std::size_t target_index = 0;  // time_index + horizon
};

struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
};

struct WindowedDataset {
    std::vector<Sample> train;
    std::vector<Sample> validation;
    std::vector<Sample> test;
    Standardizer standardizer;
    int window = 0;
    int horizon = 0;
    FeatureKind kind = FeatureKind::RealizedVolatility;

    [[nodiscard]] std::vector<Sample> all() const;
};

/// Windows are cut inside each partition so no sample straddles a boundary.
/// Standardisation statistics come from the training samples' feature entries only.
WindowedDataset build_feature_windows(const VolatilityPanel& panel, const Eigen::MatrixXd& feature_values,
                                      FeatureKind kind, int window_w, int horizon_h);

/// rv features.
WindowedDataset build_feature_windows(const VolatilityPanel& panel, int window_w, int horizon_h);

}  // namespace volgraph
