#include "volgraph/graph_build.hpp"

#include "volgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volgraph {

std::string to_string(GraphMethod m) { return m == GraphMethod::Correlation ? "correlation" : "spillover"; }

GraphMethod graph_method_from_string(const std::string& s) {
    if (s == "correlation") return GraphMethod::Correlation;
    if (s == "spillover") return GraphMethod::Spillover;
    throw ConfigError("unknown graph method '" + s + "'");
}

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::RealizedVolatility: return "rv";
        case FeatureKind::Volume: return "volume";
        case FeatureKind::GarchVolatility: return "garch_vol";
        case FeatureKind::Custom: return "custom";
    }
    return "unknown";
}

MarketGraph correlation_adjacency(const Eigen::MatrixXd& rv_train, const std::vector<std::string>& tickers) {
    const Eigen::Index n = rv_train.rows();
    const Eigen::Index t = rv_train.cols();
    if (static_cast<std::size_t>(n) != tickers.size()) throw std::invalid_argument("ticker count does not match panel rows");
    if (t < 8) throw DataError("correlation graph needs at least 8 training observations");

    Eigen::MatrixXd centered = rv_train.colwise() - rv_train.rowwise().mean();
    Eigen::VectorXd sd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sd(i) = std::sqrt(centered.row(i).squaredNorm() / static_cast<double>(t - 1));
        if (!(sd(i) > 0.0)) throw NumericalError("zero-variance series for ticker '" + tickers[static_cast<std::size_t>(i)] + "'");
    }
    const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(t - 1);

    MarketGraph g;
    g.tickers = tickers;
    g.method = GraphMethod::Correlation;
    g.self_loops = true;
    g.adjacency.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            g.adjacency(i, j) = i == j ? 1.0 : std::clamp(cov(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
        }
    }
    // Enforce exact symmetry against rounding in the product.
    g.adjacency = 0.5 * (g.adjacency + g.adjacency.transpose()).eval();
    g.adjacency.diagonal().setOnes();
    return g;
}

Eigen::VectorXd net_correlation_index(const MarketGraph& graph) {
    if (graph.method != GraphMethod::Correlation) {
        throw std::invalid_argument("net correlation index requires a correlation graph");
    }
    return graph.adjacency.rowwise().sum() - graph.adjacency.diagonal();
}

MarketGraph spillover_adjacency(const SpilloverDecomposition& decomp, const std::vector<std::string>& tickers) {
    if (static_cast<std::size_t>(decomp.theta_normalized.rows()) != tickers.size()) {
        throw std::invalid_argument("ticker count does not match decomposition size");
    }
    MarketGraph g;
    g.tickers = tickers;
    g.method = GraphMethod::Spillover;
    g.self_loops = true;
    g.adjacency = pairwise_spillover_matrix(decomp, true);
    return g;
}

Eigen::MatrixXd gcn_normalize(const MarketGraph& graph) {
    const Eigen::Index n = graph.size();
    if (!graph.adjacency.allFinite()) throw std::invalid_argument("adjacency has non-finite entries");
    const Eigen::MatrixXd a = graph.adjacency + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double deg = a.row(i).cwiseAbs().sum();
        if (!(deg > 0.0)) throw NumericalError("zero degree for node " + std::to_string(i) + " after adding self-loops");
        inv_sqrt(i) = 1.0 / std::sqrt(deg);
    }
    return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

Eigen::MatrixXd attention_support(const MarketGraph& graph) {
    Eigen::MatrixXd mask = (graph.adjacency.array() != 0.0).cast<double>();
    mask.diagonal().setOnes();
    return mask;
}

MarketGraph build_graph_on(const Eigen::MatrixXd& block, const std::vector<std::string>& tickers, GraphMethod method,
                           const SpilloverGraphOptions& options) {
    if (method == GraphMethod::Correlation) return correlation_adjacency(block, tickers);
    const auto var = fit_var(block, options.var_lag);
    const auto decomp = gfevd(var, options.horizon, options.convention);
    return spillover_adjacency(decomp, tickers);
}

MarketGraph build_graph(const VolatilityPanel& panel, GraphMethod method, const SpilloverGraphOptions& options) {
    return build_graph_on(panel.train_block(), panel.tickers, method, options);
}

std::vector<Sample> WindowedDataset::all() const {
    std::vector<Sample> out;
    out.reserve(train.size() + validation.size() + test.size());
    out.insert(out.end(), train.begin(), train.end());
    out.insert(out.end(), validation.begin(), validation.end());
    out.insert(out.end(), test.begin(), test.end());
    return out;
}

WindowedDataset build_feature_windows(const VolatilityPanel& panel, const Eigen::MatrixXd& values, FeatureKind kind,
                                      int window_w, int horizon_h) {
    if (!panel.split) throw std::invalid_argument("feature windows need a split volatility panel");
    if (window_w < 1 || horizon_h < 1) throw std::invalid_argument("window and horizon must be >= 1");
    if (values.rows() != panel.rv.rows() || values.cols() != panel.rv.cols()) {
        throw std::invalid_argument("feature panel shape does not match the volatility panel");
    }
    const auto w = static_cast<std::size_t>(window_w);
    const auto h = static_cast<std::size_t>(horizon_h);
    const Split& split = *panel.split;
    for (const IndexRange* part : {&split.train, &split.validation, &split.test}) {
        if (part->size() < w + h) {
            throw DataError("window " + std::to_string(window_w) + " + horizon " + std::to_string(horizon_h) +
                            " exceeds a partition of length " + std::to_string(part->size()));
        }
    }
    const Eigen::Index n = values.rows();

    // Standardisation from every feature entry of the training windows.
    Standardizer st;
    st.mean = Eigen::VectorXd::Zero(n);
    st.stddev = Eigen::VectorXd::Zero(n);
    {
        // Only columns inside the training range are read.
        const auto first = static_cast<Eigen::Index>(split.train.begin);
        const auto width = static_cast<Eigen::Index>(split.train.size());
        Eigen::VectorXd weight = Eigen::VectorXd::Zero(width);
        for (std::size_t t = split.train.begin + w - 1; t + h < split.train.end; ++t) {
            for (std::size_t k = t + 1 - w; k <= t; ++k) weight(static_cast<Eigen::Index>(k - split.train.begin)) += 1.0;
        }
        const double total = weight.sum();
        const Eigen::MatrixXd block = values.middleCols(first, width);
        st.mean = block * weight / total;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::ArrayXd d = block.row(i).transpose().array() - st.mean(i);
            const double var = (d.square() * weight.array()).sum() / total;
            if (!(var > 0.0)) throw NumericalError("constant training features for node " + std::to_string(i));
            st.stddev(i) = std::sqrt(var);
        }
    }

    WindowedDataset ds;
    ds.standardizer = st;
    ds.window = window_w;
    ds.horizon = horizon_h;
    ds.kind = kind;
    auto cut = [&](const IndexRange& part, std::vector<Sample>& out) {
        for (std::size_t t = part.begin + w - 1; t + h < part.end; ++t) {
            Sample s;
            s.time_index = t;
            s.target_index = t + h;
            const auto first = static_cast<Eigen::Index>(t + 1 - w);
            s.features = values.middleCols(first, window_w);
            s.features = (s.features.colwise() - st.mean).array().colwise() / st.stddev.array();
            s.target = panel.rv.col(static_cast<Eigen::Index>(t + h));
            out.push_back(std::move(s));
        }
    };
    cut(split.train, ds.train);
    cut(split.validation, ds.validation);
    cut(split.test, ds.test);
    return ds;
}

WindowedDataset build_feature_windows(const VolatilityPanel& panel, int window_w, int horizon_h) {
    return build_feature_windows(panel, panel.rv, FeatureKind::RealizedVolatility, window_w, horizon_h);
}

}  // namespace volgraph
