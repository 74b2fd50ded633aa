#pragma once

#include "volgraph/data_ingest.hpp"
#include "volgraph/graph_build.hpp"
#include "volgraph/model_zoo.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace volgraph {

enum class OptimizerKind { Adam, GradientDescent };

struct TrainConfig {
    double learning_rate = 1e-3;
    int hidden_dim = 32;
    int heads = 4;
    int epochs = 70;
    int patience = 10;
    double min_delta = 1e-6;
    int window_w = 15;
    int horizon_h = 1;
    std::uint64_t seed = 0;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::size_t batch_size = 0;  // 0: full batch

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
};

struct TrainTrace {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int best_epoch = 0;  // 1-based; 0 before the first epoch
    double best_val_loss = 0.0;
    bool stopped_early = false;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

/// Called after every epoch with the model in its just-updated state.
using EpochObserver = std::function<void(const EpochRecord&, GraphModel&)>;

/// Adam with bias correction, or plain gradient descent.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(std::span<ad::Parameter* const> params);

private:
    OptimizerKind kind_;
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    long step_count_ = 0;
    std::vector<Eigen::ArrayXd> m_;
    std::vector<Eigen::ArrayXd> v_;
};

/// Mean squared error over every node of every sample.
double mse_loss(GraphModel& model, std::span<const Sample> samples);

/// Minimises MSE with early stopping and restores the best-validation parameters.
/// Throws NumericalError when the loss becomes non-finite.
TrainTrace train(GraphModel& model, std::span<const Sample> train_samples, std::span<const Sample> val_samples,
                 const TrainConfig& config, const EpochObserver& observer = {});

struct MetricRow {
    std::string ticker;
    int horizon = 0;
    double mafe = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double mape = 0.0;  // percent; +inf when mape_infinite
    bool mape_infinite = false;
};

struct MetricsReport {
    std::string model;
    std::string scenario = "full";
    std::vector<MetricRow> rows;

    [[nodiscard]] double mean_mafe() const;
    [[nodiscard]] double mean_mse() const;
    [[nodiscard]] const MetricRow& row(const std::string& ticker) const;
};

/// Per-row metrics of predictions against actuals, both N x S (node x sample).
MetricsReport compute_metrics(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& actuals,
                              const std::vector<std::string>& tickers, int horizon);

/// Predictions for each sample as an N x S matrix.
Eigen::MatrixXd predict_samples(GraphModel& model, std::span<const Sample> samples);

MetricsReport evaluate(GraphModel& model, std::span<const Sample> samples, const std::vector<std::string>& tickers,
                       int horizon);

/// Samples from every partition whose target date lies in [start, end]. Empty result is a DataError.
std::vector<Sample> scenario_slice(const WindowedDataset& dataset, const VolatilityPanel& panel, Date start, Date end);

// ---------------------------------------------------------------- experiments

/// Everything a run needs: the split rv panel plus optional alternative feature panels on the same dates.
struct ExperimentData {
    VolatilityPanel panel;
    std::optional<Eigen::MatrixXd> volume;     // log volume, N x T'
    std::optional<Eigen::MatrixXd> garch_vol;  // sqrt(h_t), N x T'
};

struct ExperimentSpec {
    ModelKind kind = ModelKind::Tgatm;
    FeatureKind features = FeatureKind::RealizedVolatility;
    TrainConfig config;
    SpilloverGraphOptions spillover;
};

struct ExperimentResult {
    ModelSpec spec;
    GraphModel model;
    WindowedDataset dataset;
    TrainTrace trace;
    MetricsReport test_report;
};

/// Graph the spec's model kind consumes, estimated on the training partition.
std::optional<MarketGraph> experiment_graph(const ExperimentData& data, const ExperimentSpec& spec);

/// Feature windows for the model kind and feature selection.
WindowedDataset experiment_dataset(const ExperimentData& data, const ExperimentSpec& spec);

/// Build graph and features, train, and evaluate on the test partition.
ExperimentResult run_experiment(const ExperimentData& data, const ExperimentSpec& spec,
                                const EpochObserver& observer = {});

/// Log returns, rv with window `window_m`, split, log volume when present, and GARCH
/// volatility features when `with_garch` is set.
ExperimentData make_experiment_data(const PricePanel& prices, int window_m, SplitFractions fractions = {},
                                    bool with_garch = false);

/// Copy of `data` with one ticker removed from every panel.
ExperimentData drop_ticker(const ExperimentData& data, const std::string& ticker);

struct HyperGrid {
    std::vector<double> learning_rates{1e-4, 1e-3, 1e-2};
    std::vector<int> hidden_dims{32, 64, 128};
    std::vector<int> heads{4, 8};

    [[nodiscard]] std::size_t size() const noexcept {
        return learning_rates.size() * hidden_dims.size() * heads.size();
    }
    /// Configurations in lr-major order; config k gets seed base.seed + k.
    [[nodiscard]] std::vector<TrainConfig> expand(const TrainConfig& base) const;
};

struct GridResult {
    std::size_t index = 0;
    TrainConfig config;
    double val_mse = 0.0;
    int best_epoch = 0;
    std::optional<std::string> error;  // set when the run failed; such runs rank last
};

/// Trains every grid point and ranks by best validation MSE, ascending.
std::vector<GridResult> grid_search(const ExperimentData& data, const ExperimentSpec& spec, const HyperGrid& grid,
                                    unsigned threads = 0);

/// Removes `ticker`, retrains with the spec's config and evaluates the remaining indices.
MetricsReport leave_one_out(const ExperimentData& data, const ExperimentSpec& spec, const std::string& ticker);

struct LeaveOneOutStudy {
    MetricsReport baseline;
    std::vector<std::string> excluded;
    std::vector<MetricsReport> reports;
    /// Mean over surviving indices of (MAFE without the ticker - baseline MAFE).
    std::vector<double> degradation;
};

LeaveOneOutStudy leave_one_out_study(const ExperimentData& data, const ExperimentSpec& spec, unsigned threads = 0);

/// One report per feature kind under an otherwise identical configuration.
std::vector<MetricsReport> node_feature_sweep(const ExperimentData& data, const ExperimentSpec& spec,
                                              std::span<const FeatureKind> kinds, unsigned threads = 0);

/// Runs `jobs` on up to `threads` workers (0: hardware concurrency); results keep job order.
template <typename R>
std::vector<R> parallel_map(const std::vector<std::function<R()>>& jobs, unsigned threads = 0);

namespace detail {
void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);
}

template <typename R>
std::vector<R> parallel_map(const std::vector<std::function<R()>>& jobs, unsigned threads) {
    std::vector<std::optional<R>> slots(jobs.size());
    detail::run_parallel(jobs.size(), threads, [&](std::size_t i) { slots[i].emplace(jobs[i]()); });
    std::vector<R> out;
    out.reserve(jobs.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace volgraph
