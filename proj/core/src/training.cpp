#include "volgraph/training.hpp"

#include "volgraph/error.hpp"
#include "volgraph/garch.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace volgraph {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
    if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
    if (heads < 1) throw ConfigError("heads must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (patience < 0) throw ConfigError("patience must be >= 0");
    if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be >= 0");
    if (window_w < 1) throw ConfigError("window must be >= 1");
    if (horizon_h < 1) throw ConfigError("horizon must be >= 1");
}

// ---------------------------------------------------------------- optimizer

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double beta1, double beta2, double eps)
    : kind_(kind), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Optimizer::step(std::span<ad::Parameter* const> params) {
    ++step_count_;
    if (m_.empty()) {
        for (const auto* p : params) {
            m_.push_back(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(p->value.size())));
            v_.push_back(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(p->value.size())));
        }
    }
    if (m_.size() != params.size()) throw std::invalid_argument("optimizer reused with a different parameter set");
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        ad::Parameter& p = *params[k];
        if (!p.trainable) continue;
        const auto n = static_cast<Eigen::Index>(p.value.size());
        Eigen::Map<Eigen::ArrayXd> value(p.value.data(), n);
        Eigen::Map<const Eigen::ArrayXd> grad(p.grad.data(), n);
        if (kind_ == OptimizerKind::GradientDescent) {
            value -= lr_ * grad;
            continue;
        }
        m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad;
        v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad.square();
        value -= lr_ * (m_[k] / c1) / ((v_[k] / c2).sqrt() + eps_);
    }
}

// ---------------------------------------------------------------- training

namespace {

ad::Var squared_error(ad::Tape& tape, GraphModel& model, const ad::Tensor& x, const ad::Tensor& y) {
    ad::Var pred = model.forward(tape, x);
    return ad::mean(ad::square(ad::sub(pred, tape.constant(y))));
}

struct Stacked {
    ad::Tensor x;
    ad::Tensor y;
};

Stacked stack(std::span<const Sample> samples) { return {stack_features(samples), stack_targets(samples)}; }

double loss_value(GraphModel& model, const Stacked& s) {
    ad::Tape tape;
    return squared_error(tape, model, s.x, s.y).value().item();
}

std::vector<ad::Tensor> snapshot(GraphModel& model) {
    std::vector<ad::Tensor> out;
    for (const auto* p : model.parameters()) out.push_back(p->value);
    return out;
}

void restore(GraphModel& model, const std::vector<ad::Tensor>& values) {
    auto params = model.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = values[k];
}

}  // namespace

double mse_loss(GraphModel& model, std::span<const Sample> samples) { return loss_value(model, stack(samples)); }

TrainTrace train(GraphModel& model, std::span<const Sample> train_samples, std::span<const Sample> val_samples,
                 const TrainConfig& config, const EpochObserver& observer) {
    config.validate();
    if (train_samples.empty()) throw DataError("no training samples");
    if (val_samples.empty()) throw DataError("no validation samples");

    const Stacked val = stack(val_samples);
    const std::size_t count = train_samples.size();
    const std::size_t batch = config.batch_size == 0 ? count : std::min(config.batch_size, count);
    std::vector<Stacked> fixed_batches;
    if (batch == count) fixed_batches.push_back(stack(train_samples));

    std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto params = model.parameters();
    Optimizer opt(config.optimizer, config.learning_rate);
    TrainTrace trace;
    trace.best_val_loss = std::numeric_limits<double>::infinity();
    std::vector<ad::Tensor> best = snapshot(model);
    int wait = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        try {
            std::vector<Stacked> shuffled;
            const std::vector<Stacked>* batches = &fixed_batches;
            if (batch != count) {
                std::shuffle(order.begin(), order.end(), shuffle_rng);
                for (std::size_t start = 0; start < count; start += batch) {
                    std::vector<Sample> chunk;
                    for (std::size_t k = start; k < std::min(start + batch, count); ++k) {
                        chunk.push_back(train_samples[order[k]]);
                    }
                    shuffled.push_back(stack(chunk));
                }
                batches = &shuffled;
            }
            for (const auto& b : *batches) {
                for (auto* p : params) p->zero_grad();
                ad::Tape tape;
                ad::Var loss = squared_error(tape, model, b.x, b.y);
                tape.backward(loss);
                opt.step(params);
                epoch_loss += loss.value().item() * static_cast<double>(b.y.size());
            }
            epoch_loss /= static_cast<double>(count * train_samples.front().target.size());
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "training diverged at epoch " << epoch << " with learning rate " << config.learning_rate
               << " (try a smaller one): " << e.what();
            throw NumericalError(os.str());
        }
        double val_loss = 0.0;
        try {
            val_loss = loss_value(model, val);
        } catch (const NumericalError& e) {
            throw NumericalError("validation loss non-finite at epoch " + std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(epoch_loss) || !std::isfinite(val_loss)) {
            throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + " with learning rate " +
                                 std::to_string(config.learning_rate));
        }
        trace.train_loss.push_back(epoch_loss);
        trace.val_loss.push_back(val_loss);
        if (val_loss < trace.best_val_loss - config.min_delta) {
            trace.best_val_loss = val_loss;
            trace.best_epoch = epoch;
            best = snapshot(model);
            wait = 0;
        } else {
            ++wait;
        }
        if (observer) observer({epoch, epoch_loss, val_loss}, model);
        if (wait >= config.patience && epoch < config.epochs) {
            trace.stopped_early = true;
            break;
        }
    }
    restore(model, best);
    return trace;
}

// ---------------------------------------------------------------- metrics

double MetricsReport::mean_mafe() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.mafe;
    return s / static_cast<double>(rows.size());
}

double MetricsReport::mean_mse() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.mse;
    return s / static_cast<double>(rows.size());
}

const MetricRow& MetricsReport::row(const std::string& ticker) const {
    for (const auto& r : rows) {
        if (r.ticker == ticker) return r;
    }
    throw std::invalid_argument("no metrics row for ticker '" + ticker + "'");
}

MetricsReport compute_metrics(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& actuals,
                              const std::vector<std::string>& tickers, int horizon) {
    if (predictions.rows() != actuals.rows() || predictions.cols() != actuals.cols()) {
        throw std::invalid_argument("prediction and actual shapes differ");
    }
    if (static_cast<std::size_t>(actuals.rows()) != tickers.size()) {
        throw std::invalid_argument("ticker count does not match metric rows");
    }
    if (actuals.cols() == 0) throw DataError("no samples to evaluate");
    MetricsReport report;
    const auto s = static_cast<double>(actuals.cols());
    for (Eigen::Index i = 0; i < actuals.rows(); ++i) {
        const Eigen::ArrayXd err = (predictions.row(i) - actuals.row(i)).transpose().array();
        const Eigen::ArrayXd abs_actual = actuals.row(i).transpose().array().abs();
        MetricRow r;
        r.ticker = tickers[static_cast<std::size_t>(i)];
        r.horizon = horizon;
        r.mafe = err.abs().sum() / s;
        r.mse = err.square().sum() / s;
        r.rmse = std::sqrt(r.mse);
        r.mape_infinite = (abs_actual == 0.0).any();
        r.mape = r.mape_infinite ? std::numeric_limits<double>::infinity() : 100.0 * (err.abs() / abs_actual).sum() / s;
        report.rows.push_back(std::move(r));
    }
    return report;
}

Eigen::MatrixXd predict_samples(GraphModel& model, std::span<const Sample> samples) {
    const ad::Tensor pred = model.predict(stack_features(samples));
    const auto n = static_cast<Eigen::Index>(samples.front().target.size());
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(samples.size()));
    for (Eigen::Index b = 0; b < out.cols(); ++b) {
        for (Eigen::Index i = 0; i < n; ++i) out(i, b) = pred[static_cast<std::size_t>(b * n + i)];
    }
    return out;
}

MetricsReport evaluate(GraphModel& model, std::span<const Sample> samples, const std::vector<std::string>& tickers,
                       int horizon) {
    if (samples.empty()) throw DataError("no samples to evaluate");
    Eigen::MatrixXd actual(samples.front().target.size(), static_cast<Eigen::Index>(samples.size()));
    for (std::size_t b = 0; b < samples.size(); ++b) actual.col(static_cast<Eigen::Index>(b)) = samples[b].target;
    MetricsReport report = compute_metrics(predict_samples(model, samples), actual, tickers, horizon);
    report.model = to_string(model.spec().kind);
    return report;
}

std::vector<Sample> scenario_slice(const WindowedDataset& dataset, const VolatilityPanel& panel, Date start, Date end) {
    if (end < start) throw ConfigError("scenario end precedes its start");
    std::vector<Sample> out;
    for (const auto* part : {&dataset.train, &dataset.validation, &dataset.test}) {
        for (const auto& s : *part) {
            if (s.target_index >= panel.dates.size()) throw std::invalid_argument("sample target outside the panel");
            const Date d = panel.dates[s.target_index];
            if (d >= start && d <= end) out.push_back(s);
        }
    }
    if (out.empty()) {
        throw DataError("scenario " + format_date(start) + " .. " + format_date(end) + " contains no samples");
    }
    return out;
}

// ---------------------------------------------------------------- experiments

std::optional<MarketGraph> experiment_graph(const ExperimentData& data, const ExperimentSpec& spec) {
    const ModelSpec ms = ModelSpec::make(spec.kind, spec.config.window_w, spec.config.hidden_dim, spec.config.heads);
    switch (ms.graph_source) {
        case GraphSource::None: return std::nullopt;
        case GraphSource::Correlation: return build_graph(data.panel, GraphMethod::Correlation, spec.spillover);
        case GraphSource::Spillover: return build_graph(data.panel, GraphMethod::Spillover, spec.spillover);
    }
    return std::nullopt;
}

WindowedDataset experiment_dataset(const ExperimentData& data, const ExperimentSpec& spec) {
    FeatureKind kind = spec.kind == ModelKind::GarchTgatm ? FeatureKind::GarchVolatility : spec.features;
    const int w = spec.config.window_w;
    const int h = spec.config.horizon_h;
    switch (kind) {
        case FeatureKind::RealizedVolatility: return build_feature_windows(data.panel, w, h);
        case FeatureKind::Volume:
            if (!data.volume) throw DataError("volume features requested but no volume panel is loaded");
            return build_feature_windows(data.panel, *data.volume, kind, w, h);
        case FeatureKind::GarchVolatility:
            if (!data.garch_vol) throw DataError("GARCH volatility features requested but none were computed");
            return build_feature_windows(data.panel, *data.garch_vol, kind, w, h);
        case FeatureKind::Custom: break;
    }
    throw ConfigError("custom features cannot be selected by name");
}

ExperimentResult run_experiment(const ExperimentData& data, const ExperimentSpec& spec, const EpochObserver& observer) {
    spec.config.validate();
    const ModelSpec ms = ModelSpec::make(spec.kind, spec.config.window_w, spec.config.hidden_dim, spec.config.heads);
    ms.validate();
    auto graph = experiment_graph(data, spec);
    WindowedDataset ds = experiment_dataset(data, spec);
    std::optional<GraphOperators> ops;
    if (graph) ops = GraphOperators::from_graph(*graph);
    GraphModel model(ms, ops, spec.config.seed);
    TrainTrace trace = train(model, ds.train, ds.validation, spec.config, observer);
    MetricsReport report = evaluate(model, ds.test, data.panel.tickers, spec.config.horizon_h);
    return {ms, std::move(model), std::move(ds), std::move(trace), std::move(report)};
}

ExperimentData make_experiment_data(const PricePanel& prices, int window_m, SplitFractions fractions, bool with_garch) {
    const ReturnPanel returns = log_returns(prices);
    ExperimentData data;
    data.panel = split_series(realized_volatility(returns, window_m), fractions);
    if (prices.volume) data.volume = aligned_log_volume(prices, data.panel);
    if (with_garch) data.garch_vol = garch_volatility_features(returns, data.panel);
    return data;
}

ExperimentData drop_ticker(const ExperimentData& data, const std::string& ticker) {
    const auto& tickers = data.panel.tickers;
    const auto it = std::find(tickers.begin(), tickers.end(), ticker);
    if (it == tickers.end()) throw ConfigError("unknown ticker '" + ticker + "'");
    const auto drop = static_cast<Eigen::Index>(it - tickers.begin());
    auto remove_row = [drop](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd out(m.rows() - 1, m.cols());
        out.topRows(drop) = m.topRows(drop);
        out.bottomRows(m.rows() - drop - 1) = m.bottomRows(m.rows() - drop - 1);
        return out;
    };
    ExperimentData out = data;
    out.panel.tickers.erase(out.panel.tickers.begin() + drop);
    out.panel.rv = remove_row(data.panel.rv);
    if (data.volume) out.volume = remove_row(*data.volume);
    if (data.garch_vol) out.garch_vol = remove_row(*data.garch_vol);
    return out;
}

std::vector<TrainConfig> HyperGrid::expand(const TrainConfig& base) const {
    std::vector<TrainConfig> out;
    for (double lr : learning_rates) {
        for (int hidden : hidden_dims) {
            for (int h : heads) {
                TrainConfig c = base;
                c.learning_rate = lr;
                c.hidden_dim = hidden;
                c.heads = h;
                c.seed = base.seed + out.size();
                out.push_back(c);
            }
        }
    }
    return out;
}

std::vector<GridResult> grid_search(const ExperimentData& data, const ExperimentSpec& spec, const HyperGrid& grid,
                                    unsigned threads) {
    if (grid.size() == 0) throw ConfigError("hyperparameter grid is empty");
    const auto configs = grid.expand(spec.config);
    std::vector<std::function<GridResult()>> jobs;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        jobs.emplace_back([&, k] {
            GridResult r;
            r.index = k;
            r.config = configs[k];
            try {
                ExperimentSpec s = spec;
                s.config = configs[k];
                const ModelSpec ms = ModelSpec::make(s.kind, s.config.window_w, s.config.hidden_dim, s.config.heads);
                ms.validate();
                auto graph = experiment_graph(data, s);
                const WindowedDataset ds = experiment_dataset(data, s);
                std::optional<GraphOperators> ops;
                if (graph) ops = GraphOperators::from_graph(*graph);
                GraphModel model(ms, ops, s.config.seed);
                const TrainTrace trace = train(model, ds.train, ds.validation, s.config);
                r.val_mse = trace.best_val_loss;
                r.best_epoch = trace.best_epoch;
            } catch (const std::exception& e) {
                r.error = e.what();
                r.val_mse = std::numeric_limits<double>::infinity();
            }
            return r;
        });
    }
    auto results = parallel_map(jobs, threads);
    std::stable_sort(results.begin(), results.end(), [](const GridResult& a, const GridResult& b) {
        if (a.error.has_value() != b.error.has_value()) return !a.error.has_value();
        if (a.val_mse != b.val_mse) return a.val_mse < b.val_mse;
        return a.index < b.index;
    });
    return results;
}

MetricsReport leave_one_out(const ExperimentData& data, const ExperimentSpec& spec, const std::string& ticker) {
    if (data.panel.tickers.size() < 3) throw ConfigError("leave-one-out needs at least 3 indices");
    MetricsReport report = run_experiment(drop_ticker(data, ticker), spec).test_report;
    report.scenario = "without " + ticker;
    return report;
}

LeaveOneOutStudy leave_one_out_study(const ExperimentData& data, const ExperimentSpec& spec, unsigned threads) {
    if (data.panel.tickers.size() < 3) throw ConfigError("leave-one-out needs at least 3 indices");
    const auto& tickers = data.panel.tickers;
    std::vector<std::function<MetricsReport()>> jobs;
    jobs.emplace_back([&] { return run_experiment(data, spec).test_report; });
    for (const auto& t : tickers) {
        jobs.emplace_back([&, t] { return leave_one_out(data, spec, t); });
    }
    auto reports = parallel_map(jobs, threads);
    LeaveOneOutStudy study;
    study.baseline = std::move(reports.front());
    for (std::size_t k = 0; k < tickers.size(); ++k) {
        const MetricsReport& r = reports[k + 1];
        double delta = 0.0;
        for (const auto& row : r.rows) delta += row.mafe - study.baseline.row(row.ticker).mafe;
        study.excluded.push_back(tickers[k]);
        study.degradation.push_back(delta / static_cast<double>(r.rows.size()));
        study.reports.push_back(r);
    }
    return study;
}

std::vector<MetricsReport> node_feature_sweep(const ExperimentData& data, const ExperimentSpec& spec,
                                              std::span<const FeatureKind> kinds, unsigned threads) {
    if (kinds.empty()) throw ConfigError("feature sweep needs at least one feature kind");
    if (spec.kind == ModelKind::GarchTgatm) throw ConfigError("garch-tgatm has fixed inputs; sweep another model");
    for (FeatureKind k : kinds) {
        if (k == FeatureKind::Volume && !data.volume) throw DataError("volume sweep requested without a volume panel");
    }
    std::vector<std::function<MetricsReport()>> jobs;
    for (FeatureKind k : kinds) {
        jobs.emplace_back([&, k] {
            ExperimentSpec s = spec;
            s.features = k;
            MetricsReport r = run_experiment(data, s).test_report;
            r.scenario = "features=" + to_string(k);
            return r;
        });
    }
    return parallel_map(jobs, threads);
}

namespace detail {

void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = 0;
                {
                    std::lock_guard lock(mu);
                    if (next >= count || failure) return;
                    i = next++;
                }
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

}  // namespace volgraph
