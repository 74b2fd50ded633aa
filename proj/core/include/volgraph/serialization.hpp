#pragma once

#include "volgraph/data_ingest.hpp"
#include "volgraph/garch.hpp"
#include "volgraph/graph_build.hpp"
#include "volgraph/model_zoo.hpp"
#include "volgraph/training.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace volgraph {

/// Shortest decimal text that parses back to the same double ("inf"/"nan" for non-finite values).
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for batch use: the parent directory is created if missing.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a as 16 hex digits.
std::string content_hash(std::string_view text);

// ---------------------------------------------------------------- CSV

/// date,<ticker>... one row per date.
std::string volatility_panel_csv(const VolatilityPanel& panel);
/// Wide price layout with `<ticker>_volume` columns when volumes exist; loadable by load_price_csv.
std::string price_panel_csv(const PricePanel& panel);
/// First column holds the receiving ticker; entry (i, j) is the weight of j -> i.
std::string adjacency_csv(const std::vector<std::string>& tickers, const Eigen::MatrixXd& matrix);
/// model,scenario,ticker,horizon,mafe,mse,rmse,mape
std::string metrics_csv(std::span<const MetricsReport> reports);
/// epoch,train_loss,val_loss
std::string trace_csv(const TrainTrace& trace);
/// rank,index,learning_rate,hidden_dim,heads,seed,val_mse,best_epoch,error
std::string grid_csv(std::span<const GridResult> results);

// ---------------------------------------------------------------- JSON

std::string stats_json(const std::vector<std::string>& tickers, std::span<const SeriesStats> stats);
std::string garch_fit_json(const std::string& ticker, const GarchFit& fit);
/// Nodes and directed weighted edges (source -> target) without self-loops.
std::string graph_plot_json(const MarketGraph& graph, const std::string& partition);
std::string heatmap_json(const std::vector<std::string>& tickers, const Eigen::MatrixXd& matrix, double total_index);
std::string metrics_json(std::span<const MetricsReport> reports);

std::string model_spec_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(std::string_view text);

/// Versioned parameter file: names, shapes and row-major values.
std::string parameters_json(std::span<const ad::Parameter* const> params);
/// Loads values into `params`; names and shapes must match exactly.
void load_parameters_json(std::string_view text, std::span<ad::Parameter* const> params);

/// Spec, graph operators and parameters in one document.
std::string checkpoint_json(const GraphModel& model);
GraphModel model_from_checkpoint_json(std::string_view text);

}  // namespace volgraph
