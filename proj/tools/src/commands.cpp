#include "volgraph_cli/commands.hpp"

#include <volgraph/error.hpp>
#include <volgraph/serialization.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <ostream>

#ifndef VOLGRAPH_VERSION
#define VOLGRAPH_VERSION "unknown"
#endif

namespace volgraph::cli {

using nlohmann::json;

namespace {

class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, std::string_view content) {
        write_text_file(dir_ / name, content);
        files_.push_back(name);
    }
    [[nodiscard]] const std::vector<std::string>& files() const noexcept { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

ExperimentData load_data(const RunConfig& c, bool with_garch) {
    const PricePanel prices = load_price_csv(c.prices, c.schema);
    return make_experiment_data(prices, c.rv_window, c.split, with_garch);
}

ExperimentSpec experiment_spec(const RunConfig& c) {
    ExperimentSpec spec;
    spec.kind = c.model;
    spec.features = c.features;
    spec.config = c.train;
    spec.config.seed = c.seed;
    spec.spillover = c.spillover;
    return spec;
}

json range_json(const IndexRange& r, const VolatilityPanel& panel) {
    json j = {{"begin", r.begin}, {"end", r.end}};
    if (r.size() > 0) {
        j["first_date"] = format_date(panel.dates[r.begin]);
        j["last_date"] = format_date(panel.dates[r.end - 1]);
    }
    return j;
}

void cmd_ingest(const RunConfig& c, ArtifactWriter& w) {
    const ExperimentData data = load_data(c, false);
    const auto& panel = data.panel;
    w.write("rv_panel.csv", volatility_panel_csv(panel));
    w.write("stats.json", stats_json(panel.tickers, panel_stats(panel)));
    const json split = {{"window_m", panel.window_m},
                        {"length", panel.length()},
                        {"train", range_json(panel.split->train, panel)},
                        {"validation", range_json(panel.split->validation, panel)},
                        {"test", range_json(panel.split->test, panel)}};
    w.write("split.json", split.dump(2) + "\n");
}

void cmd_graph(const RunConfig& c, ArtifactWriter& w) {
    const ExperimentData data = load_data(c, false);
    const auto& panel = data.panel;
    IndexRange range{0, panel.length()};
    switch (c.graph_partition) {
        case Partition::Train: range = panel.split->train; break;
        case Partition::Validation: range = panel.split->validation; break;
        case Partition::Test: range = panel.split->test; break;
        case Partition::All: break;
    }
    const Eigen::MatrixXd block =
        panel.rv.middleCols(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size()));
    const MarketGraph graph = build_graph_on(block, panel.tickers, c.graph_method, c.spillover);
    w.write("adjacency.csv", adjacency_csv(graph.tickers, graph.adjacency));
    w.write("graph.json", graph_plot_json(graph, to_string(c.graph_partition)));
    if (c.graph_method == GraphMethod::Spillover) {
        // Rows are percentages summing to 100, so the off-diagonal mass over N is the total index.
        const double n = static_cast<double>(graph.size());
        const double total = (graph.adjacency.sum() - graph.adjacency.trace()) / n;
        w.write("heatmap.json", heatmap_json(graph.tickers, graph.adjacency, total));
    } else {
        const Eigen::VectorXd nci = net_correlation_index(graph);
        json j = {{"tickers", graph.tickers}, {"nci", std::vector<double>(nci.data(), nci.data() + nci.size())}};
        w.write("nci.json", j.dump(2) + "\n");
    }
}

void write_reports(const std::vector<MetricsReport>& reports, ArtifactWriter& w) {
    w.write("metrics.csv", metrics_csv(reports));
    w.write("metrics.json", metrics_json(reports));
}

void cmd_train(const RunConfig& c, ArtifactWriter& w) {
    const ExperimentData data = load_data(c, c.model == ModelKind::GarchTgatm);
    ExperimentResult result = run_experiment(data, experiment_spec(c));
    w.write("checkpoint.json", checkpoint_json(result.model));
    w.write("trace.csv", trace_csv(result.trace));
    write_reports(evaluation_reports(result.model, data, result.dataset, c), w);
}

void cmd_evaluate(const RunConfig& c, ArtifactWriter& w) {
    GraphModel model = model_from_checkpoint_json(read_text_file(*c.checkpoint));
    ExperimentSpec spec = experiment_spec(c);
    spec.kind = model.spec().kind;
    spec.config.window_w = model.spec().input_dim;
    spec.config.hidden_dim = model.spec().hidden_dim;
    spec.config.heads = model.spec().heads;
    const ExperimentData data = load_data(c, spec.kind == ModelKind::GarchTgatm);
    if (data.panel.tickers.size() != static_cast<std::size_t>(model.graph() ? model.graph()->support.rows()
                                                                              : data.panel.tickers.size())) {
        throw DataError("checkpoint graph size does not match the number of tickers in the data");
    }
    const WindowedDataset ds = experiment_dataset(data, spec);
    write_reports(evaluation_reports(model, data, ds, c), w);
}

void cmd_gridsearch(const RunConfig& c, ArtifactWriter& w) {
    const ExperimentData data = load_data(c, c.model == ModelKind::GarchTgatm);
    w.write("grid.csv", grid_csv(grid_search(data, experiment_spec(c), c.grid, c.threads)));
}

void cmd_ablate(const RunConfig& c, ArtifactWriter& w) {
    const ExperimentData data = load_data(c, false);
    const ExperimentSpec spec = experiment_spec(c);
    const std::vector<std::string> excluded = c.leave_out.empty() ? data.panel.tickers : c.leave_out;
    for (const auto& t : excluded) {
        if (std::find(data.panel.tickers.begin(), data.panel.tickers.end(), t) == data.panel.tickers.end()) {
            throw ConfigError("ablation.leave_out names unknown ticker '" + t + "'");
        }
    }
    std::vector<std::function<MetricsReport()>> jobs;
    jobs.emplace_back([&] { return run_experiment(data, spec).test_report; });
    for (const auto& t : excluded) jobs.emplace_back([&, t] { return leave_one_out(data, spec, t); });
    std::vector<MetricsReport> reports = parallel_map(jobs, c.threads);
    reports.front().scenario = "baseline";

    std::string degradation = "excluded,mean_mafe_delta\n";
    for (std::size_t k = 0; k < excluded.size(); ++k) {
        const MetricsReport& r = reports[k + 1];
        double delta = 0.0;
        for (const auto& row : r.rows) delta += row.mafe - reports.front().row(row.ticker).mafe;
        degradation += excluded[k] + "," + format_double(delta / static_cast<double>(r.rows.size())) + "\n";
    }
    w.write("leave_one_out.csv", metrics_csv(reports));
    w.write("leave_one_out_degradation.csv", degradation);
    w.write("feature_sweep.csv", metrics_csv(node_feature_sweep(data, spec, c.sweep_features, c.threads)));
}

void cmd_synthetic(const RunConfig& c, ArtifactWriter& w) {
    SyntheticConfig s = c.synthetic;
    s.seed = c.seed;
    const SyntheticPanel panel = generate_synthetic(s);
    w.write("prices.csv", price_panel_csv(panel.prices));
    VolatilityPanel vol;
    vol.dates = panel.prices.dates;
    vol.tickers = panel.prices.tickers;
    vol.rv = panel.variance.cwiseSqrt();
    w.write("true_volatility.csv", volatility_panel_csv(vol));
    json edges = json::array();
    for (std::size_t i = 0; i < s.nodes; ++i) {
        if (i != s.hub) {
            edges.push_back({{"source", vol.tickers[s.hub]}, {"target", vol.tickers[i]}, {"lag", s.spillover_lag},
                             {"weight", s.spillover_weight}});
        }
    }
    const json truth = {{"hub", vol.tickers[s.hub]}, {"edges", edges}};
    w.write("truth.json", truth.dump(2) + "\n");
}

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Data: return "data";
        case ErrorKind::Numerical: return "numerical";
    }
    return "unknown";
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Data: return 3;
        case ErrorKind::Numerical: return 4;
    }
    return 1;
}

int report_error(std::ostream& err, const std::string& kind, int code, const std::string& message) {
    const json j = {{"status", "error"}, {"kind", kind}, {"exit_code", code}, {"message", message}};
    err << j.dump() << '\n';
    return code;
}

}  // namespace

std::vector<MetricsReport> evaluation_reports(GraphModel& model, const ExperimentData& data,
                                              const WindowedDataset& dataset, const RunConfig& config) {
    const auto& tickers = data.panel.tickers;
    const int horizon = dataset.horizon;
    std::vector<MetricsReport> reports;
    reports.push_back(evaluate(model, dataset.test, tickers, horizon));
    reports.back().scenario = "test";
    for (const auto& s : config.scenarios) {
        reports.push_back(evaluate(model, scenario_slice(dataset, data.panel, s.start, s.end), tickers, horizon));
        reports.back().scenario = s.name;
    }
    return reports;
}

std::filesystem::path run_directory(const std::string& command, const RunConfig& config) {
    return config.out / (command + "-" + content_hash(command + "\n" + canonical_json(config)));
}

RunOutput execute(const std::string& command, const RunConfig& config) {
    config.validate(command);
    const std::filesystem::path dir = run_directory(command, config);
    ArtifactWriter writer(dir);
    const std::string canonical = canonical_json(config);
    writer.write("config.json", canonical + "\n");

    if (command == "ingest") cmd_ingest(config, writer);
    else if (command == "graph") cmd_graph(config, writer);
    else if (command == "train") cmd_train(config, writer);
    else if (command == "evaluate") cmd_evaluate(config, writer);
    else if (command == "gridsearch") cmd_gridsearch(config, writer);
    else if (command == "ablate") cmd_ablate(config, writer);
    else if (command == "synthetic") cmd_synthetic(config, writer);

    const json manifest = {
        {"command", command},
        {"config_hash", content_hash(command + "\n" + canonical)},
        {"seed", config.seed},
        {"config", json::parse(canonical)},
        {"files", writer.files()},
        {"versions",
         {{"volgraph", VOLGRAPH_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__},
          {"cplusplus", __cplusplus}}},
    };
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    RunOutput out{dir, writer.files()};
    out.files.push_back("manifest.json");
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Market-graph volatility forecasting pipeline"};
    app.name("volgraph");
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> data_path, out_dir, checkpoint, graph_method, partition, model;
    std::optional<std::uint64_t> seed;
    std::optional<int> window, horizon, epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> learning_rate;
    std::optional<unsigned> threads;
    bool sigma_as_stddev = false;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--data", data_path, "Price CSV (overrides data.prices)");
    app.add_option("--out", out_dir, "Output root; each run gets <out>/<command>-<hash>");
    app.add_option("--seed", seed, "Seed for initialisation, shuffling and synthetic data");
    app.add_option("--checkpoint", checkpoint, "Checkpoint for evaluate");
    app.add_option("--graph-method", graph_method)->check(CLI::IsMember({"correlation", "spillover"}));
    app.add_option("--partition", partition, "Partition for graph")
        ->check(CLI::IsMember({"train", "validation", "test", "all"}));
    app.add_option("--model", model)->check(CLI::IsMember({"tgatm", "bm", "gnn-gatm", "garch-tgatm", "c-tgatm"}));
    app.add_option("--window", window)->check(CLI::IsMember({5, 15, 21, 40}));
    app.add_option("--horizon", horizon)->check(CLI::IsMember({1, 5, 10, 22}));
    app.add_option("--epochs", epochs);
    app.add_option("--batch-size", batch_size, "Mini-batch size (0: full batch)");
    app.add_option("--learning-rate", learning_rate);
    app.add_option("--threads", threads, "Worker threads for gridsearch/ablate (0: all cores)");
    app.add_flag("--sigma-as-stddev", sigma_as_stddev, "Use sqrt(Sigma_jj) in the spillover decomposition");

    const std::vector<std::pair<const char*, const char*>> commands{
        {"ingest", "Realized volatility panel, split and descriptive statistics"},
        {"graph", "Adjacency and plot data for one graph method and partition"},
        {"train", "Train one model; writes checkpoint, trace and test metrics"},
        {"gridsearch", "Rank every hyperparameter grid configuration by validation MSE"},
        {"evaluate", "Metrics of a checkpoint on the test partition and scenarios"},
        {"ablate", "Leave-one-out and node-feature sweeps"},
        {"synthetic", "Planted hub-and-spoke spillover dataset"},
    };
    for (const auto& [name, description] : commands) app.add_subcommand(name, description);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "config", 2, e.what());
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        RunConfig config;
        if (!config_path.empty()) {
            std::string text;
            try {
                text = read_text_file(config_path);
            } catch (const std::exception& e) {
                throw ConfigError("cannot read config file " + config_path + ": " + e.what());
            }
            config = parse_run_config(text);
        }
        if (data_path) config.prices = *data_path;
        if (out_dir) config.out = *out_dir;
        if (seed) config.seed = *seed;
        if (checkpoint) config.checkpoint = *checkpoint;
        if (graph_method) config.graph_method = graph_method_from_string(*graph_method);
        if (partition) config.graph_partition = partition_from_string(*partition);
        if (model) config.model = model_kind_from_string(*model);
        if (window) config.train.window_w = *window;
        if (horizon) config.train.horizon_h = *horizon;
        if (epochs) config.train.epochs = *epochs;
        if (batch_size) config.train.batch_size = *batch_size;
        if (learning_rate) config.train.learning_rate = *learning_rate;
        if (threads) config.threads = *threads;
        if (sigma_as_stddev) config.spillover.convention = SigmaConvention::StdDev;

        const RunOutput result = execute(command, config);
        const json summary = {{"status", "ok"},
                              {"command", command},
                              {"run_dir", result.run_dir.generic_string()},
                              {"files", result.files}};
        out << summary.dump() << '\n';
        return 0;
    } catch (const Error& e) {
        return report_error(err, kind_name(e.kind()), exit_code(e.kind()), e.what());
    } catch (const std::invalid_argument& e) {
        return report_error(err, "config", 2, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return report_error(err, "data", 3, e.what());
    } catch (const std::exception& e) {
        return report_error(err, "internal", 1, e.what());
    }
}

}  // namespace volgraph::cli
