#include "volgraph_cli/run_config.hpp"

#include <volgraph/error.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

namespace volgraph::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + (where == "config" ? key : where + "." + key) + "'");
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
    if (const auto it = obj.find(key); it != obj.end()) target = it->get<T>();
}

Date read_date(const json& value, const std::string& where) {
    const auto d = parse_date(value.get<std::string>());
    if (!d) throw ConfigError(where + ": expected a YYYY-MM-DD date");
    return *d;
}

CsvLayout layout_from_string(const std::string& s) {
    if (s == "wide") return CsvLayout::Wide;
    if (s == "long") return CsvLayout::Long;
    throw ConfigError("unknown data layout '" + s + "' (wide or long)");
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "adam") return OptimizerKind::Adam;
    if (s == "gd") return OptimizerKind::GradientDescent;
    throw ConfigError("unknown optimizer '" + s + "' (adam or gd)");
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "gd"; }

void parse_data(const json& j, RunConfig& c) {
    reject_unknown(j, "data", {"prices", "layout", "tickers", "date_column", "volume_suffix", "ticker_column",
                               "close_column", "volume_column"});
    if (const auto it = j.find("prices"); it != j.end()) c.prices = it->get<std::string>();
    if (const auto it = j.find("layout"); it != j.end()) c.schema.layout = layout_from_string(it->get<std::string>());
    read(j, "tickers", c.schema.tickers);
    read(j, "date_column", c.schema.date_column);
    read(j, "volume_suffix", c.schema.volume_suffix);
    read(j, "ticker_column", c.schema.ticker_column);
    read(j, "close_column", c.schema.close_column);
    read(j, "volume_column", c.schema.volume_column);
}

void parse_graph(const json& j, RunConfig& c) {
    reject_unknown(j, "graph", {"method", "partition", "var_lag", "horizon", "sigma_as_stddev"});
    if (const auto it = j.find("method"); it != j.end()) c.graph_method = graph_method_from_string(it->get<std::string>());
    if (const auto it = j.find("partition"); it != j.end()) c.graph_partition = partition_from_string(it->get<std::string>());
    read(j, "var_lag", c.spillover.var_lag);
    read(j, "horizon", c.spillover.horizon);
    if (const auto it = j.find("sigma_as_stddev"); it != j.end()) {
        c.spillover.convention = it->get<bool>() ? SigmaConvention::StdDev : SigmaConvention::Variance;
    }
}

void parse_train(const json& j, TrainConfig& t) {
    reject_unknown(j, "train", {"learning_rate", "hidden_dim", "heads", "epochs", "patience", "min_delta", "window",
                                "horizon", "batch_size", "optimizer"});
    read(j, "learning_rate", t.learning_rate);
    read(j, "hidden_dim", t.hidden_dim);
    read(j, "heads", t.heads);
    read(j, "epochs", t.epochs);
    read(j, "patience", t.patience);
    read(j, "min_delta", t.min_delta);
    read(j, "window", t.window_w);
    read(j, "horizon", t.horizon_h);
    read(j, "batch_size", t.batch_size);
    if (const auto it = j.find("optimizer"); it != j.end()) t.optimizer = optimizer_from_string(it->get<std::string>());
}

void parse_grid(const json& j, HyperGrid& g) {
    reject_unknown(j, "grid", {"learning_rates", "hidden_dims", "heads"});
    read(j, "learning_rates", g.learning_rates);
    read(j, "hidden_dims", g.hidden_dims);
    read(j, "heads", g.heads);
}

void parse_ablation(const json& j, RunConfig& c) {
    reject_unknown(j, "ablation", {"leave_out", "features"});
    read(j, "leave_out", c.leave_out);
    if (const auto it = j.find("features"); it != j.end()) {
        c.sweep_features.clear();
        for (const auto& f : *it) c.sweep_features.push_back(feature_kind_from_string(f.get<std::string>()));
    }
}

void parse_synthetic(const json& j, SyntheticConfig& s) {
    reject_unknown(j, "synthetic", {"nodes", "hub", "length", "daily_vol", "hub_alpha", "hub_beta", "leaf_alpha",
                                    "leaf_beta", "spillover_weight", "spillover_lag", "volume_level", "volume_sd",
                                    "start"});
    read(j, "nodes", s.nodes);
    read(j, "hub", s.hub);
    read(j, "length", s.length);
    read(j, "daily_vol", s.daily_vol);
    read(j, "hub_alpha", s.hub_alpha);
    read(j, "hub_beta", s.hub_beta);
    read(j, "leaf_alpha", s.leaf_alpha);
    read(j, "leaf_beta", s.leaf_beta);
    read(j, "spillover_weight", s.spillover_weight);
    read(j, "spillover_lag", s.spillover_lag);
    read(j, "volume_level", s.volume_level);
    read(j, "volume_sd", s.volume_sd);
    if (const auto it = j.find("start"); it != j.end()) s.start = read_date(*it, "synthetic.start");
}

void parse_root(const json& j, RunConfig& c) {
    reject_unknown(j, "config", {"data", "rv_window", "split", "graph", "model", "features", "train", "grid",
                                 "scenarios", "ablation", "checkpoint", "out", "seed", "threads", "synthetic"});
    if (const auto it = j.find("data"); it != j.end()) parse_data(*it, c);
    read(j, "rv_window", c.rv_window);
    if (const auto it = j.find("split"); it != j.end()) {
        reject_unknown(*it, "split", {"train", "validation", "test"});
        read(*it, "train", c.split.train);
        read(*it, "validation", c.split.validation);
        read(*it, "test", c.split.test);
    }
    if (const auto it = j.find("graph"); it != j.end()) parse_graph(*it, c);
    if (const auto it = j.find("model"); it != j.end()) c.model = model_kind_from_string(it->get<std::string>());
    if (const auto it = j.find("features"); it != j.end()) c.features = feature_kind_from_string(it->get<std::string>());
    if (const auto it = j.find("train"); it != j.end()) parse_train(*it, c.train);
    if (const auto it = j.find("grid"); it != j.end()) parse_grid(*it, c.grid);
    if (const auto it = j.find("scenarios"); it != j.end()) {
        for (const auto& s : *it) {
            reject_unknown(s, "scenarios[]", {"name", "start", "end"});
            c.scenarios.push_back({s.at("name").get<std::string>(), read_date(s.at("start"), "scenario start"),
                                   read_date(s.at("end"), "scenario end")});
        }
    }
    if (const auto it = j.find("ablation"); it != j.end()) parse_ablation(*it, c);
    if (const auto it = j.find("checkpoint"); it != j.end() && !it->is_null()) c.checkpoint = it->get<std::string>();
    if (const auto it = j.find("out"); it != j.end()) c.out = it->get<std::string>();
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);
    if (const auto it = j.find("synthetic"); it != j.end()) parse_synthetic(*it, c.synthetic);
}

bool one_of(int v, std::initializer_list<int> allowed) {
    return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

}  // namespace

std::string to_string(Partition p) {
    switch (p) {
        case Partition::Train: return "train";
        case Partition::Validation: return "validation";
        case Partition::Test: return "test";
        case Partition::All: return "all";
    }
    return "unknown";
}

Partition partition_from_string(const std::string& s) {
    if (s == "train") return Partition::Train;
    if (s == "validation") return Partition::Validation;
    if (s == "test") return Partition::Test;
    if (s == "all") return Partition::All;
    throw ConfigError("unknown partition '" + s + "' (train, validation, test or all)");
}

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "rv") return FeatureKind::RealizedVolatility;
    if (s == "volume") return FeatureKind::Volume;
    if (s == "garch_vol" || s == "garch-vol") return FeatureKind::GarchVolatility;
    throw ConfigError("unknown feature kind '" + s + "' (rv, volume or garch_vol)");
}

RunConfig parse_run_config(std::string_view json_text) {
    RunConfig config;
    try {
        parse_root(json::parse(json_text), config);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid run config: ") + e.what());
    }
    return config;
}

void RunConfig::validate(std::string_view command) const {
    static const std::set<std::string_view> commands{"ingest", "graph", "train", "gridsearch",
                                                     "evaluate", "ablate", "synthetic"};
    if (!commands.contains(command)) throw ConfigError("unknown command '" + std::string(command) + "'");
    if (command == "synthetic") {
        synthetic.validate();
        return;
    }
    if (prices.empty()) throw ConfigError("data.prices is required");
    if (rv_window < 1) throw ConfigError("rv_window must be >= 1");
    if (split.train <= 0.0 || split.validation <= 0.0 || split.test <= 0.0 ||
        std::abs(split.train + split.validation + split.test - 1.0) > 1e-9) {
        throw ConfigError("split fractions must be positive and sum to 1");
    }
    if (spillover.var_lag < 1) throw ConfigError("graph.var_lag must be >= 1");
    if (spillover.horizon < 1) throw ConfigError("graph.horizon must be >= 1");
    if (command == "ingest" || command == "graph") return;

    train.validate();
    if (!one_of(train.window_w, {5, 15, 21, 40})) throw ConfigError("window must be one of 5, 15, 21, 40");
    if (!one_of(train.horizon_h, {1, 5, 10, 22})) throw ConfigError("horizon must be one of 1, 5, 10, 22");
    ModelSpec::make(model, train.window_w, train.hidden_dim, train.heads).validate();
    if (features == FeatureKind::Custom) throw ConfigError("custom features are not available from the CLI");
    if (model == ModelKind::GarchTgatm && features != FeatureKind::RealizedVolatility) {
        throw ConfigError("garch-tgatm fixes its own features; leave `features` at rv");
    }
    std::set<std::string> names;
    for (const auto& s : scenarios) {
        if (s.name.empty()) throw ConfigError("scenario names must be non-empty");
        if (!names.insert(s.name).second) throw ConfigError("duplicate scenario '" + s.name + "'");
        if (s.end < s.start) throw ConfigError("scenario '" + s.name + "' ends before it starts");
    }
    if (command == "gridsearch") {
        if (grid.size() == 0) throw ConfigError("grid must contain at least one configuration");
        for (const auto& cfg : grid.expand(train)) {
            cfg.validate();
            ModelSpec::make(model, cfg.window_w, cfg.hidden_dim, cfg.heads).validate();
        }
    }
    if (command == "evaluate" && !checkpoint) throw ConfigError("evaluate needs a checkpoint");
    if (command == "ablate") {
        if (sweep_features.empty()) throw ConfigError("ablation.features must not be empty");
        if (model == ModelKind::GarchTgatm) throw ConfigError("the feature sweep does not apply to garch-tgatm");
    }
}

std::string canonical_json(const RunConfig& c) {
    json scenarios = json::array();
    for (const auto& s : c.scenarios) {
        scenarios.push_back({{"name", s.name}, {"start", format_date(s.start)}, {"end", format_date(s.end)}});
    }
    json features = json::array();
    for (auto f : c.sweep_features) features.push_back(to_string(f));
    const auto& t = c.train;
    const auto& s = c.synthetic;
    json j = {
        {"data",
         {{"prices", c.prices.generic_string()},
          {"layout", c.schema.layout == CsvLayout::Wide ? "wide" : "long"},
          {"tickers", c.schema.tickers},
          {"date_column", c.schema.date_column},
          {"volume_suffix", c.schema.volume_suffix},
          {"ticker_column", c.schema.ticker_column},
          {"close_column", c.schema.close_column},
          {"volume_column", c.schema.volume_column}}},
        {"rv_window", c.rv_window},
        {"split", {{"train", c.split.train}, {"validation", c.split.validation}, {"test", c.split.test}}},
        {"graph",
         {{"method", to_string(c.graph_method)},
          {"partition", to_string(c.graph_partition)},
          {"var_lag", c.spillover.var_lag},
          {"horizon", c.spillover.horizon},
          {"sigma_as_stddev", c.spillover.convention == SigmaConvention::StdDev}}},
        {"model", to_string(c.model)},
        {"features", to_string(c.features)},
        {"train",
         {{"learning_rate", t.learning_rate},
          {"hidden_dim", t.hidden_dim},
          {"heads", t.heads},
          {"epochs", t.epochs},
          {"patience", t.patience},
          {"min_delta", t.min_delta},
          {"window", t.window_w},
          {"horizon", t.horizon_h},
          {"batch_size", t.batch_size},
          {"optimizer", to_string(t.optimizer)}}},
        {"grid",
         {{"learning_rates", c.grid.learning_rates}, {"hidden_dims", c.grid.hidden_dims}, {"heads", c.grid.heads}}},
        {"scenarios", scenarios},
        {"ablation", {{"leave_out", c.leave_out}, {"features", features}}},
        {"checkpoint", c.checkpoint ? json(c.checkpoint->generic_string()) : json(nullptr)},
        {"out", c.out.generic_string()},
        {"seed", c.seed},
        {"threads", c.threads},
        {"synthetic",
         {{"nodes", s.nodes},
          {"hub", s.hub},
          {"length", s.length},
          {"daily_vol", s.daily_vol},
          {"hub_alpha", s.hub_alpha},
          {"hub_beta", s.hub_beta},
          {"leaf_alpha", s.leaf_alpha},
          {"leaf_beta", s.leaf_beta},
          {"spillover_weight", s.spillover_weight},
          {"spillover_lag", s.spillover_lag},
          {"volume_level", s.volume_level},
          {"volume_sd", s.volume_sd},
          {"start", format_date(s.start)}}},
    };
    return j.dump(2);
}

}  // namespace volgraph::cli
