#pragma once

#include <volgraph/data_ingest.hpp>
#include <volgraph/graph_build.hpp>
#include <volgraph/model_zoo.hpp>
#include <volgraph/synthetic.hpp>
#include <volgraph/training.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace volgraph::cli {

struct ScenarioRange {
    std::string name;
    Date start;
    Date end;
};

/// Partition a graph is estimated on: train, validation, test or all.
enum class Partition { Train, Validation, Test, All };

struct RunConfig {
    std::filesystem::path prices;  // empty only for `synthetic`
    CsvSchema schema;
    int rv_window = 21;
    SplitFractions split;
    GraphMethod graph_method = GraphMethod::Spillover;
    Partition graph_partition = Partition::Train;
    SpilloverGraphOptions spillover;
    ModelKind model = ModelKind::Tgatm;
    FeatureKind features = FeatureKind::RealizedVolatility;
    TrainConfig train;  // train.seed mirrors `seed`
    HyperGrid grid;
    std::vector<ScenarioRange> scenarios;
    std::vector<std::string> leave_out;  // empty: every ticker
    std::vector<FeatureKind> sweep_features{FeatureKind::RealizedVolatility, FeatureKind::Volume};
    std::optional<std::filesystem::path> checkpoint;
    std::filesystem::path out = "runs";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    SyntheticConfig synthetic;

    /// Checks everything `command` will need; throws ConfigError.
    void validate(std::string_view command) const;
};

/// Unknown keys and wrongly typed values are ConfigErrors.
RunConfig parse_run_config(std::string_view json_text);

/// Canonical JSON of every field; the run directory is keyed by its hash.
std::string canonical_json(const RunConfig& config);

std::string to_string(Partition p);
Partition partition_from_string(const std::string& s);
FeatureKind feature_kind_from_string(const std::string& s);

}  // namespace volgraph::cli
