#include "volgraph/serialization.hpp"

#include "volgraph/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace volgraph {

using nlohmann::json;

namespace {

constexpr const char* kParameterFormat = "volgraph-parameters";
constexpr const char* kCheckpointFormat = "volgraph-checkpoint";
constexpr int kFormatVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array()) throw DataError("expected a matrix as an array of rows");
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) throw DataError("ragged matrix in JSON");
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed ") + what + ": " + e.what());
    }
}

json parameters_to_json_value(std::span<const ad::Parameter* const> params) {
    json list = json::array();
    for (const auto* p : params) {
        list.push_back({{"name", p->name},
                        {"shape", p->value.shape()},
                        {"values", std::vector<double>(p->value.values().begin(), p->value.values().end())}});
    }
    return list;
}

void load_parameters_value(const json& list, std::span<ad::Parameter* const> params) {
    if (!list.is_array() || list.size() != params.size()) {
        throw DataError("checkpoint holds " + std::to_string(list.is_array() ? list.size() : 0) +
                        " parameters, model expects " + std::to_string(params.size()));
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        const json& entry = list[k];
        ad::Parameter& p = *params[k];
        const auto name = entry.at("name").get<std::string>();
        if (name != p.name) throw DataError("checkpoint parameter '" + name + "' where '" + p.name + "' was expected");
        const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
        if (shape != p.value.shape()) {
            throw DataError("checkpoint shape for '" + name + "' does not match " + p.value.shape_string());
        }
        p.value = ad::Tensor(shape, entry.at("values").get<std::vector<double>>());
        p.zero_grad();
    }
}

void check_header(const json& doc, const char* format) {
    if (!doc.is_object() || doc.value("format", "") != format) {
        throw DataError(std::string("not a ") + format + " document");
    }
    if (doc.value("version", 0) != kFormatVersion) {
        throw DataError(std::string(format) + " version " + std::to_string(doc.value("version", 0)) +
                        " is not supported");
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string content_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = digits[h & 0xF];
    return out;
}

// ---------------------------------------------------------------- CSV

std::string volatility_panel_csv(const VolatilityPanel& panel) {
    std::string out = "date";
    for (const auto& t : panel.tickers) out += "," + t;
    out += "\n";
    for (Eigen::Index t = 0; t < panel.rv.cols(); ++t) {
        out += format_date(panel.dates[static_cast<std::size_t>(t)]);
        for (Eigen::Index i = 0; i < panel.rv.rows(); ++i) out += "," + format_double(panel.rv(i, t));
        out += "\n";
    }
    return out;
}

std::string price_panel_csv(const PricePanel& panel) {
    std::string out = "date";
    for (const auto& t : panel.tickers) out += "," + t;
    if (panel.volume) {
        for (const auto& t : panel.tickers) out += "," + t + "_volume";
    }
    out += "\n";
    for (Eigen::Index t = 0; t < panel.close.cols(); ++t) {
        out += format_date(panel.dates[static_cast<std::size_t>(t)]);
        for (Eigen::Index i = 0; i < panel.close.rows(); ++i) out += "," + format_double(panel.close(i, t));
        if (panel.volume) {
            for (Eigen::Index i = 0; i < panel.close.rows(); ++i) out += "," + format_double((*panel.volume)(i, t));
        }
        out += "\n";
    }
    return out;
}

std::string adjacency_csv(const std::vector<std::string>& tickers, const Eigen::MatrixXd& matrix) {
    if (static_cast<std::size_t>(matrix.rows()) != tickers.size() || matrix.rows() != matrix.cols()) {
        throw std::invalid_argument("adjacency shape does not match ticker count");
    }
    std::string out = "to\\from";
    for (const auto& t : tickers) out += "," + t;
    out += "\n";
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        out += tickers[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) out += "," + format_double(matrix(i, j));
        out += "\n";
    }
    return out;
}

std::string metrics_csv(std::span<const MetricsReport> reports) {
    std::string out = "model,scenario,ticker,horizon,mafe,mse,rmse,mape\n";
    for (const auto& r : reports) {
        for (const auto& row : r.rows) {
            out += r.model + "," + r.scenario + "," + row.ticker + "," + std::to_string(row.horizon) + "," +
                   format_double(row.mafe) + "," + format_double(row.mse) + "," + format_double(row.rmse) + "," +
                   format_double(row.mape) + "\n";
        }
    }
    return out;
}

std::string trace_csv(const TrainTrace& trace) {
    std::string out = "epoch,train_loss,val_loss\n";
    for (std::size_t k = 0; k < trace.train_loss.size(); ++k) {
        out += std::to_string(k + 1) + "," + format_double(trace.train_loss[k]) + "," +
               format_double(trace.val_loss[k]) + "\n";
    }
    return out;
}

std::string grid_csv(std::span<const GridResult> results) {
    std::string out = "rank,index,learning_rate,hidden_dim,heads,seed,val_mse,best_epoch,error\n";
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        std::string err = r.error.value_or("");
        for (char& c : err) {
            if (c == ',' || c == '\n' || c == '"') c = ' ';
        }
        out += std::to_string(k + 1) + "," + std::to_string(r.index) + "," + format_double(r.config.learning_rate) +
               "," + std::to_string(r.config.hidden_dim) + "," + std::to_string(r.config.heads) + "," +
               std::to_string(r.config.seed) + "," + format_double(r.val_mse) + "," + std::to_string(r.best_epoch) +
               "," + err + "\n";
    }
    return out;
}

// ---------------------------------------------------------------- JSON

std::string stats_json(const std::vector<std::string>& tickers, std::span<const SeriesStats> stats) {
    if (tickers.size() != stats.size()) throw std::invalid_argument("ticker count does not match stats");
    json doc = json::array();
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const auto& s = stats[k];
        doc.push_back({{"ticker", tickers[k]},
                       {"mean", s.mean},
                       {"std_dev", s.std_dev},
                       {"skewness", s.skewness},
                       {"kurtosis", s.kurtosis},
                       {"adf_statistic", s.adf_statistic},
                       {"adf_p_value", s.adf_p_value}});
    }
    return doc.dump(2) + "\n";
}

std::string garch_fit_json(const std::string& ticker, const GarchFit& fit) {
    json doc = {{"ticker", ticker},
                {"mu", fit.params.mu},
                {"omega0", fit.params.omega0},
                {"alpha", fit.params.alpha},
                {"beta", fit.params.beta},
                {"log_likelihood", fit.log_likelihood},
                {"converged", fit.converged},
                {"iterations", fit.iterations}};
    return doc.dump(2) + "\n";
}

std::string graph_plot_json(const MarketGraph& graph, const std::string& partition) {
    json nodes = json::array();
    for (std::size_t i = 0; i < graph.tickers.size(); ++i) nodes.push_back({{"id", i}, {"label", graph.tickers[i]}});
    json edges = json::array();
    for (Eigen::Index i = 0; i < graph.adjacency.rows(); ++i) {
        for (Eigen::Index j = 0; j < graph.adjacency.cols(); ++j) {
            if (i == j || graph.adjacency(i, j) == 0.0) continue;
            edges.push_back({{"source", graph.tickers[static_cast<std::size_t>(j)]},
                             {"target", graph.tickers[static_cast<std::size_t>(i)]},
                             {"weight", graph.adjacency(i, j)}});
        }
    }
    json doc = {{"method", to_string(graph.method)},
                {"partition", partition},
                {"directed", graph.method == GraphMethod::Spillover},
                {"nodes", nodes},
                {"edges", edges}};
    return doc.dump(2) + "\n";
}

std::string heatmap_json(const std::vector<std::string>& tickers, const Eigen::MatrixXd& matrix, double total_index) {
    json doc = {{"rows", tickers},
                {"columns", tickers},
                {"values", matrix_to_json(matrix)},
                {"total_index", total_index},
                {"convention", "values[i][j] = percent of i's forecast-error variance due to shocks in j"}};
    return doc.dump(2) + "\n";
}

std::string metrics_json(std::span<const MetricsReport> reports) {
    json doc = json::array();
    for (const auto& r : reports) {
        json rows = json::array();
        for (const auto& row : r.rows) {
            rows.push_back({{"ticker", row.ticker},
                            {"horizon", row.horizon},
                            {"mafe", row.mafe},
                            {"mse", row.mse},
                            {"rmse", row.rmse},
                            {"mape", row.mape_infinite ? json(nullptr) : json(row.mape)},
                            {"mape_infinite", row.mape_infinite}});
        }
        doc.push_back({{"model", r.model}, {"scenario", r.scenario}, {"mean_mafe", r.mean_mafe()}, {"rows", rows}});
    }
    return doc.dump(2) + "\n";
}

namespace {

json spec_to_json(const ModelSpec& s) {
    return {{"kind", to_string(s.kind)},
            {"hidden_dim", s.hidden_dim},
            {"heads", s.heads},
            {"input_dim", s.input_dim},
            {"graph_source", to_string(s.graph_source)},
            {"input_transform", to_string(s.input_transform)}};
}

ModelSpec spec_from_json(const json& doc) {
    try {
        ModelSpec s = ModelSpec::make(model_kind_from_string(doc.at("kind").get<std::string>()),
                                      doc.at("input_dim").get<int>(), doc.at("hidden_dim").get<int>(),
                                      doc.at("heads").get<int>());
        if (doc.value("graph_source", to_string(s.graph_source)) != to_string(s.graph_source) ||
            doc.value("input_transform", to_string(s.input_transform)) != to_string(s.input_transform)) {
            throw DataError("model spec graph source or input transform contradicts its kind");
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid model spec: ") + e.what());
    }
}

}  // namespace

std::string model_spec_json(const ModelSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

ModelSpec model_spec_from_json(std::string_view text) { return spec_from_json(parse_json(text, "model spec")); }

std::string parameters_json(std::span<const ad::Parameter* const> params) {
    json doc = {{"format", kParameterFormat}, {"version", kFormatVersion}, {"parameters", parameters_to_json_value(params)}};
    return doc.dump() + "\n";
}

void load_parameters_json(std::string_view text, std::span<ad::Parameter* const> params) {
    const json doc = parse_json(text, "parameter file");
    check_header(doc, kParameterFormat);
    try {
        load_parameters_value(doc.at("parameters"), params);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid parameter file: ") + e.what());
    }
}

std::string checkpoint_json(const GraphModel& model) {
    json doc = {{"format", kCheckpointFormat},
                {"version", kFormatVersion},
                {"spec", spec_to_json(model.spec())},
                {"parameters", parameters_to_json_value(model.parameters())}};
    if (model.graph()) {
        doc["graph"] = {{"norm_adjacency", matrix_to_json(model.graph()->norm_adjacency)},
                        {"support", matrix_to_json(model.graph()->support)}};
    }
    return doc.dump() + "\n";
}

GraphModel model_from_checkpoint_json(std::string_view text) {
    const json doc = parse_json(text, "checkpoint");
    check_header(doc, kCheckpointFormat);
    try {
        const ModelSpec spec = spec_from_json(doc.at("spec"));
        std::optional<GraphOperators> ops;
        if (spec.uses_graph()) {
            const json& g = doc.at("graph");
            ops = GraphOperators{matrix_from_json(g.at("norm_adjacency")), matrix_from_json(g.at("support"))};
        }
        GraphModel model(spec, ops, 0);
        load_parameters_value(doc.at("parameters"), model.parameters());
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid checkpoint: ") + e.what());
    }
}

}  // namespace volgraph
