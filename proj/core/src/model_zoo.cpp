#include "volgraph/model_zoo.hpp"

#include "volgraph/error.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace volgraph {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Tgatm: return "tgatm";
        case ModelKind::Bm: return "bm";
        case ModelKind::GnnGatm: return "gnn-gatm";
        case ModelKind::GarchTgatm: return "garch-tgatm";
        case ModelKind::CTgatm: return "c-tgatm";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
    std::string key = s;
    for (char& c : key) {
        if (c == '_') c = '-';
    }
    for (ModelKind k : {ModelKind::Tgatm, ModelKind::Bm, ModelKind::GnnGatm, ModelKind::GarchTgatm, ModelKind::CTgatm}) {
        if (to_string(k) == key) return k;
    }
    throw ConfigError("unknown model kind '" + s + "' (expected tgatm, bm, gnn-gatm, garch-tgatm or c-tgatm)");
}

std::string to_string(GraphSource g) {
    switch (g) {
        case GraphSource::Spillover: return "spillover";
        case GraphSource::Correlation: return "correlation";
        case GraphSource::None: return "none";
    }
    return "unknown";
}

std::string to_string(InputTransform t) { return t == InputTransform::RealizedVolatility ? "rv" : "garch_vol"; }

ModelSpec ModelSpec::make(ModelKind kind, int input_dim, int hidden_dim, int heads) {
    ModelSpec s;
    s.kind = kind;
    s.input_dim = input_dim;
    s.hidden_dim = hidden_dim;
    s.heads = heads;
    s.graph_source = kind == ModelKind::Bm       ? GraphSource::None
                     : kind == ModelKind::CTgatm ? GraphSource::Correlation
                                                 : GraphSource::Spillover;
    s.input_transform =
        kind == ModelKind::GarchTgatm ? InputTransform::GarchVolatility : InputTransform::RealizedVolatility;
    return s;
}

bool ModelSpec::uses_attention() const noexcept {
    return kind == ModelKind::Tgatm || kind == ModelKind::GarchTgatm || kind == ModelKind::CTgatm;
}

void ModelSpec::validate() const {
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
    if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
    if (heads < 1) throw ConfigError("heads must be >= 1");
    if (uses_attention() && hidden_dim % heads != 0) {
        throw ConfigError("hidden_dim " + std::to_string(hidden_dim) + " is not divisible by " + std::to_string(heads) +
                          " heads");
    }
    if ((kind == ModelKind::Bm) != (graph_source == GraphSource::None)) {
        throw ConfigError("only the bm model runs without a graph");
    }
    if (kind == ModelKind::CTgatm && graph_source != GraphSource::Correlation) {
        throw ConfigError("c-tgatm requires the correlation graph");
    }
    if ((kind == ModelKind::GarchTgatm) != (input_transform == InputTransform::GarchVolatility)) {
        throw ConfigError("garch_vol inputs are used by garch-tgatm and only by it");
    }
}

// ---------------------------------------------------------------- layers

namespace layers {

ad::Var gcn_layer_forward(const ad::Var& features, const Eigen::MatrixXd& norm_adj, const ad::Var& weight,
                          const std::optional<ad::Var>& bias, bool activate) {
    ad::Var out = ad::matmul(ad::propagate(norm_adj, features), weight);
    if (bias) out = ad::add_bias(out, *bias);
    return activate ? ad::relu(out) : out;
}

AttentionOutput gat_attention(const ad::Var& features, const HeadVars& head, const Eigen::MatrixXd& support) {
    const std::size_t d_head = head.weight.value().cols();
    if (head.attention.value().rows() != 2 * d_head || head.attention.value().cols() != 1) {
        throw std::invalid_argument("attention vector " + head.attention.value().shape_string() +
                                    " does not match head width " + std::to_string(d_head));
    }
    const auto n = static_cast<std::size_t>(support.rows());
    ad::Var z = ad::matmul(features, head.weight);
    ad::Var src = ad::matmul(z, ad::slice_rows(head.attention, 0, d_head));
    ad::Var dst = ad::matmul(z, ad::slice_rows(head.attention, d_head, d_head));
    ad::Var scores = ad::leaky_relu(ad::pairwise_sum(src, dst, n), 0.2);
    return {ad::masked_row_softmax(scores, support), z};
}

ad::Var gat_layer_forward(const ad::Var& features, std::span<const HeadVars> heads, const Eigen::MatrixXd& support,
                          const std::optional<ad::Var>& bias, bool concat, bool activate,
                          std::vector<ad::Tensor>* alphas) {
    if (heads.empty()) throw std::invalid_argument("attention layer needs at least one head");
    const auto n = static_cast<std::size_t>(support.rows());
    std::vector<ad::Var> outputs;
    outputs.reserve(heads.size());
    for (const auto& head : heads) {
        const auto att = gat_attention(features, head, support);
        if (alphas) alphas->push_back(att.alpha.value());
        outputs.push_back(ad::block_matmul(att.alpha, att.transformed, n));
    }
    ad::Var out;
    if (concat) {
        out = outputs.size() == 1 ? outputs.front() : ad::concat(outputs, 1);
    } else {
        out = outputs.front();
        for (std::size_t k = 1; k < outputs.size(); ++k) out = ad::add(out, outputs[k]);
        if (outputs.size() > 1) out = ad::mul_scalar(out, 1.0 / static_cast<double>(outputs.size()));
    }
    if (bias) out = ad::add_bias(out, *bias);
    return activate ? ad::relu(out) : out;
}

ad::Var mlp_forward(const ad::Var& features, std::span<const DenseVars> stack) {
    if (stack.empty()) throw std::invalid_argument("dense stack is empty");
    ad::Var h = features;
    for (std::size_t k = 0; k < stack.size(); ++k) {
        h = ad::add_bias(ad::matmul(h, stack[k].weight), stack[k].bias);
        if (k + 1 < stack.size()) h = ad::relu(h);
    }
    return h;
}

}  // namespace layers

// ---------------------------------------------------------------- model

GraphOperators GraphOperators::from_graph(const MarketGraph& graph) {
    return {gcn_normalize(graph), attention_support(graph)};
}

GraphModel::Dense GraphModel::make_dense(const std::string& name, int in, int out) {
    return {ad::Parameter(name + ".weight", ad::Tensor::matrix(static_cast<std::size_t>(in), static_cast<std::size_t>(out))),
            ad::Parameter(name + ".bias", ad::Tensor::matrix(1, static_cast<std::size_t>(out)))};
}

GraphModel::Gat GraphModel::make_gat(const std::string& name, int in, int heads, int d_head, bool concat) {
    Gat g;
    g.concat = concat;
    const auto d = static_cast<std::size_t>(d_head);
    for (int k = 0; k < heads; ++k) {
        const std::string head = name + ".head" + std::to_string(k);
        g.heads.push_back({ad::Parameter(head + ".weight", ad::Tensor::matrix(static_cast<std::size_t>(in), d)),
                           ad::Parameter(head + ".attention", ad::Tensor::matrix(2 * d, 1))});
    }
    const std::size_t width = concat ? d * static_cast<std::size_t>(heads) : d;
    g.bias = ad::Parameter(name + ".bias", ad::Tensor::matrix(1, width));
    return g;
}

GraphModel::GraphModel(ModelSpec spec, std::optional<GraphOperators> graph, std::uint64_t seed)
    : spec_(spec), graph_(std::move(graph)) {
    spec_.validate();
    if (spec_.uses_graph()) {
        if (!graph_) throw std::invalid_argument(to_string(spec_.kind) + " needs graph operators");
        const auto& g = *graph_;
        if (g.norm_adjacency.rows() == 0 || g.norm_adjacency.rows() != g.norm_adjacency.cols() ||
            g.support.rows() != g.norm_adjacency.rows() || g.support.cols() != g.norm_adjacency.cols()) {
            throw std::invalid_argument("graph operators must be square and of equal size");
        }
    } else {
        graph_.reset();
    }
    const int in = spec_.input_dim;
    const int hid = spec_.hidden_dim;
    switch (spec_.kind) {
        case ModelKind::Bm:
            dense_ = {make_dense("fc1", in, hid), make_dense("fc2", hid, hid), make_dense("fc3", hid, hid),
                      make_dense("out", hid, 1)};
            break;
        case ModelKind::GnnGatm:
            gcn_ = {make_dense("gcn1", in, hid), make_dense("gcn2", hid, hid)};
            dense_ = {make_dense("out", hid, 1)};
            break;
        case ModelKind::Tgatm:
        case ModelKind::GarchTgatm:
        case ModelKind::CTgatm:
            gcn_ = {make_dense("gcn1", in, hid), make_dense("gcn2", hid, hid)};
            gat_.push_back(make_gat("gat1", hid, spec_.heads, hid / spec_.heads, true));
            gat_.push_back(make_gat("gat2", hid, spec_.heads, hid, false));
            dense_ = {make_dense("fc1", hid, hid), make_dense("fc2", hid, hid), make_dense("fc3", hid, hid),
                      make_dense("out", hid, 1)};
            break;
    }
    init_parameters(seed);
}

const Eigen::MatrixXd& GraphModel::norm_adjacency() const { return graph_->norm_adjacency; }
const Eigen::MatrixXd& GraphModel::support() const { return graph_->support; }

std::vector<ad::Parameter*> GraphModel::parameters() {
    std::vector<ad::Parameter*> out;
    for (auto& d : gcn_) {
        out.push_back(&d.weight);
        out.push_back(&d.bias);
    }
    for (auto& g : gat_) {
        for (auto& h : g.heads) {
            out.push_back(&h.weight);
            out.push_back(&h.attention);
        }
        out.push_back(&g.bias);
    }
    for (auto& d : dense_) {
        out.push_back(&d.weight);
        out.push_back(&d.bias);
    }
    return out;
}

std::vector<const ad::Parameter*> GraphModel::parameters() const {
    auto mut = const_cast<GraphModel*>(this)->parameters();
    return {mut.begin(), mut.end()};
}

std::size_t GraphModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto* p : parameters()) n += p->value.size();
    return n;
}

void GraphModel::init_parameters(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto* p : parameters()) {
        if (p->name.ends_with(".bias")) {
            p->value.fill(0.0);
        } else {
            const double fan_in = static_cast<double>(p->value.rows());
            const double fan_out = static_cast<double>(p->value.cols());
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            const double s = std::sqrt(6.0 / (fan_in + fan_out));
            for (double& v : p->value.values()) v = s * dist(rng);
        }
        p->zero_grad();
    }
}

layers::DenseVars GraphModel::bind(ad::Tape& tape, Dense& d) { return {tape.parameter(d.weight), tape.parameter(d.bias)}; }

ad::Var GraphModel::forward(ad::Tape& tape, const ad::Tensor& inputs, std::vector<ad::Tensor>* alphas) {
    if (inputs.rank() != 2 || inputs.cols() != static_cast<std::size_t>(spec_.input_dim)) {
        throw std::invalid_argument("model expects inputs with " + std::to_string(spec_.input_dim) + " columns, got " +
                                    inputs.shape_string());
    }
    if (graph_ && inputs.rows() % static_cast<std::size_t>(norm_adjacency().rows()) != 0) {
        throw std::invalid_argument("input rows " + std::to_string(inputs.rows()) + " are not a multiple of " +
                                    std::to_string(norm_adjacency().rows()) + " nodes");
    }
    ad::Var h = tape.constant(inputs);
    for (auto& layer : gcn_) {
        const auto v = bind(tape, layer);
        h = layers::gcn_layer_forward(h, norm_adjacency(), v.weight, v.bias, true);
    }
    for (auto& layer : gat_) {
        std::vector<layers::HeadVars> heads;
        heads.reserve(layer.heads.size());
        for (auto& head : layer.heads) heads.push_back({tape.parameter(head.weight), tape.parameter(head.attention)});
        h = layers::gat_layer_forward(h, heads, support(), tape.parameter(layer.bias), layer.concat, true, alphas);
    }
    std::vector<layers::DenseVars> stack;
    stack.reserve(dense_.size());
    for (auto& layer : dense_) stack.push_back(bind(tape, layer));
    return layers::mlp_forward(h, stack);
}

ad::Tensor GraphModel::predict(const ad::Tensor& inputs) {
    ad::Tape tape;
    return forward(tape, inputs).value();
}

ad::Tensor stack_features(std::span<const Sample> samples) {
    if (samples.empty()) throw std::invalid_argument("no samples to stack");
    const auto n = static_cast<std::size_t>(samples.front().features.rows());
    const auto f = static_cast<std::size_t>(samples.front().features.cols());
    ad::Tensor out = ad::Tensor::matrix(samples.size() * n, f);
    auto m = out.mat();
    for (std::size_t b = 0; b < samples.size(); ++b) {
        const auto& x = samples[b].features;
        if (static_cast<std::size_t>(x.rows()) != n || static_cast<std::size_t>(x.cols()) != f) {
            throw std::invalid_argument("samples have inconsistent feature shapes");
        }
        m.middleRows(static_cast<Eigen::Index>(b * n), static_cast<Eigen::Index>(n)) = x;
    }
    return out;
}

ad::Tensor stack_targets(std::span<const Sample> samples) {
    if (samples.empty()) throw std::invalid_argument("no samples to stack");
    const auto n = static_cast<std::size_t>(samples.front().target.size());
    ad::Tensor out = ad::Tensor::matrix(samples.size() * n, 1);
    for (std::size_t b = 0; b < samples.size(); ++b) {
        const auto& y = samples[b].target;
        if (static_cast<std::size_t>(y.size()) != n) throw std::invalid_argument("samples have inconsistent targets");
        for (std::size_t i = 0; i < n; ++i) out[b * n + i] = y(static_cast<Eigen::Index>(i));
    }
    return out;
}

}  // namespace volgraph
