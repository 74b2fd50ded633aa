#pragma once

#include "volgraph/graph_build.hpp"
#include "volgraph/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace volgraph {

enum class ModelKind { Tgatm, Bm, GnnGatm, GarchTgatm, CTgatm };
enum class GraphSource { Spillover, Correlation, None };
enum class InputTransform { RealizedVolatility, GarchVolatility };

/// CLI spelling: tgatm, bm, gnn-gatm, garch-tgatm, c-tgatm (underscores also accepted when parsing).
std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
std::string to_string(GraphSource g);
std::string to_string(InputTransform t);

struct ModelSpec {
    ModelKind kind = ModelKind::Tgatm;
    int hidden_dim = 32;
    int heads = 4;
    int input_dim = 15;  // lookback window length
    GraphSource graph_source = GraphSource::Spillover;
    InputTransform input_transform = InputTransform::RealizedVolatility;

    /// Spec with the graph source and input transform implied by `kind`.
    static ModelSpec make(ModelKind kind, int input_dim, int hidden_dim = 32, int heads = 4);

    /// Throws ConfigError on inconsistent fields.
    void validate() const;
    [[nodiscard]] bool uses_graph() const noexcept { return graph_source != GraphSource::None; }
    [[nodiscard]] bool uses_attention() const noexcept;
};

namespace layers {

struct DenseVars {
    ad::Var weight;  // in x out
    ad::Var bias;    // 1 x out
};

struct HeadVars {
    ad::Var weight;     // in x d_head
    ad::Var attention;  // (2 d_head) x 1: source half then neighbour half
};

struct AttentionOutput {
    ad::Var alpha;        // (B N) x N
    ad::Var transformed;  // (B N) x d_head
};

/// act(norm_adj . features . weight + bias) applied per stacked graph.
ad::Var gcn_layer_forward(const ad::Var& features, const Eigen::MatrixXd& norm_adj, const ad::Var& weight,
                          const std::optional<ad::Var>& bias, bool activate);

/// Attention coefficients over `support` for one head, plus the projected features.
AttentionOutput gat_attention(const ad::Var& features, const HeadVars& head, const Eigen::MatrixXd& support);

/// Multi-head attention layer. Heads are concatenated, or averaged when `concat` is false.
/// Each head's alpha is appended to `alphas` when given.
ad::Var gat_layer_forward(const ad::Var& features, std::span<const HeadVars> heads, const Eigen::MatrixXd& support,
                          const std::optional<ad::Var>& bias, bool concat, bool activate,
                          std::vector<ad::Tensor>* alphas = nullptr);

/// ReLU after every layer but the last, which stays linear. Rows are processed independently.
ad::Var mlp_forward(const ad::Var& features, std::span<const DenseVars> stack);

}  // namespace layers

/// Fixed graph operators shared by every forward pass.
struct GraphOperators {
    Eigen::MatrixXd norm_adjacency;
    Eigen::MatrixXd support;

    static GraphOperators from_graph(const MarketGraph& graph);
};

/// One of the five architectures with its parameters.
///
/// Inputs stack B samples of N nodes as a (B N) x F tensor; outputs are (B N) x 1.
class GraphModel {
public:
    GraphModel(ModelSpec spec, std::optional<GraphOperators> graph, std::uint64_t seed);

    [[nodiscard]] const ModelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] const std::optional<GraphOperators>& graph() const noexcept { return graph_; }

    /// Records the forward pass on `tape`. Attention matrices of every head are appended to `alphas`.
    ad::Var forward(ad::Tape& tape, const ad::Tensor& inputs, std::vector<ad::Tensor>* alphas = nullptr);

    /// Predictions without keeping the tape.
    ad::Tensor predict(const ad::Tensor& inputs);

    /// Parameters in a fixed order (also the checkpoint order).
    std::vector<ad::Parameter*> parameters();
    std::vector<const ad::Parameter*> parameters() const;
    [[nodiscard]] std::size_t parameter_count() const;

    /// Glorot-uniform weights and attention vectors, zero biases.
    void init_parameters(std::uint64_t seed);

private:
    struct Dense {
        ad::Parameter weight;
        ad::Parameter bias;
    };
    struct Head {
        ad::Parameter weight;
        ad::Parameter attention;
    };
    struct Gat {
        std::vector<Head> heads;
        ad::Parameter bias;
        bool concat = true;
    };

    static Dense make_dense(const std::string& name, int in, int out);
    static Gat make_gat(const std::string& name, int in, int heads, int d_head, bool concat);
    static layers::DenseVars bind(ad::Tape& tape, Dense& d);
    const Eigen::MatrixXd& norm_adjacency() const;
    const Eigen::MatrixXd& support() const;

    ModelSpec spec_;
    std::optional<GraphOperators> graph_;
    std::vector<Dense> gcn_;
    std::vector<Gat> gat_;
    std::vector<Dense> dense_;  // hidden dense layers followed by the output layer
};

/// Stacks sample features into (B N) x F and targets into (B N) x 1.
ad::Tensor stack_features(std::span<const Sample> samples);
ad::Tensor stack_targets(std::span<const Sample> samples);

}  // namespace volgraph
