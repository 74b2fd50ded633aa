#pragma once

#include "support/fixtures.hpp"
#include "support/gradcheck.hpp"

#include <volgraph/graph_build.hpp>
#include <volgraph/model_zoo.hpp>

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace volgraph::testing {

inline constexpr ModelKind kAllModelKinds[] = {ModelKind::Tgatm, ModelKind::Bm, ModelKind::GnnGatm,
                                               ModelKind::GarchTgatm, ModelKind::CTgatm};

/// Random non-negative N x N graph with zero diagonal; about a third of the off-diagonal entries are removed.
inline MarketGraph random_graph(Eigen::Index n, std::uint64_t seed, bool sparse = true) {
    MarketGraph g;
    g.adjacency = random_matrix(n, n, seed, 0.05, 1.0);
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::bernoulli_distribution drop(sparse ? 0.33 : 0.0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i == j || drop(rng)) g.adjacency(i, j) = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) g.tickers.push_back("N" + std::to_string(i));
    return g;
}

inline std::optional<GraphOperators> operators_for(ModelKind kind, const MarketGraph& graph) {
    if (kind == ModelKind::Bm) return std::nullopt;
    return GraphOperators::from_graph(graph);
}

/// Max relative error between backprop and central differences over every trainable parameter of one
/// architecture with N=4 nodes, F=5 inputs, hidden 32 and 4 heads, on two stacked samples.
inline GradientCheck model_gradient_check(ModelKind kind, std::uint64_t seed) {
    constexpr Eigen::Index n = 4, f = 5, batch = 2;
    GraphModel model(ModelSpec::make(kind, f, 32, 4), operators_for(kind, random_graph(n, seed)), seed);
    const ad::Tensor x = ad::Tensor::from_matrix(random_matrix(batch * n, f, seed + 1, -2.0, 2.0));
    const ad::Tensor y = ad::Tensor::from_matrix(random_matrix(batch * n, 1, seed + 2));
    const auto loss = [&](ad::Tape& tape) {
        return ad::mean(ad::square(ad::sub(model.forward(tape, x), tape.constant(y))));
    };
    const auto params = model.parameters();
    return check_gradients(loss, params);
}

}  // namespace volgraph::testing
