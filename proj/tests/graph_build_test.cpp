#include "support/fixtures.hpp"
#include "support/var_oracle.hpp"

#include <volgraph/error.hpp>
#include <volgraph/graph_build.hpp>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace volgraph;
using volgraph::testing::random_matrix;

namespace {

MarketGraph graph_of(const Eigen::MatrixXd& adjacency, GraphMethod method = GraphMethod::Correlation) {
    MarketGraph g;
    g.adjacency = adjacency;
    g.method = method;
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i) g.tickers.push_back("N" + std::to_string(i));
    return g;
}

std::vector<std::string> names(Eigen::Index n) { return graph_of(Eigen::MatrixXd::Zero(n, n)).tickers; }

VolatilityPanel panel_from(const Eigen::MatrixXd& rv, Split split) {
    VolatilityPanel p;
    p.rv = rv;
    p.tickers = names(rv.rows());
    p.dates = business_days(Date{std::chrono::year{2019}, std::chrono::July, std::chrono::day{1}},
                            static_cast<std::size_t>(rv.cols()));
    p.window_m = 1;
    p.split = split;
    return p;
}

}  // namespace

TEST(CorrelationAdjacency, DuplicateAndNegatedSeries) {
    Eigen::MatrixXd x(3, 40);
    x.row(0) = random_matrix(1, 40, 1);
    x.row(1) = x.row(0);
    x.row(2) = -x.row(0);
    const MarketGraph g = correlation_adjacency(x, names(3));
    EXPECT_NEAR(g.adjacency(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(g.adjacency(0, 2), -1.0, 1e-15);
    EXPECT_EQ(g.adjacency(1, 1), 1.0);
}

TEST(CorrelationAdjacency, MatchesHandRolledOracle) {
    const Eigen::MatrixXd x = random_matrix(3, 50, 2);
    const MarketGraph g = correlation_adjacency(x, names(3));
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            double mi = 0, mj = 0;
            for (Eigen::Index t = 0; t < 50; ++t) {
                mi += x(i, t);
                mj += x(j, t);
            }
            mi /= 50;
            mj /= 50;
            double sij = 0, sii = 0, sjj = 0;
            for (Eigen::Index t = 0; t < 50; ++t) {
                sij += (x(i, t) - mi) * (x(j, t) - mj);
                sii += (x(i, t) - mi) * (x(i, t) - mi);
                sjj += (x(j, t) - mj) * (x(j, t) - mj);
            }
            EXPECT_NEAR(g.adjacency(i, j), sij / std::sqrt(sii * sjj), 1e-12);
        }
    }
}

TEST(CorrelationAdjacency, PositiveSemiDefinite) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::MatrixXd x = random_matrix(8, 30, seed);
        const MarketGraph g = correlation_adjacency(x, names(8));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.adjacency);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(CorrelationAdjacency, Errors) {
    EXPECT_THROW(correlation_adjacency(random_matrix(2, 5, 1), names(2)), DataError);
    EXPECT_THROW(correlation_adjacency(random_matrix(2, 20, 1), names(3)), std::invalid_argument);
    Eigen::MatrixXd flat = random_matrix(2, 20, 1);
    flat.row(1).setConstant(3.0);
    EXPECT_THROW(correlation_adjacency(flat, names(2)), NumericalError);
}

TEST(NetCorrelationIndex, Arithmetic) {
    EXPECT_TRUE(net_correlation_index(graph_of(Eigen::MatrixXd::Identity(4, 4))).isZero(0.0));
    const Eigen::VectorXd nci = net_correlation_index(graph_of(Eigen::MatrixXd::Ones(8, 8)));
    for (Eigen::Index i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(nci(i), 7.0);
    EXPECT_THROW(net_correlation_index(graph_of(Eigen::MatrixXd::Ones(2, 2), GraphMethod::Spillover)),
                 std::invalid_argument);
}

TEST(SpilloverAdjacency, IdentityDecomposition) {
    SpilloverDecomposition d;
    d.theta = d.theta_normalized = Eigen::MatrixXd::Identity(3, 3);
    const MarketGraph g = spillover_adjacency(d, names(3));
    EXPECT_TRUE(g.adjacency.isApprox(100.0 * Eigen::MatrixXd::Identity(3, 3)));
    EXPECT_EQ(g.method, GraphMethod::Spillover);
}

TEST(SpilloverAdjacency, PermutationEquivariance) {
    const VarModel m = volgraph::testing::random_stable_var(4, 1, 21);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
    perm.indices() << 3, 1, 0, 2;
    const Eigen::MatrixXd p = perm;
    VarModel q = m;
    q.coefficients[0] = p * m.coefficients[0] * p.transpose();
    q.residual_cov = p * m.residual_cov * p.transpose();
    const MarketGraph a = spillover_adjacency(gfevd(m, 5), names(4));
    const MarketGraph b = spillover_adjacency(gfevd(q, 5), names(4));
    EXPECT_LT((b.adjacency - p * a.adjacency * p.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SpilloverAdjacency, PlantedBlocksHaveNoCrossEdges) {
    const VarModel b1 = volgraph::testing::random_stable_var(2, 1, 5);
    const VarModel b2 = volgraph::testing::random_stable_var(3, 1, 6);
    VarModel m;
    m.lag_p = 1;
    m.intercept = Eigen::VectorXd::Zero(5);
    m.coefficients = {Eigen::MatrixXd::Zero(5, 5)};
    m.residual_cov = Eigen::MatrixXd::Zero(5, 5);
    m.coefficients[0].topLeftCorner(2, 2) = b1.coefficients[0];
    m.coefficients[0].bottomRightCorner(3, 3) = b2.coefficients[0];
    m.residual_cov.topLeftCorner(2, 2) = b1.residual_cov;
    m.residual_cov.bottomRightCorner(3, 3) = b2.residual_cov;
    const MarketGraph g = spillover_adjacency(gfevd(m, 5), names(5));
    EXPECT_LT(g.adjacency.topRightCorner(2, 3).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(g.adjacency.bottomLeftCorner(3, 2).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GcnNormalize, SmallCases) {
    EXPECT_TRUE(gcn_normalize(graph_of(Eigen::MatrixXd::Zero(1, 1))).isApprox(Eigen::MatrixXd::Ones(1, 1)));
    Eigen::MatrixXd two(2, 2);
    two << 0.0, 1.0, 1.0, 0.0;
    EXPECT_TRUE(gcn_normalize(graph_of(two)).isApprox(Eigen::MatrixXd::Constant(2, 2, 0.5), 1e-15));
}

TEST(GcnNormalize, SpectralRadiusAtMostOne) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Eigen::MatrixXd a = random_matrix(8, 8, seed, 0.0, 1.0);
        a = 0.5 * (a + a.transpose()).eval();
        const Eigen::MatrixXd norm = gcn_normalize(graph_of(a));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(norm);
        EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0 + 1e-9);
    }
}

TEST(GcnNormalize, EntrywiseFormula) {
    const Eigen::MatrixXd a = random_matrix(6, 6, 44, -1.0, 1.0);  // signed, asymmetric
    const Eigen::MatrixXd norm = gcn_normalize(graph_of(a));
    const Eigen::MatrixXd at = a + Eigen::MatrixXd::Identity(6, 6);
    for (Eigen::Index i = 0; i < 6; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < 6; ++j) {
            const double expected = at(i, j) / std::sqrt(at.row(i).cwiseAbs().sum() * at.row(j).cwiseAbs().sum());
            EXPECT_NEAR(norm(i, j), expected, 1e-15);
            row += expected;
        }
        EXPECT_NEAR(norm.row(i).sum(), row, 1e-14);
    }
}

TEST(AttentionSupport, NonZeroEntriesPlusSelfLoops) {
    Eigen::MatrixXd a(3, 3);
    a << 0.0, 0.2, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0;
    Eigen::MatrixXd expected(3, 3);
    expected << 1, 1, 0, 0, 1, 0, 1, 0, 1;
    EXPECT_EQ(attention_support(graph_of(a)), expected);
}

TEST(FeatureWindows, SingleSampleIndexing) {
    Eigen::MatrixXd rv(1, 9);
    rv << 1.0, 2.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0;
    const auto ds = build_feature_windows(panel_from(rv, {{0, 3}, {3, 6}, {6, 9}}), 2, 1);
    ASSERT_EQ(ds.train.size(), 1u);
    const Sample& s = ds.train.front();
    const Eigen::RowVectorXd raw =
        (s.features.array() * ds.standardizer.stddev(0) + ds.standardizer.mean(0)).matrix();
    EXPECT_NEAR(raw(0), 1.0, 1e-14);
    EXPECT_NEAR(raw(1), 2.0, 1e-14);
    EXPECT_DOUBLE_EQ(s.target(0), 4.0);
    EXPECT_EQ(s.time_index, 1u);
    EXPECT_EQ(s.target_index, 2u);
}

TEST(FeatureWindows, CountsPerPartition) {
    const Eigen::MatrixXd rv = random_matrix(3, 200, 9, 0.01, 0.05);
    const Split split = split_indices(200, {});
    for (int w : {1, 5, 15}) {
        for (int h : {1, 5, 10}) {
            const auto ds = build_feature_windows(panel_from(rv, split), w, h);
            const auto expected = [&](const IndexRange& r) {
                std::size_t count = 0;
                for (std::size_t t = r.begin; t < r.end; ++t) {
                    if (t + 1 >= r.begin + static_cast<std::size_t>(w) && t + static_cast<std::size_t>(h) < r.end) ++count;
                }
                return count;
            };
            EXPECT_EQ(ds.train.size(), expected(split.train));
            EXPECT_EQ(ds.validation.size(), expected(split.validation));
            EXPECT_EQ(ds.test.size(), expected(split.test));
            EXPECT_EQ(ds.test.size(), split.test.size() - static_cast<std::size_t>(w + h) + 1);
        }
    }
}

TEST(FeatureWindows, TrainingFeaturesAreStandardized) {
    const Eigen::MatrixXd rv = random_matrix(4, 300, 10, 0.01, 0.08);
    const auto ds = build_feature_windows(panel_from(rv, split_indices(300, {})), 15, 5);
    for (Eigen::Index i = 0; i < 4; ++i) {
        double sum = 0.0, sq = 0.0, count = 0.0;
        for (const auto& s : ds.train) {
            for (Eigen::Index k = 0; k < s.features.cols(); ++k) {
                sum += s.features(i, k);
                sq += s.features(i, k) * s.features(i, k);
                count += 1.0;
            }
        }
        const double mean = sum / count;
        EXPECT_NEAR(mean, 0.0, 1e-10);
        EXPECT_NEAR(std::sqrt(sq / count - mean * mean), 1.0, 1e-10);
    }
}

TEST(FeatureWindows, StatisticsIgnoreValidationAndTestValues) {
    const Eigen::MatrixXd rv = random_matrix(3, 240, 12, 0.01, 0.08);
    const Split split = split_indices(240, {});
    Eigen::MatrixXd poisoned = rv;
    poisoned.rightCols(static_cast<Eigen::Index>(240 - split.train.end)).setConstant(1e6);
    const auto a = build_feature_windows(panel_from(rv, split), 5, 1);
    const auto b = build_feature_windows(panel_from(poisoned, split), 5, 1);
    EXPECT_EQ(a.standardizer.mean, b.standardizer.mean);
    EXPECT_EQ(a.standardizer.stddev, b.standardizer.stddev);
    ASSERT_EQ(a.train.size(), b.train.size());
    for (std::size_t k = 0; k < a.train.size(); ++k) EXPECT_EQ(a.train[k].features, b.train[k].features);
}

TEST(FeatureWindows, Errors) {
    const Eigen::MatrixXd rv = random_matrix(2, 30, 1, 0.01, 0.05);
    VolatilityPanel p = panel_from(rv, split_indices(30, {}));
    EXPECT_THROW(build_feature_windows(p, 10, 5), DataError);
    EXPECT_THROW(build_feature_windows(p, 0, 1), std::invalid_argument);
    EXPECT_THROW(build_feature_windows(p, rv.leftCols(10), FeatureKind::Custom, 2, 1), std::invalid_argument);
    p.split.reset();
    EXPECT_THROW(build_feature_windows(p, 2, 1), std::invalid_argument);
}

TEST(BuildGraph, UsesOnlyTheTrainingPartition) {
    const Eigen::MatrixXd rv = random_matrix(3, 400, 13, 0.01, 0.05);
    const Split split = split_indices(400, {});
    Eigen::MatrixXd poisoned = rv;
    poisoned.rightCols(static_cast<Eigen::Index>(400 - split.train.end)) *= 7.0;
    for (GraphMethod m : {GraphMethod::Correlation, GraphMethod::Spillover}) {
        const MarketGraph a = build_graph(panel_from(rv, split), m);
        const MarketGraph b = build_graph(panel_from(poisoned, split), m);
        EXPECT_EQ(a.adjacency, b.adjacency);
    }
}

TEST(GraphMethodNames, RoundTrip) {
    for (GraphMethod m : {GraphMethod::Correlation, GraphMethod::Spillover}) {
        EXPECT_EQ(graph_method_from_string(to_string(m)), m);
    }
    EXPECT_THROW(graph_method_from_string("pearson"), ConfigError);
}
