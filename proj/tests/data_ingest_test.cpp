#include "support/fixtures.hpp"

#include <volgraph/data_ingest.hpp>
#include <volgraph/error.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace volgraph;
using volgraph::testing::normal_series;
using volgraph::testing::random_price_panel;

namespace {

// Direct evaluation of sqrt(sum of the trailing M squared returns).
Eigen::MatrixXd rv_oracle(const Eigen::MatrixXd& r, int m) {
    Eigen::MatrixXd out(r.rows(), r.cols() - m + 1);
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index t = m - 1; t < r.cols(); ++t) {
            double s = 0.0;
            for (Eigen::Index k = t - m + 1; k <= t; ++k) s += r(i, k) * r(i, k);
            out(i, t - m + 1) = std::sqrt(s);
        }
    }
    return out;
}

ReturnPanel returns_of(const std::vector<double>& r) {
    ReturnPanel p;
    p.tickers = {"X"};
    p.returns = Eigen::Map<const Eigen::RowVectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    p.dates = business_days(Date{std::chrono::year{2020}, std::chrono::January, std::chrono::day{1}}, r.size());
    return p;
}

}  // namespace

TEST(LoadPriceCsv, AlignsOnCommonDates) {
    const char* csv =
        "date,A,B,C\n"
        "2020-01-02,10,20,30\n"
        "2020-01-03,11,,31\n"
        "2020-01-06,12,22,32\n"
        "2020-01-07,13,23,33\n";
    const PricePanel p = parse_price_csv(csv);
    ASSERT_EQ(p.tickers, (std::vector<std::string>{"A", "B", "C"}));
    EXPECT_EQ(p.dates.size(), 3u);
    EXPECT_EQ(format_date(p.dates[1]), "2020-01-06");
    EXPECT_DOUBLE_EQ(p.close(1, 1), 22.0);
    EXPECT_FALSE(p.volume.has_value());
}

TEST(LoadPriceCsv, DropsNonPositivePriceRows) {
    const char* csv =
        "date,A,B\n"
        "2020-01-02,10,20\n"
        "2020-01-03,-1,21\n"
        "2020-01-06,12,22\n";
    const PricePanel p = parse_price_csv(csv);
    EXPECT_EQ(p.dropped_rows, 1u);
    EXPECT_EQ(p.dates.size(), 2u);
}

TEST(LoadPriceCsv, LongLayoutWithVolume) {
    const char* csv =
        "ticker,date,close,volume\n"
        "A,2020-01-02,10,100\n"
        "B,2020-01-02,20,200\n"
        "A,2020-01-03,11,110\n"
        "B,2020-01-03,21,210\n";
    CsvSchema schema;
    schema.layout = CsvLayout::Long;
    const PricePanel p = parse_price_csv(csv, schema);
    ASSERT_EQ(p.tickers.size(), 2u);
    ASSERT_TRUE(p.volume.has_value());
    EXPECT_DOUBLE_EQ((*p.volume)(1, 1), 210.0);
    EXPECT_DOUBLE_EQ(p.close(0, 1), 11.0);
}

TEST(LoadPriceCsv, WideVolumeColumnsAndTickerSelection) {
    const char* csv =
        "date,A,B,A_volume,B_volume\n"
        "2020-01-02,10,20,5,6\n"
        "2020-01-03,11,21,7,8\n";
    CsvSchema schema;
    schema.tickers = {"B"};
    const PricePanel p = parse_price_csv(csv, schema);
    ASSERT_EQ(p.tickers, std::vector<std::string>{"B"});
    EXPECT_DOUBLE_EQ((*p.volume)(0, 1), 8.0);
}

TEST(LoadPriceCsv, MalformedInputIsDataError) {
    EXPECT_THROW(parse_price_csv(""), DataError);
    EXPECT_THROW(parse_price_csv("when,A\n2020-01-02,1\n2020-01-03,2\n"), DataError);
    EXPECT_THROW(parse_price_csv("date,A\n2020-13-45,1\n2020-01-03,2\n"), DataError);
    EXPECT_THROW(parse_price_csv("date,A\n2020-01-02,1\n2020-01-02,2\n"), DataError);
    EXPECT_THROW(parse_price_csv("date,A\n2020-01-02,1\n"), DataError);
    EXPECT_THROW(load_price_csv("/nonexistent/prices.csv"), DataError);
}

TEST(LogReturns, ConstantPricesGiveZero) {
    PricePanel p = random_price_panel(2, 10, 1);
    p.close.setConstant(42.0);
    EXPECT_TRUE(log_returns(p).returns.isZero(0.0));
}

TEST(LogReturns, TwoPrices) {
    PricePanel p = random_price_panel(1, 2, 1);
    p.close << 100.0, 110.0;
    const ReturnPanel r = log_returns(p);
    ASSERT_EQ(r.returns.cols(), 1);
    EXPECT_NEAR(r.returns(0, 0), 0.0953101798, 1e-9);
    EXPECT_EQ(r.dates.front(), p.dates[1]);
}

TEST(LogReturns, CumulativeSumReconstructsPrices) {
    const PricePanel p = random_price_panel(4, 300, 7);
    const ReturnPanel r = log_returns(p);
    for (Eigen::Index i = 0; i < p.close.rows(); ++i) {
        double cum = 0.0;
        for (Eigen::Index t = 1; t < p.close.cols(); ++t) {
            cum += r.returns(i, t - 1);
            EXPECT_NEAR(std::exp(cum) * p.close(i, 0) / p.close(i, t), 1.0, 1e-10);
        }
    }
}

TEST(RealizedVolatility, ZeroReturns) {
    const auto rv = realized_volatility(returns_of(std::vector<double>(30, 0.0)), 21);
    EXPECT_EQ(rv.length(), 10u);
    EXPECT_TRUE(rv.rv.isZero(0.0));
}

TEST(RealizedVolatility, ConstantReturnMagnitude) {
    const auto rv = realized_volatility(returns_of(std::vector<double>(40, 0.01)), 21);
    for (Eigen::Index t = 0; t < rv.rv.cols(); ++t) EXPECT_NEAR(rv.rv(0, t), std::sqrt(21.0) * 0.01, 1e-15);
    EXPECT_NEAR(rv.rv(0, 0), 0.04583, 1e-5);
}

TEST(RealizedVolatility, MatchesDirectSum) {
    const PricePanel p = random_price_panel(3, 200, 11);
    const ReturnPanel r = log_returns(p);
    const auto rv = realized_volatility(r, 5);
    EXPECT_LT((rv.rv - rv_oracle(r.returns, 5)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(rv.dates.front(), r.dates[4]);
    EXPECT_EQ(rv.window_m, 5);
}

TEST(RealizedVolatility, MonteCarloMeanForIidNormal) {
    const auto rv = realized_volatility(returns_of(normal_series(5000, 0.01, 2024)), 21);
    const double mean = rv.rv.mean();
    EXPECT_GE(mean, 0.040);
    EXPECT_LE(mean, 0.052);
}

TEST(RealizedVolatility, ScalesLinearlyWithReturns) {
    const auto base = returns_of(normal_series(200, 0.01, 5));
    ReturnPanel scaled = base;
    scaled.returns *= 4.0;  // power of two keeps the comparison exact
    const auto a = realized_volatility(base, 21);
    const auto b = realized_volatility(scaled, 21);
    EXPECT_TRUE(((b.rv - 4.0 * a.rv).array() == 0.0).all());
    scaled.returns = base.returns * 3.7;
    const auto c = realized_volatility(scaled, 21);
    EXPECT_LT(((c.rv - 3.7 * a.rv).array() / a.rv.array()).abs().maxCoeff(), 1e-14);
}

TEST(RealizedVolatility, RejectsBadWindow) {
    EXPECT_THROW(realized_volatility(returns_of({0.1, 0.2}), 0), std::invalid_argument);
    EXPECT_THROW(realized_volatility(returns_of({0.1, 0.2}), 5), DataError);
}

TEST(SplitSeries, LengthsFromFractions) {
    const Split s = split_indices(10, {0.5, 0.2, 0.3});
    EXPECT_EQ(s.train.size(), 5u);
    EXPECT_EQ(s.validation.size(), 2u);
    EXPECT_EQ(s.test.size(), 3u);
}

TEST(SplitSeries, DegenerateFractions) {
    EXPECT_THROW(split_indices(10, {1.0, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(split_indices(10, {0.5, 0.2, 0.2}), std::invalid_argument);
    EXPECT_THROW(split_indices(2, {0.5, 0.2, 0.3}), DataError);
}

TEST(SplitSeries, SegmentsPartitionTheSample) {
    for (std::size_t len : {7u, 10u, 97u, 1000u, 3779u}) {
        const Split s = split_indices(len, {0.6, 0.15, 0.25});
        EXPECT_EQ(s.train.begin, 0u);
        EXPECT_EQ(s.train.end, s.validation.begin);
        EXPECT_EQ(s.validation.end, s.test.begin);
        EXPECT_EQ(s.test.end, len);
        EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), len);
    }
}

TEST(DescriptiveStats, SmallHandExample) {
    const std::vector<double> x{1, 1, 1, 1, 1, 1, 1, 2};
    const SeriesStats s = descriptive_stats(x);
    EXPECT_DOUBLE_EQ(s.mean, 1.125);
    // Sample variance: sum of squared deviations 7/8 over 7.
    EXPECT_NEAR(s.std_dev, std::sqrt(0.875 / 7.0), 1e-15);
    // The series is 1 + Bernoulli(1/8), whose moments are known in closed form.
    const double p = 0.125;
    EXPECT_NEAR(s.skewness, (1 - 2 * p) / std::sqrt(p * (1 - p)), 1e-12);
    EXPECT_NEAR(s.kurtosis, (1 - 3 * p + 3 * p * p) / (p * (1 - p)), 1e-12);
}

TEST(DescriptiveStats, StandardNormalMoments) {
    const SeriesStats s = descriptive_stats(normal_series(100000, 1.0, 99));
    EXPECT_NEAR(s.skewness, 0.0, 0.05);
    EXPECT_NEAR(s.kurtosis, 3.0, 0.1);
}

TEST(DescriptiveStats, AffineTransform) {
    const auto x = normal_series(500, 1.0, 3);
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(x[i]);  // skewed
    const SeriesStats base = descriptive_stats(e);
    for (double b : {2.5, -0.5}) {
        std::vector<double> y(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) y[i] = 3.0 + b * e[i];
        const SeriesStats s = descriptive_stats(y);
        EXPECT_NEAR(s.mean, 3.0 + b * base.mean, 1e-12);
        EXPECT_NEAR(s.std_dev, std::abs(b) * base.std_dev, 1e-12);
        EXPECT_NEAR(s.skewness, (b > 0 ? 1.0 : -1.0) * base.skewness, 1e-9);
        EXPECT_NEAR(s.kurtosis, base.kurtosis, 1e-9);
    }
}

TEST(DescriptiveStats, Degenerate) {
    EXPECT_THROW(descriptive_stats(std::vector<double>(10, 1.0)), NumericalError);
    EXPECT_THROW(descriptive_stats(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(AdfTest, RandomWalkIsNotRejected) {
    int not_rejected = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto steps = normal_series(2000, 1.0, 500 + seed);
        std::partial_sum(steps.begin(), steps.end(), steps.begin());
        if (adf_test(steps, default_adf_max_lag(steps.size())).p_value > 0.10) ++not_rejected;
    }
    EXPECT_GE(not_rejected, 6);
}

TEST(AdfTest, WhiteNoiseIsStronglyRejected) {
    const auto x = normal_series(2000, 1.0, 17);
    const AdfResult r = adf_test(x, default_adf_max_lag(x.size()));
    EXPECT_LT(r.statistic, -15.0);
    EXPECT_LT(r.p_value, 0.01);
}

TEST(AdfTest, StatisticIsScaleInvariant) {
    auto x = normal_series(600, 1.0, 8);
    for (std::size_t i = 1; i < x.size(); ++i) x[i] += 0.7 * x[i - 1];
    const AdfResult a = adf_test(x, 6);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.013 * x[i];
    const AdfResult b = adf_test(y, 6);
    EXPECT_EQ(a.lags, b.lags);
    EXPECT_NEAR(a.statistic, b.statistic, 1e-9 * std::abs(a.statistic));
}

TEST(AdfTest, PValueIsMonotoneInTheStatistic) {
    double prev = 0.0;
    for (double stat = -8.0; stat <= 3.0; stat += 0.25) {
        const double p = mackinnon_p_value(stat);
        EXPECT_GE(p, prev);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        prev = p;
    }
    // Textbook 5% critical value for the constant-only case.
    EXPECT_NEAR(mackinnon_p_value(-2.86), 0.05, 0.005);
}

TEST(PanelStats, OneEntryPerSeries) {
    const auto rv = split_series(realized_volatility(log_returns(random_price_panel(3, 400, 4)), 21), {});
    const auto stats = panel_stats(rv);
    ASSERT_EQ(stats.size(), 3u);
    for (const auto& s : stats) {
        EXPECT_GT(s.mean, 0.0);
        EXPECT_GE(s.adf_p_value, 0.0);
        EXPECT_LE(s.adf_p_value, 1.0);
    }
}

TEST(DateRange, InclusiveBounds) {
    const auto days = business_days(Date{std::chrono::year{2021}, std::chrono::March, std::chrono::day{1}}, 10);
    const auto idx = date_range_indices(days, days[2], days[5]);
    EXPECT_EQ(idx, (std::vector<std::size_t>{2, 3, 4, 5}));
}
