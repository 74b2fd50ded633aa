#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace volgraph {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD (an optional time suffix after 'T' or ' ' is ignored).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Half-open index range [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
    [[nodiscard]] bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
    bool operator==(const IndexRange&) const = default;
};

/// Chronological train/validation/test partition of a series.
struct Split {
    IndexRange train;
    IndexRange validation;
    IndexRange test;
};

struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd close;                 // N x T, rows are tickers
    std::optional<Eigen::MatrixXd> volume; // N x T share counts
    std::size_t dropped_rows = 0;          // rows rejected for non-positive / non-numeric prices
};

struct ReturnPanel {
    std::vector<Date> dates;  // date of the later close in each pair
    std::vector<std::string> tickers;
    Eigen::MatrixXd returns;  // N x (T-1) daily log returns
};

struct VolatilityPanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd rv;  // N x T'
    int window_m = 0;
    std::optional<Split> split;

    [[nodiscard]] std::size_t length() const noexcept { return static_cast<std::size_t>(rv.cols()); }
    [[nodiscard]] std::size_t num_series() const noexcept { return static_cast<std::size_t>(rv.rows()); }
    /// Columns of the training partition (throws when the panel is not split).
    [[nodiscard]] Eigen::MatrixXd train_block() const;
};

struct SeriesStats {
    double mean = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // raw (normal = 3)
    double adf_statistic = 0.0;
    double adf_p_value = 1.0;
};

enum class CsvLayout { Wide, Long };

/// Column mapping for price files.
///
/// Wide: one `date_column` plus one close column per ticker; volumes come from
/// columns named `<ticker><volume_suffix>` when present.
/// Long: rows of `ticker_column,date_column,close_column[,volume_column]`.
struct CsvSchema {
    CsvLayout layout = CsvLayout::Wide;
    std::string date_column = "date";
    std::vector<std::string> tickers;  // empty: every non-date, non-volume column (wide) / every ticker seen (long)
    std::string volume_suffix = "_volume";
    std::string ticker_column = "ticker";
    std::string close_column = "close";
    std::string volume_column = "volume";
};

PricePanel load_price_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
PricePanel parse_price_csv(std::string_view text, const CsvSchema& schema = {});

ReturnPanel log_returns(const PricePanel& panel);

/// rv[i][t] = sqrt(sum of the last `window_m` squared returns); first window_m-1 positions dropped.
VolatilityPanel realized_volatility(const ReturnPanel& returns, int window_m);

struct SplitFractions {
    double train = 0.5;
    double validation = 0.2;
    double test = 0.3;
};

VolatilityPanel split_series(VolatilityPanel panel, SplitFractions fractions);
Split split_indices(std::size_t length, SplitFractions fractions);

/// Mean, sample std (n-1), moment skewness and raw kurtosis. ADF fields left at defaults.
SeriesStats descriptive_stats(std::span<const double> series);

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int lags = 0;
    std::size_t nobs = 0;
};

/// Augmented Dickey-Fuller with constant, no trend; lag order chosen by AIC over 0..max_lag.
AdfResult adf_test(std::span<const double> series, int max_lag);

/// MacKinnon approximate p-value for the constant-only, single-series ADF statistic.
double mackinnon_p_value(double statistic);

/// Schwert's rule 12*(n/100)^(1/4), the customary default upper lag.
int default_adf_max_lag(std::size_t n);

/// Descriptive stats plus ADF for each row of the panel.
std::vector<SeriesStats> panel_stats(const VolatilityPanel& panel, std::optional<int> max_lag = std::nullopt);

/// Volume series aligned to the volatility panel's dates (log(1+volume)).
Eigen::MatrixXd aligned_log_volume(const PricePanel& prices, const VolatilityPanel& panel);

/// Indices (into `panel.dates`) whose date lies in [start, end].
std::vector<std::size_t> date_range_indices(std::span<const Date> dates, Date start, Date end);

}  // namespace volgraph
