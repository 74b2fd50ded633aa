#include "volgraph/data_ingest.hpp"

#include "volgraph/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace volgraph {

std::optional<Date> parse_date(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto parse = [&](std::size_t pos, std::size_t len, auto& out) {
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return ec == std::errc() && ptr == text.data() + pos + len;
    };
    if (!parse(0, 4, y) || !parse(5, 2, m) || !parse(8, 2, d)) return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ' && text[10] != '"') return std::nullopt;
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

Eigen::MatrixXd VolatilityPanel::train_block() const {
    if (!split) throw std::invalid_argument("volatility panel has no train/validation/test split");
    return rv.middleCols(static_cast<Eigen::Index>(split->train.begin),
                         static_cast<Eigen::Index>(split->train.size()));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Comma split with minimal double-quote handling.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.emplace_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.emplace_back(trim(field));
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct Observation {
    double close = 0.0;
    double volume = 0.0;
};

using SeriesMap = std::map<std::chrono::sys_days, Observation>;

struct Collected {
    std::vector<std::string> tickers;
    std::vector<SeriesMap> series;
    bool has_volume = false;
    std::size_t dropped = 0;
};

std::string line_error(std::size_t line_no, const std::string& msg) {
    return "line " + std::to_string(line_no) + ": " + msg;
}

Collected collect_wide(const std::vector<std::pair<std::size_t, std::string>>& lines, const CsvSchema& schema) {
    const auto header = split_csv_line(lines.front().second);
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    auto date_it = col.find(schema.date_column);
    if (date_it == col.end()) {
        throw DataError(line_error(lines.front().first, "missing date column '" + schema.date_column + "'"));
    }

    Collected out;
    if (!schema.tickers.empty()) {
        out.tickers = schema.tickers;
    } else {
        for (const auto& name : header) {
            const bool is_volume = !schema.volume_suffix.empty() && name.size() > schema.volume_suffix.size() &&
                                   name.ends_with(schema.volume_suffix);
            if (name != schema.date_column && !is_volume) out.tickers.push_back(name);
        }
    }
    if (out.tickers.empty()) throw DataError(line_error(lines.front().first, "no price columns"));

    std::vector<std::size_t> close_col;
    std::vector<std::size_t> volume_col;
    for (const auto& t : out.tickers) {
        auto it = col.find(t);
        if (it == col.end()) throw DataError(line_error(lines.front().first, "missing column for ticker '" + t + "'"));
        close_col.push_back(it->second);
        if (!schema.volume_suffix.empty()) {
            auto vit = col.find(t + schema.volume_suffix);
            if (vit != col.end()) volume_col.push_back(vit->second);
        }
    }
    out.has_volume = !volume_col.empty() && volume_col.size() == out.tickers.size();
    out.series.resize(out.tickers.size());

    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& [line_no, text] = lines[k];
        const auto fields = split_csv_line(text);
        if (fields.size() != header.size()) {
            throw DataError(line_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                                    std::to_string(fields.size())));
        }
        const auto date = parse_date(fields[date_it->second]);
        if (!date) throw DataError(line_error(line_no, "unparseable date '" + fields[date_it->second] + "'"));
        const std::chrono::sys_days day{*date};

        bool bad = false;
        std::vector<std::optional<Observation>> row(out.tickers.size());
        for (std::size_t i = 0; i < out.tickers.size(); ++i) {
            const auto& cell = fields[close_col[i]];
            if (cell.empty()) continue;  // ticker not trading that day
            const auto price = parse_number(cell);
            if (!price || *price <= 0.0) {
                bad = true;
                break;
            }
            Observation obs{*price, 0.0};
            if (out.has_volume) {
                const auto& vcell = fields[volume_col[i]];
                const auto vol = parse_number(vcell);
                if (!vcell.empty() && (!vol || *vol < 0.0)) {
                    bad = true;
                    break;
                }
                obs.volume = vol.value_or(0.0);
            }
            row[i] = obs;
        }
        if (bad) {
            ++out.dropped;
            continue;
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!row[i]) continue;
            if (!out.series[i].emplace(day, *row[i]).second) {
                throw DataError(line_error(line_no, "duplicate date " + format_date(*date)));
            }
        }
    }
    return out;
}

Collected collect_long(const std::vector<std::pair<std::size_t, std::string>>& lines, const CsvSchema& schema) {
    const auto header = split_csv_line(lines.front().second);
    auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto ticker_col = find_col(schema.ticker_column);
    const auto date_col = find_col(schema.date_column);
    const auto close_col = find_col(schema.close_column);
    const auto volume_col = find_col(schema.volume_column);
    if (!ticker_col || !date_col || !close_col) {
        throw DataError(line_error(lines.front().first, "long layout requires columns '" + schema.ticker_column +
                                                            "', '" + schema.date_column + "', '" +
                                                            schema.close_column + "'"));
    }

    Collected out;
    out.has_volume = volume_col.has_value();
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& t : schema.tickers) {
        index.emplace(t, out.tickers.size());
        out.tickers.push_back(t);
    }
    out.series.resize(out.tickers.size());

    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto& [line_no, text] = lines[k];
        const auto fields = split_csv_line(text);
        if (fields.size() != header.size()) {
            throw DataError(line_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                                    std::to_string(fields.size())));
        }
        const auto& ticker = fields[*ticker_col];
        auto it = index.find(ticker);
        if (it == index.end()) {
            if (!schema.tickers.empty()) continue;
            it = index.emplace(ticker, out.tickers.size()).first;
            out.tickers.push_back(ticker);
            out.series.emplace_back();
        }
        const auto date = parse_date(fields[*date_col]);
        if (!date) throw DataError(line_error(line_no, "unparseable date '" + fields[*date_col] + "'"));
        const auto price = parse_number(fields[*close_col]);
        if (fields[*close_col].empty()) continue;
        if (!price || *price <= 0.0) {
            ++out.dropped;
            continue;
        }
        Observation obs{*price, 0.0};
        if (volume_col) {
            const auto& vcell = fields[*volume_col];
            const auto vol = parse_number(vcell);
            if (!vcell.empty() && (!vol || *vol < 0.0)) {
                ++out.dropped;
                continue;
            }
            obs.volume = vol.value_or(0.0);
        }
        if (!out.series[it->second].emplace(std::chrono::sys_days{*date}, obs).second) {
            throw DataError(line_error(line_no, "duplicate date " + format_date(*date) + " for " + ticker));
        }
    }
    if (out.tickers.empty()) throw DataError("no ticker rows found");
    return out;
}

}  // namespace

PricePanel parse_price_csv(std::string_view text, const CsvSchema& schema) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto next = text.find('\n', pos);
        if (next == std::string_view::npos) next = text.size();
        ++line_no;
        auto line = trim(text.substr(pos, next - pos));
        if (!line.empty()) lines.emplace_back(line_no, std::string(line));
        pos = next + 1;
    }
    if (lines.empty()) throw DataError("empty price file");

    Collected c = schema.layout == CsvLayout::Wide ? collect_wide(lines, schema) : collect_long(lines, schema);

    // Dates present for every ticker.
    std::vector<std::chrono::sys_days> common;
    for (const auto& [day, obs] : c.series.front()) {
        const bool everywhere = std::all_of(c.series.begin() + 1, c.series.end(),
                                            [&](const SeriesMap& s) { return s.contains(day); });
        if (everywhere) common.push_back(day);
    }
    if (common.size() < 2) {
        throw DataError("insufficient data: " + std::to_string(common.size()) + " common dates after alignment");
    }

    PricePanel panel;
    panel.tickers = c.tickers;
    panel.dropped_rows = c.dropped;
    const auto n = static_cast<Eigen::Index>(c.tickers.size());
    const auto t = static_cast<Eigen::Index>(common.size());
    panel.close.resize(n, t);
    Eigen::MatrixXd volume(n, t);
    for (Eigen::Index j = 0; j < t; ++j) {
        panel.dates.emplace_back(common[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& obs = c.series[static_cast<std::size_t>(i)].at(common[static_cast<std::size_t>(j)]);
            panel.close(i, j) = obs.close;
            volume(i, j) = obs.volume;
        }
    }
    if (c.has_volume) panel.volume = std::move(volume);
    return panel;
}

PricePanel load_price_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open price file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_price_csv(ss.str(), schema);
}

ReturnPanel log_returns(const PricePanel& panel) {
    if (panel.close.cols() < 2) throw DataError("insufficient data: need at least 2 prices for returns");
    if ((panel.close.array() <= 0.0).any()) throw std::invalid_argument("prices must be strictly positive");
    ReturnPanel out;
    out.tickers = panel.tickers;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    const auto n = panel.close.rows();
    const auto t = panel.close.cols();
    out.returns.resize(n, t - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j + 1 < t; ++j) {
            out.returns(i, j) = std::log(panel.close(i, j + 1) / panel.close(i, j));
        }
    }
    return out;
}

VolatilityPanel realized_volatility(const ReturnPanel& returns, int window_m) {
    if (window_m < 1) throw std::invalid_argument("realized volatility window must be >= 1");
    const auto t = returns.returns.cols();
    if (t <= window_m) {
        throw DataError("insufficient data: window " + std::to_string(window_m) + " needs more than " +
                        std::to_string(t) + " returns");
    }
    VolatilityPanel out;
    out.tickers = returns.tickers;
    out.window_m = window_m;
    const auto n = returns.returns.rows();
    const Eigen::Index width = t - window_m + 1;
    out.rv.resize(n, width);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < width; ++j) {
            // Direct sum per window: no drift from running-sum cancellation.
            double acc = 0.0;
            for (Eigen::Index k = 0; k < window_m; ++k) {
                const double r = returns.returns(i, j + k);
                acc += r * r;
            }
            out.rv(i, j) = std::sqrt(acc);
        }
    }
    if (!returns.dates.empty()) {
        out.dates.assign(returns.dates.begin() + (window_m - 1), returns.dates.end());
    }
    return out;
}

Split split_indices(std::size_t length, SplitFractions f) {
    if (f.train <= 0.0 || f.validation <= 0.0 || f.test <= 0.0) {
        throw std::invalid_argument("split fractions must all be positive");
    }
    if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must sum to 1");
    }
    const auto len = static_cast<double>(length);
    const auto b1 = static_cast<std::size_t>(std::floor(f.train * len + 1e-9));
    const auto b2 = static_cast<std::size_t>(std::floor((f.train + f.validation) * len + 1e-9));
    Split s{{0, b1}, {b1, b2}, {b2, length}};
    if (s.train.size() == 0 || s.validation.size() == 0 || s.test.size() == 0) {
        throw DataError("split leaves an empty segment for series of length " + std::to_string(length));
    }
    return s;
}

VolatilityPanel split_series(VolatilityPanel panel, SplitFractions fractions) {
    panel.split = split_indices(panel.length(), fractions);
    return panel;
}

SeriesStats descriptive_stats(std::span<const double> x) {
    if (x.size() < 8) throw std::invalid_argument("descriptive_stats needs at least 8 observations");
    const auto n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double ss = m2;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 <= 0.0 || m2 <= 1e-300) throw NumericalError("zero variance: skewness and kurtosis undefined");
    SeriesStats s;
    s.mean = mean;
    s.std_dev = std::sqrt(ss / (n - 1.0));
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
    return s;
}

std::vector<SeriesStats> panel_stats(const VolatilityPanel& panel, std::optional<int> max_lag) {
    std::vector<SeriesStats> out;
    for (Eigen::Index i = 0; i < panel.rv.rows(); ++i) {
        const Eigen::VectorXd row = panel.rv.row(i).transpose();
        std::span<const double> view(row.data(), static_cast<std::size_t>(row.size()));
        auto s = descriptive_stats(view);
        const auto adf = adf_test(view, max_lag.value_or(default_adf_max_lag(view.size())));
        s.adf_statistic = adf.statistic;
        s.adf_p_value = adf.p_value;
        out.push_back(s);
    }
    return out;
}

Eigen::MatrixXd aligned_log_volume(const PricePanel& prices, const VolatilityPanel& panel) {
    if (!prices.volume) throw DataError("price panel carries no volume data");
    std::unordered_map<int, Eigen::Index> col;
    for (std::size_t j = 0; j < prices.dates.size(); ++j) {
        col[std::chrono::sys_days{prices.dates[j]}.time_since_epoch().count()] = static_cast<Eigen::Index>(j);
    }
    Eigen::MatrixXd out(panel.rv.rows(), panel.rv.cols());
    for (std::size_t j = 0; j < panel.dates.size(); ++j) {
        auto it = col.find(std::chrono::sys_days{panel.dates[j]}.time_since_epoch().count());
        if (it == col.end()) throw DataError("volume panel lacks date " + format_date(panel.dates[j]));
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            out(i, static_cast<Eigen::Index>(j)) = std::log1p((*prices.volume)(i, it->second));
        }
    }
    return out;
}

std::vector<std::size_t> date_range_indices(std::span<const Date> dates, Date start, Date end) {
    std::vector<std::size_t> out;
    const std::chrono::sys_days lo{start};
    const std::chrono::sys_days hi{end};
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const std::chrono::sys_days d{dates[i]};
        if (d >= lo && d <= hi) out.push_back(i);
    }
    return out;
}

}  // namespace volgraph
