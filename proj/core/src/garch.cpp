#include "volgraph/garch.hpp"

#include "detail/nelder_mead.hpp"
#include "volgraph/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace volgraph {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr std::size_t kMinFitLength = 250;
constexpr std::size_t kBurnIn = 500;

void check_positivity(const GarchParams& p, const GarchSpec& spec) {
    spec.validate();
    if (p.alpha.size() != static_cast<std::size_t>(spec.p) || p.beta.size() != static_cast<std::size_t>(spec.q)) {
        throw std::invalid_argument("GARCH parameter lengths do not match the spec orders");
    }
    if (!(p.omega0 > 0.0)) throw std::invalid_argument("GARCH omega0 must be > 0");
    for (double a : p.alpha) {
        if (!(a >= 0.0)) throw std::invalid_argument("GARCH alpha coefficients must be >= 0");
    }
    for (double b : p.beta) {
        if (!(b >= 0.0)) throw std::invalid_argument("GARCH beta coefficients must be >= 0");
    }
}

double mean_square_deviation(std::span<const double> r, double mu) {
    double acc = 0.0;
    for (double x : r) acc += (x - mu) * (x - mu);
    return acc / static_cast<double>(r.size());
}

// Filter without validation; used inside the optimiser.
void filter_into(std::span<const double> r, const GarchParams& p, double seed, std::vector<double>& h) {
    const std::size_t n = r.size();
    h.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = p.omega0;
        for (std::size_t i = 1; i <= p.alpha.size(); ++i) {
            const double e2 = t >= i ? (r[t - i] - p.mu) * (r[t - i] - p.mu) : seed;
            v += p.alpha[i - 1] * e2;
        }
        for (std::size_t j = 1; j <= p.beta.size(); ++j) {
            v += p.beta[j - 1] * (t >= j ? h[t - j] : seed);
        }
        h[t] = v;
    }
}

double likelihood_from(std::span<const double> r, const GarchParams& p, const std::vector<double>& h,
                       std::size_t burn) {
    double ll = 0.0;
    for (std::size_t t = burn; t < r.size(); ++t) {
        const double e = r[t] - p.mu;
        ll += -0.5 * kLog2Pi - 0.5 * std::log(h[t]) - e * e / (2.0 * h[t]);
    }
    return ll;
}

// theta = [mu, log omega0, z_1..z_{p+q}]; (alpha, beta, slack) = softmax(z, 0).
GarchParams decode(const Eigen::VectorXd& theta, const GarchSpec& spec) {
    GarchParams p;
    p.mu = theta(0);
    p.omega0 = std::exp(theta(1));
    const auto k = static_cast<Eigen::Index>(spec.p + spec.q);
    const double zmax = std::max(0.0, k > 0 ? theta.tail(k).maxCoeff() : 0.0);
    double denom = std::exp(-zmax);
    for (Eigen::Index i = 0; i < k; ++i) denom += std::exp(theta(2 + i) - zmax);
    for (int i = 0; i < spec.p; ++i) p.alpha.push_back(std::exp(theta(2 + i) - zmax) / denom);
    for (int j = 0; j < spec.q; ++j) p.beta.push_back(std::exp(theta(2 + spec.p + j) - zmax) / denom);
    return p;
}

Eigen::VectorXd encode(const GarchParams& p, const GarchSpec& spec) {
    Eigen::VectorXd theta(2 + spec.p + spec.q);
    theta(0) = p.mu;
    theta(1) = std::log(p.omega0);
    const double slack = 1.0 - p.persistence();
    for (int i = 0; i < spec.p; ++i) theta(2 + i) = std::log(p.alpha[static_cast<std::size_t>(i)] / slack);
    for (int j = 0; j < spec.q; ++j) theta(2 + spec.p + j) = std::log(p.beta[static_cast<std::size_t>(j)] / slack);
    return theta;
}

}  // namespace

void GarchSpec::validate() const {
    if (p < 1) throw std::invalid_argument("GARCH order p must be >= 1");
    if (q < 0) throw std::invalid_argument("GARCH order q must be >= 0");
}

double GarchParams::persistence() const {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0) + std::accumulate(beta.begin(), beta.end(), 0.0);
}

double GarchParams::unconditional_variance() const { return omega0 / (1.0 - persistence()); }

void GarchParams::validate(const GarchSpec& spec) const {
    check_positivity(*this, spec);
    if (!(persistence() < 1.0)) throw std::invalid_argument("GARCH parameters are not covariance stationary");
}

std::vector<double> garch_filter(std::span<const double> returns, const GarchParams& params, const GarchSpec& spec,
                                 std::optional<double> seed_variance) {
    check_positivity(params, spec);
    if (returns.size() <= static_cast<std::size_t>(std::max(spec.p, spec.q))) {
        throw std::invalid_argument("GARCH filter needs more observations than max(p, q)");
    }
    const double seed = seed_variance.value_or(mean_square_deviation(returns, params.mu));
    if (!(seed >= 0.0)) throw std::invalid_argument("GARCH seed variance must be >= 0");
    std::vector<double> h;
    filter_into(returns, params, seed, h);
    return h;
}

double garch_log_likelihood(std::span<const double> returns, const GarchParams& params, const GarchSpec& spec) {
    const auto h = garch_filter(returns, params, spec);
    const double ll = likelihood_from(returns, params, h, static_cast<std::size_t>(std::max(spec.p, spec.q)));
    if (!std::isfinite(ll)) throw NumericalError("GARCH log-likelihood is not finite");
    return ll;
}

GarchFit fit_garch(std::span<const double> returns, const GarchSpec& spec) {
    spec.validate();
    if (returns.size() < kMinFitLength) {
        throw DataError("GARCH fit needs at least " + std::to_string(kMinFitLength) + " observations");
    }
    const double n = static_cast<double>(returns.size());
    const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
    const double var = mean_square_deviation(returns, mean);
    // Relative to the mean so that rounding noise in a constant series still counts as zero variance.
    if (!(var > 1e-24 * std::max(mean * mean, 1e-300))) {
        throw DataError("zero-variance return series; GARCH is not identified");
    }

    GarchParams start;
    start.mu = mean;
    const double alpha_total = spec.q > 0 ? 0.05 : 0.3;
    const double beta_total = spec.q > 0 ? 0.90 : 0.0;
    start.alpha.assign(static_cast<std::size_t>(spec.p), alpha_total / spec.p);
    start.beta.assign(static_cast<std::size_t>(spec.q), spec.q > 0 ? beta_total / spec.q : 0.0);
    start.omega0 = var * (1.0 - alpha_total - beta_total);

    const auto burn = static_cast<std::size_t>(std::max(spec.p, spec.q));
    std::vector<double> h;
    auto objective = [&](const Eigen::VectorXd& theta) {
        const auto p = decode(theta, spec);
        if (!(p.omega0 > 0.0) || !std::isfinite(p.omega0)) return std::numeric_limits<double>::infinity();
        filter_into(returns, p, mean_square_deviation(returns, p.mu), h);
        return -likelihood_from(returns, p, h, burn) / n;
    };

    Eigen::VectorXd theta = encode(start, spec);
    Eigen::VectorXd steps = Eigen::VectorXd::Constant(theta.size(), 0.5);
    steps(0) = 0.1 * std::sqrt(var);

    // Restart from the incumbent until the objective stops moving.
    int total_iterations = 0;
    bool converged = false;
    double previous = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 4; ++restart) {
        const auto res = detail::nelder_mead(objective, theta, steps);
        total_iterations += res.iterations;
        theta = res.x;
        converged = res.converged;
        if (!res.converged || std::abs(previous - res.value) <= 1e-10 * (1.0 + std::abs(res.value))) break;
        previous = res.value;
        steps *= 0.5;
        steps(0) = std::max(steps(0), 1e-3 * std::sqrt(var));
    }

    GarchFit fit;
    fit.params = decode(theta, spec);
    fit.params.validate(spec);
    fit.h_series = garch_filter(returns, fit.params, spec);
    fit.log_likelihood = likelihood_from(returns, fit.params, fit.h_series, burn);
    if (!std::isfinite(fit.log_likelihood)) throw NumericalError("GARCH fit produced a non-finite likelihood");
    fit.converged = converged;
    fit.iterations = total_iterations;
    return fit;
}

std::vector<double> simulate_garch(const GarchParams& params, const GarchSpec& spec, std::size_t length,
                                   std::uint64_t seed) {
    params.validate(spec);
    if (length < 1) throw std::invalid_argument("simulation length must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);

    const double uncond = params.unconditional_variance();
    const std::size_t total = length + kBurnIn;
    std::vector<double> eps2(total, 0.0);
    std::vector<double> h(total, 0.0);
    std::vector<double> out;
    out.reserve(length);
    for (std::size_t t = 0; t < total; ++t) {
        double v = params.omega0;
        for (std::size_t i = 1; i <= params.alpha.size(); ++i) v += params.alpha[i - 1] * (t >= i ? eps2[t - i] : uncond);
        for (std::size_t j = 1; j <= params.beta.size(); ++j) v += params.beta[j - 1] * (t >= j ? h[t - j] : uncond);
        h[t] = v;
        const double e = std::sqrt(v) * z(rng);
        eps2[t] = e * e;
        if (t >= kBurnIn) out.push_back(params.mu + e);
    }
    return out;
}

Eigen::MatrixXd garch_volatility_features(const ReturnPanel& returns, const VolatilityPanel& panel,
                                          const GarchSpec& spec) {
    if (!panel.split) throw std::invalid_argument("GARCH features need a split volatility panel");
    const auto offset = static_cast<std::size_t>(panel.window_m - 1);
    const auto n_returns = static_cast<std::size_t>(returns.returns.cols());
    if (n_returns != panel.length() + offset || returns.returns.rows() != panel.rv.rows()) {
        throw std::invalid_argument("return panel does not line up with the volatility panel");
    }
    const std::size_t train_returns = panel.split->train.end + offset;

    Eigen::MatrixXd out(panel.rv.rows(), panel.rv.cols());
    for (Eigen::Index i = 0; i < returns.returns.rows(); ++i) {
        const Eigen::VectorXd row = returns.returns.row(i).transpose();
        std::span<const double> all(row.data(), n_returns);
        const auto train = all.first(train_returns);
        const auto fit = fit_garch(train, spec);
        const auto h = garch_filter(all, fit.params, spec, mean_square_deviation(train, fit.params.mu));
        for (Eigen::Index t = 0; t < out.cols(); ++t) {
            out(i, t) = std::sqrt(h[static_cast<std::size_t>(t) + offset]);
        }
    }
    return out;
}

}  // namespace volgraph
