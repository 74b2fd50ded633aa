#include "detail/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace volgraph::detail {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& steps, const NelderMeadOptions& options) {
    const auto n = x0.size();
    auto eval = [&](const Eigen::VectorXd& x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<Eigen::VectorXd> pts;
    std::vector<double> vals;
    pts.push_back(x0);
    vals.push_back(eval(x0));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd x = x0;
        x(i) += steps(i);
        pts.push_back(x);
        vals.push_back(eval(x));
    }

    std::vector<std::size_t> order(pts.size());
    NelderMeadResult res;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double diameter = 0.0;
        for (const auto& p : pts) diameter = std::max(diameter, (p - pts[best]).lpNorm<Eigen::Infinity>());
        const double spread = std::abs(vals[worst] - vals[best]);
        if (std::isfinite(vals[worst]) &&
            spread <= options.f_tolerance * (std::abs(vals[best]) + options.f_tolerance) &&
            diameter <= options.x_tolerance * (1.0 + pts[best].lpNorm<Eigen::Infinity>())) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i != worst) centroid += pts[i];
        }
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
        const double f_reflected = eval(reflected);
        if (f_reflected < vals[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                pts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                pts[worst] = reflected;
                vals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < vals[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double f_contracted = eval(contracted);
        if (f_contracted < (outside ? f_reflected : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = f_contracted;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }

    const auto best_it = std::min_element(vals.begin(), vals.end());
    const auto best = static_cast<std::size_t>(best_it - vals.begin());
    res.x = pts[best];
    res.value = vals[best];
    res.iterations = it;
    return res;
}

}  // namespace volgraph::detail
