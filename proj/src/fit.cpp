#include <fmp/fit.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include <fmp/error.hpp>

namespace fmp {

PowerFit fit_exponent(std::span<const double> n, std::span<const double> cost)
{
    if (n.size() != cost.size()) throw domain_error("fit_exponent: N and cost lengths differ");
    std::vector<double> distinct(n.begin(), n.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw domain_error("fit_exponent: need at least three distinct N");

    const auto m = static_cast<Eigen::Index>(n.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(n[i] > 0.0) || !(cost[i] > 0.0)) throw domain_error("fit_exponent: N and costs must be positive");
        a(i, 0) = std::log(n[i]);
        a(i, 1) = 1.0;
        y(i) = std::log(cost[i]);
    }
    const Eigen::Vector2d beta = a.colPivHouseholderQr().solve(y);
    PowerFit fit;
    fit.slope = beta(0);
    fit.intercept = beta(1);
    fit.residual = (a * beta - y).norm();
    return fit;
}

} // namespace fmp
