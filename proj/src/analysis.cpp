#include <fmp/analysis.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmp/error.hpp>

namespace fmp {

double prob_exceed(Index n, Index m)
{
    if (n < 0 || m < 0) throw domain_error("prob_exceed: negative argument");
    if (m == 0) return 1.0;
    if (2 * m > n) return 0.0;
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    const double log_p = 2.0 * std::lgamma(nn - mm + 1.0) - std::lgamma(nn - 2.0 * mm + 1.0) - std::lgamma(nn + 1.0);
    return std::exp(log_p);
}

double expected_steps(Index n)
{
    if (n < 1) throw domain_error("expected_steps: N must be at least 1");
    double sum = 0.0;
    for (Index m = 0; m <= n / 2; ++m) sum += prob_exceed(n, m);
    return sum;
}

Index hypercube_width(std::span<const std::vector<int>> perms)
{
    if (perms.empty()) throw domain_error("hypercube_width: no permutations");
    const std::size_t n = perms[0].size();
    Index best = static_cast<Index>(n);
    for (std::size_t i = 0; i < n; ++i) {
        Index w = static_cast<Index>(i);
        for (const auto& p : perms) w = std::max<Index>(w, p[i]);
        best = std::min(best, w);
    }
    return best + 1;
}

double expected_steps_enumerate(Index n, int k, Index cap)
{
    if (n < 1) throw domain_error("expected_steps_enumerate: N must be at least 1");
    if (k < 2) throw domain_error("expected_steps_enumerate: K must be at least 2");

    double count = 1.0;
    double fact = 1.0;
    for (Index i = 2; i <= n; ++i) fact *= static_cast<double>(i);
    for (int j = 1; j < k; ++j) count *= fact;
    if (count > static_cast<double>(cap)) {
        throw resource_error("expected_steps_enumerate: (N!)^(K-1) exceeds the enumeration cap");
    }

    std::vector<int> identity(n);
    std::iota(identity.begin(), identity.end(), 0);
    std::vector<std::vector<int>> perms(k - 1, identity);

    // Odometer over permutation tuples, each position stepping through
    // next_permutation.
    long double total = 0.0L;
    Index configs = 0;
    for (;;) {
        total += static_cast<long double>(hypercube_width(perms));
        ++configs;
        int pos = k - 2;
        while (pos >= 0 && !std::next_permutation(perms[pos].begin(), perms[pos].end())) --pos;
        if (pos < 0) break;
    }
    return static_cast<double>(total / static_cast<long double>(configs));
}

double step_bound(Index n, int k)
{
    if (n < 1 || k < 2) throw domain_error("step_bound: need N >= 1 and K >= 2");
    return std::pow(static_cast<double>(n), static_cast<double>(k - 1) / k);
}

} // namespace fmp
