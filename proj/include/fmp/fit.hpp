#pragma once
#include <span>

namespace fmp {

struct PowerFit {
    double slope = 0.0;
    double intercept = 0.0; ///< natural log of the prefactor
    double residual = 0.0;  ///< norm of the log-space residual vector
};

/// Least-squares line through (log N, log cost). Needs at least three
/// distinct N and positive costs.
PowerFit fit_exponent(std::span<const double> n, std::span<const double> cost);

} // namespace fmp
