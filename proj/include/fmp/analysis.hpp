#pragma once
#include <fmp/factor.hpp>

namespace fmp {

/// P(M > m): probability that a uniformly random permutation of N has no
/// entry inside the top-left m x m square, (N-m)!^2 / ((N-2m)! N!).
/// Evaluated through lgamma; 0 once m exceeds floor(N/2).
double prob_exceed(Index n, Index m);

/// E(M) = sum_{m=0}^{floor(N/2)} P(M > m).
double expected_steps(Index n);

/// E(M) for K lists by enumerating all (N!)^(K-1) permutation tuples, where
/// M is the width of the smallest hypercube holding some entry
/// (i, p_1[i], ..., p_{K-1}[i]).
double expected_steps_enumerate(Index n, int k, Index cap = default_enumeration_cap);

/// N^((K-1)/K).
double step_bound(Index n, int k);

/// Steps M of one configuration: 1 + min_i max(i, p_1[i], ..., p_{K-1}[i]).
Index hypercube_width(std::span<const std::vector<int>> perms);

} // namespace fmp
