#pragma once
#include <optional>
#include <string>
#include <vector>

#include <fmp/clique.hpp>
#include <fmp/factor.hpp>

namespace fmp {

/// One row of the cost table: coefficient * N^exponent * (log N)^log_power,
/// with N the largest cardinality in the clique and exponents counted in
/// variables weighted by log_N(cardinality).
struct CostTerm {
    std::string label;
    double coefficient = 1.0;
    double exponent = 0.0;
    int log_power = 0;

    double evaluate(double n) const;
};

struct CostEstimate {
    std::vector<CostTerm> terms;

    /// Sum of all terms at a concrete N.
    double total(double n) const;
    /// Dominant exponent, then its log power and summed coefficient.
    double exponent() const;
    int log_power() const;
    double leading_coefficient() const;

    /// Asymptotic order: exponent, then log power, then coefficient.
    friend bool operator<(const CostEstimate& a, const CostEstimate& b);
};

/// Factors of a clique split into X (index 0, holds the target) and K
/// further groups.
struct Grouping {
    std::vector<std::vector<int>> groups; ///< factor indices; groups[0] = X, may be empty
    Scope target;                         ///< M
    std::vector<Scope> vars;              ///< variables of each group; vars[0] includes M
    Scope x_prime;                        ///< ((Y u Z u ...) n X) u M
    std::vector<Scope> interfaces;        ///< Y', Z', ...: what each group shares with the rest
    std::vector<Scope> conditioning;      ///< per non-X group: interface n X'
    Scope eliminated;                     ///< union of interface \ X', searched jointly
    CostEstimate cost;

    int k() const { return static_cast<int>(groups.size()) - 1; }
};

/// Thrown when no grouping with the requested number of groups exists.
class grouping_error : public domain_error {
public:
    grouping_error(const std::string& what, int smallest_feasible)
        : domain_error(what), smallest_feasible_(smallest_feasible) {}

    /// Smallest feasible group count; 1 means only plain enumeration applies.
    int smallest_feasible_groups() const noexcept { return smallest_feasible_; }

private:
    int smallest_feasible_;
};

/// Builds and checks a grouping. Every non-X group must be non-empty and
/// must share at least one variable outside X' with the other groups.
Grouping make_grouping(std::span<const Factor> factors, const Scope& target, std::vector<std::vector<int>> groups);

/// Cost of enumerating the whole clique.
CostEstimate brute_cost(std::span<const Factor> factors, const Scope& target);

/// Cheapest grouping into K+1 groups. Exhaustive up to 12 factors, seeded
/// local search beyond that.
Grouping split_groups(std::span<const Factor> factors, const Scope& target, int k);

/// Cheapest grouping over K = 2..max_k, or none when nothing beats brute
/// force.
std::optional<Grouping> best_grouping(std::span<const Factor> factors, const Scope& target, int max_k = 4);

struct GroupedOptions {
    ArgmaxMode mode = ArgmaxMode::early_stop;
    /// Group marginals are themselves split when that lowers the exponent.
    bool recurse = true;
    int max_depth = 8;
    /// Below this many joint states of the eliminated set a plain scan is used.
    Index min_fast_states = 8;
    ProbeStats* stats = nullptr;
};

/// Max-marginal of the clique onto `target` via the grouping: each group is
/// marginalized onto its interface, the eliminated variables are searched
/// with sorted lists per assignment of X'.
Factor max_marginal_grouped(std::span<const Factor> factors, const Scope& target, const Grouping& grouping,
                            const Semiring& s, const GroupedOptions& opts = {});

} // namespace fmp
