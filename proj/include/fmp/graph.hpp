#pragma once
#include <functional>
#include <span>
#include <vector>

#include <fmp/factor.hpp>

namespace fmp {

/// Data-independent factors do not depend on the observation and can be
/// sorted once, before any message is sent.
enum class FactorRole { data_dependent, data_independent };

/// Variables 0..n-1 and the factors over them, plus variable-to-factor
/// adjacency. A homogeneity class groups factors whose tables are equal up
/// to a positive scale; one sorted copy then serves the whole class.
class FactorGraph {
public:
    explicit FactorGraph(Semiring s = max_sum) : semiring_(s) {}

    int add_variable(int cardinality);
    int add_factor(Factor f, FactorRole role = FactorRole::data_dependent, int homogeneity_class = -1);

    const Semiring& semiring() const { return semiring_; }
    void set_semiring(const Semiring& s) { semiring_ = s; }

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_factors() const { return static_cast<int>(factors_.size()); }
    const Scope& variables() const { return variables_; }
    const Variable& variable(int id) const { return variables_.at(id); }

    std::span<const Factor> factors() const { return factors_; }
    const Factor& factor(int f) const { return factors_.at(f); }
    FactorRole role(int f) const { return roles_.at(f); }
    void set_role(int f, FactorRole role) { roles_.at(f) = role; }
    int homogeneity_class(int f) const { return classes_.at(f); }
    int num_classes() const;

    /// Factors whose scope contains `var`, ascending.
    std::span<const int> factors_of(int var) const { return adjacency_.at(var); }

    /// Pairwise (arity >= 2) factors only.
    Index num_edges() const;

    /// Checks scopes, semiring admissibility and class proportionality.
    void validate() const;

    friend bool operator==(const FactorGraph& a, const FactorGraph& b);

private:
    Semiring semiring_;
    Scope variables_;
    std::vector<Factor> factors_;
    std::vector<FactorRole> roles_;
    std::vector<int> classes_;
    std::vector<std::vector<int>> adjacency_;
};

enum class TopologyKind { chain, ring, grid };

struct Topology {
    TopologyKind kind = TopologyKind::chain;
    int length = 0; ///< chain or ring
    int rows = 0;   ///< grid
    int cols = 0;

    static Topology chain(int q) { return {TopologyKind::chain, q, 0, 0}; }
    static Topology ring(int q) { return {TopologyKind::ring, q, 0, 0}; }
    static Topology grid(int r, int c) { return {TopologyKind::grid, 0, r, c}; }

    int num_variables() const { return kind == TopologyKind::grid ? rows * cols : length; }
};

/// Unary table for variable `var`.
using UnaryGenerator = std::function<Eigen::ArrayXd(int var, int n)>;
/// Pairwise table over (a, b), a < b, row-major.
using PairwiseGenerator = std::function<Eigen::ArrayXd(int a, int b, int n)>;

/// Builds a chain (edges i,i+1), ring (chain plus 0,Q-1) or grid (variable
/// r*C+c, right and down neighbours). Pairwise factors are data-independent
/// and listed before the unary ones; with `homogeneous` the generator is
/// called once and every edge shares that table in class 0.
FactorGraph build_topology(const Topology& topo, int n, const UnaryGenerator& unary,
                           const PairwiseGenerator& pairwise, const Semiring& s, bool homogeneous = false);

/// (a, b) variable pairs of the topology's edges, in factor order.
std::vector<std::pair<int, int>> topology_edges(const Topology& topo);

} // namespace fmp
