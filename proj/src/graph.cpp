#include <fmp/graph.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace fmp {

int FactorGraph::add_variable(int cardinality)
{
    if (cardinality < 1) throw domain_error("variable cardinality must be at least 1");
    const int id = num_variables();
    variables_.push_back({id, cardinality});
    adjacency_.emplace_back();
    return id;
}

int FactorGraph::add_factor(Factor f, FactorRole role, int homogeneity_class)
{
    for (const auto& v : f.scope()) {
        if (v.id < 0 || v.id >= num_variables()) {
            throw domain_error("factor refers to undeclared variable " + std::to_string(v.id));
        }
        if (variables_[v.id].cardinality != v.cardinality) {
            throw domain_error("factor disagrees on the cardinality of variable " + std::to_string(v.id));
        }
    }
    const int id = num_factors();
    for (const auto& v : f.scope()) adjacency_[v.id].push_back(id);
    factors_.push_back(std::move(f));
    roles_.push_back(role);
    classes_.push_back(homogeneity_class);
    return id;
}

int FactorGraph::num_classes() const
{
    int top = -1;
    for (int c : classes_) top = std::max(top, c);
    return top + 1;
}

Index FactorGraph::num_edges() const
{
    return std::count_if(factors_.begin(), factors_.end(), [](const Factor& f) { return f.arity() >= 2; });
}

void FactorGraph::validate() const
{
    for (int f = 0; f < num_factors(); ++f) {
        fmp::validate(factors_[f], semiring_);
    }
    std::vector<int> first(num_classes(), -1);
    for (int f = 0; f < num_factors(); ++f) {
        const int c = classes_[f];
        if (c < 0) continue;
        if (first[c] < 0) {
            first[c] = f;
            continue;
        }
        const Factor& a = factors_[first[c]];
        const Factor& b = factors_[f];
        if (a.size() != b.size() || a.arity() != b.arity()) {
            throw domain_error("homogeneity class " + std::to_string(c) + " mixes table shapes");
        }
        for (int p = 0; p < a.arity(); ++p) {
            if (a.scope()[p].cardinality != b.scope()[p].cardinality) {
                throw domain_error("homogeneity class " + std::to_string(c) + " mixes table shapes");
            }
        }
        // b = scale * a with scale > 0, taken from the largest-magnitude entry.
        Index pivot = 0;
        a.values().abs().maxCoeff(&pivot);
        if (a[pivot] == 0.0) {
            if ((b.values() != 0.0).any()) throw domain_error("homogeneity class " + std::to_string(c) + " is not proportional");
            continue;
        }
        const double scale = b[pivot] / a[pivot];
        const double tol = 1e-9 * std::max(1.0, std::abs(b[pivot]));
        if (!(scale > 0.0) || ((b.values() - scale * a.values()).abs() > tol).any()) {
            throw domain_error("homogeneity class " + std::to_string(c) + " is not proportional");
        }
    }
}

bool operator==(const FactorGraph& a, const FactorGraph& b)
{
    return a.semiring_ == b.semiring_ && a.variables_ == b.variables_ && a.factors_ == b.factors_ &&
           a.roles_ == b.roles_ && a.classes_ == b.classes_;
}

std::vector<std::pair<int, int>> topology_edges(const Topology& topo)
{
    std::vector<std::pair<int, int>> edges;
    switch (topo.kind) {
        case TopologyKind::chain:
            if (topo.length < 2) throw domain_error("chain needs at least 2 nodes");
            for (int i = 0; i + 1 < topo.length; ++i) edges.emplace_back(i, i + 1);
            break;
        case TopologyKind::ring:
            if (topo.length < 3) throw domain_error("ring needs at least 3 nodes");
            for (int i = 0; i + 1 < topo.length; ++i) edges.emplace_back(i, i + 1);
            edges.emplace_back(0, topo.length - 1);
            break;
        case TopologyKind::grid:
            if (topo.rows < 2 || topo.cols < 2) throw domain_error("grid needs at least 2 rows and 2 columns");
            for (int r = 0; r < topo.rows; ++r) {
                for (int c = 0; c < topo.cols; ++c) {
                    const int v = r * topo.cols + c;
                    if (c + 1 < topo.cols) edges.emplace_back(v, v + 1);
                    if (r + 1 < topo.rows) edges.emplace_back(v, v + topo.cols);
                }
            }
            break;
    }
    return edges;
}

FactorGraph build_topology(const Topology& topo, int n, const UnaryGenerator& unary,
                           const PairwiseGenerator& pairwise, const Semiring& s, bool homogeneous)
{
    if (n < 1) throw domain_error("build_topology: cardinality must be at least 1");
    if (!pairwise) throw domain_error("build_topology: pairwise generator required");
    const auto edges = topology_edges(topo);

    FactorGraph g(s);
    for (int v = 0; v < topo.num_variables(); ++v) g.add_variable(n);

    std::shared_ptr<const Eigen::ArrayXd> shared;
    for (const auto& [a, b] : edges) {
        Scope scope{{a, n}, {b, n}};
        if (homogeneous) {
            if (!shared) shared = std::make_shared<const Eigen::ArrayXd>(pairwise(a, b, n));
            g.add_factor(Factor(std::move(scope), shared), FactorRole::data_independent, 0);
        } else {
            g.add_factor(Factor(std::move(scope), pairwise(a, b, n)), FactorRole::data_independent);
        }
    }
    if (unary) {
        for (int v = 0; v < topo.num_variables(); ++v) {
            g.add_factor(Factor(Scope{{v, n}}, unary(v, n)), FactorRole::data_dependent);
        }
    }
    return g;
}

} // namespace fmp
