#pragma once
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include <fmp/semiring.hpp>

namespace fmp {

using Index = std::ptrdiff_t;

struct Variable {
    int id = 0;
    int cardinality = 1;

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// Ordered variable list. Factor scopes are always ascending by id.
using Scope = std::vector<Variable>;

struct Assignment {
    Scope scope;
    std::vector<int> states;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

Index domain_size(const Scope& scope);

/// Row-major linearization, last scope variable fastest.
Index flatten(std::span<const int> states, const Scope& scope);

/// Looks each scope variable up in the assignment by id.
Index flatten(const Assignment& assignment, const Scope& scope);

std::vector<int> unflatten(Index flat, const Scope& scope);

bool is_canonical(const Scope& scope);
void sort_scope(Scope& scope);
bool contains(const Scope& scope, int id);
int position_of(const Scope& scope, int id);

/// Set operations on id-sorted scopes. Union and intersection reject a
/// shared id with two different cardinalities.
Scope scope_union(const Scope& a, const Scope& b);
Scope scope_intersection(const Scope& a, const Scope& b);
Scope scope_difference(const Scope& a, const Scope& b);
bool is_subset(const Scope& sub, const Scope& super);

/// Dense table over an id-sorted scope. The value buffer is immutable and
/// shared between copies, so factors are cheap to pass around by value.
class Factor {
public:
    Factor();
    Factor(Scope scope, Eigen::ArrayXd values);
    Factor(Scope scope, std::shared_ptr<const Eigen::ArrayXd> values);

    /// Accepts any scope order and permutes the table into canonical order.
    static Factor from_unordered(Scope scope, const Eigen::ArrayXd& values);
    static Factor constant(Scope scope, double value);

    const Scope& scope() const { return scope_; }
    const Eigen::ArrayXd& values() const { return *values_; }
    const std::shared_ptr<const Eigen::ArrayXd>& shared_values() const { return values_; }
    std::span<const Index> strides() const { return strides_; }
    Index size() const { return values_->size(); }
    int arity() const { return static_cast<int>(scope_.size()); }

    double operator[](Index flat) const { return (*values_)[flat]; }
    double at(std::span<const int> states) const { return (*values_)[flatten(states, scope_)]; }
    double at(const Assignment& a) const { return (*values_)[flatten(a, scope_)]; }

    /// Same table over different variable ids (cardinalities must match).
    Factor relabel(Scope scope) const;

    friend bool operator==(const Factor& a, const Factor& b);

private:
    Scope scope_;
    std::shared_ptr<const Eigen::ArrayXd> values_;
    std::vector<Index> strides_;
};

/// Throws domain_error if any value is not admitted by the semiring.
void validate(const Factor& f, const Semiring& s);

/// Fixes the variables of `partial` and returns the slice over the rest.
Factor restrict(const Factor& f, const Assignment& partial);

/// Cellwise combine over the union scope.
Factor combine(const Factor& f, const Factor& g, const Semiring& s);

/// Repeats `f` along the extra variables of `superset`.
Factor broadcast(const Factor& f, const Scope& superset);

/// Combined value of all factors at a full assignment, folded in list order.
double evaluate(std::span<const Factor> factors, const Assignment& assignment, const Semiring& s);

/// Reference max-marginalization: enumerates dom(clique) and keeps the best
/// combined value per assignment of `target`. Theta(prod of cardinalities).
Factor max_marginal_brute(std::span<const Factor> factors, const Scope& clique, const Scope& target,
                          const Semiring& s);

/// Union of the scopes of all factors.
Scope joint_scope(std::span<const Factor> factors);

struct MapResult {
    Assignment assignment;
    double value = 0.0;
};

inline constexpr Index default_enumeration_cap = 10'000'000;

/// Best joint assignment by enumeration; ties go to the smallest flat index.
MapResult map_assignment_brute(std::span<const Factor> factors, const Semiring& s,
                               Index cap = default_enumeration_cap);

} // namespace fmp
