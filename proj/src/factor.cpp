#include <fmp/factor.hpp>

#include <algorithm>
#include <string>

#include <fmp/detail/odometer.hpp>

namespace fmp {

namespace {

void check_cardinalities(const Scope& scope)
{
    for (const auto& v : scope) {
        if (v.cardinality < 1) {
            throw domain_error("variable " + std::to_string(v.id) + " has cardinality " +
                               std::to_string(v.cardinality));
        }
    }
}

std::vector<Index> row_major_strides(const Scope& scope)
{
    std::vector<Index> strides(scope.size());
    Index stride = 1;
    for (std::size_t p = scope.size(); p-- > 0;) {
        strides[p] = stride;
        stride *= scope[p].cardinality;
    }
    return strides;
}

void check_same_card(const Variable& a, const Variable& b)
{
    if (a.cardinality != b.cardinality) {
        throw domain_error("variable " + std::to_string(a.id) + " has cardinality " +
                           std::to_string(a.cardinality) + " in one scope and " +
                           std::to_string(b.cardinality) + " in another");
    }
}

} // namespace

Index domain_size(const Scope& scope)
{
    Index n = 1;
    for (const auto& v : scope) n *= v.cardinality;
    return n;
}

Index flatten(std::span<const int> states, const Scope& scope)
{
    if (states.size() != scope.size()) {
        throw domain_error("flatten: got " + std::to_string(states.size()) + " states for a scope of " +
                           std::to_string(scope.size()));
    }
    Index flat = 0;
    for (std::size_t p = 0; p < scope.size(); ++p) {
        if (states[p] < 0 || states[p] >= scope[p].cardinality) {
            throw domain_error("flatten: state " + std::to_string(states[p]) + " out of range for variable " +
                               std::to_string(scope[p].id));
        }
        flat = flat * scope[p].cardinality + states[p];
    }
    return flat;
}

Index flatten(const Assignment& assignment, const Scope& scope)
{
    if (assignment.scope.size() != assignment.states.size()) {
        throw domain_error("flatten: malformed assignment");
    }
    std::vector<int> states(scope.size());
    for (std::size_t p = 0; p < scope.size(); ++p) {
        const int q = position_of(assignment.scope, scope[p].id);
        if (q < 0) throw domain_error("flatten: assignment misses variable " + std::to_string(scope[p].id));
        states[p] = assignment.states[q];
    }
    return flatten(states, scope);
}

std::vector<int> unflatten(Index flat, const Scope& scope)
{
    if (flat < 0 || flat >= domain_size(scope)) {
        throw domain_error("unflatten: index " + std::to_string(flat) + " out of range");
    }
    std::vector<int> states(scope.size());
    for (std::size_t p = scope.size(); p-- > 0;) {
        states[p] = static_cast<int>(flat % scope[p].cardinality);
        flat /= scope[p].cardinality;
    }
    return states;
}

bool is_canonical(const Scope& scope)
{
    for (std::size_t p = 1; p < scope.size(); ++p) {
        if (scope[p - 1].id >= scope[p].id) return false;
    }
    return true;
}

void sort_scope(Scope& scope)
{
    std::sort(scope.begin(), scope.end(), [](const Variable& a, const Variable& b) { return a.id < b.id; });
}

bool contains(const Scope& scope, int id) { return position_of(scope, id) >= 0; }

int position_of(const Scope& scope, int id)
{
    for (std::size_t p = 0; p < scope.size(); ++p) {
        if (scope[p].id == id) return static_cast<int>(p);
    }
    return -1;
}

Scope scope_union(const Scope& a, const Scope& b)
{
    Scope out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].id < b[j].id)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].id < a[i].id) {
            out.push_back(b[j++]);
        } else {
            check_same_card(a[i], b[j]);
            out.push_back(a[i]);
            ++i;
            ++j;
        }
    }
    return out;
}

Scope scope_intersection(const Scope& a, const Scope& b)
{
    Scope out;
    for (const auto& v : a) {
        const int q = position_of(b, v.id);
        if (q >= 0) {
            check_same_card(v, b[q]);
            out.push_back(v);
        }
    }
    return out;
}

Scope scope_difference(const Scope& a, const Scope& b)
{
    Scope out;
    for (const auto& v : a) {
        if (!contains(b, v.id)) out.push_back(v);
    }
    return out;
}

bool is_subset(const Scope& sub, const Scope& super)
{
    return std::all_of(sub.begin(), sub.end(), [&](const Variable& v) { return contains(super, v.id); });
}

Factor::Factor() : Factor(Scope{}, Eigen::ArrayXd::Zero(1)) {}

Factor::Factor(Scope scope, Eigen::ArrayXd values)
    : Factor(std::move(scope), std::make_shared<const Eigen::ArrayXd>(std::move(values)))
{
}

Factor::Factor(Scope scope, std::shared_ptr<const Eigen::ArrayXd> values)
    : scope_(std::move(scope)), values_(std::move(values))
{
    if (!is_canonical(scope_)) throw domain_error("factor scope must be strictly ascending by variable id");
    check_cardinalities(scope_);
    if (!values_ || values_->size() != domain_size(scope_)) {
        throw domain_error("factor has " + std::to_string(values_ ? values_->size() : 0) +
                           " values, scope needs " + std::to_string(domain_size(scope_)));
    }
    strides_ = row_major_strides(scope_);
}

Factor Factor::from_unordered(Scope scope, const Eigen::ArrayXd& values)
{
    check_cardinalities(scope);
    if (values.size() != domain_size(scope)) {
        throw domain_error("factor has " + std::to_string(values.size()) + " values, scope needs " +
                           std::to_string(domain_size(scope)));
    }
    Scope sorted = scope;
    sort_scope(sorted);
    for (std::size_t p = 1; p < sorted.size(); ++p) {
        if (sorted[p - 1].id == sorted[p].id) throw domain_error("duplicate variable in factor scope");
    }
    if (sorted == scope) return Factor(std::move(sorted), values);

    Eigen::ArrayXd out(values.size());
    detail::Odometer odo(scope);
    const int slot = odo.track(sorted);
    Index flat = 0;
    do {
        out[odo.index(slot)] = values[flat++];
    } while (odo.next());
    return Factor(std::move(sorted), std::move(out));
}

Factor Factor::constant(Scope scope, double value)
{
    sort_scope(scope);
    const Index n = domain_size(scope);
    return Factor(std::move(scope), Eigen::ArrayXd::Constant(n, value));
}

Factor Factor::relabel(Scope scope) const
{
    if (scope.size() != scope_.size()) throw domain_error("relabel: arity mismatch");
    for (std::size_t p = 0; p < scope.size(); ++p) check_same_card(scope[p], scope_[p]);
    return Factor(std::move(scope), values_);
}

bool operator==(const Factor& a, const Factor& b)
{
    return a.scope_ == b.scope_ && (a.values_ == b.values_ || (*a.values_ == *b.values_).all());
}

void validate(const Factor& f, const Semiring& s)
{
    for (Index i = 0; i < f.size(); ++i) {
        if (!s.admits(f[i])) {
            throw domain_error("factor value " + std::to_string(f[i]) + " is not valid under " +
                               std::string(s.name()));
        }
    }
}

Factor restrict(const Factor& f, const Assignment& partial)
{
    if (partial.scope.size() != partial.states.size()) throw domain_error("restrict: malformed assignment");
    Index base = 0;
    for (std::size_t q = 0; q < partial.scope.size(); ++q) {
        const int p = position_of(f.scope(), partial.scope[q].id);
        if (p < 0) {
            throw domain_error("restrict: variable " + std::to_string(partial.scope[q].id) +
                               " is not in the factor scope");
        }
        const int state = partial.states[q];
        if (state < 0 || state >= f.scope()[p].cardinality) {
            throw domain_error("restrict: state out of range for variable " + std::to_string(partial.scope[q].id));
        }
        base += state * f.strides()[p];
    }
    Scope rest = scope_difference(f.scope(), partial.scope);
    if (rest.empty()) return Factor(Scope{}, Eigen::ArrayXd::Constant(1, f[base]));

    Eigen::ArrayXd out(domain_size(rest));
    detail::Odometer odo(rest);
    const int slot = odo.track(rest);
    std::vector<Index> strides;
    for (const auto& v : rest) strides.push_back(f.strides()[position_of(f.scope(), v.id)]);
    do {
        Index idx = base;
        const auto st = odo.states();
        for (std::size_t p = 0; p < st.size(); ++p) idx += st[p] * strides[p];
        out[odo.index(slot)] = f[idx];
    } while (odo.next());
    return Factor(std::move(rest), std::move(out));
}

Factor combine(const Factor& f, const Factor& g, const Semiring& s)
{
    Scope scope = scope_union(f.scope(), g.scope());
    Eigen::ArrayXd out(domain_size(scope));
    detail::Odometer odo(scope);
    const int sf = odo.track(f.scope());
    const int sg = odo.track(g.scope());
    Index flat = 0;
    do {
        out[flat++] = s.combine(f[odo.index(sf)], g[odo.index(sg)]);
    } while (odo.next());
    return Factor(std::move(scope), std::move(out));
}

Factor broadcast(const Factor& f, const Scope& superset)
{
    if (!is_subset(f.scope(), superset)) throw domain_error("broadcast: target scope misses factor variables");
    Scope scope = superset;
    sort_scope(scope);
    if (scope == f.scope()) return f;
    Eigen::ArrayXd out(domain_size(scope));
    detail::Odometer odo(scope);
    const int sf = odo.track(f.scope());
    Index flat = 0;
    do {
        out[flat++] = f[odo.index(sf)];
    } while (odo.next());
    return Factor(std::move(scope), std::move(out));
}

double evaluate(std::span<const Factor> factors, const Assignment& assignment, const Semiring& s)
{
    if (factors.empty()) return s.identity();
    double v = factors[0].at(assignment);
    for (std::size_t k = 1; k < factors.size(); ++k) v = s.combine(v, factors[k].at(assignment));
    return v;
}

Scope joint_scope(std::span<const Factor> factors)
{
    Scope out;
    for (const auto& f : factors) out = scope_union(out, f.scope());
    return out;
}

Factor max_marginal_brute(std::span<const Factor> factors, const Scope& clique, const Scope& target,
                          const Semiring& s)
{
    if (factors.empty()) throw domain_error("max_marginal_brute: empty factor list");
    Scope x = clique;
    sort_scope(x);
    Scope m = target;
    sort_scope(m);
    if (!is_subset(m, x)) throw domain_error("max_marginal_brute: target is not a subset of the clique");
    for (const auto& f : factors) {
        if (!is_subset(f.scope(), x)) throw domain_error("max_marginal_brute: factor scope outside the clique");
    }

    Eigen::ArrayXd out = Eigen::ArrayXd::Constant(domain_size(m), s.worst());
    detail::Odometer odo(x);
    const int st = odo.track(m);
    std::vector<int> slots;
    for (const auto& f : factors) slots.push_back(odo.track(f.scope()));
    const std::size_t n = factors.size();
    do {
        double v = factors[0][odo.index(slots[0])];
        for (std::size_t k = 1; k < n; ++k) v = s.combine(v, factors[k][odo.index(slots[k])]);
        double& cell = out[odo.index(st)];
        if (s.better(v, cell)) cell = v;
    } while (odo.next());
    return Factor(std::move(m), std::move(out));
}

MapResult map_assignment_brute(std::span<const Factor> factors, const Semiring& s, Index cap)
{
    if (factors.empty()) throw domain_error("map_assignment_brute: empty factor list");
    Scope x = joint_scope(factors);
    const Index total = domain_size(x);
    if (total > cap) {
        throw resource_error("map_assignment_brute: joint state space " + std::to_string(total) +
                             " exceeds the cap of " + std::to_string(cap));
    }
    detail::Odometer odo(x);
    std::vector<int> slots;
    for (const auto& f : factors) slots.push_back(odo.track(f.scope()));
    double best = s.worst();
    Index best_flat = -1;
    Index flat = 0;
    do {
        double v = factors[0][odo.index(slots[0])];
        for (std::size_t k = 1; k < factors.size(); ++k) v = s.combine(v, factors[k][odo.index(slots[k])]);
        if (best_flat < 0 || s.better(v, best)) {
            best = v;
            best_flat = flat;
        }
        ++flat;
    } while (odo.next());
    MapResult r;
    r.assignment.scope = x;
    r.assignment.states = unflatten(best_flat, x);
    r.value = best;
    return r;
}

} // namespace fmp
