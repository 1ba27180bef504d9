#include <fmp/grouping.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include <fmp/detail/odometer.hpp>

namespace fmp {

namespace {

constexpr double eps = 1e-9;
constexpr std::size_t exhaustive_limit = 12;

using Mask = std::uint64_t;

// Variables of one clique as bit positions, each weighted by
// log_N(cardinality) with N the largest cardinality present.
struct Universe {
    Scope vars;
    std::vector<double> weight;
    double n_ref = 2.0;
    std::vector<Mask> factor_masks;
    Mask target = 0;

    Mask mask_of(const Scope& scope) const
    {
        Mask m = 0;
        for (const auto& v : scope) m |= Mask(1) << position_of(vars, v.id);
        return m;
    }

    double w(Mask m) const
    {
        double total = 0.0;
        for (std::size_t b = 0; b < vars.size(); ++b) {
            if (m >> b & 1) total += weight[b];
        }
        return total;
    }

    Scope scope_of(Mask m) const
    {
        Scope out;
        for (std::size_t b = 0; b < vars.size(); ++b) {
            if (m >> b & 1) out.push_back(vars[b]);
        }
        return out;
    }
};

Universe make_universe(std::span<const Factor> factors, const Scope& target)
{
    Universe u;
    u.vars = joint_scope(factors);
    Scope t = target;
    sort_scope(t);
    if (!is_subset(t, u.vars)) throw domain_error("grouping: target variable not covered by any factor");
    if (u.vars.size() > 64) throw domain_error("grouping: cliques over more than 64 variables are not supported");
    int n_max = 1;
    for (const auto& v : u.vars) n_max = std::max(n_max, v.cardinality);
    u.n_ref = n_max > 1 ? n_max : 2.0;
    for (const auto& v : u.vars) {
        u.weight.push_back(n_max > 1 ? std::log(static_cast<double>(v.cardinality)) / std::log(u.n_ref) : 1.0);
    }
    for (const auto& f : factors) u.factor_masks.push_back(u.mask_of(f.scope()));
    u.target = u.mask_of(t);
    return u;
}

struct Shape {
    std::vector<Mask> vars;
    std::vector<Mask> iface;
    std::vector<Mask> cond;
    Mask x_prime = 0;
    Mask eliminated = 0;
    int violations = 0;
    bool x_has_factors = false;
};

Shape shape_of(const Universe& u, std::span<const int> labels, int k)
{
    Shape sh;
    sh.vars.assign(k + 1, 0);
    sh.vars[0] = u.target;
    std::vector<int> sizes(k + 1, 0);
    for (std::size_t f = 0; f < labels.size(); ++f) {
        sh.vars[labels[f]] |= u.factor_masks[f];
        ++sizes[labels[f]];
    }
    sh.x_has_factors = sizes[0] > 0;

    Mask rest = 0;
    for (int g = 1; g <= k; ++g) rest |= sh.vars[g];
    sh.x_prime = (rest & sh.vars[0]) | u.target;

    sh.iface.assign(k + 1, 0);
    sh.cond.assign(k + 1, 0);
    sh.iface[0] = sh.x_prime;
    for (int g = 1; g <= k; ++g) {
        if (sizes[g] == 0) ++sh.violations;
        Mask others = sh.vars[0];
        for (int h = 1; h <= k; ++h) {
            if (h != g) others |= sh.vars[h];
        }
        sh.iface[g] = others & sh.vars[g];
        const Mask e = sh.iface[g] & ~sh.x_prime;
        if (e == 0) ++sh.violations;
        sh.eliminated |= e;
        sh.cond[g] = sh.iface[g] & sh.x_prime;
    }
    return sh;
}

// Emits the cost table rows for a shape.
template <class Sink>
void cost_terms(const Universe& u, const Shape& sh, int k, Sink&& sink)
{
    const double we = u.w(sh.eliminated);
    const double wx = u.w(sh.x_prime);
    if (sh.x_has_factors) sink("marginalize X", 0, 1.0, u.w(sh.vars[0]), 0);
    for (int g = 1; g <= k; ++g) sink("marginalize group", g, 1.0, u.w(sh.vars[g]), 0);
    for (int g = 1; g <= k; ++g) sink("sort group", g, we, u.w(sh.cond[g]) + we, 1);
    sink("search", 0, static_cast<double>(k), wx + we * (k - 1) / k, 0);
    sink("final marginalize", 0, 1.0, wx, 0);
}

struct Key {
    double exponent = std::numeric_limits<double>::infinity();
    int log_power = 0;
    double coefficient = 0.0;
    int violations = std::numeric_limits<int>::max();
};

bool key_less(const Key& a, const Key& b)
{
    if (a.violations != b.violations) return a.violations < b.violations;
    if (a.exponent < b.exponent - eps) return true;
    if (b.exponent < a.exponent - eps) return false;
    if (a.log_power != b.log_power) return a.log_power < b.log_power;
    return a.coefficient < b.coefficient - eps;
}

Key key_of(const Universe& u, std::span<const int> labels, int k)
{
    const Shape sh = shape_of(u, labels, k);
    Key key;
    key.violations = sh.violations;
    key.exponent = -1.0;
    cost_terms(u, sh, k, [&](const char*, int, double c, double e, int lp) {
        if (e > key.exponent + eps || (std::abs(e - key.exponent) <= eps && lp > key.log_power)) {
            key.exponent = e;
            key.log_power = lp;
            key.coefficient = c;
        } else if (std::abs(e - key.exponent) <= eps && lp == key.log_power) {
            key.coefficient += c;
        }
    });
    return key;
}

// Restricted-growth enumeration: label 0 is X, labels 1..k are
// interchangeable so a new one may only be opened in increasing order.
void enumerate(const Universe& u, int k, std::vector<int>& labels, std::size_t pos, int opened,
               std::vector<int>& best, Key& best_key)
{
    const std::size_t n = labels.size();
    if (static_cast<int>(n - pos) < k - opened) return;
    if (pos == n) {
        const Key key = key_of(u, labels, k);
        if (key.violations == 0 && key_less(key, best_key)) {
            best_key = key;
            best = labels;
        }
        return;
    }
    for (int g = 0; g <= std::min(opened + 1, k); ++g) {
        labels[pos] = g;
        enumerate(u, k, labels, pos + 1, std::max(opened, g), best, best_key);
    }
}

void local_search(const Universe& u, int k, std::vector<int>& best, Key& best_key)
{
    const std::size_t n = u.factor_masks.size();
    std::mt19937_64 rng(0x5eed5eedULL + static_cast<unsigned>(k));
    std::uniform_int_distribution<int> pick(0, k);
    constexpr int restarts = 48;
    for (int r = 0; r < restarts; ++r) {
        std::vector<int> labels(n);
        if (r == 0) {
            // Factors touching the target start in X, the rest round-robin.
            int next = 1;
            for (std::size_t f = 0; f < n; ++f) {
                if ((u.factor_masks[f] & u.target) == u.factor_masks[f]) {
                    labels[f] = 0;
                } else {
                    labels[f] = next;
                    next = next % k + 1;
                }
            }
        } else {
            for (auto& l : labels) l = pick(rng);
        }
        Key key = key_of(u, labels, k);
        for (bool improved = true; improved;) {
            improved = false;
            for (std::size_t f = 0; f < n; ++f) {
                const int keep = labels[f];
                for (int g = 0; g <= k; ++g) {
                    if (g == keep) continue;
                    labels[f] = g;
                    const Key cand = key_of(u, labels, k);
                    if (key_less(cand, key)) {
                        key = cand;
                        improved = true;
                        break;
                    }
                    labels[f] = keep;
                }
            }
        }
        if (key.violations == 0 && key_less(key, best_key)) {
            best_key = key;
            best = labels;
        }
    }
}

std::vector<int> search_labels(const Universe& u, int k, Key& key)
{
    std::vector<int> best;
    key = Key{};
    const std::size_t n = u.factor_masks.size();
    if (static_cast<int>(n) < k) return best;
    if (n <= exhaustive_limit) {
        std::vector<int> labels(n, 0);
        enumerate(u, k, labels, 0, 0, best, key);
    } else {
        local_search(u, k, best, key);
    }
    return best;
}

std::string term_label(const char* kind, int g)
{
    if (g == 0) return kind;
    return std::string(kind) + " " + std::to_string(g);
}

} // namespace

double CostTerm::evaluate(double n) const
{
    return coefficient * std::pow(n, exponent) * std::pow(std::log(n), log_power);
}

double CostEstimate::total(double n) const
{
    double sum = 0.0;
    for (const auto& t : terms) sum += t.evaluate(n);
    return sum;
}

double CostEstimate::exponent() const
{
    double e = 0.0;
    for (const auto& t : terms) e = std::max(e, t.exponent);
    return e;
}

int CostEstimate::log_power() const
{
    const double e = exponent();
    int lp = 0;
    for (const auto& t : terms) {
        if (std::abs(t.exponent - e) <= eps) lp = std::max(lp, t.log_power);
    }
    return lp;
}

double CostEstimate::leading_coefficient() const
{
    const double e = exponent();
    const int lp = log_power();
    double c = 0.0;
    for (const auto& t : terms) {
        if (std::abs(t.exponent - e) <= eps && t.log_power == lp) c += t.coefficient;
    }
    return c;
}

bool operator<(const CostEstimate& a, const CostEstimate& b)
{
    const double ea = a.exponent(), eb = b.exponent();
    if (ea < eb - eps) return true;
    if (eb < ea - eps) return false;
    if (a.log_power() != b.log_power()) return a.log_power() < b.log_power();
    return a.leading_coefficient() < b.leading_coefficient() - eps;
}

Grouping make_grouping(std::span<const Factor> factors, const Scope& target, std::vector<std::vector<int>> groups)
{
    if (factors.empty()) throw domain_error("grouping: empty factor list");
    if (groups.size() < 3) throw domain_error("grouping: need X plus at least two further groups");
    const int k = static_cast<int>(groups.size()) - 1;
    std::vector<int> labels(factors.size(), -1);
    for (int g = 0; g <= k; ++g) {
        for (int f : groups[g]) {
            if (f < 0 || f >= static_cast<int>(factors.size())) throw domain_error("grouping: factor index out of range");
            if (labels[f] != -1) throw domain_error("grouping: factor " + std::to_string(f) + " is in two groups");
            labels[f] = g;
        }
    }
    for (std::size_t f = 0; f < labels.size(); ++f) {
        if (labels[f] == -1) throw domain_error("grouping: factor " + std::to_string(f) + " is in no group");
    }

    const Universe u = make_universe(factors, target);
    const Shape sh = shape_of(u, labels, k);
    if (sh.violations > 0) {
        throw domain_error("grouping: every non-X group must be non-empty and share a variable outside X'");
    }

    Grouping out;
    out.groups = std::move(groups);
    for (auto& g : out.groups) std::sort(g.begin(), g.end());
    out.target = u.scope_of(u.target);
    out.x_prime = u.scope_of(sh.x_prime);
    out.eliminated = u.scope_of(sh.eliminated);
    for (int g = 0; g <= k; ++g) {
        out.vars.push_back(u.scope_of(sh.vars[g]));
        if (g > 0) {
            out.interfaces.push_back(u.scope_of(sh.iface[g]));
            out.conditioning.push_back(u.scope_of(sh.cond[g]));
        }
    }
    cost_terms(u, sh, k, [&](const char* kind, int g, double c, double e, int lp) {
        out.cost.terms.push_back({term_label(kind, g), c, e, lp});
    });
    return out;
}

CostEstimate brute_cost(std::span<const Factor> factors, const Scope& target)
{
    const Universe u = make_universe(factors, target);
    CostEstimate c;
    const Mask all = u.vars.size() == 64 ? ~Mask(0) : (Mask(1) << u.vars.size()) - 1;
    c.terms.push_back({"enumerate clique", 1.0, u.w(all), 0});
    return c;
}

Grouping split_groups(std::span<const Factor> factors, const Scope& target, int k)
{
    if (k < 2) throw domain_error("split_groups: K must be at least 2");
    if (factors.empty()) throw domain_error("split_groups: empty factor list");
    const Universe u = make_universe(factors, target);

    Key key;
    std::vector<int> labels = search_labels(u, k, key);
    if (labels.empty()) {
        int smallest = 1;
        for (int kk = 2; kk <= static_cast<int>(factors.size()); ++kk) {
            if (kk == k) continue;
            Key other;
            if (!search_labels(u, kk, other).empty()) {
                smallest = kk + 1;
                break;
            }
        }
        throw grouping_error("split_groups: no feasible grouping into " + std::to_string(k + 1) +
                                 " groups; smallest feasible count is " + std::to_string(smallest),
                             smallest);
    }
    std::vector<std::vector<int>> groups(k + 1);
    for (std::size_t f = 0; f < labels.size(); ++f) groups[labels[f]].push_back(static_cast<int>(f));
    return make_grouping(factors, target, std::move(groups));
}

std::optional<Grouping> best_grouping(std::span<const Factor> factors, const Scope& target, int max_k)
{
    std::optional<Grouping> best;
    const CostEstimate brute = brute_cost(factors, target);
    for (int k = 2; k <= max_k && k <= static_cast<int>(factors.size()); ++k) {
        try {
            Grouping g = split_groups(factors, target, k);
            if (g.cost < brute && (!best || g.cost < best->cost)) best = std::move(g);
        } catch (const grouping_error&) {
        }
    }
    return best;
}

namespace {

Factor grouped_impl(std::span<const Factor> factors, const Grouping& g, const Semiring& s, const GroupedOptions& opts,
                    int depth);

Factor marginalize_group(std::span<const Factor> sub, const Scope& target, const Semiring& s,
                         const GroupedOptions& opts, int depth)
{
    if (sub.empty()) return Factor::constant(target, s.identity());
    if (opts.recurse && depth < opts.max_depth && sub.size() >= 2) {
        try {
            Grouping inner = split_groups(sub, target, 2);
            if (inner.cost.exponent() < brute_cost(sub, target).exponent() - eps) {
                return grouped_impl(sub, inner, s, opts, depth + 1);
            }
        } catch (const grouping_error&) {
        }
    }
    return max_marginal_brute(sub, scope_union(joint_scope(sub), target), target, s);
}

Factor grouped_impl(std::span<const Factor> factors, const Grouping& g, const Semiring& s, const GroupedOptions& opts,
                    int depth)
{
    const int k = g.k();
    auto members = [&](int group) {
        std::vector<Factor> out;
        for (int f : g.groups[group]) out.push_back(factors[f]);
        return out;
    };

    const Factor psi_x = marginalize_group(members(0), g.x_prime, s, opts, depth);

    const Index n_e = domain_size(g.eliminated);
    std::vector<SortedFactorView> lists;
    lists.reserve(k);
    for (int q = 1; q <= k; ++q) {
        const Factor psi = marginalize_group(members(q), g.interfaces[q - 1], s, opts, depth);
        const Factor wide = broadcast(psi, scope_union(g.conditioning[q - 1], g.eliminated));
        lists.emplace_back(wide, g.conditioning[q - 1], s);
        if (opts.stats) opts.stats->sorts += lists.back().rows();
    }

    Eigen::ArrayXd m(domain_size(g.x_prime));
    detail::Odometer odo(g.x_prime);
    std::vector<int> slots;
    for (int q = 0; q < k; ++q) slots.push_back(odo.track(g.conditioning[q]));

    std::vector<std::span<const double>> values(k);
    std::vector<PermRef> perms(k);
    ReadScratch scratch(k > 2 ? n_e : 0);
    const bool scan = n_e < opts.min_fast_states;

    Index flat = 0;
    do {
        for (int q = 0; q < k; ++q) {
            const Index r = odo.index(slots[q]);
            values[q] = lists[q].row_values(r);
            perms[q] = lists[q].row(r);
        }
        Index best = 0;
        if (scan) {
            double best_v = s.worst();
            for (Index e = 0; e < n_e; ++e) {
                double v = values[0][e];
                for (int q = 1; q < k; ++q) v = s.combine(v, values[q][e]);
                if (e == 0 || s.better(v, best_v)) {
                    best_v = v;
                    best = e;
                }
            }
        } else if (k == 2) {
            const auto o = fast_argmax_pair(values[0], values[1], perms[0], perms[1], opts.mode, s);
            if (opts.stats) opts.stats->add(o);
            best = o.best;
        } else {
            const auto o = fast_argmax_k(std::span<const std::span<const double>>(values),
                                         std::span<const PermRef>(perms), scratch, opts.mode, s);
            if (opts.stats) opts.stats->add(o);
            best = o.best;
        }
        double v = psi_x[flat];
        for (int q = 0; q < k; ++q) v = s.combine(v, values[q][best]);
        m[flat] = v;
        ++flat;
    } while (odo.next());

    Factor mx(g.x_prime, std::move(m));
    if (g.x_prime == g.target) return mx;
    return max_marginal_brute(std::span<const Factor>(&mx, 1), g.x_prime, g.target, s);
}

} // namespace

Factor max_marginal_grouped(std::span<const Factor> factors, const Scope& target, const Grouping& grouping,
                            const Semiring& s, const GroupedOptions& opts)
{
    const Grouping check = make_grouping(factors, target, grouping.groups);
    if (check.x_prime != grouping.x_prime || check.eliminated != grouping.eliminated ||
        check.interfaces != grouping.interfaces) {
        throw domain_error("max_marginal_grouped: grouping does not match these factors");
    }
    return grouped_impl(factors, check, s, opts, 0);
}

} // namespace fmp
