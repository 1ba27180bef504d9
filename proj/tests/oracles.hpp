#pragma once
// Reference computations written against plain std::vector data, sharing no
// code with the library beyond Semiring arithmetic.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <fmp/factor.hpp>
#include <fmp/graph.hpp>
#include <fmp/rng.hpp>

namespace oracle {

struct Scan {
    long best = 0;
    double value = 0.0;
};

// Best index of the elementwise combine of all lists, smallest index on ties.
inline Scan argmax_scan(const std::vector<std::vector<double>>& lists, const fmp::Semiring& s)
{
    Scan r;
    const std::size_t n = lists[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        double v = lists[0][i];
        for (std::size_t q = 1; q < lists.size(); ++q) v = s.combine(v, lists[q][i]);
        if (i == 0 || s.better(v, r.value)) {
            r.best = static_cast<long>(i);
            r.value = v;
        }
    }
    return r;
}

// A factor as plain data: variable ids in any order, row-major table with the
// last listed variable fastest.
struct Table {
    std::vector<int> vars;
    std::vector<double> values;
};

inline double lookup(const Table& t, const std::vector<int>& card, const std::vector<int>& state)
{
    std::size_t flat = 0;
    for (int v : t.vars) flat = flat * static_cast<std::size_t>(card[v]) + static_cast<std::size_t>(state[v]);
    return t.values[flat];
}

inline Table from_factor(const fmp::Factor& f)
{
    Table t;
    for (const auto& v : f.scope()) t.vars.push_back(v.id);
    t.values.assign(f.values().data(), f.values().data() + f.size());
    return t;
}

// Calls fn(state) for every joint state of variables 0..card.size()-1,
// first variable slowest.
inline void for_each_state(const std::vector<int>& card, const std::function<void(const std::vector<int>&)>& fn)
{
    std::vector<int> state(card.size(), 0);
    for (;;) {
        fn(state);
        int p = static_cast<int>(card.size()) - 1;
        while (p >= 0 && ++state[p] == card[p]) state[p--] = 0;
        if (p < 0) return;
    }
}

inline double joint_value(const std::vector<Table>& tables, const std::vector<int>& card,
                          const std::vector<int>& state, const fmp::Semiring& s)
{
    double v = lookup(tables[0], card, state);
    for (std::size_t f = 1; f < tables.size(); ++f) v = s.combine(v, lookup(tables[f], card, state));
    return v;
}

// Max-marginal onto `target` (ascending ids), row-major over the target.
inline std::vector<double> max_marginal(const std::vector<Table>& tables, const std::vector<int>& card,
                                        const std::vector<int>& target, const fmp::Semiring& s)
{
    std::size_t size = 1;
    for (int v : target) size *= static_cast<std::size_t>(card[v]);
    std::vector<double> out(size, s.worst());
    for_each_state(card, [&](const std::vector<int>& state) {
        std::size_t flat = 0;
        for (int v : target) flat = flat * static_cast<std::size_t>(card[v]) + static_cast<std::size_t>(state[v]);
        const double v = joint_value(tables, card, state, s);
        if (s.better(v, out[flat])) out[flat] = v;
    });
    return out;
}

struct Best {
    std::vector<int> state;
    double value = 0.0;
};

inline Best map_brute(const std::vector<Table>& tables, const std::vector<int>& card, const fmp::Semiring& s)
{
    Best b;
    bool first = true;
    for_each_state(card, [&](const std::vector<int>& state) {
        const double v = joint_value(tables, card, state, s);
        if (first || s.better(v, b.value)) {
            b.state = state;
            b.value = v;
            first = false;
        }
    });
    return b;
}

inline std::vector<Table> tables_of(const fmp::FactorGraph& g)
{
    std::vector<Table> t;
    for (const auto& f : g.factors()) t.push_back(from_factor(f));
    return t;
}

inline std::vector<int> cards_of(const fmp::FactorGraph& g)
{
    std::vector<int> c;
    for (const auto& v : g.variables()) c.push_back(v.cardinality);
    return c;
}

// Analysis-mode step count of one permutation pair, straight from the
// definition: smallest m such that the m x m top-left square holds an entry
// (i, p[i]).
inline long square_width(const std::vector<int>& p)
{
    long best = static_cast<long>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) best = std::min<long>(best, std::max<long>(long(i), p[i]) + 1);
    return best;
}

// Mean square_width over all N! permutations, as an exact fraction num/den.
inline std::pair<long, long> mean_width_enumerated(int n)
{
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    long total = 0, count = 0;
    do {
        total += square_width(p);
        ++count;
    } while (std::next_permutation(p.begin(), p.end()));
    return {total, count};
}

inline std::vector<double> uniform_list(std::mt19937_64& rng, std::size_t n)
{
    std::vector<double> v(n);
    for (auto& x : v) x = fmp::uniform01(rng);
    return v;
}

inline std::vector<double> integer_list(std::mt19937_64& rng, std::size_t n, int lo, int hi)
{
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Viterbi by brute force: best sequence under sum of unary[i][x_i] plus
// pair[x_i][x_{i+1}] over an alphabet of size a.
inline std::vector<int> viterbi_brute(const std::vector<std::vector<double>>& unary,
                                      const std::vector<std::vector<double>>& pair)
{
    const std::vector<int> card(unary.size(), static_cast<int>(pair.size()));
    std::vector<int> best;
    double best_v = -std::numeric_limits<double>::infinity();
    for_each_state(card, [&](const std::vector<int>& x) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            v += unary[i][x[i]];
            if (i + 1 < x.size()) v += pair[x[i]][x[i + 1]];
        }
        if (v > best_v) {
            best_v = v;
            best = x;
        }
    });
    return best;
}

} // namespace oracle
