#pragma once
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <fmp/factor.hpp>
#include <fmp/semiring.hpp>

namespace fmp {

using Rank = std::int32_t;

/// Non-owning view of a best-first ordering and its inverse.
struct PermRef {
    std::span<const Rank> order;
    std::span<const Rank> inverse;

    Index size() const { return static_cast<Index>(order.size()); }
};

/// Sorts `n` values best-first under `s` (descending for the max semirings),
/// equal values by ascending index, writing the ordering and its inverse.
template <class Values>
void sort_indices(const Values& v, Index n, std::span<Rank> order, std::span<Rank> inverse, const Semiring& s)
{
    std::iota(order.begin(), order.begin() + n, Rank(0));
    std::sort(order.begin(), order.begin() + n, [&](Rank a, Rank b) {
        if (s.better(v[a], v[b])) return true;
        if (s.better(v[b], v[a])) return false;
        return a < b;
    });
    for (Index r = 0; r < n; ++r) inverse[order[r]] = static_cast<Rank>(r);
}

class SortedPermutation {
public:
    SortedPermutation() = default;

    /// Adopts an ordering; throws if it is not a permutation of 0..n-1.
    static SortedPermutation from_order(std::vector<Rank> order)
    {
        SortedPermutation p;
        p.inverse_.assign(order.size(), -1);
        for (std::size_t r = 0; r < order.size(); ++r) {
            const Rank i = order[r];
            if (i < 0 || static_cast<std::size_t>(i) >= order.size() || p.inverse_[i] != -1) {
                throw domain_error("ordering is not a permutation");
            }
            p.inverse_[i] = static_cast<Rank>(r);
        }
        p.order_ = std::move(order);
        return p;
    }

    std::span<const Rank> order() const { return order_; }
    std::span<const Rank> inverse() const { return inverse_; }
    PermRef ref() const { return {order_, inverse_}; }
    Index size() const { return static_cast<Index>(order_.size()); }

    template <class Values>
    static SortedPermutation of(const Values& v, Index n, const Semiring& s)
    {
        if (n < 1) throw domain_error("sort_desc: empty list");
        SortedPermutation p;
        p.order_.resize(n);
        p.inverse_.resize(n);
        sort_indices(v, n, std::span<Rank>(p.order_), std::span<Rank>(p.inverse_), s);
        return p;
    }

    /// Re-sorts after the values changed, starting from the current ordering.
    /// Insertion sort: linear on nearly-sorted input. Returns the number of
    /// element moves.
    template <class Values>
    Index resort(const Values& v, const Semiring& s)
    {
        auto before = [&](Rank a, Rank b) {
            if (s.better(v[a], v[b])) return true;
            if (s.better(v[b], v[a])) return false;
            return a < b;
        };
        Index moves = 0;
        for (std::size_t r = 1; r < order_.size(); ++r) {
            const Rank x = order_[r];
            std::size_t q = r;
            while (q > 0 && before(x, order_[q - 1])) {
                order_[q] = order_[q - 1];
                --q;
                ++moves;
            }
            order_[q] = x;
        }
        for (std::size_t r = 0; r < order_.size(); ++r) inverse_[order_[r]] = static_cast<Rank>(r);
        return moves;
    }

private:
    std::vector<Rank> order_;
    std::vector<Rank> inverse_;
};

template <class Values>
SortedPermutation sort_desc(const Values& v, Index n, const Semiring& s = max_product)
{
    return SortedPermutation::of(v, n, s);
}

template <class T>
SortedPermutation sort_desc(const std::vector<T>& v, const Semiring& s = max_product)
{
    return sort_desc(v, static_cast<Index>(v.size()), s);
}

inline SortedPermutation sort_desc(const Eigen::ArrayXd& v, const Semiring& s = max_product)
{
    return sort_desc(v, v.size(), s);
}

/// True when `p` orders `v` best-first with ties by ascending index.
template <class Values>
bool is_sorted_by(const Values& v, PermRef p, const Semiring& s)
{
    const Index n = p.size();
    if (static_cast<Index>(p.inverse.size()) != n) return false;
    for (Index r = 0; r < n; ++r) {
        const Rank i = p.order[r];
        if (i < 0 || i >= n || p.inverse[i] != r) return false;
        if (r > 0) {
            const Rank h = p.order[r - 1];
            if (s.better(v[i], v[h])) return false;
            if (!s.better(v[h], v[i]) && h > i) return false;
        }
    }
    return true;
}

} // namespace fmp
