#pragma once
#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <fmp/permutation.hpp>
#include <fmp/semiring.hpp>

namespace fmp {

/// Stopping rule of the sorted-list search.
///  - analysis:   stop once the expanding square holds a shared index, as
///                measured from list a (the quantity M of the analysis).
///  - symmetric:  also stop on the list-b boundary.
///  - early_stop: additionally stop when the best still-unread pair of
///                values cannot beat the incumbent (one extra combine/step).
enum class ArgmaxMode { analysis, symmetric, early_stop };

inline std::string_view to_string(ArgmaxMode m)
{
    switch (m) {
        case ArgmaxMode::analysis: return "analysis";
        case ArgmaxMode::symmetric: return "symmetric";
        case ArgmaxMode::early_stop: return "early-stop";
    }
    return "?";
}

inline ArgmaxMode parse_argmax_mode(std::string_view text)
{
    if (text == "analysis") return ArgmaxMode::analysis;
    if (text == "symmetric") return ArgmaxMode::symmetric;
    if (text == "early-stop") return ArgmaxMode::early_stop;
    throw domain_error("unknown argmax mode '" + std::string(text) + "'");
}

template <class T>
struct ArgmaxOutcome {
    Index best = 0;
    T value{};
    Index probes = 0; ///< distinct indices whose values were combined
    Index steps = 0;  ///< sorted levels visited, 1-based
};

/// Per-worker "has this index been read" table. Marks are stamped with a
/// call epoch, so the table never needs clearing between calls.
class ReadScratch {
public:
    explicit ReadScratch(Index capacity = 0) : marks_(capacity, 0) {}

    Index capacity() const { return static_cast<Index>(marks_.size()); }
    std::uint64_t epoch() const { return epoch_; }

    void reserve(Index n)
    {
        if (n > capacity()) marks_.resize(n, 0);
    }

    std::uint64_t begin_call() { return ++epoch_; }

    /// Marks `i` as read in the current call; false if it already was.
    bool mark(Index i)
    {
        if (marks_[i] == epoch_) return false;
        marks_[i] = epoch_;
        return true;
    }

private:
    std::vector<std::uint64_t> marks_;
    std::uint64_t epoch_ = 0;
};

namespace detail {

template <class V>
using value_t = std::remove_cvref_t<decltype(std::declval<const V&>()[0])>;

} // namespace detail

/// argmax_i combine(va[i], vb[i]) given best-first orderings of both lists.
///
/// Expected O(sqrt(N)) combines when the two orderings are independent.
/// The returned value is bit-identical to a linear scan of
/// combine(va[i], vb[i]); among the entries it reads, ties keep the smaller
/// index. `va` and `vb` only need operator[], so spans, std::vector and
/// Eigen vector expressions (including strided columns) all work.
///
/// An index reached from both lists is combined again, as in the published
/// algorithm; `probes` still counts it once, since its rank in the other list
/// tells whether it was read before.
template <class VA, class VB>
auto fast_argmax_pair(const VA& va, const VB& vb, PermRef pa, PermRef pb, ArgmaxMode mode, const Semiring& s)
    -> ArgmaxOutcome<std::common_type_t<detail::value_t<VA>, detail::value_t<VB>>>
{
    using T = std::common_type_t<detail::value_t<VA>, detail::value_t<VB>>;
    const Index n = pa.size();
    if (n < 1) throw domain_error("fast_argmax_pair: empty lists");
    if (pb.size() != n || static_cast<Index>(pa.inverse.size()) != n ||
        static_cast<Index>(pb.inverse.size()) != n) {
        throw domain_error("fast_argmax_pair: list length mismatch");
    }

    ArgmaxOutcome<T> out;
    auto consider = [&](Index idx, bool fresh) {
        const T v = s.combine(static_cast<T>(va[idx]), static_cast<T>(vb[idx]));
        out.probes += fresh;
        if (s.better(v, out.value) || (!s.better(out.value, v) && idx < out.best)) {
            out.best = idx;
            out.value = v;
        }
    };

    Index start = 0;
    Index end_a = pa.inverse[pb.order[0]];
    Index end_b = pb.inverse[pa.order[0]];

    out.best = pa.order[0];
    out.value = s.combine(static_cast<T>(va[out.best]), static_cast<T>(vb[out.best]));
    out.probes = 1;
    if (pb.order[0] != pa.order[0]) consider(pb.order[0], true);
    out.steps = 1;

    for (;;) {
        bool done = start >= end_a;
        if (mode != ArgmaxMode::analysis) done = done || start >= end_b;
        if (done) break;
        ++start;
        const Index ia = pa.order[start];
        const Index ib = pb.order[start];
        if (mode == ArgmaxMode::early_stop) {
            const T bound = s.combine(static_cast<T>(va[ia]), static_cast<T>(vb[ib]));
            if (!s.better(bound, out.value)) break;
        }
        out.steps = start + 1;
        consider(ia, pb.inverse[ia] >= start);
        end_b = std::min<Index>(end_b, pb.inverse[ia]);
        if (ib != ia) consider(ib, pa.inverse[ib] > start);
        end_a = std::min<Index>(end_a, pa.inverse[ib]);
    }
    return out;
}

/// fast_argmax_pair after checking that both orderings really sort their
/// lists. O(N); for tests and untrusted callers.
template <class VA, class VB>
auto fast_argmax_pair_checked(const VA& va, const VB& vb, PermRef pa, PermRef pb, ArgmaxMode mode,
                              const Semiring& s)
{
    if (pa.size() != pb.size()) throw domain_error("fast_argmax_pair: list length mismatch");
    if (!is_sorted_by(va, pa, s)) throw domain_error("fast_argmax_pair: permutation does not sort list a");
    if (!is_sorted_by(vb, pb, s)) throw domain_error("fast_argmax_pair: permutation does not sort list b");
    return fast_argmax_pair(va, vb, pa, pb, mode, s);
}

/// argmax_i of the K-fold combine v_1[i] * ... * v_K[i], K >= 2.
///
/// Walks all K orderings in lock-step. An index is combined at most once per
/// call (tracked in `scratch`), so at most N combines happen whatever the
/// orderings are. The search stops at the first level `start` for which some
/// read index ranks within the top `start + 1` of every list; no unread
/// index can beat it from there on.
template <class V>
auto fast_argmax_k(std::span<const V> lists, std::span<const PermRef> perms, ReadScratch& scratch,
                   ArgmaxMode mode, const Semiring& s) -> ArgmaxOutcome<detail::value_t<V>>
{
    using T = detail::value_t<V>;
    const std::size_t k = lists.size();
    if (k < 2) throw domain_error("fast_argmax_k: need at least two lists");
    if (perms.size() != k) throw domain_error("fast_argmax_k: one ordering per list required");
    const Index n = perms[0].size();
    if (n < 1) throw domain_error("fast_argmax_k: empty lists");
    for (const auto& p : perms) {
        if (p.size() != n || static_cast<Index>(p.inverse.size()) != n) {
            throw domain_error("fast_argmax_k: list length mismatch");
        }
    }
    if (scratch.capacity() < n) throw domain_error("fast_argmax_k: read scratch smaller than the lists");

    scratch.begin_call();
    ArgmaxOutcome<T> out;
    out.best = -1;
    Index end = n;

    auto visit_level = [&](Index level) {
        for (std::size_t q = 0; q < k; ++q) {
            const Index idx = perms[q].order[level];
            if (!scratch.mark(idx)) continue;
            T v = lists[0][idx];
            Index worst_rank = perms[0].inverse[idx];
            for (std::size_t j = 1; j < k; ++j) {
                v = s.combine(v, static_cast<T>(lists[j][idx]));
                worst_rank = std::max<Index>(worst_rank, perms[j].inverse[idx]);
            }
            ++out.probes;
            if (out.best < 0 || s.better(v, out.value) || (!s.better(out.value, v) && idx < out.best)) {
                out.best = idx;
                out.value = v;
            }
            end = std::min(end, worst_rank);
        }
    };

    Index start = 0;
    visit_level(0);
    out.steps = 1;
    while (start < end) {
        ++start;
        if (mode == ArgmaxMode::early_stop) {
            T bound = lists[0][perms[0].order[start]];
            for (std::size_t j = 1; j < k; ++j) bound = s.combine(bound, static_cast<T>(lists[j][perms[j].order[start]]));
            if (!s.better(bound, out.value)) break;
        }
        out.steps = start + 1;
        visit_level(start);
    }
    return out;
}

/// Plain linear scan; the reference every fast path is compared against.
template <class VA, class VB>
auto naive_argmax_pair(const VA& va, const VB& vb, Index n, const Semiring& s)
{
    using T = std::common_type_t<detail::value_t<VA>, detail::value_t<VB>>;
    ArgmaxOutcome<T> out;
    out.value = s.combine(static_cast<T>(va[0]), static_cast<T>(vb[0]));
    for (Index i = 1; i < n; ++i) {
        const T v = s.combine(static_cast<T>(va[i]), static_cast<T>(vb[i]));
        if (s.better(v, out.value)) {
            out.value = v;
            out.best = i;
        }
    }
    out.probes = n;
    out.steps = n;
    return out;
}

} // namespace fmp
