#pragma once
#include <memory>
#include <span>
#include <vector>

#include <fmp/argmax.hpp>
#include <fmp/factor.hpp>
#include <fmp/permutation.hpp>

namespace fmp {

/// Counters accumulated by the fast search paths.
struct ProbeStats {
    Index calls = 0;  ///< argmax searches run
    Index probes = 0; ///< combines evaluated inside the searches
    Index steps = 0;  ///< sum of sorted levels visited
    Index sorts = 0;  ///< lists sorted from scratch

    template <class T>
    void add(const ArgmaxOutcome<T>& o)
    {
        ++calls;
        probes += o.probes;
        steps += o.steps;
    }

    ProbeStats& operator+=(const ProbeStats& o)
    {
        calls += o.calls;
        probes += o.probes;
        steps += o.steps;
        sorts += o.sorts;
        return *this;
    }
};

/// A factor seen as a table of rows (one per assignment of the conditioning
/// variables) over its flattened free variables, each row sorted best-first.
///
/// When the conditioning variables lead the factor's scope the view shares
/// the factor's value buffer; otherwise it holds a transposed copy.
class SortedFactorView {
public:
    SortedFactorView() = default;
    SortedFactorView(const Factor& f, const Scope& conditioning, const Semiring& s);

    const Factor& base() const { return base_; }
    const Scope& conditioning() const { return conditioning_; }
    const Scope& free() const { return free_; }
    Index rows() const { return rows_; }
    Index cols() const { return cols_; }

    /// Values of row `r`, indexed by the flat free-variable state.
    std::span<const double> row_values(Index r) const
    {
        return {buffer_->data() + r * cols_, static_cast<std::size_t>(cols_)};
    }

    PermRef row(Index r) const
    {
        const auto off = static_cast<std::size_t>(r * cols_);
        const auto n = static_cast<std::size_t>(cols_);
        return {std::span<const Rank>(order_).subspan(off, n), std::span<const Rank>(inverse_).subspan(off, n)};
    }

    /// True when the view reads the factor's own buffer.
    bool shares_buffer() const { return buffer_ == base_.shared_values(); }

private:
    Factor base_;
    Scope conditioning_;
    Scope free_;
    Index rows_ = 0;
    Index cols_ = 0;
    std::shared_ptr<const Eigen::ArrayXd> buffer_;
    std::vector<Rank> order_;
    std::vector<Rank> inverse_;
};

/// Sorts every conditioning row of `f` over its remaining variables.
/// Theta(R F log F) for R rows of F entries.
SortedFactorView sort_rows(const Factor& f, const Scope& conditioning, const Semiring& s);

struct CliqueOptions {
    ArgmaxMode mode = ArgmaxMode::early_stop;
    /// Below this many states of the eliminated variable a plain scan is used.
    Index min_fast_states = 8;
    /// Optional presorted views: `ik` conditioned on i, `jk` conditioned on j.
    const SortedFactorView* ik_view = nullptr;
    const SortedFactorView* jk_view = nullptr;
    ProbeStats* stats = nullptr;
    /// When set, receives the winning state of k for every output cell.
    std::vector<int>* argbest = nullptr;
};

/// max_k phi_ij(i,j) * phi_ik(i,k) * phi_jk(j,k) for every (i,j).
///
/// The three factors are pairwise; k is the variable shared by phi_ik and
/// phi_jk. Rows of phi_ik and phi_jk are sorted once and each of the N^2
/// output cells costs one pair search. Result is over phi_ij's scope.
Factor max_marginal_3clique(const Factor& phi_ij, const Factor& phi_ik, const Factor& phi_jk, const Semiring& s,
                            const CliqueOptions& opts = {});

} // namespace fmp
