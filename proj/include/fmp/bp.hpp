#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <fmp/argmax.hpp>
#include <fmp/clique.hpp>
#include <fmp/graph.hpp>

namespace fmp {

enum class ScheduleKind { forward_backward, random_sequential, synchronous };

struct Schedule {
    ScheduleKind kind = ScheduleKind::forward_backward;
    int budget = 5;          ///< iterations; one iteration updates every message once
    double tolerance = 1e-9; ///< stop once the largest message change is below this
    std::uint64_t seed = 0;  ///< random_sequential only
};

enum class MessageMode { naive, fast };

/// Factor-to-variable message.
struct Message {
    int factor = -1;
    int variable = -1;
    Factor table;
    int iteration = 0;
};

/// Sorted rows of a pairwise table, one view per conditioning position.
/// Shared by every factor of a homogeneity class: only the ordering is read
/// from here, values always come from the factor being processed.
class PresortedPrior {
public:
    PresortedPrior() = default;
    PresortedPrior(const Factor& f, std::span<const int> positions, const Semiring& s);

    const Factor& factor() const { return factor_; }
    bool has(int position) const;
    /// Rows indexed by the state of scope()[position].
    const SortedFactorView& view(int position) const;
    /// Sorts `position` now if it is missing.
    void ensure(int position, const Semiring& s);
    /// Table sorts performed so far (one per direction).
    Index table_sorts() const { return table_sorts_; }

private:
    Factor factor_;
    std::vector<std::optional<SortedFactorView>> views_;
    Index table_sorts_ = 0;
};

/// Sorts a data-independent pairwise table once for the given conditioning
/// positions (default: both).
PresortedPrior presort_shared_prior(const Factor& f, const Semiring& s, std::span<const int> positions = {});

struct MessageOptions {
    MessageMode mode = MessageMode::fast;
    ArgmaxMode argmax = ArgmaxMode::early_stop;
    /// Combine the target's own unary term into the message as well.
    bool include_target_unary = false;
    /// Rescale so that the best entry is the semiring identity.
    bool normalize = false;
    ProbeStats* stats = nullptr;
    Index* naive_combines = nullptr;
};

/// Message from `factor` to `target`. `incoming` must hold every message
/// into the factor's other variables from their other (non-unary) factors.
/// Pairwise factors in fast mode need `prior` (sorted in the target's
/// direction); other arities are enumerated in both modes.
Message compute_message(const FactorGraph& g, int factor, int target, std::span<const Message> incoming,
                        const PresortedPrior* prior, const MessageOptions& opts = {});

/// Combined unary factors of `var` (identity when it has none).
Factor local_term(const FactorGraph& g, int var);

struct BpOptions {
    MessageMode mode = MessageMode::fast;
    ArgmaxMode argmax = ArgmaxMode::early_stop;
    /// Keep every unnormalized message table, in update order.
    bool record_raw = false;
};

struct BpTrace {
    int iterations = 0;
    bool converged = false;
    std::vector<double> residuals; ///< per iteration
    Index message_calls = 0;
    Index table_sorts = 0;    ///< pairwise tables sorted
    Index vector_sorts = 0;   ///< incoming vectors sorted from scratch
    Index vector_resorts = 0; ///< incoming vectors re-sorted from the previous order
    Index resort_moves = 0;
    Index naive_combines = 0;
    ProbeStats probes;
    double sort_seconds = 0.0;
    double search_seconds = 0.0;
    std::vector<Message> raw;
};

struct BpResult {
    std::vector<Factor> beliefs; ///< per variable
    std::vector<Message> messages;
    BpTrace trace;
};

BpResult run_bp(const FactorGraph& g, const Schedule& schedule, const BpOptions& opts = {});

/// Joint assignment from a BP result. When the pairwise factors form a
/// forest, states are chosen root to leaves so that the assignment is a
/// joint maximizer; otherwise each variable takes its belief's argmax.
Assignment decode_map(const FactorGraph& g, const BpResult& result);

/// Index of the best entry, smallest index on ties.
Index best_index(const Eigen::ArrayXd& v, const Semiring& s);

} // namespace fmp
