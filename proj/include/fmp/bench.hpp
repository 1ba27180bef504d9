#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <fmp/argmax.hpp>
#include <fmp/bp.hpp>

namespace fmp {

struct BenchConfig {
    std::string experiment;
    std::vector<Index> sizes;
    int k = 2;
    int trials = 100;
    std::uint64_t seed = 1;
    double correlation = 0.0;
    ArgmaxMode mode = ArgmaxMode::analysis;
    std::string out;

    void validate() const;
};

struct ArgmaxRow {
    Index n = 0;
    int k = 2;
    int trial = 0;
    Index steps = 0;
    Index probes = 0;
    double expected = 0.0; ///< expected_steps(N) for K = 2, NaN otherwise
    double bound = 0.0;    ///< step_bound(N, K)
};

struct CorrelatedRow {
    Index n = 0;
    double correlation = 0.0;
    int trial = 0;
    Index steps = 0;
    Index probes = 0;
};

/// K lists of N i.i.d. U[0,1) values per trial; counts of one search each.
std::vector<ArgmaxRow> bench_argmax(const BenchConfig& cfg);

/// Two lists of correlated standard-normal values per trial.
std::vector<CorrelatedRow> bench_correlated(const BenchConfig& cfg);

/// Cost of one pairwise message on a two-node model with a random
/// homogeneous prior: naive combines, or fast-mode probes plus timings.
struct MessageCostRow {
    Index n = 0;
    std::string mode;
    int trial = 0;
    Index work = 0; ///< combines (naive) or probes (fast)
    double sort_seconds = 0.0;
    double search_seconds = 0.0;
};

std::vector<MessageCostRow> bench_message_cost(const std::vector<Index>& sizes, int trials, std::uint64_t seed,
                                               MessageMode mode, ArgmaxMode argmax = ArgmaxMode::early_stop);

/// BP on random chains (max-sum, homogeneous prior) in both modes.
struct ChainRow {
    Index n = 0;
    std::string mode;
    Index work = 0;
    double sort_seconds = 0.0;
    double search_seconds = 0.0;
    double seconds = 0.0; ///< median over repetitions
    bool agrees = true;   ///< fast decode equals naive decode
};

std::vector<ChainRow> bench_chain(const std::vector<Index>& sizes, int length, int reps, std::uint64_t seed);

/// Funny matrix multiplication, fast against naive.
struct MatmulRow {
    Index n = 0;
    int trial = 0;
    Index probes = 0;
    Index naive_combines = 0;
    double fast_seconds = 0.0;
    double naive_seconds = 0.0;
    bool agrees = true;
};

std::vector<MatmulRow> bench_matmul(const std::vector<Index>& sizes, int trials, std::uint64_t seed,
                                   const Semiring& s, ArgmaxMode mode);

void write_csv(std::ostream& os, const std::vector<ArgmaxRow>& rows);
void write_csv(std::ostream& os, const std::vector<CorrelatedRow>& rows);
void write_csv(std::ostream& os, const std::vector<MessageCostRow>& rows);
void write_csv(std::ostream& os, const std::vector<ChainRow>& rows);
void write_csv(std::ostream& os, const std::vector<MatmulRow>& rows);

/// Shortest round-trip formatting of a double ("" for NaN).
std::string format_double(double v);

/// Mean and standard error of a sample.
struct SampleStats {
    double mean = 0.0;
    double stderr_mean = 0.0;
    Index count = 0;
};

SampleStats sample_stats(const std::vector<double>& xs);

} // namespace fmp
