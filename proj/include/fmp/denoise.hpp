#pragma once
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fmp/argmax.hpp>
#include <fmp/clique.hpp>
#include <fmp/graph.hpp>

namespace fmp {

/// p(observed | true) = 1 - eps when they agree, eps / (|alphabet| - 1)
/// otherwise.
struct NoiseModel {
    std::string alphabet;
    double epsilon = 0.01;

    void validate() const;
    double emission(char observed, char truth) const;
    double log_emission(char observed, char truth) const;
};

/// Character bigram statistics in the log domain, add-one smoothed:
/// adjacent[a * A + b] = log p(x_{i+1} = b | x_i = a) and skip[a * A + c]
/// = log p(x_{i+2} = c | x_i = a).
struct TextPrior {
    std::string alphabet;
    Eigen::ArrayXd adjacent;
    Eigen::ArrayXd skip;

    int size() const { return static_cast<int>(alphabet.size()); }
    /// Position in the alphabet, -1 when absent.
    int index_of(char c) const;
};

inline constexpr std::size_t min_corpus_chars = 10'000;

std::string load_corpus(const std::string& path);

/// Alphabet is the set of characters seen in the corpus, in byte order.
TextPrior learn_prior(const std::string& corpus);

/// Replaces each character by a different alphabet character with
/// probability eps.
std::string corrupt(const std::string& text, const NoiseModel& noise, std::mt19937_64& rng);

enum class TextModel { chain, skip2 };

struct DenoiseResult {
    std::string text;
    Index changed = 0;
    std::vector<std::string> warnings;
    ProbeStats stats;
};

/// Chain model decoded with max-sum BP; skip-2 model (adjacent and
/// distance-two bigrams) decoded exactly by dynamic programming over
/// character pairs, each step one 3-clique max-marginal.
DenoiseResult run_denoise(const TextPrior& prior, const std::string& input, double epsilon, TextModel model,
                          ArgmaxMode mode = ArgmaxMode::early_stop);

/// The chain model as a factor graph: variable i is character i, pairwise
/// factors carry the adjacent bigram table (one homogeneity class), unary
/// factors the emission log-probabilities.
FactorGraph text_chain_graph(const TextPrior& prior, const std::string& input, double epsilon,
                             std::vector<std::string>* warnings = nullptr);

/// Adds the distance-two factors to text_chain_graph.
FactorGraph text_skip2_graph(const TextPrior& prior, const std::string& input, double epsilon);

/// Fraction of positions where the strings agree.
double char_accuracy(const std::string& truth, const std::string& guess);

} // namespace fmp
