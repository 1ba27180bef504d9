#include <fmp/denoise.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmp/bp.hpp>
#include <fmp/rng.hpp>

namespace fmp {

void NoiseModel::validate() const
{
    if (alphabet.size() < 2) throw domain_error("noise model: alphabet needs at least two characters");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw domain_error("noise model: epsilon must lie in [0, 1)");
}

double NoiseModel::emission(char observed, char truth) const
{
    return observed == truth ? 1.0 - epsilon : epsilon / static_cast<double>(alphabet.size() - 1);
}

double NoiseModel::log_emission(char observed, char truth) const
{
    return std::log(emission(observed, truth));
}

int TextPrior::index_of(char c) const
{
    const auto pos = alphabet.find(c);
    return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

std::string load_corpus(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw domain_error("cannot open corpus '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

Eigen::ArrayXd conditional_log(const std::string& corpus, const std::string& alphabet, std::size_t gap)
{
    const Index a = static_cast<Index>(alphabet.size());
    Eigen::ArrayXd counts = Eigen::ArrayXd::Ones(a * a);
    for (std::size_t i = 0; i + gap < corpus.size(); ++i) {
        const Index x = static_cast<Index>(alphabet.find(corpus[i]));
        const Index y = static_cast<Index>(alphabet.find(corpus[i + gap]));
        counts[x * a + y] += 1.0;
    }
    for (Index x = 0; x < a; ++x) {
        const double row = counts.segment(x * a, a).sum();
        counts.segment(x * a, a) = (counts.segment(x * a, a) / row).log();
    }
    return counts;
}

// Per-position emission log-probabilities, row i over the alphabet.
std::vector<Eigen::ArrayXd> emissions(const TextPrior& prior, const std::string& input, double epsilon,
                                      std::vector<std::string>* warnings)
{
    NoiseModel noise{prior.alphabet, epsilon};
    noise.validate();
    const int a = prior.size();
    std::vector<Eigen::ArrayXd> out;
    for (std::size_t i = 0; i < input.size(); ++i) {
        Eigen::ArrayXd row(a);
        if (prior.index_of(input[i]) < 0) {
            row.setConstant(-std::log(static_cast<double>(a)));
            if (warnings) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "character 0x%02x at position %zu is not in the alphabet",
                              static_cast<unsigned char>(input[i]), i);
                warnings->push_back(buf);
            }
        } else {
            for (int x = 0; x < a; ++x) row[x] = noise.log_emission(input[i], prior.alphabet[x]);
        }
        out.push_back(std::move(row));
    }
    return out;
}

Index best_of(const Eigen::ArrayXd& v)
{
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

std::string decode_skip2(const TextPrior& prior, const std::vector<Eigen::ArrayXd>& u, ArgmaxMode mode,
                         ProbeStats& stats)
{
    const int a = prior.size();
    const std::size_t n = u.size();
    std::string out(n, '\0');
    if (n == 1) {
        out[0] = prior.alphabet[best_of(u[0])];
        return out;
    }

    const Variable va{0, a}, vb{1, a}, vc{2, a};
    Eigen::ArrayXd delta(Index(a) * a);
    for (int x = 0; x < a; ++x) {
        for (int y = 0; y < a; ++y) delta[x * a + y] = u[0][x] + u[1][y] + prior.adjacent[x * a + y];
    }

    const Factor psi2(Scope{va, vc}, prior.skip);
    const SortedFactorView psi2_view(psi2, Scope{vc}, max_sum);
    stats.sorts += psi2_view.rows();

    std::vector<std::vector<int>> back(n);
    for (std::size_t i = 2; i < n; ++i) {
        Eigen::ArrayXd phi(Index(a) * a);
        for (int y = 0; y < a; ++y) {
            for (int z = 0; z < a; ++z) phi[y * a + z] = prior.adjacent[y * a + z] + u[i][z];
        }
        CliqueOptions opts;
        opts.mode = mode;
        opts.min_fast_states = 0;
        opts.jk_view = &psi2_view;
        opts.stats = &stats;
        opts.argbest = &back[i];
        const Factor next = max_marginal_3clique(Factor(Scope{vb, vc}, std::move(phi)), Factor(Scope{va, vb}, delta),
                                                 psi2, max_sum, opts);
        delta = next.values();
    }

    const Index cell = best_of(delta);
    int y = static_cast<int>(cell / a);
    int z = static_cast<int>(cell % a);
    out[n - 2] = prior.alphabet[y];
    out[n - 1] = prior.alphabet[z];
    for (std::size_t i = n - 1; i >= 2; --i) {
        const int x = back[i][static_cast<std::size_t>(y * a + z)];
        out[i - 2] = prior.alphabet[x];
        z = y;
        y = x;
    }
    return out;
}

} // namespace

TextPrior learn_prior(const std::string& corpus)
{
    if (corpus.size() < min_corpus_chars) {
        throw domain_error("corpus has " + std::to_string(corpus.size()) + " characters, need at least " +
                           std::to_string(min_corpus_chars));
    }
    std::string alphabet;
    bool seen[256] = {};
    for (unsigned char c : corpus) seen[c] = true;
    for (int c = 0; c < 256; ++c) {
        if (seen[c]) alphabet.push_back(static_cast<char>(c));
    }
    if (alphabet.size() < 2) throw domain_error("corpus uses fewer than two distinct characters");
    TextPrior p;
    p.alphabet = alphabet;
    p.adjacent = conditional_log(corpus, alphabet, 1);
    p.skip = conditional_log(corpus, alphabet, 2);
    return p;
}

std::string corrupt(const std::string& text, const NoiseModel& noise, std::mt19937_64& rng)
{
    noise.validate();
    std::string out = text;
    const auto a = static_cast<std::uint64_t>(noise.alphabet.size());
    for (auto& c : out) {
        if (uniform01(rng) >= noise.epsilon) continue;
        const auto pos = noise.alphabet.find(c);
        if (pos == std::string::npos) {
            c = noise.alphabet[rng() % a];
        } else {
            const auto shift = 1 + rng() % (a - 1);
            c = noise.alphabet[(pos + shift) % a];
        }
    }
    return out;
}

FactorGraph text_chain_graph(const TextPrior& prior, const std::string& input, double epsilon,
                             std::vector<std::string>* warnings)
{
    const auto u = emissions(prior, input, epsilon, warnings);
    const int a = prior.size();
    FactorGraph g(max_sum);
    for (std::size_t i = 0; i < input.size(); ++i) g.add_variable(a);
    const auto shared = std::make_shared<const Eigen::ArrayXd>(prior.adjacent);
    for (int i = 0; i + 1 < static_cast<int>(input.size()); ++i) {
        g.add_factor(Factor(Scope{{i, a}, {i + 1, a}}, shared), FactorRole::data_independent, 0);
    }
    for (int i = 0; i < static_cast<int>(input.size()); ++i) g.add_factor(Factor(Scope{{i, a}}, u[i]));
    return g;
}

FactorGraph text_skip2_graph(const TextPrior& prior, const std::string& input, double epsilon)
{
    FactorGraph g = text_chain_graph(prior, input, epsilon);
    const int a = prior.size();
    const auto shared = std::make_shared<const Eigen::ArrayXd>(prior.skip);
    for (int i = 0; i + 2 < static_cast<int>(input.size()); ++i) {
        g.add_factor(Factor(Scope{{i, a}, {i + 2, a}}, shared), FactorRole::data_independent, 1);
    }
    return g;
}

DenoiseResult run_denoise(const TextPrior& prior, const std::string& input, double epsilon, TextModel model,
                          ArgmaxMode mode)
{
    DenoiseResult r;
    if (input.empty()) return r;
    if (model == TextModel::chain) {
        const FactorGraph g = text_chain_graph(prior, input, epsilon, &r.warnings);
        Schedule sched;
        sched.budget = 1;
        BpOptions opts;
        opts.argmax = mode;
        const BpResult res = run_bp(g, sched, opts);
        const Assignment x = decode_map(g, res);
        r.text.resize(input.size());
        for (std::size_t i = 0; i < input.size(); ++i) r.text[i] = prior.alphabet[x.states[i]];
        r.stats = res.trace.probes;
        r.stats.sorts += res.trace.table_sorts + res.trace.vector_sorts;
    } else {
        const auto u = emissions(prior, input, epsilon, &r.warnings);
        r.text = decode_skip2(prior, u, mode, r.stats);
    }
    for (std::size_t i = 0; i < input.size(); ++i) r.changed += r.text[i] != input[i];
    return r;
}

double char_accuracy(const std::string& truth, const std::string& guess)
{
    if (truth.size() != guess.size()) throw domain_error("char_accuracy: lengths differ");
    if (truth.empty()) return 1.0;
    Index same = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) same += truth[i] == guess[i];
    return static_cast<double>(same) / static_cast<double>(truth.size());
}

} // namespace fmp
