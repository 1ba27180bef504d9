#include <fmp/bench.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>

#include <fmp/analysis.hpp>
#include <fmp/funny_matmul.hpp>
#include <fmp/rng.hpp>

namespace fmp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::mt19937_64 rng_for(std::uint64_t seed, Index n, int trial)
{
    return trial_rng(seed ^ splitmix64(static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(trial));
}

Eigen::ArrayXd uniform_array(std::mt19937_64& rng, Index n)
{
    Eigen::ArrayXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform01(rng);
    return v;
}

double median(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

} // namespace

void BenchConfig::validate() const
{
    if (trials < 1) throw domain_error("bench: trials must be at least 1");
    if (k < 2) throw domain_error("bench: K must be at least 2");
    if (!(correlation >= -1.0 && correlation <= 1.0)) throw domain_error("bench: correlation must lie in [-1, 1]");
    if (sizes.empty()) throw domain_error("bench: no sizes given");
    for (Index n : sizes) {
        if (n < 1) throw domain_error("bench: sizes must be positive");
    }
}

std::vector<ArgmaxRow> bench_argmax(const BenchConfig& cfg)
{
    cfg.validate();
    const Semiring s = max_product;
    std::vector<ArgmaxRow> rows;
    for (Index n : cfg.sizes) {
        const double expected = cfg.k == 2 ? expected_steps(n) : std::numeric_limits<double>::quiet_NaN();
        const double bound = step_bound(n, cfg.k);
        ReadScratch scratch(n);
        for (int t = 0; t < cfg.trials; ++t) {
            auto rng = rng_for(cfg.seed, n, t);
            std::vector<Eigen::ArrayXd> lists;
            std::vector<SortedPermutation> perms;
            for (int q = 0; q < cfg.k; ++q) {
                lists.push_back(uniform_array(rng, n));
                perms.push_back(sort_desc(lists.back(), s));
            }
            ArgmaxRow row{n, cfg.k, t, 0, 0, expected, bound};
            if (cfg.k == 2) {
                const auto o = fast_argmax_pair(lists[0], lists[1], perms[0].ref(), perms[1].ref(), cfg.mode, s);
                row.steps = o.steps;
                row.probes = o.probes;
            } else {
                std::vector<std::span<const double>> spans;
                std::vector<PermRef> refs;
                for (int q = 0; q < cfg.k; ++q) {
                    spans.emplace_back(lists[q].data(), static_cast<std::size_t>(n));
                    refs.push_back(perms[q].ref());
                }
                const auto o = fast_argmax_k(std::span<const std::span<const double>>(spans),
                                             std::span<const PermRef>(refs), scratch, cfg.mode, s);
                row.steps = o.steps;
                row.probes = o.probes;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<CorrelatedRow> bench_correlated(const BenchConfig& cfg)
{
    cfg.validate();
    const Semiring s = max_sum;
    std::vector<CorrelatedRow> rows;
    for (Index n : cfg.sizes) {
        for (int t = 0; t < cfg.trials; ++t) {
            auto rng = rng_for(cfg.seed, n, t);
            Eigen::ArrayXd a(n), b(n);
            for (Index i = 0; i < n; ++i) std::tie(a[i], b[i]) = correlated_pair(rng, cfg.correlation);
            const auto pa = sort_desc(a, s);
            const auto pb = sort_desc(b, s);
            const auto o = fast_argmax_pair(a, b, pa.ref(), pb.ref(), cfg.mode, s);
            rows.push_back({n, cfg.correlation, t, o.steps, o.probes});
        }
    }
    return rows;
}

std::vector<MessageCostRow> bench_message_cost(const std::vector<Index>& sizes, int trials, std::uint64_t seed,
                                               MessageMode mode, ArgmaxMode argmax)
{
    if (trials < 1) throw domain_error("bench: trials must be at least 1");
    std::vector<MessageCostRow> rows;
    const char* name = mode == MessageMode::fast ? "fast" : "naive";
    for (Index n : sizes) {
        auto prior_rng = rng_for(seed, n, -1);
        const Factor prior(Scope{{0, static_cast<int>(n)}, {1, static_cast<int>(n)}}, uniform_array(prior_rng, n * n));
        std::optional<PresortedPrior> sorted;
        static constexpr int toward_second[] = {1};
        if (mode == MessageMode::fast) sorted = presort_shared_prior(prior, max_product, toward_second);

        for (int t = 0; t < trials; ++t) {
            auto rng = rng_for(seed, n, t);
            FactorGraph g(max_product);
            g.add_variable(static_cast<int>(n));
            g.add_variable(static_cast<int>(n));
            g.add_factor(prior, FactorRole::data_independent, 0);
            g.add_factor(Factor(Scope{{0, static_cast<int>(n)}}, uniform_array(rng, n)));

            ProbeStats stats;
            Index combines = 0;
            MessageOptions mo;
            mo.mode = mode;
            mo.argmax = argmax;
            mo.stats = &stats;
            mo.naive_combines = &combines;
            const auto t0 = Clock::now();
            compute_message(g, 0, 1, {}, sorted ? &*sorted : nullptr, mo);
            const double total = seconds_since(t0);

            MessageCostRow row{n, name, t, mode == MessageMode::fast ? stats.probes : combines, 0.0, total};
            if (mode == MessageMode::fast) {
                // Time the vector sort on its own so search time excludes it.
                const Eigen::ArrayXd mu = g.factor(1).values();
                const auto t1 = Clock::now();
                [[maybe_unused]] const auto order = sort_desc(mu, max_product);
                row.sort_seconds = seconds_since(t1);
                row.search_seconds = std::max(0.0, total - row.sort_seconds);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<ChainRow> bench_chain(const std::vector<Index>& sizes, int length, int reps, std::uint64_t seed)
{
    if (reps < 1) throw domain_error("bench: repetitions must be at least 1");
    std::vector<ChainRow> rows;
    for (Index n : sizes) {
        auto rng = rng_for(seed, n, 0);
        const FactorGraph g = build_topology(
            Topology::chain(length), static_cast<int>(n),
            [&](int, int card) { return Eigen::ArrayXd(uniform_array(rng, card).log()); },
            [&](int, int, int card) { return Eigen::ArrayXd(uniform_array(rng, Index(card) * card).log()); },
            max_sum, true);
        Schedule sched;
        sched.budget = 1;

        Assignment decoded[2];
        for (int m = 0; m < 2; ++m) {
            const MessageMode mode = m == 0 ? MessageMode::naive : MessageMode::fast;
            BpOptions bo;
            bo.mode = mode;
            std::vector<double> times;
            BpResult last;
            for (int r = 0; r < reps; ++r) {
                const auto t0 = Clock::now();
                last = run_bp(g, sched, bo);
                times.push_back(seconds_since(t0));
            }
            decoded[m] = decode_map(g, last);
            ChainRow row;
            row.n = n;
            row.mode = m == 0 ? "naive" : "fast";
            row.work = m == 0 ? last.trace.naive_combines : last.trace.probes.probes;
            row.sort_seconds = last.trace.sort_seconds;
            row.search_seconds = last.trace.search_seconds;
            row.seconds = median(times);
            rows.push_back(row);
        }
        const bool agrees = decoded[0] == decoded[1];
        rows[rows.size() - 1].agrees = agrees;
        rows[rows.size() - 2].agrees = agrees;
    }
    return rows;
}

std::vector<MatmulRow> bench_matmul(const std::vector<Index>& sizes, int trials, std::uint64_t seed,
                                   const Semiring& s, ArgmaxMode mode)
{
    if (trials < 1) throw domain_error("bench: trials must be at least 1");
    std::vector<MatmulRow> rows;
    for (Index n : sizes) {
        for (int t = 0; t < trials; ++t) {
            auto rng = rng_for(seed, n, t);
            Eigen::MatrixXd a(n, n), b(n, n);
            for (Index i = 0; i < n * n; ++i) a.data()[i] = uniform01(rng);
            for (Index i = 0; i < n * n; ++i) b.data()[i] = uniform01(rng);
            if (s.kind != SemiringKind::max_product) {
                a = a.array().log().matrix();
                b = b.array().log().matrix();
            }
            MatmulRow row{n, t, 0, n * n * n, 0.0, 0.0, true};
            ProbeStats stats;
            auto t0 = Clock::now();
            const auto fast = funny_matmul(a, b, s, mode, &stats);
            row.fast_seconds = seconds_since(t0);
            t0 = Clock::now();
            const auto naive = funny_matmul_naive(a, b, s);
            row.naive_seconds = seconds_since(t0);
            row.probes = stats.probes;
            row.agrees = (fast.array() == naive.array()).all();
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<ArgmaxRow>& rows)
{
    os << "N,K,trial,steps,probes,expected,bound\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.k << ',' << r.trial << ',' << r.steps << ',' << r.probes << ','
           << format_double(r.expected) << ',' << format_double(r.bound) << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<CorrelatedRow>& rows)
{
    os << "N,c,trial,steps,probes\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_double(r.correlation) << ',' << r.trial << ',' << r.steps << ',' << r.probes
           << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<MessageCostRow>& rows)
{
    os << "N,mode,trial,work,sort_seconds,search_seconds\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.mode << ',' << r.trial << ',' << r.work << ',' << format_double(r.sort_seconds) << ','
           << format_double(r.search_seconds) << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<ChainRow>& rows)
{
    os << "N,mode,work,sort_seconds,search_seconds,seconds,agrees\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.mode << ',' << r.work << ',' << format_double(r.sort_seconds) << ','
           << format_double(r.search_seconds) << ',' << format_double(r.seconds) << ',' << (r.agrees ? 1 : 0)
           << '\n';
    }
}

void write_csv(std::ostream& os, const std::vector<MatmulRow>& rows)
{
    os << "N,trial,probes,naive_combines,fast_seconds,naive_seconds,agrees\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.trial << ',' << r.probes << ',' << r.naive_combines << ','
           << format_double(r.fast_seconds) << ',' << format_double(r.naive_seconds) << ',' << (r.agrees ? 1 : 0)
           << '\n';
    }
}

SampleStats sample_stats(const std::vector<double>& xs)
{
    SampleStats st;
    st.count = static_cast<Index>(xs.size());
    if (xs.empty()) return st;
    double sum = 0.0;
    for (double x : xs) sum += x;
    st.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - st.mean) * (x - st.mean);
        st.stderr_mean = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return st;
}

} // namespace fmp
