#include <doctest.h>

#include <fmp/analysis.hpp>
#include <fmp/argmax.hpp>
#include <fmp/bench.hpp>

#include "../oracles.hpp"

using namespace fmp;

namespace {

template <class T>
ArgmaxOutcome<T> pair(const std::vector<T>& a, const std::vector<T>& b, ArgmaxMode mode, const Semiring& s)
{
    const auto pa = sort_desc(a, s);
    const auto pb = sort_desc(b, s);
    return fast_argmax_pair(a, b, pa.ref(), pb.ref(), mode, s);
}

ArgmaxOutcome<double> klist(const std::vector<std::vector<double>>& lists, ArgmaxMode mode, const Semiring& s)
{
    std::vector<SortedPermutation> perms;
    std::vector<PermRef> refs;
    std::vector<std::span<const double>> spans;
    for (const auto& l : lists) perms.push_back(sort_desc(l, s));
    for (std::size_t q = 0; q < lists.size(); ++q) {
        refs.push_back(perms[q].ref());
        spans.emplace_back(lists[q]);
    }
    ReadScratch scratch(static_cast<Index>(lists[0].size()));
    return fast_argmax_k(std::span<const std::span<const double>>(spans), std::span<const PermRef>(refs), scratch,
                         mode, s);
}

constexpr ArgmaxMode all_modes[] = {ArgmaxMode::analysis, ArgmaxMode::symmetric, ArgmaxMode::early_stop};

} // namespace

TEST_SUITE("pair search")
{
    TEST_CASE("aligned orderings stop after one step")
    {
        const auto o = pair<double>({3, 1, 2}, {6, 2, 4}, ArgmaxMode::analysis, max_product);
        CHECK(o.best == 0);
        CHECK(o.value == 18.0);
        CHECK(o.steps == 1);
    }

    TEST_CASE("reversed orderings, tie broken low")
    {
        for (ArgmaxMode m : all_modes) {
            const auto o = pair<double>({1, 2, 3, 4}, {4, 3, 2, 1}, m, max_product);
            CHECK(o.value == 6.0);
            CHECK(o.best == 1);
        }
    }

    TEST_CASE("three-element example")
    {
        const auto o = pair<double>({0.9, 0.1, 0.5}, {0.2, 0.8, 0.6}, ArgmaxMode::analysis, max_product);
        CHECK(o.best == 2);
        CHECK(o.value == 0.5 * 0.6);
    }

    TEST_CASE("single element")
    {
        const auto o = pair<double>({2}, {3}, ArgmaxMode::analysis, max_product);
        CHECK(o.steps == 1);
        CHECK(o.probes == 1);
        CHECK(o.value == 6.0);
    }

    TEST_CASE("value equals the scan oracle in every mode and semiring")
    {
        std::mt19937_64 rng(21);
        for (int t = 0; t < 3000; ++t) {
            const std::size_t n = 1 + rng() % 200;
            const auto a = oracle::uniform_list(rng, n);
            const auto b = oracle::uniform_list(rng, n);
            for (Semiring s : {max_product, max_sum, min_sum}) {
                const auto ref = oracle::argmax_scan({a, b}, s);
                for (ArgmaxMode m : all_modes) {
                    const auto o = pair(a, b, m, s);
                    CHECK(o.value == ref.value);
                    CHECK(o.best == ref.best);
                }
            }
        }
    }

    TEST_CASE("integer lists with many ties keep the scan's winner")
    {
        std::mt19937_64 rng(23);
        for (int t = 0; t < 2000; ++t) {
            const std::size_t n = 1 + rng() % 30;
            const auto a = oracle::integer_list(rng, n, 0, 3);
            const auto b = oracle::integer_list(rng, n, 0, 3);
            const auto ref = oracle::argmax_scan({a, b}, max_sum);
            for (ArgmaxMode m : all_modes) {
                const auto o = pair(a, b, m, max_sum);
                CHECK(o.value == ref.value);
            }
            const auto o = pair(a, b, ArgmaxMode::analysis, max_sum);
            CHECK(a[o.best] + b[o.best] == ref.value);
        }
    }

    TEST_CASE("analysis steps lie in [1, floor(N/2)+1] and match the square width")
    {
        std::mt19937_64 rng(29);
        for (int t = 0; t < 2000; ++t) {
            const std::size_t n = 1 + rng() % 64;
            const auto a = oracle::uniform_list(rng, n);
            const auto b = oracle::uniform_list(rng, n);
            const auto o = pair(a, b, ArgmaxMode::analysis, max_product);
            CHECK(o.steps >= 1);
            CHECK(o.steps <= static_cast<Index>(n / 2 + 1));
            // relative permutation: rank in b of the element at rank i in a
            const auto pa = sort_desc(a), pb = sort_desc(b);
            std::vector<int> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = pb.inverse()[pa.order()[i]];
            CHECK(o.steps == oracle::square_width(p));
            CHECK(o.probes <= static_cast<Index>(n));
        }
    }

    TEST_CASE("symmetric and early-stop never take more steps than analysis")
    {
        std::mt19937_64 rng(31);
        for (int t = 0; t < 1000; ++t) {
            const auto a = oracle::uniform_list(rng, 100);
            const auto b = oracle::uniform_list(rng, 100);
            const Index base = pair(a, b, ArgmaxMode::analysis, max_product).steps;
            CHECK(pair(a, b, ArgmaxMode::symmetric, max_product).steps <= base);
            CHECK(pair(a, b, ArgmaxMode::early_stop, max_product).steps <= base);
        }
    }

    TEST_CASE("positive scaling leaves the best index unchanged")
    {
        std::mt19937_64 rng(37);
        for (int t = 0; t < 500; ++t) {
            const auto a = oracle::uniform_list(rng, 50);
            auto b = oracle::uniform_list(rng, 50);
            const Index best = pair(a, b, ArgmaxMode::early_stop, max_product).best;
            for (auto& x : b) x *= 3.5;
            CHECK(pair(a, b, ArgmaxMode::early_stop, max_product).best == best);
        }
    }

    TEST_CASE("float and integer scalars")
    {
        const auto f = pair<float>({1.5f, 2.0f}, {2.0f, 1.0f}, ArgmaxMode::analysis, max_product);
        CHECK(f.value == 3.0f);
        const auto i = pair<int>({1, 5, 2}, {4, 0, 3}, ArgmaxMode::analysis, max_sum);
        CHECK(i.value == 5);
        CHECK(i.best == 0);
    }

    TEST_CASE("input validation")
    {
        const std::vector<double> a{1, 2}, b{1, 2, 3};
        const auto pa = sort_desc(a), pb = sort_desc(b);
        CHECK_THROWS_AS(fast_argmax_pair(a, b, pa.ref(), pb.ref(), ArgmaxMode::analysis, max_product), domain_error);
        const auto wrong = SortedPermutation::from_order({0, 1});
        CHECK_THROWS_AS(fast_argmax_pair_checked(a, a, wrong.ref(), pa.ref(), ArgmaxMode::analysis, max_product),
                        domain_error);
        CHECK_THROWS_AS(parse_argmax_mode("fast"), domain_error);
        CHECK(parse_argmax_mode("early-stop") == ArgmaxMode::early_stop);
    }
}

TEST_SUITE("k-list search")
{
    TEST_CASE("agrees with the pair search for K=2")
    {
        const auto o = klist({{3, 1, 2}, {6, 2, 4}}, ArgmaxMode::analysis, max_product);
        CHECK(o.value == 18.0);
        CHECK(o.best == 0);
    }

    TEST_CASE("K=3 tie example")
    {
        const auto o = klist({{2, 1}, {1, 2}, {1, 1}}, ArgmaxMode::analysis, max_product);
        CHECK(o.value == 2.0);
        CHECK(o.best == 0);
    }

    TEST_CASE("reversal-structured K=3 lists of length 6 read at most 6 indices")
    {
        const std::vector<double> up{1, 2, 3, 4, 5, 6}, down{6, 5, 4, 3, 2, 1}, mid{3, 4, 6, 5, 2, 1};
        for (ArgmaxMode m : all_modes) {
            const auto o = klist({up, down, mid}, m, max_product);
            CHECK(o.probes <= 6);
            CHECK(o.value == oracle::argmax_scan({up, down, mid}, max_product).value);
        }
    }

    TEST_CASE("random K-lists equal the scan oracle and respect the probe bounds")
    {
        std::mt19937_64 rng(41);
        for (int t = 0; t < 2000; ++t) {
            const int k = 2 + static_cast<int>(rng() % 4);
            const std::size_t n = 1 + rng() % 100;
            std::vector<std::vector<double>> lists;
            for (int q = 0; q < k; ++q) lists.push_back(oracle::uniform_list(rng, n));
            const auto ref = oracle::argmax_scan(lists, max_product);
            for (ArgmaxMode m : all_modes) {
                const auto o = klist(lists, m, max_product);
                CHECK(o.value == ref.value);
                CHECK(o.best == ref.best);
                CHECK(o.probes <= static_cast<Index>(n));
                CHECK(o.probes <= std::min<Index>(k * o.steps + k, static_cast<Index>(n)));
            }
        }
    }

    TEST_CASE("read scratch reuse across calls")
    {
        ReadScratch scratch(4);
        const auto e = scratch.begin_call();
        CHECK(scratch.mark(2));
        CHECK_FALSE(scratch.mark(2));
        CHECK(scratch.begin_call() == e + 1);
        CHECK(scratch.mark(2));
        const std::vector<double> a{1, 2, 3, 4, 5};
        const auto p = sort_desc(a);
        const std::span<const double> spans[] = {a, a};
        const PermRef refs[] = {p.ref(), p.ref()};
        CHECK_THROWS_AS(fast_argmax_k(std::span<const std::span<const double>>(spans), std::span<const PermRef>(refs),
                                      scratch, ArgmaxMode::analysis, max_product),
                        domain_error);
    }
}

TEST_SUITE("step analysis")
{
    TEST_CASE("prob_exceed")
    {
        CHECK(prob_exceed(10, 0) == doctest::Approx(1.0));
        CHECK(prob_exceed(2, 1) == doctest::Approx(0.5));
        CHECK(prob_exceed(4, 1) == doctest::Approx(0.75));
        CHECK(prob_exceed(4, 3) == 0.0);
        CHECK(std::isfinite(prob_exceed(1'000'000, 500)));
    }

    TEST_CASE("expected_steps matches permutation enumeration")
    {
        CHECK(expected_steps(1) == doctest::Approx(1.0));
        CHECK(expected_steps(2) == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(expected_steps(4) == doctest::Approx(23.0 / 12.0).epsilon(1e-12));
        for (int n = 1; n <= 8; ++n) {
            const auto [num, den] = oracle::mean_width_enumerated(n);
            CHECK(expected_steps(n) == doctest::Approx(double(num) / double(den)).epsilon(1e-12));
            CHECK(expected_steps_enumerate(n, 2) == doctest::Approx(double(num) / double(den)).epsilon(1e-12));
        }
    }

    TEST_CASE("K=3 enumeration at N=2 by hand")
    {
        // pairs (p1, p2) of permutations of {0,1}: the cube of width 1 holds
        // (0, p1[0], p2[0]) only when both fix 0; otherwise width 2.
        CHECK(expected_steps_enumerate(2, 3) == doctest::Approx((1 + 2 + 2 + 2) / 4.0));
    }

    TEST_CASE("hypercube width and cap")
    {
        const std::vector<std::vector<int>> rev{{3, 2, 1, 0}};
        CHECK(hypercube_width(rev) == 3);
        const std::vector<std::vector<int>> id{{0, 1, 2}, {0, 1, 2}};
        CHECK(hypercube_width(id) == 1);
        CHECK_THROWS_AS(expected_steps_enumerate(10, 3, 1000), resource_error);
    }

    TEST_CASE("step_bound")
    {
        CHECK(step_bound(100, 2) == doctest::Approx(10.0));
        CHECK(step_bound(8, 3) == doctest::Approx(4.0));
        CHECK(step_bound(1, 4) == doctest::Approx(1.0));
    }

    TEST_CASE("empirical mean steps near expected_steps at N=64")
    {
        BenchConfig cfg;
        cfg.sizes = {64};
        cfg.trials = 4000;
        cfg.seed = 99;
        std::vector<double> steps;
        for (const auto& r : bench_argmax(cfg)) steps.push_back(static_cast<double>(r.steps));
        const auto st = sample_stats(steps);
        CHECK(std::abs(st.mean - expected_steps(64)) <= 3.0 * st.stderr_mean);
    }
}
