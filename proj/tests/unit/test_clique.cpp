#include <doctest.h>

#include <fmp/clique.hpp>
#include <fmp/funny_matmul.hpp>
#include <fmp/grouping.hpp>

#include "../oracles.hpp"

using namespace fmp;

namespace {

Eigen::ArrayXd arr(std::initializer_list<double> v)
{
    Eigen::ArrayXd a(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) a[i++] = x;
    return a;
}

std::vector<double> vec(const Factor& f)
{
    return {f.values().data(), f.values().data() + f.size()};
}

Factor random_int(std::mt19937_64& rng, const Scope& sc, int lo = -50, int hi = 50)
{
    const auto v = oracle::integer_list(rng, static_cast<std::size_t>(domain_size(sc)), lo, hi);
    return Factor(sc, Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Index>(v.size())));
}

Factor random_unit(std::mt19937_64& rng, const Scope& sc)
{
    const auto v = oracle::uniform_list(rng, static_cast<std::size_t>(domain_size(sc)));
    return Factor(sc, Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Index>(v.size())));
}

std::vector<double> brute(const std::vector<Factor>& fs, const std::vector<int>& card, const std::vector<int>& target,
                          const Semiring& s)
{
    std::vector<oracle::Table> t;
    for (const auto& f : fs) t.push_back(oracle::from_factor(f));
    return oracle::max_marginal(t, card, target, s);
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double rel)
{
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= rel * std::abs(want[i]));
}

const Variable vi{0, 2}, vj{1, 2}, vk{2, 2};

std::vector<Factor> worked()
{
    return {Factor(Scope{vi, vj}, arr({1, 2, 3, 4})), Factor(Scope{vi, vk}, arr({1, 1, 2, 1})),
            Factor(Scope{vj, vk}, arr({2, 1, 1, 3}))};
}

} // namespace

TEST_SUITE("sorted views")
{
    TEST_CASE("2x2 rows conditioned on the first variable")
    {
        const Factor f(Scope{vi, vj}, arr({1, 3, 2, 1}));
        const SortedFactorView v(f, Scope{vi}, max_product);
        CHECK(v.rows() == 2);
        CHECK(v.cols() == 2);
        CHECK(std::vector<Rank>(v.row(0).order.begin(), v.row(0).order.end()) == std::vector<Rank>{1, 0});
        CHECK(std::vector<Rank>(v.row(1).order.begin(), v.row(1).order.end()) == std::vector<Rank>{0, 1});
        CHECK(v.shares_buffer());
    }

    TEST_CASE("conditioning on a later variable transposes")
    {
        const Factor f(Scope{vi, vj}, arr({1, 3, 2, 1}));
        const SortedFactorView v(f, Scope{vj}, max_product);
        CHECK_FALSE(v.shares_buffer());
        CHECK(std::vector<double>(v.row_values(0).begin(), v.row_values(0).end()) == std::vector<double>{1, 2});
        CHECK(std::vector<double>(v.row_values(1).begin(), v.row_values(1).end()) == std::vector<double>{3, 1});
    }

    TEST_CASE("empty conditioning gives one sorted row")
    {
        const Factor f(Scope{{0, 4}}, arr({0.1, 0.7, 0.3, 0.9}));
        const SortedFactorView v(f, Scope{}, max_product);
        CHECK(v.rows() == 1);
        CHECK(std::vector<Rank>(v.row(0).order.begin(), v.row(0).order.end()) == std::vector<Rank>{3, 1, 2, 0});
    }

    TEST_CASE("three variables, two free ones flattened")
    {
        std::mt19937_64 rng(3);
        const Factor f = random_unit(rng, Scope{{0, 2}, {1, 2}, {2, 2}});
        const SortedFactorView v(f, Scope{{0, 2}}, max_product);
        CHECK(v.rows() == 2);
        CHECK(v.cols() == 4);
        for (Index r = 0; r < 2; ++r) {
            std::vector<double> row(f.values().data() + r * 4, f.values().data() + r * 4 + 4);
            const auto ref = sort_desc(row);
            CHECK(std::equal(ref.order().begin(), ref.order().end(), v.row(r).order.begin()));
        }
    }

    TEST_CASE("rejects a view with nothing free or a foreign variable")
    {
        const Factor f(Scope{vi}, arr({1, 2}));
        CHECK_THROWS_AS(SortedFactorView(f, Scope{vi}, max_product), domain_error);
        CHECK_THROWS_AS(SortedFactorView(f, Scope{vk}, max_product), domain_error);
    }
}

TEST_SUITE("3-clique")
{
    TEST_CASE("worked example")
    {
        const auto fs = worked();
        CliqueOptions o;
        o.min_fast_states = 0;
        CHECK(vec(max_marginal_3clique(fs[0], fs[1], fs[2], max_product, o)) == std::vector<double>{2, 6, 12, 12});
        o.min_fast_states = 100;
        CHECK(vec(max_marginal_3clique(fs[0], fs[1], fs[2], max_product, o)) == std::vector<double>{2, 6, 12, 12});
    }

    TEST_CASE("neutral eliminated variable returns phi_ij")
    {
        const auto fs = worked();
        const Factor ones_ik = Factor::constant(Scope{vi, vk}, 1.0), ones_jk = Factor::constant(Scope{vj, vk}, 1.0);
        CliqueOptions o;
        o.min_fast_states = 0;
        CHECK(max_marginal_3clique(fs[0], ones_ik, ones_jk, max_product, o) == fs[0]);
    }

    TEST_CASE("random instances equal the brute oracle")
    {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 300; ++t) {
            const int ni = 1 + static_cast<int>(rng() % 6), nj = 1 + static_cast<int>(rng() % 6),
                      nk = 1 + static_cast<int>(rng() % 40);
            const Variable a{0, ni}, b{1, nj}, c{2, nk};
            const bool integer = t % 2 == 0;
            const Semiring s = integer ? max_sum : max_product;
            std::vector<Factor> fs;
            for (const Scope& sc : {Scope{a, b}, Scope{a, c}, Scope{b, c}}) {
                fs.push_back(integer ? random_int(rng, sc) : random_unit(rng, sc));
            }
            CliqueOptions o;
            o.min_fast_states = 0;
            o.mode = static_cast<ArgmaxMode>(t % 3);
            ProbeStats stats;
            o.stats = &stats;
            std::vector<int> arg;
            o.argbest = &arg;
            const Factor got = max_marginal_3clique(fs[0], fs[1], fs[2], s, o);
            const auto want = brute(fs, {ni, nj, nk}, {0, 1}, s);
            if (integer) {
                CHECK(vec(got) == want);
            } else {
                check_close(vec(got), want, 1e-12);
            }
            CHECK(stats.calls == Index(ni) * nj);
            REQUIRE(arg.size() == static_cast<std::size_t>(ni * nj));
            for (int x = 0; x < ni; ++x) {
                for (int y = 0; y < nj; ++y) {
                    const int z = arg[x * nj + y];
                    const double v = s.combine(s.combine(fs[0][x * nj + y], fs[1][x * nk + z]), fs[2][y * nk + z]);
                    CHECK(v == got[x * nj + y]);
                }
            }
        }
    }

    TEST_CASE("presorted views are reused")
    {
        std::mt19937_64 rng(6);
        const Variable a{0, 5}, b{1, 5}, c{2, 20};
        const Factor ij = random_unit(rng, Scope{a, b}), ik = random_unit(rng, Scope{a, c}),
                     jk = random_unit(rng, Scope{b, c});
        const SortedFactorView vik(ik, Scope{a}, max_product), vjk(jk, Scope{b}, max_product);
        CliqueOptions o;
        o.min_fast_states = 0;
        o.ik_view = &vik;
        o.jk_view = &vjk;
        ProbeStats stats;
        o.stats = &stats;
        const Factor got = max_marginal_3clique(ij, ik, jk, max_product, o);
        CHECK(stats.sorts == 0);
        check_close(vec(got), brute({ij, ik, jk}, {5, 5, 20}, {0, 1}, max_product), 1e-12);
    }

    TEST_CASE("shape errors")
    {
        const auto fs = worked();
        CHECK_THROWS_AS(max_marginal_3clique(fs[0], fs[0], fs[2], max_product), domain_error);
        const Factor bad(Scope{vj, {2, 3}}, arr({1, 2, 3, 4, 5, 6}));
        CHECK_THROWS_AS(max_marginal_3clique(fs[0], fs[1], bad, max_product), domain_error);
    }
}

TEST_SUITE("funny matmul")
{
    TEST_CASE("examples")
    {
        Eigen::MatrixXd a(2, 2), b(2, 2);
        a << 1, 2, 3, 4;
        b << 5, 6, 7, 8;
        Eigen::MatrixXd c(2, 2);
        c << 14, 16, 28, 32;
        CHECK(funny_matmul(a, b, max_product) == c);
        CHECK(funny_matmul_naive(a, b, max_product) == c);

        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
        std::mt19937_64 rng(8);
        Eigen::MatrixXd r(4, 3);
        for (Index i = 0; i < r.size(); ++i) r.data()[i] = uniform01(rng);
        CHECK(funny_matmul(id, r, max_product) == r);

        Eigen::MatrixXd x(1, 1), y(1, 1);
        x << 3;
        y << -2;
        CHECK(funny_matmul(x, y, max_sum)(0, 0) == 1.0);
    }

    TEST_CASE("random matrices equal the triple loop")
    {
        std::mt19937_64 rng(10);
        for (int t = 0; t < 200; ++t) {
            const Index n = 1 + static_cast<Index>(rng() % 64), m = 1 + static_cast<Index>(rng() % 8),
                        p = 1 + static_cast<Index>(rng() % 8);
            Eigen::MatrixXd a(m, n), b(n, p);
            for (Index i = 0; i < a.size(); ++i) a.data()[i] = uniform01(rng);
            for (Index i = 0; i < b.size(); ++i) b.data()[i] = uniform01(rng);
            for (Semiring s : {max_product, max_sum, min_sum}) CHECK(funny_matmul(a, b, s) == funny_matmul_naive(a, b, s));
        }
    }

    TEST_CASE("dimension errors")
    {
        const Eigen::MatrixXd a(2, 3), b(2, 2);
        CHECK_THROWS_AS(funny_matmul(a, b, max_product), domain_error);
        CHECK_THROWS_AS(funny_matmul_naive(a, b, max_product), domain_error);
    }
}

TEST_SUITE("grouping")
{
    TEST_CASE("canonical 3-clique split")
    {
        const auto fs = worked();
        const Grouping g = split_groups(fs, Scope{vi, vj}, 2);
        REQUIRE(g.k() == 2);
        CHECK(g.groups[0] == std::vector<int>{0});
        std::vector<std::vector<int>> rest{g.groups[1], g.groups[2]};
        std::sort(rest.begin(), rest.end());
        CHECK(rest == std::vector<std::vector<int>>{{1}, {2}});
        CHECK(g.eliminated == Scope{vk});
        CHECK(g.x_prime == Scope{vi, vj});
        CHECK(vec(max_marginal_grouped(fs, Scope{vi, vj}, g, max_product)) == std::vector<double>{2, 6, 12, 12});
    }

    TEST_CASE("four triplet factors split into four groups")
    {
        const Variable i{0, 3}, j{1, 3}, k{2, 3}, m{3, 3};
        std::mt19937_64 rng(12);
        const std::vector<Factor> fs{random_int(rng, Scope{i, j}), random_int(rng, Scope{i, k, m}),
                                     random_int(rng, Scope{j, k, m}), random_int(rng, Scope{i, j, k})};
        // X holds the target factor; three more groups of one factor each
        const Grouping g = make_grouping(fs, Scope{i, j}, {{0}, {1}, {2}, {3}});
        CHECK(g.k() == 3);
        CHECK(vec(max_marginal_grouped(fs, Scope{i, j}, g, max_sum)) ==
              brute(fs, {3, 3, 3, 3}, {0, 1}, max_sum));
    }

    TEST_CASE("factors over the target only: no grouping exists")
    {
        const std::vector<Factor> fs{Factor::constant(Scope{vi, vj}, 1.0), Factor::constant(Scope{vi, vj}, 2.0)};
        try {
            split_groups(fs, Scope{vi, vj}, 2);
            FAIL("expected grouping_error");
        } catch (const grouping_error& e) {
            CHECK(e.smallest_feasible_groups() == 1);
        }
        CHECK_FALSE(best_grouping(fs, Scope{vi, vj}).has_value());
    }

    TEST_CASE("make_grouping validation")
    {
        const auto fs = worked();
        CHECK_THROWS_AS(make_grouping(fs, Scope{vi, vj}, {{}, {0}, {1, 2}}), domain_error);
        CHECK_THROWS_AS(make_grouping(fs, Scope{vi, vj}, {{0}, {1}}), domain_error);
        CHECK_THROWS_AS(make_grouping(fs, Scope{vi, vj}, {{0}, {1}, {}, {2}}), domain_error);
        CHECK_THROWS_AS(make_grouping(fs, Scope{vi, vj}, {{0}, {1}, {1, 2}}), domain_error);
    }

    TEST_CASE("ring of four binary nodes")
    {
        const Variable a{0, 2}, b{1, 2}, c{2, 2}, d{3, 2};
        std::mt19937_64 rng(14);
        for (int t = 0; t < 50; ++t) {
            const std::vector<Factor> fs{random_int(rng, Scope{a, b}), random_int(rng, Scope{b, c}),
                                         random_int(rng, Scope{c, d}), random_int(rng, Scope{a, d})};
            const Grouping g = split_groups(fs, Scope{a, b}, 2);
            GroupedOptions o;
            o.min_fast_states = 0;
            CHECK(vec(max_marginal_grouped(fs, Scope{a, b}, g, max_sum, o)) == brute(fs, {2, 2, 2, 2}, {0, 1}, max_sum));
        }
    }

    TEST_CASE("shared pair of variables")
    {
        const Variable i{0, 2}, j{1, 2}, k{2, 2}, m{3, 2};
        std::mt19937_64 rng(16);
        for (int t = 0; t < 50; ++t) {
            const std::vector<Factor> fs{random_unit(rng, Scope{i, j}), random_unit(rng, Scope{i, k, m}),
                                         random_unit(rng, Scope{j, k, m})};
            const Grouping g = make_grouping(fs, Scope{i, j}, {{0}, {1}, {2}});
            CHECK(g.eliminated == Scope{k, m});
            GroupedOptions o;
            o.min_fast_states = 0;
            check_close(vec(max_marginal_grouped(fs, Scope{i, j}, g, max_product, o)),
                        brute(fs, {2, 2, 2, 2}, {0, 1}, max_product), 1e-12);
        }
    }

    TEST_CASE("cost shape of the 3-clique grouping")
    {
        const Variable i{0, 64}, j{1, 64}, k{2, 64};
        const std::vector<Factor> fs{Factor::constant(Scope{i, j}, 1), Factor::constant(Scope{i, k}, 1),
                                     Factor::constant(Scope{j, k}, 1)};
        const Grouping g = make_grouping(fs, Scope{i, j}, {{0}, {1}, {2}});
        CHECK(g.cost.exponent() == doctest::Approx(2.5));
        bool sort_term = false, search_term = false;
        for (const auto& t : g.cost.terms) {
            if (t.log_power == 1) {
                CHECK(t.exponent == doctest::Approx(2.0));
                sort_term = true;
            }
            if (t.exponent > 2.4) search_term = true;
            if (t.log_power == 0 && t.exponent < 2.4) CHECK(t.exponent <= 2.0 + 1e-9);
        }
        CHECK(sort_term);
        CHECK(search_term);
        CHECK(brute_cost(fs, Scope{i, j}).exponent() == doctest::Approx(3.0));
        CHECK(g.cost < brute_cost(fs, Scope{i, j}));
    }

    TEST_CASE("complete pairwise graphs: chosen exponent never exceeds enumeration")
    {
        for (int q = 3; q <= 8; ++q) {
            std::vector<Factor> fs;
            for (int a = 0; a < q; ++a) {
                for (int b = a + 1; b < q; ++b) fs.push_back(Factor::constant(Scope{{a, 4}, {b, 4}}, 1.0));
            }
            const Scope target{{0, 4}, {1, 4}};
            const auto g = best_grouping(fs, target);
            const double naive = brute_cost(fs, target).exponent();
            if (g) CHECK(g->cost.exponent() <= naive + 1e-9);
        }
    }

    TEST_CASE("recursive grouping on larger cliques matches brute force")
    {
        std::mt19937_64 rng(18);
        for (int t = 0; t < 20; ++t) {
            const int q = 5;
            std::vector<Factor> fs;
            std::vector<int> card(q, 3);
            for (int a = 0; a < q; ++a) {
                for (int b = a + 1; b < q; ++b) fs.push_back(random_int(rng, Scope{{a, 3}, {b, 3}}, -5, 5));
            }
            const Scope target{{0, 3}, {1, 3}};
            const auto g = best_grouping(fs, target);
            REQUIRE(g.has_value());
            GroupedOptions o;
            o.min_fast_states = 0;
            CHECK(vec(max_marginal_grouped(fs, target, *g, max_sum, o)) == brute(fs, card, {0, 1}, max_sum));
        }
    }

    TEST_CASE("local search beyond twelve factors still returns a valid grouping")
    {
        std::vector<Factor> fs;
        for (int a = 0; a < 6; ++a) {
            for (int b = a + 1; b < 6; ++b) fs.push_back(Factor::constant(Scope{{a, 2}, {b, 2}}, 0.0));
        }
        REQUIRE(fs.size() > 12);
        const Scope target{{0, 2}, {1, 2}};
        const Grouping g = split_groups(fs, target, 2);
        CHECK_NOTHROW(make_grouping(fs, target, g.groups));
    }
}
