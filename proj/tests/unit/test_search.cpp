#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"

using namespace distsec;

TEST_CASE("search finds a perfect code on 1..4 with one bit")
{
    auto a = uniform_range<Rational>(1, 4);
    SearchOptions opt;
    opt.r_min = 4;
    opt.r_max = 4;
    auto res = brute_force_optimal(a, 1, opt);
    CHECK(res.best_delta == 0);
    CHECK(res.exhaustive);
    CHECK(oracle::delta(res.best_code, a) == 0);
    // the optimum pairs 4 with 1 and 3 with 2
    auto bins = binning_of(res.best_code);
    for (const auto& b : bins.bins) {
        REQUIRE(b.size() == 2);
        CHECK(b[0] + b[1] == 3);
    }
}

TEST_CASE("search on 9,5,2,1 matches greedy")
{
    auto a = make_alphabet<Rational>({9, 5, 2, 1});
    auto res = brute_force_optimal(a, 1);
    CHECK(res.best_delta == Rational(9, 16));
    CHECK(res.best_delta == oracle::delta(greedy_code(a, 1), a));
    CHECK(oracle::delta(res.best_code, a) == res.best_delta);
}

TEST_CASE("single value")
{
    auto a = make_alphabet<Rational>({3});
    for (unsigned k = 0; k <= 2; ++k)
        CHECK(brute_force_optimal(a, k).best_delta == 0);
}

TEST_CASE("reported delta is the delta of the reported code")
{
    gen::Source g(5);
    for (int t = 0; t < 60; ++t) {
        const std::size_t m = 1 + g.index(5);
        const unsigned k = static_cast<unsigned>(g.index(3));
        auto a = make_alphabet(g.rationals(m, 20, 1 + g.integer(0, 2)));
        auto res = brute_force_optimal(a, k);
        CHECK(oracle::delta(res.best_code, a) == res.best_delta);
        CHECK(res.best_delta >= 0);
        CHECK(res.best_delta <= oracle::delta(greedy_code(a, k), a));
        const auto st = verify_structure(res.best_code);
        CHECK(st.all());
    }
}

TEST_CASE("no random code beats the search")
{
    gen::Source g(9);
    for (int t = 0; t < 30; ++t) {
        const std::size_t m = 2 + g.index(3);
        const unsigned k = 1 + static_cast<unsigned>(g.index(2));
        auto a = make_alphabet(g.rationals(m, 20, 1));
        SearchOptions opt;
        opt.prune = false;
        auto best = brute_force_optimal(a, k, opt).best_delta;
        for (int s = 0; s < 200; ++s) {
            const auto code = g.code(m, k, m + g.index(m * (std::size_t{1} << k) - m + 1));
            CHECK(oracle::delta(code, a) >= best);
        }
    }
}

TEST_CASE("pruning keeps the optimum")
{
    gen::Source g(13);
    for (int t = 0; t < 40; ++t) {
        const std::size_t m = 1 + g.index(4);
        const unsigned k = 1 + static_cast<unsigned>(g.index(2));
        auto a = make_alphabet(g.rationals(m, 30, 2), g.coin() ? std::nullopt : std::optional(g.pmf(m)));
        SearchOptions off;
        off.prune = false;
        CHECK(brute_force_optimal(a, k).best_delta == brute_force_optimal(a, k, off).best_delta);
    }
}

TEST_CASE("progressions reach zero with one or two bits")
{
    gen::Source g(19);
    for (int t = 0; t < 20; ++t) {
        auto a = make_alphabet(g.progression(2 + g.index(5)));
        CHECK(brute_force_optimal(a, 1).best_delta == 0);
        CHECK(brute_force_optimal(a, 2).best_delta == 0);
    }
}

TEST_CASE("parallel search matches the serial result")
{
    gen::Source g(23);
    for (int t = 0; t < 10; ++t) {
        auto a = make_alphabet(g.rationals(6, 50, 1));
        SearchOptions par;
        par.jobs = 4;
        auto s = brute_force_optimal(a, 1);
        auto p = brute_force_optimal(a, 1, par);
        CHECK(s.best_delta == p.best_delta);
        CHECK(s.best_code == p.best_code);
        CHECK(s.candidates_examined == p.candidates_examined);
    }
}

TEST_CASE("caps")
{
    auto big = uniform_range<double>(1, 9);
    CHECK_THROWS_AS(brute_force_optimal(big, 1), CapExceeded);
    CHECK_THROWS_AS(brute_force_optimal(uniform_range<double>(1, 3), 3), CapExceeded);
    SearchOptions opt;
    opt.allow_factorial = true;
    opt.max_candidates = 10;
    opt.max_candidates = 1;
    opt.prune = false;
    auto irregular = make_alphabet<double>({0, 1, 3, 7, 12, 20, 31, 45, 62});
    auto res = brute_force_optimal(irregular, 1, opt);
    CHECK_FALSE(res.exhaustive);
    CHECK(res.candidates_examined <= 1);
    // whatever it reports is a real code scored correctly
    CHECK(res.best_delta == doctest::Approx(oracle::delta(res.best_code, irregular)).epsilon(1e-9));
}

TEST_CASE("structure checks")
{
    auto fig = KeyedCode(4, 1, 4, {{3, 2, 1, 0}, {0, 1, 2, 3}});
    CHECK(verify_structure(fig).all());
    auto id = verify_structure(identity_code(5));
    CHECK(id.value_degree_ok);
    CHECK(id.bin_degree_ok);

    // two half-empty bins
    auto two_small = KeyedCode(2, 1, 4, {{0, 1}, {2, 3}});
    auto st = verify_structure(two_small);
    CHECK_FALSE(st.at_most_one_small_bin);
    CHECK_FALSE(st.bin_count_in_range);
}
