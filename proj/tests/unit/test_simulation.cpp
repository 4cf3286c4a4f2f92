#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace distsec;

TEST_CASE("two-key reversal on 1..4")
{
    auto a = uniform_range<Rational>(1, 4);
    KeyedCode code(4, 1, 4, {{3, 2, 1, 0}, {0, 1, 2, 3}});
    auto rep = simulate(make_sim_target(code, a), SimConfig{100'000, 1, 1});
    CHECK(rep.analytic_dach == 1.25);
    CHECK(rep.stderr_ > 0);
    CHECK(std::fabs(rep.empirical_dach - 1.25) <= 3 * rep.stderr_);
}

TEST_CASE("identity code has zero error on every trial")
{
    auto a = uniform_range<double>(1, 9);
    auto rep = simulate(make_sim_target(identity_code(9), a), SimConfig{10'000, 5, 2});
    CHECK(rep.empirical_dach == 0);
    CHECK(rep.stderr_ == 0);
    CHECK(rep.analytic_dach == 0);
}

TEST_CASE("two-source sum")
{
    auto a = uniform_range<Rational>(1, 4);
    KeyedCode code(4, 1, 4, {{3, 2, 1, 0}, {0, 1, 2, 3}});
    auto v = a.values();
    JointSystem<Rational> s{{a, a}, {code, code},
                            SeparableFunction<Rational>({4, 4}, {{v, std::nullopt}, {std::nullopt, v}})};
    auto rep = simulate(make_sim_target(s), SimConfig{100'000, 2, 3});
    CHECK(rep.analytic_dach == 2.5);
    CHECK(std::fabs(rep.empirical_dach - 2.5) <= 3 * rep.stderr_);
}

TEST_CASE("reproducible and independent of the thread count")
{
    auto a = make_alphabet<double>({9, 5, 2, 1});
    auto target = make_sim_target(greedy_code(a, 1), a);
    const auto one = sim_csv_row(simulate(target, SimConfig{50'000, 77, 1}));
    CHECK(sim_csv_row(simulate(target, SimConfig{50'000, 77, 1})) == one);
    CHECK(sim_csv_row(simulate(target, SimConfig{50'000, 77, 8})) == one);
    CHECK(sim_csv_row(simulate(target, SimConfig{50'000, 78, 1})) != one);
    CHECK(sim_csv_header() == "trials,seed,analytic_dach,empirical_dach,stderr");
}

TEST_CASE("trial count that does not divide into streams")
{
    auto a = uniform_range<double>(1, 5);
    auto rep = simulate(make_sim_target(greedy_code(a, 1), a), SimConfig{7, 0, 4});
    CHECK(rep.trials == 7);
    CHECK_THROWS_AS(simulate(make_sim_target(greedy_code(a, 1), a), SimConfig{0, 0, 1}), InputError);
}

TEST_CASE("sampled frequencies follow the pmf")
{
    // both bins carry 0 and 1 with weights 3/4 and 1/4, so Eve guesses 1/4 and her
    // error is var(Y) = 3/16; a sampler ignoring the pmf would drift to 1/4
    auto a = make_alphabet<Rational>({0, 1}, std::vector<Rational>{Rational(3, 4), Rational(1, 4)});
    KeyedCode merge(2, 1, 2, {{0, 1}, {1, 0}});
    auto rep = simulate(make_sim_target(merge, a), SimConfig{200'000, 9, 1});
    CHECK(rep.analytic_dach == doctest::Approx(3.0 / 16));
    CHECK(std::fabs(rep.empirical_dach - 3.0 / 16) <= 4 * rep.stderr_);
}

TEST_CASE("analytic value matches the oracle on random codes")
{
    gen::Source g(5);
    for (int t = 0; t < 30; ++t) {
        const std::size_t m = 1 + g.index(8);
        const unsigned k = static_cast<unsigned>(g.index(3));
        const auto code = g.code(m, k, m + g.index(m + 1));
        auto a = make_alphabet(g.rationals(m, 20, 3), g.pmf(m, true));
        CHECK(make_sim_target(code, a).analytic_dach == doctest::Approx(to_double(oracle::mmse(code, a))));
    }
}
