#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"

#include <cstdlib>

using namespace distsec;

namespace {

using Table = std::optional<std::vector<Rational>>;

const KeyedCode fig_code(4, 1, 4, {{3, 2, 1, 0}, {0, 1, 2, 3}});

std::vector<Rational> values_of(const Alphabet<Rational>& a)
{
    return a.values();
}

JointSystem<Rational> two_sources(const KeyedCode& c1, const KeyedCode& c2, std::vector<std::vector<Table>> terms)
{
    auto a = uniform_range<Rational>(1, 4);
    SeparableFunction<Rational> f({4, 4}, std::move(terms));
    return JointSystem<Rational>{{a, a}, {c1, c2}, std::move(f)};
}

JointSystem<Rational> sum_of_two(const KeyedCode& c1, const KeyedCode& c2)
{
    auto v = values_of(uniform_range<Rational>(1, 4));
    return two_sources(c1, c2, {{v, std::nullopt}, {std::nullopt, v}});
}

JointSystem<Rational> product_of_two(const KeyedCode& c1, const KeyedCode& c2)
{
    auto v = values_of(uniform_range<Rational>(1, 4));
    return two_sources(c1, c2, {{v, v}});
}

}  // namespace

TEST_CASE("evaluate")
{
    std::vector<Rational> x{0, 1, 2, 3, 4, 5};
    SeparableFunction<Rational> sum({6, 6}, {{x, std::nullopt}, {std::nullopt, x}});
    CHECK(sum.evaluate({3, 4}) == 7);
    CHECK(sum.form() == FunctionForm::pure_sum);
    SeparableFunction<Rational> prod({6, 6}, {{x, x}});
    CHECK(prod.evaluate({2, 5}) == 10);
    CHECK(prod.form() == FunctionForm::pure_product);
    SeparableFunction<Rational> mixed({6, 6}, {{x, x}, {x, std::nullopt}});
    CHECK(mixed.evaluate({2, 3}) == 8);
    CHECK(mixed.form() == FunctionForm::general);
    CHECK_THROWS_AS(mixed.evaluate({2, 6}), InputError);
    CHECK_THROWS_AS(mixed.evaluate({2}), InputError);
    CHECK_THROWS_AS(SeparableFunction<Rational>({6, 6}, {{x, x}}, FunctionForm::pure_sum), InputError);
    CHECK_THROWS_AS(SeparableFunction<Rational>({6, 5}, {{x, x}}), InputError);
}

TEST_CASE("two perfectly coded sources, sum and product")
{
    auto s = sum_of_two(fig_code, fig_code);
    auto rep = joint_distortion(s);
    CHECK(rep.delta == 0);
    CHECK(rep.d_max == Rational(5, 2));
    CHECK(rep.k == 2);
    CHECK(s.key_budget() == 2);
    auto suff = check_sufficiency(s);
    CHECK(suff.all_components_secure);
    CHECK(*suff.joint_delta == 0);

    auto p = product_of_two(fig_code, fig_code);
    CHECK(joint_distortion(p).delta == 0);
    CHECK(joint_posterior(p).prior_mean == Rational(25, 4));
}

TEST_CASE("one unprotected source")
{
    auto s = sum_of_two(identity_code(4), fig_code);
    auto rep = joint_distortion(s);
    CHECK(rep.d_ach == Rational(5, 4));
    CHECK(rep.d_max == Rational(5, 2));
    CHECK_FALSE(check_sufficiency(s).all_components_secure);

    auto w = necessity_witness(s, 0);
    REQUIRE(w.applicable);
    CHECK(w.conditional_mean != w.prior_mean);
    CHECK(w.joint_delta == Rational(5, 4));
    // the witness picks the largest value of source 0
    CHECK(w.observation[0] == 0);
    CHECK(w.conditional_mean == Rational(13, 2));
}

TEST_CASE("product witness and its precondition")
{
    auto p = product_of_two(fig_code, identity_code(4));
    auto w = necessity_witness(p, 1);
    REQUIRE(w.applicable);
    CHECK(w.joint_delta > 0);
    CHECK(oracle::joint(p).conditional_mean(w.observation) == w.conditional_mean);

    auto pm = make_alphabet<Rational>({-1, 1});
    std::vector<Rational> v{1, -1};
    JointSystem<Rational> zero_mean{{pm, uniform_range<Rational>(1, 4)},
                                    {identity_code(2), fig_code},
                                    SeparableFunction<Rational>({2, 4}, {{v, values_of(uniform_range<Rational>(1, 4))}})};
    auto w2 = necessity_witness(zero_mean, 0);
    CHECK_FALSE(w2.applicable);
    CHECK_FALSE(w2.reason.empty());

    // the named source is secure, so there is nothing to witness
    CHECK_THROWS_AS(necessity_witness(sum_of_two(fig_code, fig_code), 0), InputError);
}

TEST_CASE("securing a value does not secure its square")
{
    auto a = make_alphabet<Rational>({-2, -1, 1, 2});
    // bins {2,-2} and {1,-1}: the mean is flat, the square is not
    KeyedCode code(4, 1, 4, {{0, 1, 2, 3}, {3, 2, 1, 0}});
    REQUIRE(is_perfectly_secure(code, a));
    std::vector<Rational> sq;
    for (const auto& y : a.values())
        sq.push_back(y * y);
    JointSystem<Rational> s{{a}, {code}, SeparableFunction<Rational>({4}, {{sq}})};
    auto suff = check_sufficiency(s);
    CHECK_FALSE(suff.all_components_secure);
    CHECK_FALSE(suff.component_secure[0][0]);
    CHECK(joint_distortion(s).delta > 0);
}

TEST_CASE("joint distortion agrees with brute force")
{
    gen::Source g(77);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 1 + g.index(3), L = 1 + g.index(2);
        std::vector<Alphabet<Rational>> src;
        std::vector<KeyedCode> codes;
        std::vector<std::size_t> sizes;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t m = 1 + g.index(4);
            const unsigned k = static_cast<unsigned>(g.index(3));
            src.push_back(make_alphabet(g.rationals(m, 10, 2), g.pmf(m)));
            codes.push_back(g.code(m, k, m + g.index(m + 1)));
            sizes.push_back(m);
        }
        std::vector<std::vector<Table>> terms(L);
        for (auto& term : terms)
            for (std::size_t i = 0; i < n; ++i)
                term.push_back(g.coin(0.8) ? Table(g.rationals(sizes[i], 5, 1)) : std::nullopt);
        JointSystem<Rational> s{src, codes, SeparableFunction<Rational>(sizes, terms)};
        const auto ref = oracle::joint(s);
        const auto rep = joint_distortion(s);
        CHECK(rep.d_max == ref.d_max);
        CHECK(rep.d_ach == ref.d_ach);
        CHECK(factorized_delta(s) == ref.delta());

        auto post = joint_posterior(s);
        for (const auto& [bins, mm] : ref.observations) {
            if (mm.first == 0)
                continue;
            CHECK(post.mean[post.index(bins)] == ref.conditional_mean(bins));
            CHECK(factorized_posterior_mean(s, bins) == ref.conditional_mean(bins));
        }
    }
}

TEST_CASE("state cap")
{
    auto a = uniform_range<double>(1, 10);
    auto code = greedy_code(a, 2);
    std::vector<double> v = a.values();
    JointSystem<double> s{{a, a, a}, {code, code, code},
                          SeparableFunction<double>({10, 10, 10}, {{v, v, v}})};
    CHECK(s.state_count() == 64000);
    CHECK_THROWS_AS(joint_distortion(s, 63999), CapExceeded);
    CHECK_NOTHROW(joint_distortion(s, 64000));
}

TEST_CASE("state cap from the environment")
{
    ::setenv("DISTSEC_CAP_STATES", "123", 1);
    CHECK(default_state_cap() == 123);
    ::setenv("DISTSEC_CAP_STATES", "junk", 1);
    CHECK_THROWS_AS(default_state_cap(), InputError);
    ::unsetenv("DISTSEC_CAP_STATES");
    CHECK(default_state_cap() == 1'000'000);
}

TEST_CASE("system validation")
{
    auto a = uniform_range<Rational>(1, 4);
    auto v = a.values();
    JointSystem<Rational> bad{{a, a}, {fig_code}, SeparableFunction<Rational>({4, 4}, {{v, v}})};
    CHECK_THROWS_AS(bad.validate(), InputError);
    JointSystem<Rational> wrong_m{{a}, {identity_code(3)}, SeparableFunction<Rational>({4}, {{v}})};
    CHECK_THROWS_AS(joint_distortion(wrong_m), InputError);
}

TEST_CASE("system config file")
{
    const char* text = R"({
      "schema": 1,
      "sources": [{"values": [1, 2, 3, 4]}, {"values": [4, 3, 2, 1]}],
      "codes": [{"alg": "greedy", "k": 1}, {"m": 4, "k": 1, "r": 4, "assignment": [[3,2,1,0],[0,1,2,3]]}],
      "function": {"form": "pure-sum", "terms": [["identity", null], [null, "identity"]]}
    })";
    auto spec = system_spec_from_json(text);
    REQUIRE(spec.literals_are_exact());
    auto sys = build_system<Rational>(spec);
    CHECK(sys.function.form() == FunctionForm::pure_sum);
    CHECK(joint_distortion(sys).delta == 0);
    CHECK(joint_distortion(sys).d_max == Rational(5, 2));

    // a table in the source's own order: f(1)=10, f(2)=20, ... on a shuffled alphabet
    const char* tabled = R"({
      "sources": [{"values": [2, 4, 1, 3]}],
      "codes": [{"alg": "identity"}],
      "function": {"terms": [[[20, 40, 10, 30]]]}
    })";
    auto s2 = build_system<Rational>(system_spec_from_json(tabled));
    CHECK(s2.function.component_value(0, 0, 0) == 40);
    CHECK(s2.function.component_value(0, 0, 3) == 10);

    CHECK_THROWS_AS(system_spec_from_json(R"({"sources": []})"), InputError);
    CHECK_THROWS_AS(system_spec_from_json(R"({"schema": 9, "sources": [{"values":[1]}], "codes": [], "function": {"terms": [[null]]}})"), InputError);
}
