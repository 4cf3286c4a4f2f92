#include "distsec/analysis.hpp"

#include "distsec/bin_statistics.hpp"
#include "distsec/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distsec {

namespace {

void check_dimensions(const KeyedCode& code, std::size_t m)
{
    if (code.m() != m)
        throw InputError("analysis: code has m = " + std::to_string(code.m()) + " but alphabet has "
                         + std::to_string(m) + " values");
}

template <class T>
T pow2(unsigned k)
{
    return T(static_cast<long>(std::size_t{1} << k));
}

} // namespace

template <class T>
T max_distortion(const Alphabet<T>& alphabet)
{
    const T mean = alphabet.mean();
    T acc = 0;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        const T dev = alphabet.value(i) - mean;
        acc += alphabet.probability(i) * dev * dev;
    }
    return acc;
}

template <class T>
EvePosterior<T> eve_posterior(const KeyedCode& code, const Alphabet<T>& alphabet, const std::vector<T>& table)
{
    check_dimensions(code, alphabet.size());
    if (table.size() != alphabet.size())
        throw InputError("analysis: function table size does not match alphabet");
    const std::size_t m = code.m(), r = code.r();
    const T keys = pow2<T>(code.k());
    const auto counts = occupancy(code);

    EvePosterior<T> post;
    post.tau_prob.assign(r, T(0));
    post.tau_mean.assign(r, T(0));
    for (std::size_t j = 0; j < r; ++j) {
        T weight = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (counts[i * r + j] != 0)
                weight += alphabet.probability(i) * T(static_cast<long>(counts[i * r + j]));
        if (!(weight > 0))
            continue;
        post.support.push_back(j);
        post.tau_prob[j] = weight / keys;
        T mean = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (counts[i * r + j] == 0)
                continue;
            const T w = alphabet.probability(i) * T(static_cast<long>(counts[i * r + j]));
            // normalise each weight first so a single contributor reproduces its value exactly
            mean += (w / weight) * table[i];
        }
        post.tau_mean[j] = mean;
    }
    return post;
}

template <class T>
EvePosterior<T> eve_posterior(const KeyedCode& code, const Alphabet<T>& alphabet)
{
    return eve_posterior(code, alphabet, alphabet.values());
}

template <class T>
T achievable_distortion(const KeyedCode& code, const Alphabet<T>& alphabet)
{
    check_dimensions(code, alphabet.size());
    const std::size_t m = code.m(), r = code.r(), keys = code.key_count();
    const T key_prob = T(1) / pow2<T>(code.k());

    // first pass: per-bin mass and first moment of the joint law p(y_i) / 2^k
    constexpr std::size_t none = KeyedCode::npos, mixed = KeyedCode::npos - 1;
    std::vector<T> mass(r, T(0)), moment(r, T(0));
    std::vector<std::size_t> sole(r, none);
    for (std::size_t key = 0; key < keys; ++key)
        for (std::size_t i = 0; i < m; ++i) {
            const T p = alphabet.probability(i) * key_prob;
            const std::size_t b = code.bin(key, i);
            mass[b] += p;
            moment[b] += p * alphabet.value(i);
            if (alphabet.probability(i) > 0)
                sole[b] = (sole[b] == none || sole[b] == i) ? i : mixed;
        }
    std::vector<T> estimate(r, T(0));
    for (std::size_t b = 0; b < r; ++b) {
        if (sole[b] != none && sole[b] != mixed)
            estimate[b] = alphabet.value(sole[b]);  // avoids (p*y)/p rounding on doubles
        else if (mass[b] > 0)
            estimate[b] = moment[b] / mass[b];
    }

    // second pass: expected squared error of the conditional-mean estimate
    T distortion = 0;
    for (std::size_t key = 0; key < keys; ++key)
        for (std::size_t i = 0; i < m; ++i) {
            const T err = alphabet.value(i) - estimate[code.bin(key, i)];
            distortion += alphabet.probability(i) * key_prob * err * err;
        }
    return distortion;
}

template <class T>
T delta_closed_form(const KeyedCode& code, const Alphabet<T>& alphabet, DeltaFormula formula)
{
    const auto st = bin_statistics(code, alphabet);
    if (formula == DeltaFormula::automatic)
        formula = alphabet.is_uniform() ? DeltaFormula::uniform : DeltaFormula::general;
    const T mean = alphabet.mean();
    const T keys = pow2<T>(code.k());

    T acc = 0;
    if (formula == DeltaFormula::uniform) {
        if (!alphabet.is_uniform())
            throw InputError("delta: uniform closed form requires a uniform alphabet");
        for (std::size_t j = 0; j < st.r; ++j)
            if (st.N[j] != 0)
                acc += st.S[j] * st.S[j] / T(static_cast<long>(st.N[j]));
        return acc / (keys * T(static_cast<long>(st.m))) - mean * mean;
    }

    for (std::size_t j = 0; j < st.r; ++j) {
        T p_tau = 0, inner = 0;
        for (std::size_t i = 0; i < st.m; ++i) {
            if (st.n(i, j) == 0)
                continue;
            const T p_tau_given_y = T(static_cast<long>(st.n(i, j))) / keys;
            p_tau += p_tau_given_y * alphabet.probability(i);
            inner += alphabet.value(i) * p_tau_given_y * alphabet.probability(i);
        }
        if (p_tau > 0)
            acc += inner * inner / p_tau;
    }
    return acc - mean * mean;
}

template <class T>
bool posterior_is_flat(const EvePosterior<T>& posterior, const T& prior_mean, const T& scale, const Tolerance& tol)
{
    for (auto j : posterior.support) {
        const T& mu = posterior.tau_mean[j];
        if constexpr (is_exact_v<T>) {
            if (mu != prior_mean)
                return false;
        } else {
            const double slack = tol.abs + tol.rel * std::max({std::fabs(mu), std::fabs(prior_mean), std::fabs(scale)});
            if (std::fabs(mu - prior_mean) > slack)
                return false;
        }
    }
    return true;
}

template <class T>
bool is_perfectly_secure(const KeyedCode& code, const Alphabet<T>& alphabet, const Tolerance& tol)
{
    return posterior_is_flat(eve_posterior(code, alphabet), alphabet.mean(), alphabet.spread(), tol);
}

template <class T>
DistortionReport<T> bound_report(const KeyedCode& code, const Alphabet<T>& alphabet, const Tolerance& tol)
{
    DistortionReport<T> rep;
    rep.k = code.k();
    rep.d_max = max_distortion(alphabet);
    rep.d_ach = achievable_distortion(code, alphabet);
    rep.delta = rep.d_max - rep.d_ach;
    rep.spread = alphabet.spread();
    const T keys = pow2<T>(code.k());
    rep.bound1 = rep.d_max / keys;
    rep.bound2 = rep.spread * rep.spread / (keys * keys);
    rep.bounds_applicable = alphabet.is_uniform();
    if (rep.bounds_applicable) {
        rep.bound1_ok = leq_within(rep.delta, rep.bound1, rep.d_max, tol);
        rep.bound2_ok = leq_within(rep.delta, rep.bound2, rep.spread * rep.spread, tol);
    }
    rep.perfectly_secure = is_perfectly_secure(code, alphabet, tol);
    return rep;
}

#define DISTSEC_ANALYSIS_INSTANTIATE(T)                                                            \
    template T max_distortion(const Alphabet<T>&);                                                 \
    template EvePosterior<T> eve_posterior(const KeyedCode&, const Alphabet<T>&);                  \
    template EvePosterior<T> eve_posterior(const KeyedCode&, const Alphabet<T>&, const std::vector<T>&); \
    template T achievable_distortion(const KeyedCode&, const Alphabet<T>&);                        \
    template T delta_closed_form(const KeyedCode&, const Alphabet<T>&, DeltaFormula);              \
    template bool is_perfectly_secure(const KeyedCode&, const Alphabet<T>&, const Tolerance&);     \
    template bool posterior_is_flat(const EvePosterior<T>&, const T&, const T&, const Tolerance&); \
    template DistortionReport<T> bound_report(const KeyedCode&, const Alphabet<T>&, const Tolerance&);

DISTSEC_ANALYSIS_INSTANTIATE(double)
DISTSEC_ANALYSIS_INSTANTIATE(Rational)

} // namespace distsec
