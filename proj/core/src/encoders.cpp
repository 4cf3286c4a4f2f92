#include "distsec/encoders.hpp"

#include "distsec/error.hpp"
#include "distsec/random.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace distsec {

void Binning::validate() const
{
    if (m == 0)
        throw InputError("binning: alphabet size must be positive");
    if (k > KeyedCode::max_key_bits)
        throw InputError("binning: too many key bits");
    const std::size_t cap = copies();
    std::vector<std::size_t> seen(m, 0);
    for (std::size_t j = 0; j < bins.size(); ++j) {
        if (bins[j].size() > cap)
            throw InputError("binning: bin " + std::to_string(j) + " holds " + std::to_string(bins[j].size())
                             + " elements, capacity is 2^k = " + std::to_string(cap));
        for (auto v : bins[j]) {
            if (v >= m)
                throw InputError("binning: value index " + std::to_string(v) + " out of range");
            ++seen[v];
        }
    }
    for (std::size_t v = 0; v < m; ++v)
        if (seen[v] != cap)
            throw InputError("binning: value " + std::to_string(v) + " appears " + std::to_string(seen[v])
                             + " times, expected 2^k = " + std::to_string(cap));
}

Binning binning_of(const KeyedCode& code)
{
    Binning b;
    b.m = code.m();
    b.k = code.k();
    b.bins.resize(code.r());
    for (std::size_t key = 0; key < code.key_count(); ++key)
        for (std::size_t v = 0; v < code.m(); ++v)
            b.bins[code.bin(key, v)].push_back(v);
    for (auto& bin : b.bins)
        std::sort(bin.begin(), bin.end());
    return b;
}

template <class T>
KeyedCode greedy_code(const Alphabet<T>& alphabet, unsigned k)
{
    if (k > KeyedCode::max_key_bits)
        throw InputError("greedy: too many key bits");
    const std::size_t m = alphabet.size();
    const std::size_t keys = std::size_t{1} << k;
    const auto& y = alphabet.values();

    std::vector<std::vector<std::size_t>> assignment(keys, std::vector<std::size_t>(m));
    // partial[j]: sum of values already placed in bin j by sigma_1..sigma_{i-1}
    std::vector<T> partial(y.begin(), y.end());
    std::vector<std::size_t> order(m);
    for (std::size_t v = 0; v < m; ++v)
        assignment[1 % keys][v] = v;

    for (std::size_t i = 2; i <= keys; ++i) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return partial[a] < partial[b]; });
        // order[j] is kappa_{j+1}: that bin receives the (j+1)-th largest value
        auto& row = assignment[i % keys];
        for (std::size_t j = 0; j < m; ++j) {
            row[j] = order[j];
            partial[order[j]] += y[j];
        }
    }
    return KeyedCode(m, k, m, assignment);
}

template <class T>
std::vector<T> bin_sums(const Binning& binning, const Alphabet<T>& alphabet)
{
    std::vector<T> sums(binning.r(), T(0));
    for (std::size_t j = 0; j < binning.r(); ++j)
        for (auto v : binning.bins[j])
            sums[j] += alphabet.value(v);
    return sums;
}

template <class T>
Binning exchange_binning(const Alphabet<T>& alphabet, unsigned k, std::size_t r, std::uint64_t seed,
                         ExchangeTrace<T>* trace)
{
    const std::size_t m = alphabet.size();
    if (k > KeyedCode::max_key_bits)
        throw InputError("exchange: too many key bits");
    if (r < m)
        throw InputError("exchange: r = " + std::to_string(r) + " < m = " + std::to_string(m)
                         + ": 2^k copies cannot fit bins of capacity 2^k");
    if (r != m)
        throw InputError("exchange: only r = m is supported");
    if (!alphabet.is_uniform())
        throw InputError("exchange: requires a uniform alphabet");

    const std::size_t copies = std::size_t{1} << k;
    std::vector<std::size_t> pool;
    pool.reserve(m * copies);
    for (std::size_t c = 0; c < copies; ++c)
        for (std::size_t v = 0; v < m; ++v)
            pool.push_back(v);
    Rng rng = make_rng(seed);
    shuffle(pool, rng);

    Binning b;
    b.m = m;
    b.k = k;
    b.bins.resize(r);
    for (std::size_t j = 0; j < r; ++j)
        b.bins[j].assign(pool.begin() + static_cast<std::ptrdiff_t>(j * copies),
                         pool.begin() + static_cast<std::ptrdiff_t>((j + 1) * copies));

    auto sums = bin_sums(b, alphabet);
    auto bin_total = [&](const std::vector<std::size_t>& bin) {
        T acc = 0;
        for (auto v : bin)
            acc += alphabet.value(v);
        return acc;
    };
    const T d = alphabet.spread();
    auto sum_of_squares = [&] {
        T acc = 0;
        for (const auto& s : sums)
            acc += s * s;
        return acc;
    };
    if (trace) {
        trace->swaps = 0;
        trace->sum_of_squares.assign(1, sum_of_squares());
    }

    for (;;) {
        const auto hi = static_cast<std::size_t>(std::max_element(sums.begin(), sums.end()) - sums.begin());
        const auto lo = static_cast<std::size_t>(std::min_element(sums.begin(), sums.end()) - sums.begin());
        if (!(sums[hi] - sums[lo] > d))
            break;
        // largest value = smallest index (descending order)
        auto& from = b.bins[hi];
        auto& to = b.bins[lo];
        auto big = std::min_element(from.begin(), from.end());
        auto small = std::max_element(to.begin(), to.end());
        // With equal bin sizes, S_hi > S_lo forces *big to exceed *small.
        const T gain = alphabet.value(*big) - alphabet.value(*small);
        if (!(gain > 0))
            throw std::logic_error("exchange: no improving swap between max and min bins");
        std::swap(*big, *small);
        sums[hi] = bin_total(from);
        sums[lo] = bin_total(to);
        if (trace) {
            ++trace->swaps;
            trace->sum_of_squares.push_back(sum_of_squares());
        }
    }
    for (auto& bin : b.bins)
        std::sort(bin.begin(), bin.end());
    return b;
}

template KeyedCode greedy_code(const Alphabet<double>&, unsigned);
template KeyedCode greedy_code(const Alphabet<Rational>&, unsigned);
template Binning exchange_binning(const Alphabet<double>&, unsigned, std::size_t, std::uint64_t,
                                  ExchangeTrace<double>*);
template Binning exchange_binning(const Alphabet<Rational>&, unsigned, std::size_t, std::uint64_t,
                                  ExchangeTrace<Rational>*);
template std::vector<double> bin_sums(const Binning&, const Alphabet<double>&);
template std::vector<Rational> bin_sums(const Binning&, const Alphabet<Rational>&);

} // namespace distsec
