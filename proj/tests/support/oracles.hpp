#pragma once

// Reference computations used only by tests. They take the raw definitions at face
// value (enumerate every (value, key) state, group by what Eve sees) and share no
// code with the library's analysis routines beyond KeyedCode lookups.

#include "distsec/distsec.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace oracle {

using distsec::Rational;

template <class T>
T mean(const std::vector<T>& values, const std::vector<T>& pmf)
{
    T s = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += pmf[i] * values[i];
    return s;
}

// two-pass variance, E[(Y - EY)^2]
template <class T>
T variance(const std::vector<T>& values, const std::vector<T>& pmf)
{
    const T mu = mean(values, pmf);
    T s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const T e = values[i] - mu;
        s += pmf[i] * e * e;
    }
    return s;
}

template <class T>
T variance(const distsec::Alphabet<T>& a)
{
    return variance(a.values(), a.pmf());
}

// D_ach = E[Y^2] - sum_bins p(bin) E[Y|bin]^2, accumulated per bin in a map
template <class T>
T mmse(const distsec::KeyedCode& code, const std::vector<T>& table, const std::vector<T>& pmf)
{
    const T key_p = T(1) / T(static_cast<long>(code.key_count()));
    std::map<std::size_t, std::pair<T, T>> per_bin;  // bin -> (mass, first moment)
    T second = 0;
    for (std::size_t key = 0; key < code.key_count(); ++key)
        for (std::size_t v = 0; v < code.m(); ++v) {
            const T w = pmf[v] * key_p;
            auto& [mass, moment] = per_bin[distsec::encode_symbol(code, key, v)];
            mass += w;
            moment += w * table[v];
            second += w * table[v] * table[v];
        }
    T explained = 0;
    for (const auto& [bin, mm] : per_bin)
        if (mm.first != 0)
            explained += mm.second * mm.second / mm.first;
    return second - explained;
}

template <class T>
T mmse(const distsec::KeyedCode& code, const distsec::Alphabet<T>& a)
{
    return mmse(code, a.values(), a.pmf());
}

template <class T>
T delta(const distsec::KeyedCode& code, const distsec::Alphabet<T>& a)
{
    return variance(a) - mmse(code, a);
}

// Every per-bin posterior mean of `table` equals its prior mean.
template <class T>
bool secures(const distsec::KeyedCode& code, const std::vector<T>& table, const std::vector<T>& pmf)
{
    const T prior = mean(table, pmf);
    std::map<std::size_t, std::pair<T, T>> per_bin;
    for (std::size_t key = 0; key < code.key_count(); ++key)
        for (std::size_t v = 0; v < code.m(); ++v) {
            auto& [mass, moment] = per_bin[code.bin(key, v)];
            mass += pmf[v];
            moment += pmf[v] * table[v];
        }
    for (const auto& [bin, mm] : per_bin)
        if (mm.first != 0 && mm.second != prior * mm.first)
            return false;
    return true;
}

// Joint system, brute force: walk every (values, keys) state, key the observation by
// the tuple of bins in a std::map.
template <class T>
struct JointOracle {
    T d_max{};
    T d_ach{};
    T prior_mean{};
    std::map<std::vector<std::size_t>, std::pair<T, T>> observations;  // bins -> (mass, E[f]*mass)

    T delta() const { return d_max - d_ach; }
    T conditional_mean(const std::vector<std::size_t>& bins) const
    {
        const auto& mm = observations.at(bins);
        return mm.second / mm.first;
    }
};

template <class T>
T evaluate(const distsec::SeparableFunction<T>& f, const std::vector<std::size_t>& x)
{
    T total = 0;
    for (std::size_t l = 0; l < f.terms(); ++l) {
        T prod = 1;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (const auto& c = f.component(l, i))
                prod *= (*c)[x[i]];
        total += prod;
    }
    return total;
}

template <class T>
JointOracle<T> joint(const distsec::JointSystem<T>& sys)
{
    const std::size_t n = sys.sources.size();
    JointOracle<T> out;
    std::vector<std::size_t> x(n, 0), keys(n, 0);
    T second = 0;
    // odometer over values then keys
    for (;;) {
        T w = 1;
        std::vector<std::size_t> bins(n);
        for (std::size_t i = 0; i < n; ++i) {
            w *= sys.sources[i].probability(x[i]) / T(static_cast<long>(sys.codes[i].key_count()));
            bins[i] = sys.codes[i].bin(keys[i], x[i]);
        }
        const T fx = oracle::evaluate(sys.function, x);
        auto& [mass, moment] = out.observations[bins];
        mass += w;
        moment += w * fx;
        out.prior_mean += w * fx;
        second += w * fx * fx;

        std::size_t i = 0;
        for (; i < n; ++i) {
            if (++x[i] < sys.sources[i].size())
                break;
            x[i] = 0;
        }
        if (i < n)
            continue;
        for (i = 0; i < n; ++i) {
            if (++keys[i] < sys.codes[i].key_count())
                break;
            keys[i] = 0;
        }
        if (i == n)
            break;
    }
    out.d_max = second - out.prior_mean * out.prior_mean;
    T explained = 0;
    for (const auto& [bins, mm] : out.observations)
        if (mm.first != 0)
            explained += mm.second * mm.second / mm.first;
    out.d_ach = second - explained;
    return out;
}

// Basis of {t : A t = 0} over the rationals, by reduced row echelon form.
inline std::vector<std::vector<Rational>> null_space(std::vector<std::vector<Rational>> a, std::size_t cols)
{
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c] == 0)
            ++p;
        if (p == a.size())
            continue;
        std::swap(a[p], a[row]);
        const Rational inv = 1 / a[row][c];
        for (auto& v : a[row])
            v *= inv;
        for (std::size_t r = 0; r < a.size(); ++r)
            if (r != row && a[r][c] != 0) {
                const Rational f = a[r][c];
                for (std::size_t j = 0; j < cols; ++j)
                    a[r][j] -= f * a[row][j];
            }
        pivot_col.push_back(c);
        ++row;
    }
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivot_col)
        is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free])
            continue;
        std::vector<Rational> v(cols, 0);
        v[free] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r)
            v[pivot_col[r]] = -a[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Tables t with E[t | bin] = E[t] for every bin of `code`: one linear constraint
// sum_i p_i (n_ij - 2^k p(bin j)) t_i = 0 per bin.
inline std::vector<std::vector<Rational>> secure_tables(const distsec::KeyedCode& code,
                                                        const std::vector<Rational>& pmf)
{
    const std::size_t m = code.m();
    const auto occ = distsec::occupancy(code);
    const long keys = static_cast<long>(code.key_count());
    std::vector<std::vector<Rational>> rows;
    for (std::size_t j = 0; j < code.r(); ++j) {
        Rational pj = 0;
        for (std::size_t i = 0; i < m; ++i)
            pj += pmf[i] * Rational(static_cast<long>(occ[i * code.r() + j])) / keys;
        if (pj == 0)
            continue;
        std::vector<Rational> row(m);
        for (std::size_t i = 0; i < m; ++i)
            row[i] = pmf[i] * (Rational(static_cast<long>(occ[i * code.r() + j])) - keys * pj);
        rows.push_back(std::move(row));
    }
    return null_space(std::move(rows), m);
}

} // namespace oracle
