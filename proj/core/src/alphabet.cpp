#include "distsec/alphabet.hpp"

#include "distsec/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace distsec {

namespace {

constexpr double pmf_tolerance = 1e-12;

template <class T>
bool is_finite(const T& v)
{
    if constexpr (is_exact_v<T>)
        return true;
    else
        return std::isfinite(v);
}

} // namespace

template <class T>
Alphabet<T> Alphabet<T>::make(std::vector<T> values, std::optional<std::vector<T>> pmf)
{
    if (values.empty())
        throw InputError("alphabet: value list is empty");
    for (const auto& v : values)
        if (!is_finite(v))
            throw InputError("alphabet: values must be finite");

    const std::size_t m = values.size();
    std::vector<T> probs;
    if (pmf) {
        if (pmf->size() != m)
            throw InputError("alphabet: pmf has " + std::to_string(pmf->size()) + " entries for "
                             + std::to_string(m) + " values");
        probs = std::move(*pmf);
        T total = 0;
        for (const auto& p : probs) {
            if (!is_finite(p) || p < 0)
                throw InputError("alphabet: negative or non-finite probability");
            if (p > 1)
                throw InputError("alphabet: probability exceeds 1");
            total += p;
        }
        if (std::fabs(to_double(total) - 1.0) > pmf_tolerance)
            throw InputError("alphabet: pmf sums to " + std::to_string(to_double(total)) + ", expected 1");
        if constexpr (is_exact_v<T>) {
            if (total != 1)
                for (auto& p : probs)
                    p /= total;
        }
    } else {
        probs.assign(m, T(1) / T(static_cast<long>(m)));
    }

    Alphabet a;
    a.input_was_descending_ = std::is_sorted(values.begin(), values.end(), std::greater<>());
    a.original_index_.resize(m);
    std::iota(a.original_index_.begin(), a.original_index_.end(), std::size_t{0});
    std::stable_sort(a.original_index_.begin(), a.original_index_.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
    a.values_.reserve(m);
    a.pmf_.reserve(m);
    for (auto idx : a.original_index_) {
        a.values_.push_back(values[idx]);
        a.pmf_.push_back(probs[idx]);
    }

    a.uniform_ = true;
    const T expected = T(1) / T(static_cast<long>(m));
    for (const auto& p : a.pmf_) {
        if constexpr (is_exact_v<T>) {
            if (p != expected)
                a.uniform_ = false;
        } else if (std::fabs(p - expected) > pmf_tolerance) {
            a.uniform_ = false;
        }
    }
    return a;
}

template <class T>
T Alphabet<T>::mean() const
{
    T acc = 0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        acc += pmf_[i] * values_[i];
    return acc;
}

template <class T>
T Alphabet<T>::second_moment() const
{
    T acc = 0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        acc += pmf_[i] * values_[i] * values_[i];
    return acc;
}

template <class T>
Alphabet<T> uniform_range(long lo, long hi)
{
    if (hi < lo)
        throw InputError("alphabet: empty range");
    std::vector<T> values;
    for (long v = lo; v <= hi; ++v)
        values.push_back(T(v));
    return Alphabet<T>::make(std::move(values));
}

template class Alphabet<double>;
template class Alphabet<Rational>;
template Alphabet<double> uniform_range<double>(long, long);
template Alphabet<Rational> uniform_range<Rational>(long, long);

} // namespace distsec
