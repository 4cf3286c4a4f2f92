#pragma once

#include "distsec/numeric.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace distsec {

/// Values y_1 >= y_2 >= ... >= y_m of the protected quantity with their pmf.
///
/// Construction sorts the input into descending order (stable, so equal values keep
/// their relative order) and remembers where each sorted entry came from. Every
/// index handed to or returned by the rest of the library refers to the sorted order.
template <class T>
class Alphabet {
public:
    /// Uniform pmf when `pmf` is omitted. Throws InputError on an empty list, a
    /// length mismatch, a negative probability, or a pmf not summing to 1 within 1e-12.
    /// On the exact path a pmf inside the tolerance is renormalised to sum exactly to 1.
    static Alphabet make(std::vector<T> values, std::optional<std::vector<T>> pmf = std::nullopt);

    std::size_t size() const { return values_.size(); }
    const std::vector<T>& values() const { return values_; }
    const std::vector<T>& pmf() const { return pmf_; }
    const T& value(std::size_t i) const { return values_.at(i); }
    const T& probability(std::size_t i) const { return pmf_.at(i); }

    /// Position of sorted entry `i` in the caller's original list.
    std::size_t original_index(std::size_t i) const { return original_index_.at(i); }
    const std::vector<std::size_t>& original_order() const { return original_index_; }
    /// True when the input list was already non-increasing.
    bool input_was_descending() const { return input_was_descending_; }

    bool is_uniform() const { return uniform_; }
    T mean() const;
    T second_moment() const;
    /// d = y_1 - y_m
    T spread() const { return values_.front() - values_.back(); }

    /// Re-indexes a table given in original input order into sorted order.
    template <class U>
    std::vector<U> to_sorted_order(const std::vector<U>& original) const
    {
        std::vector<U> out;
        out.reserve(original.size());
        for (std::size_t i = 0; i < original_index_.size(); ++i)
            out.push_back(original.at(original_index_[i]));
        return out;
    }

private:
    Alphabet() = default;

    std::vector<T> values_;
    std::vector<T> pmf_;
    std::vector<std::size_t> original_index_;
    bool input_was_descending_ = true;
    bool uniform_ = true;
};

template <class T>
Alphabet<T> make_alphabet(std::vector<T> values, std::optional<std::vector<T>> pmf = std::nullopt)
{
    return Alphabet<T>::make(std::move(values), std::move(pmf));
}

template <class T>
Alphabet<T> make_alphabet(std::vector<T> values, std::vector<T> pmf)
{
    return Alphabet<T>::make(std::move(values), std::move(pmf));
}

/// Uniform alphabet {lo, lo+1, ..., hi}.
template <class T>
Alphabet<T> uniform_range(long lo, long hi);

extern template class Alphabet<double>;
extern template class Alphabet<Rational>;

} // namespace distsec
