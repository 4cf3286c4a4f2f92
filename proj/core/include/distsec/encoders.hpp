#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/keyed_code.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace distsec {

/// Partition of 2^k copies of an alphabet into r bins (multisets of value indices).
struct Binning {
    std::size_t m = 0;
    unsigned k = 0;
    std::vector<std::vector<std::size_t>> bins;

    std::size_t r() const { return bins.size(); }
    std::size_t copies() const { return std::size_t{1} << k; }

    /// Throws InputError unless every value appears exactly 2^k times and no bin
    /// holds more than 2^k elements.
    void validate() const;
};

/// Binning induced by a code: bin j holds value i once for every key sending i to j.
Binning binning_of(const KeyedCode& code);

/// Greedy permutation selection with r = m bins.
///
/// The key value i mod 2^k uses permutation sigma_i (i = 1..2^k), sigma_1 being the
/// identity. Each later sigma_i sends the j-th largest value to the bin with the
/// j-th smallest partial sum accumulated by sigma_1..sigma_{i-1}; equal partial sums
/// are ordered by bin index.
template <class T>
KeyedCode greedy_code(const Alphabet<T>& alphabet, unsigned k);

template <class T>
struct ExchangeTrace {
    std::size_t swaps = 0;
    /// Sum over bins of S_j^2, recorded before the first swap and after each swap.
    std::vector<T> sum_of_squares;
};

/// Random balanced binning followed by max/min bin exchanges.
///
/// 2^k copies of the alphabet are shuffled (seeded) and cut into r groups of 2^k.
/// While max S - min S > y_1 - y_m, the largest element of a maximum-sum bin is
/// exchanged with the smallest element of a minimum-sum bin (lowest index on ties).
/// Only r = m is supported; requires a uniform alphabet.
template <class T>
Binning exchange_binning(const Alphabet<T>& alphabet, unsigned k, std::size_t r, std::uint64_t seed,
                         ExchangeTrace<T>* trace = nullptr);

template <class T>
std::vector<T> bin_sums(const Binning& binning, const Alphabet<T>& alphabet);

/// Assigns a key to every copy in the binning so that each value uses every key once
/// and each bin receives at most one element per key: a proper 2^k-edge-colouring of
/// the bipartite value/bin multigraph. The resulting code induces exactly `binning`.
KeyedCode complete_key_assignment(const Binning& binning);

/// Colours a bipartite multigraph with max degree <= colors. `edges` are
/// (left, right) pairs; returns one colour per edge, processed in order.
std::vector<std::size_t> bipartite_edge_coloring(std::size_t left_count, std::size_t right_count,
                                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                                 std::size_t colors);

extern template KeyedCode greedy_code(const Alphabet<double>&, unsigned);
extern template KeyedCode greedy_code(const Alphabet<Rational>&, unsigned);
extern template Binning exchange_binning(const Alphabet<double>&, unsigned, std::size_t, std::uint64_t,
                                         ExchangeTrace<double>*);
extern template Binning exchange_binning(const Alphabet<Rational>&, unsigned, std::size_t, std::uint64_t,
                                         ExchangeTrace<Rational>*);
extern template std::vector<double> bin_sums(const Binning&, const Alphabet<double>&);
extern template std::vector<Rational> bin_sums(const Binning&, const Alphabet<Rational>&);

} // namespace distsec
