#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/keyed_code.hpp"

#include <cstddef>
#include <vector>

namespace distsec {

/// Per-bin counts and sums of the bipartite value/bin multigraph of a code.
template <class T>
struct BinStatistics {
    std::size_t m = 0;
    std::size_t r = 0;
    std::vector<std::size_t> N;      // N_j: values landing in bin j, over all keys
    std::vector<T> S;                // S_j: sum of those values, with multiplicity
    std::vector<std::size_t> counts; // n_ij, row-major m x r: keys sending y_i to bin j

    std::size_t n(std::size_t i, std::size_t j) const { return counts[i * r + j]; }
};

/// Throws InputError when code.m() != alphabet.size().
template <class T>
BinStatistics<T> bin_statistics(const KeyedCode& code, const Alphabet<T>& alphabet);

/// Occupancy matrix n_ij of a code (no values needed).
std::vector<std::size_t> occupancy(const KeyedCode& code);

extern template BinStatistics<double> bin_statistics(const KeyedCode&, const Alphabet<double>&);
extern template BinStatistics<Rational> bin_statistics(const KeyedCode&, const Alphabet<Rational>&);

} // namespace distsec
