#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/keyed_code.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace distsec {

/// Degree and size properties that every (first two) or every optimal (last two)
/// code satisfies.
struct StructureReport {
    bool value_degree_ok = false;        // every value has 2^k outgoing edges
    bool bin_degree_ok = false;          // every bin receives at most 2^k edges
    bool at_most_one_small_bin = false;  // N_j <= 2^{k-1} for at most one bin
    bool bin_count_in_range = false;     // m <= r < 2m

    bool all() const { return value_degree_ok && bin_degree_ok && at_most_one_small_bin && bin_count_in_range; }
};

StructureReport verify_structure(const KeyedCode& code);

struct SearchOptions {
    /// Bin-count range; defaults to [m, 2m-1] with pruning and [1, m 2^k] without.
    std::optional<std::size_t> r_min;
    std::optional<std::size_t> r_max;
    /// Skip candidates with two or more bins holding <= 2^{k-1} elements. Such codes
    /// are never strictly better than some code without them, so the optimum is kept.
    bool prune = true;
    std::size_t max_m = 8;
    unsigned max_k = 2;
    /// Lifts max_m / max_k. The search is factorial in m.
    bool allow_factorial = false;
    /// Leaf budget; when reached the search stops and reports exhaustive = false.
    std::uint64_t max_candidates = 200'000'000;
    unsigned jobs = 1;
};

template <class T>
struct SearchResult {
    KeyedCode best_code;
    T best_delta;
    std::uint64_t candidates_examined = 0;
    std::uint64_t pruned = 0;
    bool exhaustive = true;
};

/// Minimum-Delta decodable code by exhaustive enumeration.
///
/// Delta depends only on the occupancy matrix n_ij up to a relabelling of bins, and
/// any occupancy with row sums 2^k and column sums <= 2^k is realisable (see
/// complete_key_assignment). The search therefore enumerates multisets of bin
/// columns instead of raw assignment tables. Ties are broken towards the
/// lexicographically smallest assignment table. Throws CapExceeded when m or k
/// exceed the configured caps.
template <class T>
SearchResult<T> brute_force_optimal(const Alphabet<T>& alphabet, unsigned k, const SearchOptions& options = {});

extern template SearchResult<double> brute_force_optimal(const Alphabet<double>&, unsigned, const SearchOptions&);
extern template SearchResult<Rational> brute_force_optimal(const Alphabet<Rational>&, unsigned, const SearchOptions&);

} // namespace distsec
