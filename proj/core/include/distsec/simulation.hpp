#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/keyed_code.hpp"
#include "distsec/multisource.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace distsec {

/// Everything a Monte Carlo run needs, in doubles: per-source samplers and codes, the
/// function value of every joint source tuple, and Eve's posterior mean for every
/// joint observation. A single source is the n = 1 case with f(y) = y.
struct SimTarget {
    std::vector<std::vector<double>> cdf;      // per source, over sorted indices
    std::vector<KeyedCode> codes;
    std::vector<std::size_t> value_stride;     // mixed radix over source values
    std::vector<std::size_t> bin_stride;       // mixed radix over bins
    std::vector<double> f;                     // by joint value index
    std::vector<double> estimate;              // E[f | observation], by joint observation index
    double analytic_dach = 0;
};

template <class T>
SimTarget make_sim_target(const KeyedCode& code, const Alphabet<T>& alphabet);

template <class T>
SimTarget make_sim_target(const JointSystem<T>& system, std::size_t cap = default_state_cap());

struct SimConfig {
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double analytic_dach = 0;
    double empirical_dach = 0;
    double stderr_ = 0;  // standard error of empirical_dach
};

/// Number of independent RNG streams trials are split into. Fixed, so the report
/// does not depend on the number of worker threads.
inline constexpr std::size_t sim_streams = 16;

/// Draws (values, keys) i.i.d., encodes, applies Eve's posterior-mean estimate and
/// averages the squared error. Deterministic for a given seed. Throws InputError for
/// zero trials.
SimReport simulate(const SimTarget& target, const SimConfig& config);

std::string sim_csv_header();
std::string sim_csv_row(const SimReport& report);

extern template SimTarget make_sim_target(const KeyedCode&, const Alphabet<double>&);
extern template SimTarget make_sim_target(const KeyedCode&, const Alphabet<Rational>&);
extern template SimTarget make_sim_target(const JointSystem<double>&, std::size_t);
extern template SimTarget make_sim_target(const JointSystem<Rational>&, std::size_t);

} // namespace distsec
