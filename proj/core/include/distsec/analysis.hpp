#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/keyed_code.hpp"
#include "distsec/numeric.hpp"

#include <cstddef>
#include <vector>

namespace distsec {

/// Eve's view of a code: the distribution of the transmitted bin and her MMSE
/// estimate E[Y | bin] for each bin. Keys are uniform on 2^k values and independent of Y.
template <class T>
struct EvePosterior {
    std::vector<T> tau_prob;           // p(tau_j)
    std::vector<T> tau_mean;           // E[Y | tau_j]; zero outside the support
    std::vector<std::size_t> support;  // bins with p(tau_j) > 0, ascending
};

template <class T>
struct DistortionReport {
    unsigned k = 0;
    T d_max{};   // var(Y)
    T d_ach{};   // Eve's minimum mean squared error
    T delta{};   // d_max - d_ach
    T spread{};  // y_1 - y_m
    T bound1{};  // d_max / 2^k
    T bound2{};  // spread^2 / 2^{2k}
    bool bounds_applicable = false;  // only for uniform alphabets
    bool bound1_ok = false;
    bool bound2_ok = false;
    bool perfectly_secure = false;
};

/// D_max = var(Y) under the alphabet's pmf.
template <class T>
T max_distortion(const Alphabet<T>& alphabet);

template <class T>
EvePosterior<T> eve_posterior(const KeyedCode& code, const Alphabet<T>& alphabet);

/// Posterior of an arbitrary function of the source symbol; `table[i]` is its value
/// at sorted alphabet index i.
template <class T>
EvePosterior<T> eve_posterior(const KeyedCode& code, const Alphabet<T>& alphabet, const std::vector<T>& table);

/// Eve's MMSE distortion computed directly from the joint law of (Y, K): no bin
/// statistics, no closed forms. This is the reference the closed forms are checked against.
template <class T>
T achievable_distortion(const KeyedCode& code, const Alphabet<T>& alphabet);

enum class DeltaFormula {
    automatic,  // uniform when the alphabet is uniform, general otherwise
    general,    // sum_j (sum_i y_i p(tau_j|y_i) p(y_i))^2 / p(tau_j) - E[Y]^2
    uniform,    // sum_j S_j^2 / N_j / (2^k m) - E[Y]^2
};

/// Delta = D_max - D_ach from bin statistics. The uniform formula throws InputError
/// on a non-uniform alphabet.
template <class T>
T delta_closed_form(const KeyedCode& code, const Alphabet<T>& alphabet, DeltaFormula formula = DeltaFormula::automatic);

/// True iff E[Y | tau_j] = E[Y] on every bin in the support (exactly on the rational path).
template <class T>
bool is_perfectly_secure(const KeyedCode& code, const Alphabet<T>& alphabet, const Tolerance& tol = {});

/// Same criterion for a posterior already computed; `scale` sizes the float tolerance.
template <class T>
bool posterior_is_flat(const EvePosterior<T>& posterior, const T& prior_mean, const T& scale, const Tolerance& tol = {});

/// Distortions plus the checked bounds Delta <= D_max/2^k and Delta <= d^2/2^{2k}.
template <class T>
DistortionReport<T> bound_report(const KeyedCode& code, const Alphabet<T>& alphabet, const Tolerance& tol = {});

#define DISTSEC_ANALYSIS_EXTERN(T)                                                                        \
    extern template T max_distortion(const Alphabet<T>&);                                                 \
    extern template EvePosterior<T> eve_posterior(const KeyedCode&, const Alphabet<T>&);                  \
    extern template EvePosterior<T> eve_posterior(const KeyedCode&, const Alphabet<T>&, const std::vector<T>&); \
    extern template T achievable_distortion(const KeyedCode&, const Alphabet<T>&);                        \
    extern template T delta_closed_form(const KeyedCode&, const Alphabet<T>&, DeltaFormula);              \
    extern template bool is_perfectly_secure(const KeyedCode&, const Alphabet<T>&, const Tolerance&);     \
    extern template bool posterior_is_flat(const EvePosterior<T>&, const T&, const T&, const Tolerance&); \
    extern template DistortionReport<T> bound_report(const KeyedCode&, const Alphabet<T>&, const Tolerance&);

DISTSEC_ANALYSIS_EXTERN(double)
DISTSEC_ANALYSIS_EXTERN(Rational)
#undef DISTSEC_ANALYSIS_EXTERN

} // namespace distsec
