#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/analysis.hpp"
#include "distsec/keyed_code.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace distsec {

enum class FunctionForm {
    general,       // sum of products
    pure_sum,      // every term touches exactly one source, each source at most once
    pure_product,  // a single term
};

std::string to_string(FunctionForm form);

/// f(x_1..x_n) = sum_l prod_i f_i^(l)(x_i), with every component an explicit table.
template <class T>
class SeparableFunction {
public:
    /// `terms[l][i]` tabulates f_i^(l) over source i's sorted alphabet; nullopt means
    /// the term does not involve source i (constant 1). `sizes[i]` is m_i. A declared
    /// form is checked against the term structure; InputError if it does not match.
    SeparableFunction(std::vector<std::size_t> sizes, std::vector<std::vector<std::optional<std::vector<T>>>> terms,
                      std::optional<FunctionForm> declared = std::nullopt);

    std::size_t sources() const { return sizes_.size(); }
    std::size_t terms() const { return terms_.size(); }
    std::size_t source_size(std::size_t i) const { return sizes_.at(i); }
    FunctionForm form() const { return form_; }

    const std::optional<std::vector<T>>& component(std::size_t term, std::size_t source) const
    {
        return terms_.at(term).at(source);
    }
    /// f_i^(l)(x) with the constant 1 for absent components.
    T component_value(std::size_t term, std::size_t source, std::size_t x) const
    {
        const auto& c = terms_[term][source];
        return c ? (*c)[x] : T(1);
    }

    /// Throws InputError if an index is out of range or the arity is wrong.
    T evaluate(const std::vector<std::size_t>& joint_value) const;

    /// The per-source function f_i of a pure sum or pure product; for a pure sum a
    /// source no term touches has f_i = 0.
    std::vector<T> source_function(std::size_t source) const;

    static FunctionForm classify(const std::vector<std::vector<std::optional<std::vector<T>>>>& terms);

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::vector<std::optional<std::vector<T>>>> terms_;
    FunctionForm form_;
};

template <class T>
T evaluate(const SeparableFunction<T>& f, const std::vector<std::size_t>& joint_value)
{
    return f.evaluate(joint_value);
}

/// n mutually independent sources, one keyed code per source, and the function the
/// receiver computes.
template <class T>
struct JointSystem {
    std::vector<Alphabet<T>> sources;
    std::vector<KeyedCode> codes;
    SeparableFunction<T> function;

    /// Throws InputError on any dimension mismatch.
    void validate() const;
    unsigned key_budget() const;
    /// Number of (values, keys) states: prod_i m_i 2^{k_i}, saturating.
    std::size_t state_count() const;
};

/// Default joint-state cap (10^6), overridden by the DISTSEC_CAP_STATES environment variable.
std::size_t default_state_cap();

/// Eve's exact posterior over the joint observation (tau_1..tau_n), computed by
/// enumerating every (values, keys) state. Observations are mixed-radix indices with
/// source 0 as the most significant digit.
template <class T>
struct JointPosterior {
    std::vector<std::size_t> radix;  // r_i
    std::vector<T> prob;             // p(observation)
    std::vector<T> mean;             // E[f | observation], zero outside the support
    T prior_mean{};

    std::size_t index(const std::vector<std::size_t>& bins) const;
};

template <class T>
JointPosterior<T> joint_posterior(const JointSystem<T>& system, std::size_t cap = default_state_cap());

/// Exact joint distortion by full enumeration (no factorisation). k in the report is
/// the total key budget; single-source bounds are not applicable.
template <class T>
DistortionReport<T> joint_distortion(const JointSystem<T>& system, std::size_t cap = default_state_cap(),
                                     const Tolerance& tol = {});

/// E[f | bins] assembled from per-source posteriors, sum_l prod_i E[f_i^(l) | tau_i].
/// Only valid because sources and keys are independent.
template <class T>
T factorized_posterior_mean(const JointSystem<T>& system, const std::vector<std::size_t>& bins);

/// Delta from per-source posteriors alone.
template <class T>
T factorized_delta(const JointSystem<T>& system, std::size_t cap = default_state_cap());

template <class T>
struct SufficiencyReport {
    bool all_components_secure = false;
    /// component_secure[l][i]; absent components count as secure
    std::vector<std::vector<bool>> component_secure;
    /// Joint Delta, computed when every component is secure.
    std::optional<T> joint_delta;
};

/// Checks every f_i^(l)(X_i) against its source's code. When all are secure the
/// joint Delta is computed and must vanish; a nonzero value throws std::logic_error.
template <class T>
SufficiencyReport<T> check_sufficiency(const JointSystem<T>& system, std::size_t cap = default_state_cap(),
                                       const Tolerance& tol = {});

template <class T>
struct WitnessReport {
    bool applicable = false;
    std::string reason;                    // why not, when not applicable
    std::vector<std::size_t> observation;  // bins (tau_1..tau_n)
    T conditional_mean{};                  // E[f | observation]
    T prior_mean{};                        // E[f]
    T joint_delta{};
};

/// Exhibits an observation whose posterior mean differs from E[f] for a pure sum, or a
/// pure product whose factors all have nonzero mean and variance, with source
/// `unsecured` not perfectly protected. For every unprotected source the bin with the
/// largest E[f_i | tau_i] is chosen (smallest when E[f_i] < 0 in a product).
template <class T>
WitnessReport<T> necessity_witness(const JointSystem<T>& system, std::size_t unsecured,
                                   std::size_t cap = default_state_cap(), const Tolerance& tol = {});

extern template class SeparableFunction<double>;
extern template class SeparableFunction<Rational>;
extern template struct JointSystem<double>;
extern template struct JointSystem<Rational>;

} // namespace distsec
