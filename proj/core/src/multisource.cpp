#include "distsec/multisource.hpp"

#include "distsec/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace distsec {

std::string to_string(FunctionForm form)
{
    switch (form) {
    case FunctionForm::general:
        return "general";
    case FunctionForm::pure_sum:
        return "pure-sum";
    case FunctionForm::pure_product:
        return "pure-product";
    }
    return "general";
}

template <class T>
FunctionForm SeparableFunction<T>::classify(const std::vector<std::vector<std::optional<std::vector<T>>>>& terms)
{
    if (terms.empty())
        return FunctionForm::general;
    bool sum = true;
    std::vector<int> touched(terms.front().size(), 0);
    for (const auto& term : terms) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < term.size(); ++i)
            if (term[i]) {
                ++count;
                ++touched[i];
            }
        if (count != 1)
            sum = false;
    }
    for (int t : touched)
        if (t > 1)
            sum = false;
    if (sum)
        return FunctionForm::pure_sum;
    if (terms.size() == 1)
        return FunctionForm::pure_product;
    return FunctionForm::general;
}

template <class T>
SeparableFunction<T>::SeparableFunction(std::vector<std::size_t> sizes,
                                        std::vector<std::vector<std::optional<std::vector<T>>>> terms,
                                        std::optional<FunctionForm> declared)
    : sizes_(std::move(sizes)), terms_(std::move(terms))
{
    if (sizes_.empty())
        throw InputError("function: at least one source required");
    if (terms_.empty())
        throw InputError("function: at least one term required");
    for (std::size_t l = 0; l < terms_.size(); ++l) {
        if (terms_[l].size() != sizes_.size())
            throw InputError("function: term " + std::to_string(l) + " lists " + std::to_string(terms_[l].size())
                             + " components for " + std::to_string(sizes_.size()) + " sources");
        for (std::size_t i = 0; i < sizes_.size(); ++i)
            if (terms_[l][i] && terms_[l][i]->size() != sizes_[i])
                throw InputError("function: component (" + std::to_string(l) + ", " + std::to_string(i) + ") has "
                                 + std::to_string(terms_[l][i]->size()) + " entries, source has "
                                 + std::to_string(sizes_[i]) + " values");
    }
    form_ = classify(terms_);
    if (declared && *declared != form_) {
        const bool product_ok = *declared == FunctionForm::pure_product && terms_.size() == 1;
        const bool general_ok = *declared == FunctionForm::general;
        if (!product_ok && !general_ok)
            throw InputError("function: declared form " + to_string(*declared) + " does not match its terms ("
                             + to_string(form_) + ")");
        form_ = *declared;
    }
}

template <class T>
T SeparableFunction<T>::evaluate(const std::vector<std::size_t>& joint_value) const
{
    if (joint_value.size() != sizes_.size())
        throw InputError("evaluate: expected " + std::to_string(sizes_.size()) + " indices");
    for (std::size_t i = 0; i < sizes_.size(); ++i)
        if (joint_value[i] >= sizes_[i])
            throw InputError("evaluate: index " + std::to_string(joint_value[i]) + " out of range for source "
                             + std::to_string(i));
    T total = 0;
    for (std::size_t l = 0; l < terms_.size(); ++l) {
        T prod = 1;
        for (std::size_t i = 0; i < sizes_.size(); ++i)
            if (terms_[l][i])
                prod *= (*terms_[l][i])[joint_value[i]];
        total += prod;
    }
    return total;
}

template <class T>
std::vector<T> SeparableFunction<T>::source_function(std::size_t source) const
{
    if (source >= sizes_.size())
        throw InputError("function: source index out of range");
    if (form_ == FunctionForm::pure_product) {
        const auto& c = terms_.front()[source];
        return c ? *c : std::vector<T>(sizes_[source], T(1));
    }
    if (form_ == FunctionForm::pure_sum) {
        for (const auto& term : terms_)
            if (term[source])
                return *term[source];
        return std::vector<T>(sizes_[source], T(0));
    }
    throw InputError("function: per-source function only defined for pure sums and products");
}

template <class T>
void JointSystem<T>::validate() const
{
    const std::size_t n = function.sources();
    if (sources.size() != n || codes.size() != n)
        throw InputError("system: " + std::to_string(sources.size()) + " sources and " + std::to_string(codes.size())
                         + " codes for a function of " + std::to_string(n) + " sources");
    for (std::size_t i = 0; i < n; ++i) {
        if (sources[i].size() != function.source_size(i))
            throw InputError("system: source " + std::to_string(i) + " alphabet size does not match its components");
        if (codes[i].m() != sources[i].size())
            throw InputError("system: code " + std::to_string(i) + " has m = " + std::to_string(codes[i].m())
                             + ", source has " + std::to_string(sources[i].size()) + " values");
    }
}

template <class T>
unsigned JointSystem<T>::key_budget() const
{
    unsigned total = 0;
    for (const auto& c : codes)
        total += c.k();
    return total;
}

namespace {

std::size_t saturating_mul(std::size_t a, std::size_t b)
{
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
        return std::numeric_limits<std::size_t>::max();
    return a * b;
}

} // namespace

template <class T>
std::size_t JointSystem<T>::state_count() const
{
    std::size_t total = 1;
    for (std::size_t i = 0; i < sources.size(); ++i)
        total = saturating_mul(total, saturating_mul(sources[i].size(), codes[i].key_count()));
    return total;
}

std::size_t default_state_cap()
{
    if (const char* env = std::getenv("DISTSEC_CAP_STATES")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
        throw InputError("DISTSEC_CAP_STATES must be a positive integer");
    }
    return 1'000'000;
}

template <class T>
std::size_t JointPosterior<T>::index(const std::vector<std::size_t>& bins) const
{
    if (bins.size() != radix.size())
        throw InputError("observation: expected " + std::to_string(radix.size()) + " bins");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < radix.size(); ++i) {
        if (bins[i] >= radix[i])
            throw InputError("observation: bin out of range for source " + std::to_string(i));
        idx = idx * radix[i] + bins[i];
    }
    return idx;
}

namespace {

/// Walks every (values, keys) state with positive probability.
template <class T>
class StateWalker {
public:
    StateWalker(const JointSystem<T>& system, std::size_t cap) : sys_(system)
    {
        system.validate();
        const std::size_t states = system.state_count();
        if (states > cap)
            throw CapExceeded("joint state space has " + std::to_string(states) + " states, cap is "
                              + std::to_string(cap) + " (set DISTSEC_CAP_STATES to raise it)");
        const std::size_t n = system.sources.size();
        stride_.assign(n, 1);
        std::size_t obs = 1;
        for (std::size_t i = n; i-- > 0;) {
            stride_[i] = obs;
            obs = saturating_mul(obs, system.codes[i].r());
        }
        if (obs > cap)
            throw CapExceeded("joint observation space has " + std::to_string(obs) + " tuples, cap is "
                              + std::to_string(cap));
        observations_ = obs;
        std::size_t keys = 1;
        for (const auto& c : system.codes)
            keys *= c.key_count();
        key_weight_ = T(1) / T(static_cast<long>(keys));
    }

    std::size_t observations() const { return observations_; }
    const std::vector<std::size_t>& strides() const { return stride_; }

    /// fn(probability, f value, observation index)
    template <class Fn>
    void for_each(Fn&& fn) const
    {
        const std::size_t n = sys_.sources.size();
        std::vector<std::size_t> x(n, 0), key(n, 0);
        for (;;) {
            T px = key_weight_;
            for (std::size_t i = 0; i < n; ++i)
                px *= sys_.sources[i].probability(x[i]);
            if (px > 0) {
                const T f = sys_.function.evaluate(x);
                std::fill(key.begin(), key.end(), 0);
                for (;;) {
                    std::size_t obs = 0;
                    for (std::size_t i = 0; i < n; ++i)
                        obs += stride_[i] * sys_.codes[i].bin(key[i], x[i]);
                    fn(px, f, obs);
                    if (!advance(key, [&](std::size_t i) { return sys_.codes[i].key_count(); }))
                        break;
                }
            }
            if (!advance(x, [&](std::size_t i) { return sys_.sources[i].size(); }))
                break;
        }
    }

private:
    template <class Limit>
    static bool advance(std::vector<std::size_t>& digits, Limit limit)
    {
        for (std::size_t i = digits.size(); i-- > 0;) {
            if (++digits[i] < limit(i))
                return true;
            digits[i] = 0;
        }
        return false;
    }

    const JointSystem<T>& sys_;
    std::vector<std::size_t> stride_;
    std::size_t observations_ = 0;
    T key_weight_;
};

template <class T>
std::vector<T> component_posterior_mean(const JointSystem<T>& system, std::size_t term, std::size_t source)
{
    const auto& c = system.function.component(term, source);
    if (!c)
        return std::vector<T>(system.codes[source].r(), T(1));
    return eve_posterior(system.codes[source], system.sources[source], *c).tau_mean;
}

template <class T>
T table_mean(const Alphabet<T>& a, const std::vector<T>& table)
{
    T acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a.probability(i) * table[i];
    return acc;
}

template <class T>
T table_variance(const Alphabet<T>& a, const std::vector<T>& table)
{
    const T mu = table_mean(a, table);
    T acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a.probability(i) * (table[i] - mu) * (table[i] - mu);
    return acc;
}

template <class T>
T table_spread(const std::vector<T>& table)
{
    const auto [lo, hi] = std::minmax_element(table.begin(), table.end());
    return *hi - *lo;
}

template <class T>
bool is_zero(const T& x, const Tolerance& tol)
{
    if constexpr (is_exact_v<T>)
        return x == 0;
    else
        return std::fabs(x) <= tol.abs;
}

template <class T>
bool component_is_secure(const JointSystem<T>& system, std::size_t source, const std::vector<T>& table,
                         const Tolerance& tol)
{
    const auto& a = system.sources[source];
    const auto post = eve_posterior(system.codes[source], a, table);
    return posterior_is_flat(post, table_mean(a, table), table_spread(table), tol);
}

} // namespace

template <class T>
JointPosterior<T> joint_posterior(const JointSystem<T>& system, std::size_t cap)
{
    StateWalker<T> walk(system, cap);
    JointPosterior<T> post;
    for (const auto& c : system.codes)
        post.radix.push_back(c.r());
    post.prob.assign(walk.observations(), T(0));
    post.mean.assign(walk.observations(), T(0));
    walk.for_each([&](const T& p, const T& f, std::size_t obs) {
        post.prob[obs] += p;
        post.prior_mean += p * f;
    });
    walk.for_each([&](const T& p, const T& f, std::size_t obs) { post.mean[obs] += (p / post.prob[obs]) * f; });
    return post;
}

template <class T>
DistortionReport<T> joint_distortion(const JointSystem<T>& system, std::size_t cap, const Tolerance& tol)
{
    const auto post = joint_posterior(system, cap);
    StateWalker<T> walk(system, cap);
    DistortionReport<T> rep;
    rep.k = system.key_budget();
    bool first = true;
    T lo{}, hi{};
    walk.for_each([&](const T& p, const T& f, std::size_t obs) {
        const T dev = f - post.prior_mean;
        const T err = f - post.mean[obs];
        rep.d_max += p * dev * dev;
        rep.d_ach += p * err * err;
        if (first || f < lo)
            lo = f;
        if (first || f > hi)
            hi = f;
        first = false;
    });
    rep.delta = rep.d_max - rep.d_ach;
    rep.spread = hi - lo;
    rep.bounds_applicable = false;

    EvePosterior<T> flat;
    flat.tau_mean = post.mean;
    for (std::size_t o = 0; o < post.prob.size(); ++o)
        if (post.prob[o] > 0)
            flat.support.push_back(o);
    rep.perfectly_secure = posterior_is_flat(flat, post.prior_mean, rep.spread, tol);
    return rep;
}

template <class T>
T factorized_posterior_mean(const JointSystem<T>& system, const std::vector<std::size_t>& bins)
{
    system.validate();
    const std::size_t n = system.sources.size();
    if (bins.size() != n)
        throw InputError("observation: expected " + std::to_string(n) + " bins");
    T total = 0;
    for (std::size_t l = 0; l < system.function.terms(); ++l) {
        T prod = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (!system.function.component(l, i))
                continue;
            prod *= component_posterior_mean(system, l, i).at(bins[i]);
        }
        total += prod;
    }
    return total;
}

template <class T>
T factorized_delta(const JointSystem<T>& system, std::size_t cap)
{
    system.validate();
    if (system.state_count() > cap)
        throw CapExceeded("joint state space exceeds cap");
    const std::size_t n = system.sources.size();
    const std::size_t L = system.function.terms();

    // per-source marginals and per-(term, source) posterior means
    std::vector<EvePosterior<T>> marg;
    for (std::size_t i = 0; i < n; ++i)
        marg.push_back(eve_posterior(system.codes[i], system.sources[i]));
    std::vector<std::vector<std::vector<T>>> means(L, std::vector<std::vector<T>>(n));
    T prior = 0;
    for (std::size_t l = 0; l < L; ++l) {
        T prod = 1;
        for (std::size_t i = 0; i < n; ++i) {
            means[l][i] = component_posterior_mean(system, l, i);
            if (const auto& c = system.function.component(l, i))
                prod *= table_mean(system.sources[i], *c);
        }
        prior += prod;
    }

    T acc = 0;
    std::vector<std::size_t> pos(n, 0);  // position within each source's support
    for (;;) {
        T p = 1;
        for (std::size_t i = 0; i < n; ++i)
            p *= marg[i].tau_prob[marg[i].support[pos[i]]];
        T mean = 0;
        for (std::size_t l = 0; l < L; ++l) {
            T prod = 1;
            for (std::size_t i = 0; i < n; ++i)
                prod *= means[l][i][marg[i].support[pos[i]]];
            mean += prod;
        }
        acc += p * mean * mean;
        std::size_t i = n;
        while (i-- > 0) {
            if (++pos[i] < marg[i].support.size())
                break;
            pos[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1))
            break;
    }
    return acc - prior * prior;
}

template <class T>
SufficiencyReport<T> check_sufficiency(const JointSystem<T>& system, std::size_t cap, const Tolerance& tol)
{
    system.validate();
    SufficiencyReport<T> rep;
    rep.all_components_secure = true;
    const std::size_t n = system.sources.size();
    rep.component_secure.assign(system.function.terms(), std::vector<bool>(n, true));
    for (std::size_t l = 0; l < system.function.terms(); ++l)
        for (std::size_t i = 0; i < n; ++i)
            if (const auto& c = system.function.component(l, i)) {
                const bool ok = component_is_secure(system, i, *c, tol);
                rep.component_secure[l][i] = ok;
                rep.all_components_secure = rep.all_components_secure && ok;
            }
    if (rep.all_components_secure) {
        const auto joint = joint_distortion(system, cap, tol);
        rep.joint_delta = joint.delta;
        if (!approx_equal(joint.delta, T(0), Tolerance{tol.rel, tol.abs + tol.rel * to_double(abs_value(joint.d_max))}))
            throw std::logic_error("sufficiency: every component is secure but the joint Delta is nonzero");
    }
    return rep;
}

template <class T>
WitnessReport<T> necessity_witness(const JointSystem<T>& system, std::size_t unsecured, std::size_t cap,
                                   const Tolerance& tol)
{
    system.validate();
    const std::size_t n = system.sources.size();
    if (unsecured >= n)
        throw InputError("witness: source index out of range");
    WitnessReport<T> rep;
    const auto form = system.function.form();
    if (form == FunctionForm::general) {
        rep.reason = "function is neither a pure sum nor a pure product";
        return rep;
    }

    std::vector<std::vector<T>> fi(n);
    for (std::size_t i = 0; i < n; ++i)
        fi[i] = system.function.source_function(i);

    if (form == FunctionForm::pure_product) {
        T cond = 1;
        for (std::size_t i = 0; i < n; ++i)
            cond *= table_mean(system.sources[i], fi[i]) * table_variance(system.sources[i], fi[i]);
        if (is_zero(cond, tol)) {
            rep.reason = "product condition fails: some factor has zero mean or zero variance";
            return rep;
        }
    }
    if (component_is_secure(system, unsecured, fi[unsecured], tol))
        throw InputError("witness: source " + std::to_string(unsecured) + " is perfectly secured");

    rep.observation.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = system.sources[i];
        const auto post = eve_posterior(system.codes[i], a, fi[i]);
        std::size_t pick = post.support.front();
        if (!component_is_secure(system, i, fi[i], tol)) {
            const bool want_low = form == FunctionForm::pure_product && table_mean(a, fi[i]) < 0;
            for (auto j : post.support) {
                if (want_low ? post.tau_mean[j] < post.tau_mean[pick] : post.tau_mean[j] > post.tau_mean[pick])
                    pick = j;
            }
        }
        rep.observation[i] = pick;
    }

    const auto post = joint_posterior(system, cap);
    const std::size_t idx = post.index(rep.observation);
    rep.conditional_mean = post.mean[idx];
    rep.prior_mean = post.prior_mean;
    rep.joint_delta = joint_distortion(system, cap, tol).delta;
    rep.applicable = true;
    return rep;
}

template class SeparableFunction<double>;
template class SeparableFunction<Rational>;
template struct JointSystem<double>;
template struct JointSystem<Rational>;
template struct JointPosterior<double>;
template struct JointPosterior<Rational>;

#define DISTSEC_MULTI_INSTANTIATE(T)                                                                        \
    template JointPosterior<T> joint_posterior(const JointSystem<T>&, std::size_t);                        \
    template DistortionReport<T> joint_distortion(const JointSystem<T>&, std::size_t, const Tolerance&);  \
    template T factorized_posterior_mean(const JointSystem<T>&, const std::vector<std::size_t>&);        \
    template T factorized_delta(const JointSystem<T>&, std::size_t);                                      \
    template SufficiencyReport<T> check_sufficiency(const JointSystem<T>&, std::size_t, const Tolerance&); \
    template WitnessReport<T> necessity_witness(const JointSystem<T>&, std::size_t, std::size_t, const Tolerance&);

DISTSEC_MULTI_INSTANTIATE(double)
DISTSEC_MULTI_INSTANTIATE(Rational)

} // namespace distsec
