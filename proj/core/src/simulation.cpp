#include "distsec/simulation.hpp"

#include "distsec/analysis.hpp"
#include "distsec/csv.hpp"
#include "distsec/error.hpp"
#include "distsec/random.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace distsec {

namespace {

template <class T>
std::vector<double> make_cdf(const Alphabet<T>& a)
{
    std::vector<double> cdf(a.size());
    T acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a.probability(i);
        cdf[i] = to_double(acc);
    }
    cdf.back() = 1.0;
    return cdf;
}

std::size_t sample_index(const std::vector<double>& cdf, double u)
{
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

/// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0, comp = 0;
    void add(double x)
    {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct StreamTotals {
    CompensatedSum sq, quad;  // sums of e^2 and e^4
};

} // namespace

template <class T>
SimTarget make_sim_target(const KeyedCode& code, const Alphabet<T>& alphabet)
{
    const auto post = eve_posterior(code, alphabet);
    SimTarget t;
    t.cdf.push_back(make_cdf(alphabet));
    t.codes.push_back(code);
    t.value_stride = {1};
    t.bin_stride = {1};
    for (const auto& v : alphabet.values())
        t.f.push_back(to_double(v));
    for (const auto& mu : post.tau_mean)
        t.estimate.push_back(to_double(mu));
    t.analytic_dach = to_double(achievable_distortion(code, alphabet));
    return t;
}

template <class T>
SimTarget make_sim_target(const JointSystem<T>& system, std::size_t cap)
{
    const auto post = joint_posterior(system, cap);
    const auto report = joint_distortion(system, cap);
    const std::size_t n = system.sources.size();
    SimTarget t;
    t.codes = system.codes;
    t.value_stride.assign(n, 1);
    t.bin_stride.assign(n, 1);
    std::size_t values = 1, bins = 1;
    for (std::size_t i = n; i-- > 0;) {
        t.value_stride[i] = values;
        t.bin_stride[i] = bins;
        values *= system.sources[i].size();
        bins *= system.codes[i].r();
    }
    for (const auto& a : system.sources)
        t.cdf.push_back(make_cdf(a));
    t.f.resize(values);
    std::vector<std::size_t> x(n);
    for (std::size_t idx = 0; idx < values; ++idx) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = (idx / t.value_stride[i]) % system.sources[i].size();
        t.f[idx] = to_double(system.function.evaluate(x));
    }
    for (const auto& mu : post.mean)
        t.estimate.push_back(to_double(mu));
    t.analytic_dach = to_double(report.d_ach);
    return t;
}

SimReport simulate(const SimTarget& target, const SimConfig& config)
{
    if (config.trials == 0)
        throw InputError("simulate: trials must be positive");
    const std::size_t n = target.codes.size();
    std::vector<StreamTotals> totals(sim_streams);

    auto run_stream = [&](std::size_t s) {
        const std::uint64_t begin = config.trials * s / sim_streams;
        const std::uint64_t end = config.trials * (s + 1) / sim_streams;
        Rng rng = make_rng(config.seed, s);
        auto& acc = totals[s];
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            std::size_t value_idx = 0, obs = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t x = sample_index(target.cdf[i], uniform_unit(rng));
                const unsigned k = target.codes[i].k();
                const std::size_t key = k == 0 ? 0 : static_cast<std::size_t>(rng() >> (64 - k));
                value_idx += x * target.value_stride[i];
                obs += target.codes[i].bin(key, x) * target.bin_stride[i];
            }
            const double err = target.f[value_idx] - target.estimate[obs];
            const double e2 = err * err;
            acc.sq.add(e2);
            acc.quad.add(e2 * e2);
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, sim_streams));
    if (jobs == 1) {
        for (std::size_t s = 0; s < sim_streams; ++s)
            run_stream(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back([&, j] {
                for (std::size_t s = j; s < sim_streams; s += jobs)
                    run_stream(s);
            });
        for (auto& th : pool)
            th.join();
    }

    // the samples are squared errors e^2; merge streams in index order
    CompensatedSum sq, quad;
    for (const auto& t : totals) {
        sq.add(t.sq.value());
        quad.add(t.quad.value());
    }
    const double count = static_cast<double>(config.trials);
    SimReport rep;
    rep.trials = config.trials;
    rep.seed = config.seed;
    rep.analytic_dach = target.analytic_dach;
    rep.empirical_dach = sq.value() / count;
    if (config.trials > 1) {
        const double var = std::max(0.0, (quad.value() / count - rep.empirical_dach * rep.empirical_dach)) * count
                           / (count - 1);
        rep.stderr_ = std::sqrt(var / count);
    }
    return rep;
}

std::string sim_csv_header()
{
    return "trials,seed,analytic_dach,empirical_dach,stderr";
}

std::string sim_csv_row(const SimReport& report)
{
    return std::to_string(report.trials) + "," + std::to_string(report.seed) + "," + format_real(report.analytic_dach)
           + "," + format_real(report.empirical_dach) + "," + format_real(report.stderr_);
}

template SimTarget make_sim_target(const KeyedCode&, const Alphabet<double>&);
template SimTarget make_sim_target(const KeyedCode&, const Alphabet<Rational>&);
template SimTarget make_sim_target(const JointSystem<double>&, std::size_t);
template SimTarget make_sim_target(const JointSystem<Rational>&, std::size_t);

} // namespace distsec
