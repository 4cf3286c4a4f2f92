#include "distsec/search.hpp"

#include "distsec/bin_statistics.hpp"
#include "distsec/encoders.hpp"
#include "distsec/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace distsec {

StructureReport verify_structure(const KeyedCode& code)
{
    const std::size_t m = code.m(), r = code.r(), keys = code.key_count();
    const auto counts = occupancy(code);
    StructureReport rep;

    rep.value_degree_ok = true;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t degree = 0;
        for (std::size_t j = 0; j < r; ++j)
            degree += counts[i * r + j];
        rep.value_degree_ok = rep.value_degree_ok && degree == keys;
    }

    rep.bin_degree_ok = true;
    std::size_t small = 0;
    for (std::size_t j = 0; j < r; ++j) {
        std::size_t degree = 0;
        for (std::size_t i = 0; i < m; ++i)
            degree += counts[i * r + j];
        rep.bin_degree_ok = rep.bin_degree_ok && degree <= keys;
        if (2 * degree <= keys)
            ++small;
    }
    rep.at_most_one_small_bin = small <= 1;
    rep.bin_count_in_range = m <= r && r < 2 * m;
    return rep;
}

namespace {

struct ColumnType {
    std::vector<std::size_t> counts;  // n_ij for this bin
    std::size_t size = 0;             // N_j
    std::size_t first_row = 0;
    bool small = false;               // N_j <= 2^{k-1}
};

template <class T>
struct Candidate {
    T score{};                         // sum_j M_j^2 / W_j
    std::vector<std::size_t> columns;  // type indices, non-decreasing
    std::vector<std::size_t> table;    // assignment table, filled lazily for tie-breaks
    bool valid = false;
};

template <class T>
class Search {
public:
    Search(const Alphabet<T>& alphabet, unsigned k, const SearchOptions& opt) : alphabet_(alphabet), k_(k), opt_(opt)
    {
        m_ = alphabet.size();
        keys_ = std::size_t{1} << k;
        r_min_ = opt.r_min.value_or(opt.prune ? m_ : 1);
        r_max_ = opt.r_max.value_or(opt.prune ? 2 * m_ - 1 : m_ * keys_);
        if (r_min_ > r_max_)
            throw InputError("search: empty bin-count range");
        build_types();
        seed_upper_bound();
    }

    SearchResult<T> run()
    {
        // chunks: the possible first columns (they all cover value 0)
        std::vector<std::size_t> first;
        for (std::size_t t = 0; t < types_.size(); ++t)
            if (types_[t].first_row == 0)
                first.push_back(t);

        std::vector<Candidate<T>> best(first.size());
        std::vector<std::uint64_t> examined(first.size(), 0), pruned(first.size(), 0);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= first.size())
                    return;
                Walker w{*this, best[c], examined[c], pruned[c], {}, {}};
                w.start(first[c]);
            }
        };
        const unsigned jobs = std::max(1u, std::min<unsigned>(opt_.jobs, static_cast<unsigned>(first.size())));
        if (jobs == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned j = 0; j < jobs; ++j)
                pool.emplace_back(worker);
            for (auto& th : pool)
                th.join();
        }

        Candidate<T> winner;
        std::uint64_t total_examined = 0, total_pruned = 0;
        for (std::size_t c = 0; c < first.size(); ++c) {
            total_examined += examined[c];
            total_pruned += pruned[c];
            offer(winner, std::move(best[c]));
        }
        if (!winner.valid && budget_hit_.load() && has_upper_) {
            // budget ran out before anything beat the greedy seed: report the seed
            const T mean = alphabet_.mean();
            T delta = upper_ / T(static_cast<long>(keys_)) - mean * mean;
            return SearchResult<T>{greedy_code(alphabet_, k_), std::move(delta), total_examined, total_pruned, false};
        }
        if (!winner.valid)
            throw InputError("search: no decodable code with r in [" + std::to_string(r_min_) + ", "
                             + std::to_string(r_max_) + "]");

        auto code = build_code(winner.columns);
        const T mean = alphabet_.mean();
        T delta = winner.score / T(static_cast<long>(keys_)) - mean * mean;
        return SearchResult<T>{std::move(code), std::move(delta), total_examined, total_pruned, !budget_hit_.load()};
    }

private:
    struct Walker {
        Search& s;
        Candidate<T>& best;
        std::uint64_t& examined;
        std::uint64_t& pruned;
        std::vector<std::size_t> remaining;
        std::vector<std::size_t> columns;
        std::size_t left = 0;  // sum of remaining
        std::size_t small = 0;

        void start(std::size_t first_type)
        {
            remaining.assign(s.m_, s.keys_);
            left = s.m_ * s.keys_;
            if (admissible(first_type, 0) && !beaten(first_type, T(0)))
                descend(first_type, T(0));
        }

        // The columns still to come carry moment M and weight W in total, so by
        // Cauchy-Schwarz their terms add up to at least M^2 / W.
        bool beaten(std::size_t t, const T& acc)
        {
            if (!best.valid && !s.has_upper_)
                return false;
            const T& ceiling = !best.valid ? s.upper_ : (!s.has_upper_ || best.score < s.upper_) ? best.score : s.upper_;
            const auto& ty = s.types_[t];
            T w = 0, mom = 0;
            for (std::size_t i = 0; i < s.m_; ++i) {
                const std::size_t rest = remaining[i] - ty.counts[i];
                if (rest == 0)
                    continue;
                const T n = T(static_cast<long>(rest));
                w += s.alphabet_.probability(i) * n;
                mom += s.weighted_[i] * n;
            }
            T bound = acc + s.terms_[t];
            if (w > 0)
                bound += mom * mom / w;
            if (s.exceeds(bound, ceiling)) {
                ++pruned;
                return true;
            }
            return false;
        }

        bool admissible(std::size_t t, std::size_t used)
        {
            const auto& ty = s.types_[t];
            for (std::size_t i = 0; i < s.m_; ++i)
                if (ty.counts[i] > remaining[i])
                    return false;
            if (s.opt_.prune && ty.small && small >= 1) {
                ++pruned;
                return false;
            }
            const std::size_t after = left - ty.size;
            if (used + 1 > s.r_max_ || (after > 0 && after > (s.r_max_ - used - 1) * s.keys_)) {
                ++pruned;
                return false;
            }
            return true;
        }

        void descend(std::size_t t, const T& acc)
        {
            if (s.budget_hit_.load(std::memory_order_relaxed))
                return;
            const auto& ty = s.types_[t];
            for (std::size_t i = 0; i < s.m_; ++i)
                remaining[i] -= ty.counts[i];
            left -= ty.size;
            small += ty.small ? 1 : 0;
            columns.push_back(t);
            const T score = acc + s.terms_[t];

            if (left == 0) {
                if (columns.size() >= s.r_min_) {
                    if (s.leaves_.fetch_add(1, std::memory_order_relaxed) >= s.opt_.max_candidates)
                        s.budget_hit_ = true;
                    else {
                        ++examined;
                        Candidate<T> c;
                        c.score = score;
                        c.columns = columns;
                        c.valid = true;
                        s.offer(best, std::move(c));
                    }
                } else {
                    ++pruned;
                }
            } else {
                std::size_t row = 0;
                while (remaining[row] == 0)
                    ++row;
                // the next column must start at the first uncovered row
                const auto [lo, hi] = s.blocks_[row];
                for (std::size_t u = std::max(lo, t); u < hi; ++u)
                    if (admissible(u, columns.size()) && !beaten(u, score))
                        descend(u, score);
            }

            columns.pop_back();
            small -= ty.small ? 1 : 0;
            left += ty.size;
            for (std::size_t i = 0; i < s.m_; ++i)
                remaining[i] += ty.counts[i];
        }
    };

    void build_types()
    {
        std::vector<std::size_t> c(m_, 0);
        // all count vectors with 1 <= sum <= 2^k, grouped by first non-zero row
        blocks_.assign(m_, {0, 0});
        for (std::size_t row = 0; row < m_; ++row) {
            blocks_[row].first = types_.size();
            for (std::size_t lead = 1; lead <= keys_; ++lead) {
                std::fill(c.begin(), c.end(), 0);
                c[row] = lead;
                enumerate_tail(c, row + 1, keys_ - lead, row);
            }
            blocks_[row].second = types_.size();
        }
        terms_.reserve(types_.size());
        for (const auto& ty : types_) {
            T weight = 0, moment = 0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (ty.counts[i] == 0)
                    continue;
                const T w = alphabet_.probability(i) * T(static_cast<long>(ty.counts[i]));
                weight += w;
                moment += w * alphabet_.value(i);
            }
            terms_.push_back(weight > 0 ? T(moment * moment / weight) : T(0));
        }
        for (std::size_t i = 0; i < m_; ++i)
            weighted_.push_back(alphabet_.probability(i) * alphabet_.value(i));
    }

    // The greedy code is a feasible r = m candidate, so its score caps the optimum.
    void seed_upper_bound()
    {
        if (m_ < r_min_ || m_ > r_max_)
            return;
        const auto code = greedy_code(alphabet_, k_);
        const auto st = bin_statistics(code, alphabet_);
        if (opt_.prune && !verify_structure(code).at_most_one_small_bin)
            return;
        upper_ = T(0);
        for (std::size_t j = 0; j < m_; ++j) {
            T weight = 0, moment = 0;
            for (std::size_t i = 0; i < m_; ++i) {
                const T w = alphabet_.probability(i) * T(static_cast<long>(st.n(i, j)));
                weight += w;
                moment += w * alphabet_.value(i);
            }
            if (weight > 0)
                upper_ += moment * moment / weight;
        }
        has_upper_ = true;
    }

    // strict comparison; on doubles the slack keeps rounding from cutting off a tie
    bool exceeds(const T& bound, const T& ceiling) const
    {
        if constexpr (is_exact_v<T>)
            return bound > ceiling;
        else
            return bound > ceiling + 1e-9 * std::max(std::fabs(bound), std::fabs(ceiling)) + 1e-12;
    }

    void enumerate_tail(std::vector<std::size_t>& c, std::size_t pos, std::size_t budget, std::size_t row)
    {
        if (pos == m_) {
            ColumnType ty;
            ty.counts = c;
            for (auto x : c)
                ty.size += x;
            ty.first_row = row;
            ty.small = 2 * ty.size <= keys_;
            types_.push_back(std::move(ty));
            return;
        }
        for (std::size_t x = 0; x <= budget; ++x) {
            c[pos] = x;
            enumerate_tail(c, pos + 1, budget - x, row);
        }
        c[pos] = 0;
    }

    KeyedCode build_code(const std::vector<std::size_t>& columns) const
    {
        Binning b;
        b.m = m_;
        b.k = k_;
        for (auto t : columns) {
            std::vector<std::size_t> bin;
            for (std::size_t i = 0; i < m_; ++i)
                bin.insert(bin.end(), types_[t].counts[i], i);
            b.bins.push_back(std::move(bin));
        }
        return complete_key_assignment(b);
    }

    void offer(Candidate<T>& best, Candidate<T>&& c) const
    {
        if (!c.valid)
            return;
        if (!best.valid || c.score < best.score) {
            best = std::move(c);
            return;
        }
        if (best.score < c.score)
            return;
        if (best.table.empty())
            best.table = build_code(best.columns).table();
        if (c.table.empty())
            c.table = build_code(c.columns).table();
        if (c.table < best.table)
            best = std::move(c);
    }

    const Alphabet<T>& alphabet_;
    unsigned k_;
    SearchOptions opt_;
    std::size_t m_ = 0, keys_ = 0, r_min_ = 0, r_max_ = 0;
    std::vector<ColumnType> types_;
    std::vector<T> terms_;
    std::vector<T> weighted_;  // p_i y_i
    T upper_{};
    bool has_upper_ = false;
    std::vector<std::pair<std::size_t, std::size_t>> blocks_;
    std::atomic<std::uint64_t> leaves_{0};
    std::atomic<bool> budget_hit_{false};
};

} // namespace

template <class T>
SearchResult<T> brute_force_optimal(const Alphabet<T>& alphabet, unsigned k, const SearchOptions& options)
{
    if (!options.allow_factorial && (alphabet.size() > options.max_m || k > options.max_k))
        throw CapExceeded("search: m = " + std::to_string(alphabet.size()) + ", k = " + std::to_string(k)
                          + " exceeds the caps m <= " + std::to_string(options.max_m) + ", k <= "
                          + std::to_string(options.max_k) + " (override to run a factorial search)");
    if (k > KeyedCode::max_key_bits)
        throw InputError("search: too many key bits");
    Search<T> s(alphabet, k, options);
    return s.run();
}

template SearchResult<double> brute_force_optimal(const Alphabet<double>&, unsigned, const SearchOptions&);
template SearchResult<Rational> brute_force_optimal(const Alphabet<Rational>&, unsigned, const SearchOptions&);

} // namespace distsec
