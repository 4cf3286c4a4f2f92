#include "distsec/bin_statistics.hpp"

#include "distsec/error.hpp"

#include <string>

namespace distsec {

std::vector<std::size_t> occupancy(const KeyedCode& code)
{
    const std::size_t m = code.m(), r = code.r();
    std::vector<std::size_t> counts(m * r, 0);
    for (std::size_t key = 0; key < code.key_count(); ++key)
        for (std::size_t i = 0; i < m; ++i)
            ++counts[i * r + code.bin(key, i)];
    return counts;
}

template <class T>
BinStatistics<T> bin_statistics(const KeyedCode& code, const Alphabet<T>& alphabet)
{
    if (code.m() != alphabet.size())
        throw InputError("bin statistics: code has m = " + std::to_string(code.m()) + " but alphabet has "
                         + std::to_string(alphabet.size()) + " values");
    BinStatistics<T> st;
    st.m = code.m();
    st.r = code.r();
    st.counts = occupancy(code);
    st.N.assign(st.r, 0);
    st.S.assign(st.r, T(0));
    for (std::size_t i = 0; i < st.m; ++i) {
        for (std::size_t j = 0; j < st.r; ++j) {
            const std::size_t c = st.n(i, j);
            if (c == 0)
                continue;
            st.N[j] += c;
            st.S[j] += T(static_cast<long>(c)) * alphabet.value(i);
        }
    }
    return st;
}

template BinStatistics<double> bin_statistics(const KeyedCode&, const Alphabet<double>&);
template BinStatistics<Rational> bin_statistics(const KeyedCode&, const Alphabet<Rational>&);

} // namespace distsec
