#include "distsec/keyed_code.hpp"

#include "distsec/error.hpp"

#include <string>

namespace distsec {

KeyedCode::KeyedCode(std::size_t m, unsigned k, std::size_t r, const std::vector<std::vector<std::size_t>>& assignment)
    : m_(m), k_(k), r_(r)
{
    if (m == 0)
        throw InputError("code: alphabet size must be positive");
    if (k > max_key_bits)
        throw InputError("code: at most " + std::to_string(max_key_bits) + " key bits supported");
    if (r < m)
        throw InputError("code: r = " + std::to_string(r) + " bins cannot hold m = " + std::to_string(m)
                         + " values decodably");
    const std::size_t keys = key_count();
    if (assignment.size() != keys)
        throw InputError("code: assignment has " + std::to_string(assignment.size()) + " rows, expected 2^k = "
                         + std::to_string(keys));
    table_.reserve(keys * m);
    inverse_.assign(keys * r, npos);
    for (std::size_t key = 0; key < keys; ++key) {
        const auto& row = assignment[key];
        if (row.size() != m)
            throw InputError("code: assignment row " + std::to_string(key) + " has " + std::to_string(row.size())
                             + " entries, expected m = " + std::to_string(m));
        for (std::size_t v = 0; v < m; ++v) {
            const std::size_t b = row[v];
            if (b >= r)
                throw InputError("code: bin index " + std::to_string(b) + " out of range [0, " + std::to_string(r) + ")");
            auto& slot = inverse_[key * r + b];
            if (slot != npos)
                throw InputError("code: key " + std::to_string(key) + " maps values " + std::to_string(slot) + " and "
                                 + std::to_string(v) + " to bin " + std::to_string(b) + " (not decodable)");
            slot = v;
            table_.push_back(b);
        }
    }
}

std::vector<std::vector<std::size_t>> KeyedCode::assignment() const
{
    std::vector<std::vector<std::size_t>> out(key_count());
    for (std::size_t key = 0; key < out.size(); ++key) {
        auto row = mapping(key);
        out[key].assign(row.begin(), row.end());
    }
    return out;
}

std::size_t encode_symbol(const KeyedCode& code, std::size_t key, std::size_t value_index)
{
    if (key >= code.key_count())
        throw InputError("encode: key " + std::to_string(key) + " out of range");
    if (value_index >= code.m())
        throw InputError("encode: value index " + std::to_string(value_index) + " out of range");
    return code.bin(key, value_index);
}

std::size_t decode(const KeyedCode& code, std::size_t key, std::size_t bin)
{
    if (key >= code.key_count())
        throw InputError("decode: key " + std::to_string(key) + " out of range");
    if (bin >= code.r())
        throw InputError("decode: bin " + std::to_string(bin) + " out of range");
    const auto v = code.value_at(key, bin);
    if (v == KeyedCode::npos)
        throw InputError("decode: bin " + std::to_string(bin) + " is not used under key " + std::to_string(key));
    return v;
}

KeyedCode identity_code(std::size_t m)
{
    std::vector<std::size_t> row(m);
    for (std::size_t v = 0; v < m; ++v)
        row[v] = v;
    return KeyedCode(m, 0, m, {row});
}

} // namespace distsec
