#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace distsec {

/// Key-indexed encoding of an m-symbol alphabet into r transmission bins.
///
/// For each of the 2^k key values the code holds an injective map from value
/// indices (descending alphabet order) to bins, so bin + key always identifies the
/// value. Stored value->bin per key; the bin->value inverse is built once at
/// construction.
class KeyedCode {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    static constexpr unsigned max_key_bits = 20;

    /// `assignment[key][value]` is the bin. Throws InputError if the table has the
    /// wrong shape, references a bin >= r, or maps two values to one bin under a key.
    KeyedCode(std::size_t m, unsigned k, std::size_t r, const std::vector<std::vector<std::size_t>>& assignment);

    std::size_t m() const { return m_; }
    unsigned k() const { return k_; }
    std::size_t key_count() const { return std::size_t{1} << k_; }
    std::size_t r() const { return r_; }

    std::size_t bin(std::size_t key, std::size_t value) const { return table_[key * m_ + value]; }
    /// The value sent as `bin` under `key`, or npos when the bin is unused by that key.
    std::size_t value_at(std::size_t key, std::size_t bin) const { return inverse_[key * r_ + bin]; }

    std::span<const std::size_t> mapping(std::size_t key) const
    {
        return {table_.data() + key * m_, m_};
    }
    /// Key-major flattened assignment table.
    const std::vector<std::size_t>& table() const { return table_; }
    std::vector<std::vector<std::size_t>> assignment() const;

    bool operator==(const KeyedCode& other) const
    {
        return m_ == other.m_ && k_ == other.k_ && r_ == other.r_ && table_ == other.table_;
    }

private:
    std::size_t m_;
    unsigned k_;
    std::size_t r_;
    std::vector<std::size_t> table_;
    std::vector<std::size_t> inverse_;
};

/// Bin transmitted for `value_index` under `key`. Throws InputError when out of range.
std::size_t encode_symbol(const KeyedCode& code, std::size_t key, std::size_t value_index);

/// Inverse of encode_symbol. Throws InputError if `bin` is not used by `key`.
std::size_t decode(const KeyedCode& code, std::size_t key, std::size_t bin);

/// Baseline code with no key: value v goes to bin v.
KeyedCode identity_code(std::size_t m);

} // namespace distsec
