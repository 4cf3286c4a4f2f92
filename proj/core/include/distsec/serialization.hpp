#pragma once

#include "distsec/alphabet.hpp"
#include "distsec/keyed_code.hpp"
#include "distsec/multisource.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace distsec {

/// Config files carry `"schema": 1`; a missing field is accepted as version 1.
inline constexpr int config_schema_version = 1;

/// {"m": .., "k": .., "r": .., "assignment": [[bin of value 0 under key 0, ...], ...]}
/// with 0-based indices, value indices in descending alphabet order.
std::string code_to_json(const KeyedCode& code);
KeyedCode code_from_json(std::string_view text);

/// Alphabet as written by the user: literal tokens, not yet committed to a numeric path.
struct AlphabetSpec {
    std::string id;
    std::vector<std::string> values;
    std::optional<std::vector<std::string>> pmf;
};

/// "1,2,3" -> {"1","2","3"}; surrounding whitespace is dropped, empty items rejected.
std::vector<std::string> split_list(std::string_view text);

/// "lo..hi" integer range shorthand.
std::vector<std::string> expand_range(std::string_view text);

/// True when every literal is an integer or p/q fraction, which selects rational arithmetic.
bool literals_are_exact(const AlphabetSpec& spec);

template <class T>
Alphabet<T> build_alphabet(const AlphabetSpec& spec);

/// Accepts {"values": [...], "pmf": [...]?, "id"?}, a list of such objects, or
/// {"alphabets": [...]}. Values may be JSON numbers or literal strings such as "1/3".
std::vector<AlphabetSpec> alphabet_specs_from_json(std::string_view text);

std::string alphabet_to_json(const AlphabetSpec& spec);

/// Joint-system configuration (see README for the schema).
struct CodeSpec {
    std::optional<KeyedCode> inline_code;
    std::string alg;  // "greedy" | "exchange" | "identity" when generated
    unsigned k = 0;
    std::uint64_t seed = 0;
};

struct ComponentSpec {
    enum class Kind { absent, identity, table } kind = Kind::absent;
    std::vector<std::string> table;  // original value order of the source
};

struct SystemSpec {
    std::vector<AlphabetSpec> sources;
    std::vector<CodeSpec> codes;
    std::vector<std::vector<ComponentSpec>> terms;
    std::optional<FunctionForm> form;

    bool literals_are_exact() const;
};

/// Relative "file" code references are resolved against `base_dir`.
SystemSpec system_spec_from_json(std::string_view text, const std::filesystem::path& base_dir = {});

template <class T>
JointSystem<T> build_system(const SystemSpec& spec);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

extern template Alphabet<double> build_alphabet(const AlphabetSpec&);
extern template Alphabet<Rational> build_alphabet(const AlphabetSpec&);
extern template JointSystem<double> build_system(const SystemSpec&);
extern template JointSystem<Rational> build_system(const SystemSpec&);

} // namespace distsec
