#include "distsec/serialization.hpp"

#include "distsec/encoders.hpp"
#include "distsec/error.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>

namespace distsec {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text, const char* what)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw InputError(std::string(what) + ": malformed JSON: " + e.what());
    }
}

void check_schema(const json& j, const char* what)
{
    if (!j.is_object() || !j.contains("schema"))
        return;
    if (!j["schema"].is_number_integer() || j["schema"].get<int>() != config_schema_version)
        throw InputError(std::string(what) + ": unsupported schema version " + j["schema"].dump());
}

std::string literal_of(const json& j, const char* what)
{
    if (j.is_number_integer() || j.is_number_unsigned())
        return j.dump();
    if (j.is_number_float()) {
        // keep float-typed JSON numbers on the float path even when integral ("2.0")
        std::string s = j.dump();
        if (s.find_first_of(".eE") == std::string::npos)
            s += ".0";
        return s;
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (classify_literal(s) == LiteralKind::invalid)
            throw InputError(std::string(what) + ": invalid numeric literal \"" + s + "\"");
        return s;
    }
    throw InputError(std::string(what) + ": expected a number or numeric string, got " + j.dump());
}

std::vector<std::string> literal_list(const json& j, const char* what)
{
    if (!j.is_array())
        throw InputError(std::string(what) + ": expected an array");
    std::vector<std::string> out;
    for (const auto& x : j)
        out.push_back(literal_of(x, what));
    return out;
}

template <class T>
T parse_literal(const std::string& s)
{
    if constexpr (is_exact_v<T>) {
        auto q = parse_rational(s);
        if (!q)
            throw InputError("invalid numeric literal \"" + s + "\"");
        return *q;
    } else {
        auto v = parse_real(s);
        if (!v)
            throw InputError("invalid numeric literal \"" + s + "\"");
        return *v;
    }
}

bool exact_literal(const std::string& s)
{
    const auto kind = classify_literal(s);
    return kind == LiteralKind::integer || kind == LiteralKind::fraction;
}

std::size_t index_field(const json& j, const char* key, const char* what)
{
    if (!j.contains(key) || !j[key].is_number_unsigned())
        throw InputError(std::string(what) + ": field \"" + key + "\" must be a non-negative integer");
    return j[key].get<std::size_t>();
}

KeyedCode code_from_object(const json& j)
{
    if (!j.is_object())
        throw InputError("code: expected a JSON object");
    const auto m = index_field(j, "m", "code");
    const auto k = index_field(j, "k", "code");
    const auto r = index_field(j, "r", "code");
    if (k > KeyedCode::max_key_bits)
        throw InputError("code: too many key bits");
    if (!j.contains("assignment") || !j["assignment"].is_array())
        throw InputError("code: field \"assignment\" must be an array of arrays");
    std::vector<std::vector<std::size_t>> table;
    for (const auto& row : j["assignment"]) {
        if (!row.is_array())
            throw InputError("code: assignment rows must be arrays");
        std::vector<std::size_t> r_out;
        for (const auto& b : row) {
            if (!b.is_number_unsigned())
                throw InputError("code: bin indices must be non-negative integers");
            r_out.push_back(b.get<std::size_t>());
        }
        table.push_back(std::move(r_out));
    }
    return KeyedCode(m, static_cast<unsigned>(k), r, table);
}

AlphabetSpec alphabet_from_object(const json& j, std::size_t position)
{
    if (!j.is_object() || !j.contains("values"))
        throw InputError("alphabet: expected an object with \"values\"");
    AlphabetSpec spec;
    spec.id = j.contains("id") ? j["id"].get<std::string>() : "a" + std::to_string(position);
    spec.values = literal_list(j["values"], "alphabet values");
    if (j.contains("pmf") && !j["pmf"].is_null())
        spec.pmf = literal_list(j["pmf"], "alphabet pmf");
    return spec;
}

} // namespace

std::string code_to_json(const KeyedCode& code)
{
    ordered_json j;
    j["m"] = code.m();
    j["k"] = code.k();
    j["r"] = code.r();
    j["assignment"] = code.assignment();
    return j.dump() + "\n";
}

KeyedCode code_from_json(std::string_view text)
{
    auto j = parse_json(text, "code");
    check_schema(j, "code");
    return code_from_object(j);
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        std::string item(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
            item.pop_back();
        std::size_t lead = 0;
        while (lead < item.size() && std::isspace(static_cast<unsigned char>(item[lead])))
            ++lead;
        item.erase(0, lead);
        if (item.empty())
            throw InputError("list: empty item in \"" + std::string(text) + "\"");
        out.push_back(std::move(item));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::vector<std::string> expand_range(std::string_view text)
{
    const auto dots = text.find("..");
    if (dots == std::string_view::npos)
        throw InputError("range: expected lo..hi, got \"" + std::string(text) + "\"");
    const std::string lo_s(text.substr(0, dots)), hi_s(text.substr(dots + 2));
    if (classify_literal(lo_s) != LiteralKind::integer || classify_literal(hi_s) != LiteralKind::integer)
        throw InputError("range: bounds must be integers");
    const long lo = std::stol(lo_s), hi = std::stol(hi_s);
    if (hi < lo)
        throw InputError("range: empty range " + std::string(text));
    if (hi - lo >= 1'000'000)
        throw InputError("range: too many values");
    std::vector<std::string> out;
    for (long v = lo; v <= hi; ++v)
        out.push_back(std::to_string(v));
    return out;
}

bool literals_are_exact(const AlphabetSpec& spec)
{
    for (const auto& v : spec.values)
        if (!exact_literal(v))
            return false;
    if (spec.pmf)
        for (const auto& p : *spec.pmf)
            if (!exact_literal(p))
                return false;
    return true;
}

template <class T>
Alphabet<T> build_alphabet(const AlphabetSpec& spec)
{
    std::vector<T> values;
    for (const auto& v : spec.values)
        values.push_back(parse_literal<T>(v));
    std::optional<std::vector<T>> pmf;
    if (spec.pmf) {
        pmf.emplace();
        for (const auto& p : *spec.pmf)
            pmf->push_back(parse_literal<T>(p));
    }
    return make_alphabet(std::move(values), std::move(pmf));
}

std::vector<AlphabetSpec> alphabet_specs_from_json(std::string_view text)
{
    const auto j = parse_json(text, "alphabet");
    check_schema(j, "alphabet");
    std::vector<AlphabetSpec> out;
    const json* list = nullptr;
    if (j.is_array())
        list = &j;
    else if (j.is_object() && j.contains("alphabets"))
        list = &j["alphabets"];
    if (list) {
        if (!list->is_array())
            throw InputError("alphabet: \"alphabets\" must be an array");
        for (std::size_t i = 0; i < list->size(); ++i)
            out.push_back(alphabet_from_object((*list)[i], i));
    } else {
        out.push_back(alphabet_from_object(j, 0));
    }
    if (out.empty())
        throw InputError("alphabet: no alphabets given");
    return out;
}

std::string alphabet_to_json(const AlphabetSpec& spec)
{
    ordered_json j;
    j["id"] = spec.id;
    j["values"] = spec.values;
    if (spec.pmf)
        j["pmf"] = *spec.pmf;
    return j.dump() + "\n";
}

bool SystemSpec::literals_are_exact() const
{
    for (const auto& s : sources)
        if (!distsec::literals_are_exact(s))
            return false;
    for (const auto& term : terms)
        for (const auto& c : term)
            for (const auto& v : c.table)
                if (!exact_literal(v))
                    return false;
    return true;
}

SystemSpec system_spec_from_json(std::string_view text, const std::filesystem::path& base_dir)
{
    const auto j = parse_json(text, "system");
    if (!j.is_object())
        throw InputError("system: expected a JSON object");
    check_schema(j, "system");
    SystemSpec spec;

    if (!j.contains("sources") || !j["sources"].is_array() || j["sources"].empty())
        throw InputError("system: \"sources\" must be a non-empty array");
    for (std::size_t i = 0; i < j["sources"].size(); ++i)
        spec.sources.push_back(alphabet_from_object(j["sources"][i], i));

    if (!j.contains("codes") || !j["codes"].is_array())
        throw InputError("system: \"codes\" must be an array");
    for (const auto& c : j["codes"]) {
        CodeSpec cs;
        if (c.is_object() && c.contains("file")) {
            std::filesystem::path p = c["file"].get<std::string>();
            if (p.is_relative())
                p = base_dir / p;
            cs.inline_code = code_from_json(read_text_file(p));
        } else if (c.is_object() && c.contains("alg")) {
            cs.alg = c["alg"].get<std::string>();
            if (cs.alg != "greedy" && cs.alg != "exchange" && cs.alg != "identity")
                throw InputError("system: unknown code algorithm \"" + cs.alg + "\"");
            cs.k = c.contains("k") ? static_cast<unsigned>(index_field(c, "k", "system code")) : 0;
            cs.seed = c.contains("seed") ? c["seed"].get<std::uint64_t>() : 0;
        } else {
            cs.inline_code = code_from_object(c);
        }
        spec.codes.push_back(std::move(cs));
    }

    if (!j.contains("function") || !j["function"].is_object())
        throw InputError("system: \"function\" must be an object");
    const auto& f = j["function"];
    if (f.contains("form")) {
        const auto form = f["form"].get<std::string>();
        if (form == "pure-sum")
            spec.form = FunctionForm::pure_sum;
        else if (form == "pure-product")
            spec.form = FunctionForm::pure_product;
        else if (form == "general" || form == "general-sum-of-products")
            spec.form = FunctionForm::general;
        else
            throw InputError("system: unknown function form \"" + form + "\"");
    }
    if (!f.contains("terms") || !f["terms"].is_array() || f["terms"].empty())
        throw InputError("system: function \"terms\" must be a non-empty array");
    for (const auto& term : f["terms"]) {
        if (!term.is_array())
            throw InputError("system: each term is an array with one component per source");
        std::vector<ComponentSpec> comps;
        for (const auto& c : term) {
            ComponentSpec cs;
            if (c.is_null()) {
                cs.kind = ComponentSpec::Kind::absent;
            } else if (c.is_string() && c.get<std::string>() == "identity") {
                cs.kind = ComponentSpec::Kind::identity;
            } else {
                cs.kind = ComponentSpec::Kind::table;
                cs.table = literal_list(c, "function component");
            }
            comps.push_back(std::move(cs));
        }
        spec.terms.push_back(std::move(comps));
    }
    return spec;
}

template <class T>
JointSystem<T> build_system(const SystemSpec& spec)
{
    std::vector<Alphabet<T>> sources;
    for (const auto& s : spec.sources)
        sources.push_back(build_alphabet<T>(s));
    if (spec.codes.size() != sources.size())
        throw InputError("system: " + std::to_string(spec.codes.size()) + " codes for " + std::to_string(sources.size())
                         + " sources");

    std::vector<KeyedCode> codes;
    for (std::size_t i = 0; i < spec.codes.size(); ++i) {
        const auto& cs = spec.codes[i];
        if (cs.inline_code)
            codes.push_back(*cs.inline_code);
        else if (cs.alg == "greedy")
            codes.push_back(greedy_code(sources[i], cs.k));
        else if (cs.alg == "exchange")
            codes.push_back(complete_key_assignment(exchange_binning(sources[i], cs.k, sources[i].size(), cs.seed)));
        else
            codes.push_back(identity_code(sources[i].size()));
    }

    std::vector<std::size_t> sizes;
    for (const auto& s : sources)
        sizes.push_back(s.size());
    std::vector<std::vector<std::optional<std::vector<T>>>> terms;
    for (const auto& term : spec.terms) {
        if (term.size() != sources.size())
            throw InputError("system: every term needs one component per source");
        std::vector<std::optional<std::vector<T>>> row;
        for (std::size_t i = 0; i < term.size(); ++i) {
            const auto& c = term[i];
            switch (c.kind) {
            case ComponentSpec::Kind::absent:
                row.emplace_back(std::nullopt);
                break;
            case ComponentSpec::Kind::identity:
                row.emplace_back(sources[i].values());
                break;
            case ComponentSpec::Kind::table: {
                if (c.table.size() != sources[i].size())
                    throw InputError("system: component for source " + std::to_string(i) + " has "
                                     + std::to_string(c.table.size()) + " entries, source has "
                                     + std::to_string(sources[i].size()) + " values");
                std::vector<T> original;
                for (const auto& v : c.table)
                    original.push_back(parse_literal<T>(v));
                row.emplace_back(sources[i].to_sorted_order(original));
                break;
            }
            }
        }
        terms.push_back(std::move(row));
    }
    JointSystem<T> sys{std::move(sources), std::move(codes), SeparableFunction<T>(sizes, std::move(terms), spec.form)};
    sys.validate();
    return sys;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

template Alphabet<double> build_alphabet(const AlphabetSpec&);
template Alphabet<Rational> build_alphabet(const AlphabetSpec&);
template JointSystem<double> build_system(const SystemSpec&);
template JointSystem<Rational> build_system(const SystemSpec&);

} // namespace distsec
