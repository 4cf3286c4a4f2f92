#include "cli.hpp"

#include "distsec/distsec.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace distsec::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Globals {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool exact = false;
    std::string output;
};

struct AlphabetFlags {
    std::string values;
    std::string range;
    std::string pmf;
    std::string file;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--values", values, "Comma-separated alphabet values (e.g. 9,5,2,1 or 1/2,3)");
        cmd.add_option("--range", range, "Uniform integer alphabet lo..hi");
        cmd.add_option("--pmf", pmf, "Comma-separated probabilities in the order of --values");
        cmd.add_option("--alphabet", file, "Alphabet JSON file");
    }

    std::vector<AlphabetSpec> resolve() const
    {
        const int given = !values.empty() + !range.empty() + !file.empty();
        if (given != 1)
            throw InputError("give exactly one of --values, --range, --alphabet");
        std::vector<AlphabetSpec> specs;
        if (!file.empty()) {
            specs = alphabet_specs_from_json(read_text_file(file));
        } else {
            AlphabetSpec s;
            s.id = "a0";
            s.values = values.empty() ? expand_range(range) : split_list(values);
            specs.push_back(std::move(s));
        }
        if (!pmf.empty()) {
            if (specs.size() != 1)
                throw InputError("--pmf applies to a single alphabet");
            specs.front().pmf = split_list(pmf);
        }
        return specs;
    }
};

/// Calls fn(alphabet) with the exact or float instantiation chosen for the literals.
template <class Fn>
auto with_alphabet(const AlphabetSpec& spec, bool force_exact, Fn&& fn)
{
    if (force_exact || literals_are_exact(spec))
        return fn(build_alphabet<Rational>(spec));
    return fn(build_alphabet<double>(spec));
}

template <class Fn>
auto with_system(const SystemSpec& spec, bool force_exact, Fn&& fn)
{
    if (force_exact || spec.literals_are_exact())
        return fn(build_system<Rational>(spec));
    return fn(build_system<double>(spec));
}

void emit(const Globals& g, std::ostream& out, const std::string& text)
{
    if (g.output.empty() || g.output == "-")
        out << text;
    else
        write_text_file(g.output, text);
}

std::string flag(bool b)
{
    return b ? "true" : "false";
}

template <class T>
ordered_json number(const T& v)
{
    return to_double(v);
}

template <class T>
void add_exact(ordered_json& j, const char* key, const T& v)
{
    if constexpr (is_exact_v<T>)
        j[std::string(key) + "_exact"] = to_string(v);
}

std::vector<unsigned> parse_k_list(const std::string& text)
{
    std::vector<std::string> items = text.find("..") != std::string::npos ? expand_range(text) : split_list(text);
    std::vector<unsigned> out;
    for (const auto& s : items) {
        if (classify_literal(s) != LiteralKind::integer || s.front() == '-')
            throw InputError("key bits must be non-negative integers, got \"" + s + "\"");
        const unsigned long k = std::stoul(s);
        if (k > KeyedCode::max_key_bits)
            throw InputError("at most " + std::to_string(KeyedCode::max_key_bits) + " key bits supported");
        out.push_back(static_cast<unsigned>(k));
    }
    if (out.empty())
        throw InputError("empty k range");
    return out;
}

template <class T>
KeyedCode build_code(const std::string& alg, const Alphabet<T>& alphabet, unsigned k, std::size_t r,
                     std::uint64_t seed)
{
    if (alg == "greedy")
        return greedy_code(alphabet, k);
    if (alg == "exchange")
        return complete_key_assignment(exchange_binning(alphabet, k, r == 0 ? alphabet.size() : r, seed));
    if (alg == "identity")
        return identity_code(alphabet.size());
    throw InputError("unknown algorithm \"" + alg + "\" (greedy, exchange, identity)");
}

const std::vector<std::string> report_columns = {
    "alphabet_id", "m",      "k",         "r",         "d_max",            "d_ach", "delta",
    "spread",      "bound1", "bound2",    "bound1_ok", "bound2_ok",        "perfectly_secure", "exact",
};

template <class T>
std::vector<std::string> report_row(const std::string& id, const KeyedCode& code, const DistortionReport<T>& rep)
{
    return {
        id,
        std::to_string(code.m()),
        std::to_string(code.k()),
        std::to_string(code.r()),
        format_real(to_double(rep.d_max)),
        format_real(to_double(rep.d_ach)),
        format_real(to_double(rep.delta)),
        format_real(to_double(rep.spread)),
        format_real(to_double(rep.bound1)),
        format_real(to_double(rep.bound2)),
        rep.bounds_applicable ? flag(rep.bound1_ok) : "",
        rep.bounds_applicable ? flag(rep.bound2_ok) : "",
        flag(rep.perfectly_secure),
        flag(is_exact_v<T>),
    };
}

// ---- subcommands -----------------------------------------------------------

struct EncodeArgs {
    AlphabetFlags alphabet;
    std::string alg = "greedy";
    unsigned k = 1;
    std::size_t r = 0;
};

void run_encode(const EncodeArgs& a, const Globals& g, std::ostream& out)
{
    const auto specs = a.alphabet.resolve();
    if (specs.size() != 1)
        throw InputError("encode takes a single alphabet");
    const auto code = with_alphabet(specs.front(), g.exact,
                                    [&](const auto& alph) { return build_code(a.alg, alph, a.k, a.r, g.seed); });
    emit(g, out, code_to_json(code));
}

struct AnalyzeArgs {
    AlphabetFlags alphabet;
    std::string code;
};

void run_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out)
{
    const auto specs = a.alphabet.resolve();
    const auto code = code_from_json(read_text_file(a.code));
    std::string text = csv_line(report_columns) + "\n";
    for (const auto& spec : specs)
        text += with_alphabet(spec, g.exact, [&](const auto& alph) {
            return csv_line(report_row(spec.id, code, bound_report(code, alph))) + "\n";
        });
    emit(g, out, text);
}

struct SearchArgs {
    AlphabetFlags alphabet;
    unsigned k = 1;
    std::size_t r_min = 0, r_max = 0;
    bool no_prune = false;
    bool allow_factorial = false;
    std::uint64_t max_candidates = 0;
};

void run_search(const SearchArgs& a, const Globals& g, std::ostream& out)
{
    const auto specs = a.alphabet.resolve();
    if (specs.size() != 1)
        throw InputError("search takes a single alphabet");
    SearchOptions opt;
    if (a.r_min)
        opt.r_min = a.r_min;
    if (a.r_max)
        opt.r_max = a.r_max;
    opt.prune = !a.no_prune;
    opt.allow_factorial = a.allow_factorial;
    if (a.max_candidates)
        opt.max_candidates = a.max_candidates;
    opt.jobs = g.jobs;

    const auto text = with_alphabet(specs.front(), g.exact, [&](const auto& alph) {
        const auto res = brute_force_optimal(alph, a.k, opt);
        const auto st = verify_structure(res.best_code);
        ordered_json j;
        j["schema"] = config_schema_version;
        j["m"] = alph.size();
        j["k"] = a.k;
        j["best_delta"] = number(res.best_delta);
        add_exact(j, "best_delta", res.best_delta);
        j["candidates_examined"] = res.candidates_examined;
        j["pruned"] = res.pruned;
        j["exhaustive"] = res.exhaustive;
        j["structure"] = {{"value_degree_ok", st.value_degree_ok},
                          {"bin_degree_ok", st.bin_degree_ok},
                          {"at_most_one_small_bin", st.at_most_one_small_bin},
                          {"bin_count_in_range", st.bin_count_in_range}};
        j["best_code"] = ordered_json::parse(code_to_json(res.best_code));
        return j.dump(2) + "\n";
    });
    emit(g, out, text);
}

struct ComposeArgs {
    std::string system;
    long witness = -1;
};

void run_compose(const ComposeArgs& a, const Globals& g, std::ostream& out)
{
    const std::filesystem::path path = a.system;
    const auto spec = system_spec_from_json(read_text_file(path), path.parent_path());
    const auto cap = default_state_cap();
    const auto text = with_system(spec, g.exact, [&](const auto& sys) {
        const auto rep = joint_distortion(sys, cap);
        const auto suff = check_sufficiency(sys, cap);
        ordered_json j;
        j["schema"] = config_schema_version;
        j["sources"] = sys.sources.size();
        j["terms"] = sys.function.terms();
        j["form"] = to_string(sys.function.form());
        j["key_budget"] = sys.key_budget();
        j["states"] = sys.state_count();
        j["exact"] = is_exact_v<std::decay_t<decltype(rep.d_max)>>;
        j["d_max"] = number(rep.d_max);
        j["d_ach"] = number(rep.d_ach);
        j["delta"] = number(rep.delta);
        add_exact(j, "delta", rep.delta);
        j["factorized_delta"] = number(factorized_delta(sys, cap));
        j["perfectly_secure"] = rep.perfectly_secure;
        ordered_json s;
        s["all_components_secure"] = suff.all_components_secure;
        s["component_secure"] = suff.component_secure;
        if (suff.joint_delta)
            s["joint_delta"] = number(*suff.joint_delta);
        j["sufficiency"] = s;
        if (a.witness >= 0) {
            const auto w = necessity_witness(sys, static_cast<std::size_t>(a.witness), cap);
            ordered_json wj;
            wj["source"] = a.witness;
            wj["applicable"] = w.applicable;
            if (!w.applicable) {
                wj["reason"] = w.reason;
            } else {
                wj["observation"] = w.observation;
                wj["conditional_mean"] = number(w.conditional_mean);
                wj["prior_mean"] = number(w.prior_mean);
                wj["joint_delta"] = number(w.joint_delta);
            }
            j["witness"] = wj;
        }
        return j.dump(2) + "\n";
    });
    emit(g, out, text);
}

struct SimulateArgs {
    AlphabetFlags alphabet;
    std::string code;
    std::string system;
    std::uint64_t trials = 100'000;
};

void run_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out)
{
    SimTarget target;
    if (!a.system.empty()) {
        if (!a.code.empty())
            throw InputError("give either --system or --code, not both");
        const std::filesystem::path path = a.system;
        const auto spec = system_spec_from_json(read_text_file(path), path.parent_path());
        target = with_system(spec, g.exact, [](const auto& sys) { return make_sim_target(sys); });
    } else {
        if (a.code.empty())
            throw InputError("simulate needs --code with an alphabet, or --system");
        const auto specs = a.alphabet.resolve();
        if (specs.size() != 1)
            throw InputError("simulate takes a single alphabet");
        const auto code = code_from_json(read_text_file(a.code));
        target = with_alphabet(specs.front(), g.exact, [&](const auto& alph) { return make_sim_target(code, alph); });
    }
    const auto rep = simulate(target, SimConfig{a.trials, g.seed, g.jobs});
    emit(g, out, sim_csv_header() + "\n" + sim_csv_row(rep) + "\n");
}

struct SweepArgs {
    AlphabetFlags alphabet;
    std::string k;
    std::string algs;
    std::string seeds;
    std::string config;
};

const std::vector<std::string> sweep_columns = {
    "alphabet_id", "m",      "k",      "alg",       "seed",      "d_max",           "d_ach",
    "delta",       "bound1", "bound2", "bound1_ok", "bound2_ok", "perfectly_secure",
};

void run_sweep(SweepArgs a, Globals g, std::ostream& out)
{
    std::vector<AlphabetSpec> specs;
    if (!a.config.empty()) {
        const auto j = nlohmann::json::parse(read_text_file(a.config), nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw InputError("sweep config: malformed JSON object");
        if (j.contains("schema") && j["schema"] != config_schema_version)
            throw InputError("sweep config: unsupported schema version");
        auto text_or_list = [](const nlohmann::json& v) {
            if (v.is_string())
                return v.get<std::string>();
            std::string s;
            for (const auto& x : v)
                s += (s.empty() ? "" : ",") + (x.is_string() ? x.get<std::string>() : x.dump());
            return s;
        };
        // flags given on the command line win over the file
        if (a.k.empty() && j.contains("k"))
            a.k = text_or_list(j["k"]);
        if (a.algs.empty() && j.contains("algs"))
            a.algs = text_or_list(j["algs"]);
        if (a.seeds.empty() && j.contains("seeds"))
            a.seeds = text_or_list(j["seeds"]);
        if (g.output.empty() && j.contains("output"))
            g.output = j["output"].get<std::string>();
        const bool flags_give_alphabet = !a.alphabet.values.empty() || !a.alphabet.range.empty()
                                         || !a.alphabet.file.empty();
        if (!flags_give_alphabet) {
            if (j.contains("alphabets"))
                specs = alphabet_specs_from_json(j.dump());
            else if (j.contains("values"))
                specs = alphabet_specs_from_json(j.dump());
            else if (j.contains("range"))
                a.alphabet.range = j["range"].get<std::string>();
        }
    }
    if (specs.empty())
        specs = a.alphabet.resolve();
    if (a.k.empty())
        throw InputError("sweep needs --k (e.g. 0..5)");
    const auto ks = parse_k_list(a.k);
    const auto algs = split_list(a.algs.empty() ? "greedy" : a.algs);
    std::vector<std::uint64_t> seeds;
    if (a.seeds.empty()) {
        seeds.push_back(g.seed);
    } else {
        for (const auto& s : split_list(a.seeds)) {
            if (classify_literal(s) != LiteralKind::integer || s.front() == '-')
                throw InputError("seeds must be non-negative integers");
            seeds.push_back(std::stoull(s));
        }
    }
    for (const auto& alg : algs)
        if (alg != "greedy" && alg != "exchange" && alg != "identity")
            throw InputError("unknown algorithm \"" + alg + "\" (greedy, exchange, identity)");

    std::string text = csv_line(sweep_columns) + "\n";
    for (const auto& spec : specs) {
        text += with_alphabet(spec, g.exact, [&](const auto& alph) {
            std::string rows;
            auto add = [&](const std::string& alg, const KeyedCode& code, const std::string& seed) {
                const auto rep = bound_report(code, alph);
                rows += csv_line({spec.id, std::to_string(alph.size()), std::to_string(code.k()), alg, seed,
                                  format_real(to_double(rep.d_max)), format_real(to_double(rep.d_ach)),
                                  format_real(to_double(rep.delta)), format_real(to_double(rep.bound1)),
                                  format_real(to_double(rep.bound2)),
                                  rep.bounds_applicable ? flag(rep.bound1_ok) : "",
                                  rep.bounds_applicable ? flag(rep.bound2_ok) : "", flag(rep.perfectly_secure)})
                        + "\n";
            };
            for (const auto& alg : algs) {
                if (alg == "identity") {
                    add(alg, identity_code(alph.size()), "");
                    continue;
                }
                for (unsigned k : ks) {
                    if (alg == "greedy") {
                        add(alg, greedy_code(alph, k), "");
                    } else {
                        for (auto seed : seeds)
                            add(alg, build_code(alg, alph, k, 0, seed), std::to_string(seed));
                    }
                }
            }
            return rows;
        });
    }
    emit(g, out, text);
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"distsec: keyed block-length-one encodings that maximise an eavesdropper's MMSE distortion"};
    app.name(args.empty() ? "distsec" : std::filesystem::path(args.front()).filename().string());
    app.require_subcommand(1);

    Globals g;
    app.add_option("--seed", g.seed, "RNG seed (exchange binning, simulation)");
    app.add_option("--jobs", g.jobs, "Worker threads for search and simulation")->check(CLI::PositiveNumber);
    app.add_flag("--exact", g.exact, "Force rational arithmetic");
    app.add_option("-o,--output", g.output, "Output file (default: stdout)");

    EncodeArgs enc;
    auto* encode = app.add_subcommand("encode", "Build a keyed code, print it as JSON");
    encode->fallthrough();
    enc.alphabet.add_to(*encode);
    encode->add_option("--alg", enc.alg, "greedy | exchange | identity")->check(CLI::IsMember({"greedy", "exchange", "identity"}));
    encode->add_option("--k", enc.k, "Key bits");
    encode->add_option("--r", enc.r, "Bin count (exchange; must equal m)");

    AnalyzeArgs ana;
    auto* analyze = app.add_subcommand("analyze", "Distortion report for a code (CSV)");
    analyze->fallthrough();
    ana.alphabet.add_to(*analyze);
    analyze->add_option("--code", ana.code, "Code JSON file")->required();

    SearchArgs sea;
    auto* search = app.add_subcommand("search", "Exhaustive search for a minimum-Delta code (JSON)");
    search->fallthrough();
    sea.alphabet.add_to(*search);
    search->add_option("--k", sea.k, "Key bits");
    search->add_option("--r-min", sea.r_min, "Smallest bin count");
    search->add_option("--r-max", sea.r_max, "Largest bin count");
    search->add_flag("--no-prune", sea.no_prune, "Search every decodable code shape");
    search->add_flag("--allow-factorial", sea.allow_factorial, "Lift the m <= 8, k <= 2 caps");
    search->add_option("--max-candidates", sea.max_candidates, "Leaf budget before giving up exhaustiveness");

    ComposeArgs com;
    auto* compose = app.add_subcommand("compose", "Joint analysis of a multi-source system (JSON)");
    compose->fallthrough();
    compose->add_option("--system", com.system, "System JSON file")->required();
    compose->add_option("--witness", com.witness, "Source index to build a necessity witness for");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of Eve's distortion (CSV)");
    simulate_cmd->fallthrough();
    sim.alphabet.add_to(*simulate_cmd);
    simulate_cmd->add_option("--code", sim.code, "Code JSON file");
    simulate_cmd->add_option("--system", sim.system, "System JSON file");
    simulate_cmd->add_option("--trials", sim.trials, "Number of trials")->check(CLI::PositiveNumber);

    SweepArgs swp;
    auto* sweep = app.add_subcommand("sweep", "Distortion versus key bits for several encoders (CSV)");
    sweep->fallthrough();
    swp.alphabet.add_to(*sweep);
    sweep->add_option("--k", swp.k, "Key bits: lo..hi or a list");
    sweep->add_option("--alg", swp.algs, "Comma-separated encoders: greedy,exchange,identity");
    sweep->add_option("--seeds", swp.seeds, "Comma-separated seeds for exchange (default: --seed)");
    sweep->add_option("--config", swp.config, "Sweep JSON config; flags override it");

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    if (argv.empty())
        argv.push_back("distsec");

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << app.get_name() << ": " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (encode->parsed())
            run_encode(enc, g, out);
        else if (analyze->parsed())
            run_analyze(ana, g, out);
        else if (search->parsed())
            run_search(sea, g, out);
        else if (compose->parsed())
            run_compose(com, g, out);
        else if (simulate_cmd->parsed())
            run_simulate(sim, g, out);
        else if (sweep->parsed())
            run_sweep(swp, g, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid_input;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << "\n";
        return exit_cap_exceeded;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed configuration: " << e.what() << "\n";
        return exit_invalid_input;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_ok;
}

} // namespace distsec::cli
