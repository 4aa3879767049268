#pragma once

// Command-line front end. `run` takes the arguments without the program name
// and returns the process exit status:
//   0 verdict produced, 1 precondition failure, 2 budget/window exhaustion,
//   3 input error.

#include "prlab/prlab.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace prlab::cli {

using nlohmann::json;

enum Exit : int { ok = 0, precondition = 1, exhausted = 2, input = 3 };

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream out;
    for (unsigned i = 0; i < len; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return out.str();
}

struct Window {
    std::uint64_t lo = 1;
    std::uint64_t hi = 0;
};

inline Window parse_window(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos)
        throw InputError("window must look like a..b, got '" + text + "'");
    Window w;
    w.lo = detail::parse_uint(text.substr(0, dots), "window start");
    w.hi = detail::parse_uint(text.substr(dots + 2), "window end");
    if (w.hi < w.lo)
        throw InputError("window end is below its start");
    return w;
}

// Everything one invocation reads, plus the record written afterwards.
struct Invocation {
    std::vector<std::string> argv;
    std::string command;

    // shared options
    std::string structure_path;
    std::string builder;
    std::string window_text;
    std::string subset_path;
    std::string elements;
    std::string coloring_path;
    std::string pattern;
    std::vector<std::string> params;
    std::uint32_t colors = 0;
    std::uint64_t budget = 50'000'000;
    std::uint64_t seed = 0;
    std::size_t parallel_width = 1;
    std::string emit_cnf;
    std::string preset;
    std::string manifest_dir = "runs";
    bool allow_equal = false;
    std::uint32_t min_element = 0;

    // command specific
    std::string positional;
    std::string property = "thick";
    std::string op = "mul";
    std::size_t r = 2;
    std::size_t columns = 2;
    std::size_t rows = 2;
    std::size_t max_witness = 4;
    std::size_t family_size = 2;
    std::size_t n = 2;
    std::uint64_t k = 1;
    std::uint64_t l = 2;
    std::string trace_path;
    std::string target_path;
    std::vector<std::string> homs;
    bool adjoin_identity = false;
    bool t_witness = false;
    bool no_symmetry = false;
    std::uint64_t random_trials = 0;
    unsigned max_deg = 1;
    unsigned max_coeff = 2;

    // record
    std::map<std::string, std::string> input_digests;
    json verdict;
    json witness = nullptr;
    json extra = json::object();
};

inline std::string read_input(Invocation& inv, const std::string& path) {
    auto text = read_text_file(path);
    inv.input_digests[path] = sha256_hex(text);
    return text;
}

inline GroundStructure resolve_structure(Invocation& inv, bool allow_window = true) {
    if (!inv.structure_path.empty())
        return parse_structure(read_input(inv, inv.structure_path));
    if (!inv.builder.empty()) {
        auto toks = detail::split_ws(inv.builder);
        if (toks.empty())
            throw InputError("empty --builder");
        std::vector<std::uint64_t> p;
        for (std::size_t i = 1; i < toks.size(); ++i)
            p.push_back(detail::parse_uint(toks[i], "builder parameter"));
        return build_structure(toks[0], p, std::nullopt);
    }
    if (allow_window && !inv.window_text.empty()) {
        const auto w = parse_window(inv.window_text);
        return GroundStructure::nat_window(w.lo, w.hi);
    }
    throw InputError("a structure is required (--structure, --builder or --window)");
}

inline SubsetMask resolve_subset(Invocation& inv, std::size_t n) {
    if (!inv.subset_path.empty())
        return parse_subset(read_input(inv, inv.subset_path), n);
    if (!inv.elements.empty())
        return parse_subset(inv.elements, n);
    throw InputError("a subset is required (--subset FILE or --elements \"i j ...\")");
}

inline Coloring resolve_coloring(Invocation& inv, std::size_t n) {
    if (inv.coloring_path.empty())
        throw InputError("--coloring is required");
    return parse_coloring(read_input(inv, inv.coloring_path), n, inv.colors);
}

inline CompiledPattern resolve_pattern(const Invocation& inv) {
    if (inv.pattern.empty())
        throw InputError("--pattern is required");
    std::map<std::string, std::uint64_t> params;
    for (const auto& p : inv.params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos)
            throw InputError("--param expects name=value, got '" + p + "'");
        params[p.substr(0, eq)] = detail::parse_uint(p.substr(eq + 1), "parameter " + p.substr(0, eq));
    }
    PatternConstraints c;
    c.distinct = !inv.allow_equal;
    c.min_element = inv.min_element;
    return compile_pattern(inv.pattern, params, c);
}

inline json labels(const GroundStructure& g, std::span<const Element> xs) {
    json a = json::array();
    for (Element e : xs)
        a.push_back(g.label(e));
    return a;
}

inline json indices(std::span<const Element> xs) { return json(std::vector<Element>(xs.begin(), xs.end())); }

inline void print_instance(std::ostream& out, const GroundStructure& g, const CompiledPattern& cp,
                           const PatternInstance& inst) {
    out << "instance color " << inst.color << ':';
    for (std::size_t i = 0; i < cp.arity(); ++i)
        out << ' ' << cp.variables[i] << '=' << g.label(inst.assignment[i]);
    out << '\n';
    for (std::size_t t = 0; t < cp.terms.size(); ++t)
        out << "  " << cp.term_text[t] << " = " << g.label(inst.values[t]) << '\n';
}

inline json instance_json(const GroundStructure& g, const CompiledPattern& cp, const PatternInstance& inst) {
    json vars = json::object();
    for (std::size_t i = 0; i < cp.arity(); ++i)
        vars[cp.variables[i]] = g.label(inst.assignment[i]);
    return {{"color", inst.color}, {"assignment", vars}, {"values", labels(g, inst.values)}};
}

inline json coloring_json(const Coloring& c) { return c.colors; }

// ---------------------------------------------------------------------------
// commands

inline int cmd_algebra_validate(Invocation& inv, std::ostream& out) {
    if (inv.structure_path.empty())
        inv.structure_path = inv.positional;
    const auto g = resolve_structure(inv, false);
    const auto rep = validate_axioms(g, inv.budget);
    out << "structure " << g.describe() << " (" << g.size() << " elements, " << to_string(g.kind()) << ")\n";
    json checks = json::array();
    const AxiomCheck* failing = nullptr;
    for (const auto& c : rep.checks) {
        out << "  " << std::left << std::setw(22) << c.name << (c.holds ? "holds" : "FAILS")
            << (c.required ? "" : " (informational)") << (c.complete ? "" : " (budget cut)") << "  checked "
            << c.checked << ", skipped " << c.skipped;
        if (!c.holds)
            out << ", witness " << labels(g, c.witness).dump();
        out << '\n';
        checks.push_back({{"name", c.name}, {"holds", c.holds}, {"required", c.required}, {"complete", c.complete}});
        if (!c.holds && c.required && !failing)
            failing = &c;
    }
    const bool valid = rep.all_required_hold();
    const bool complete = std::all_of(rep.checks.begin(), rep.checks.end(), [](const AxiomCheck& c) { return c.complete; });
    out << (valid ? (complete ? "all axioms pass" : "no violation found within budget") : "axiom violated") << '\n';
    inv.verdict = valid ? (complete ? "valid" : "inconclusive") : "invalid";
    if (failing)
        inv.witness = {{"axiom", failing->name}, {"tuple", indices(failing->witness)}};
    inv.extra["checks"] = checks;
    return valid && !complete ? Exit::exhausted : Exit::ok;
}

inline int cmd_largeness_check(Invocation& inv, std::ostream& out) {
    const auto g = resolve_structure(inv);
    const auto A = resolve_subset(inv, g.size());
    const Op op = parse_op(inv.op);
    const Property p = parse_property(inv.property);
    Budget b;
    b.nodes = inv.budget;
    b.family_size = inv.family_size;
    LargenessReport rep;
    switch (p) {
    case Property::thick: rep = is_thick(g, A, op, b); break;
    case Property::syndetic: rep = is_syndetic(g, A, op, inv.max_witness, b); break;
    case Property::piecewise_syndetic: rep = is_piecewise_syndetic(g, A, op, inv.max_witness, b); break;
    case Property::ip_r: rep = is_ipr(g, A, inv.r, op, b); break;
    case Property::ip_r_star: rep = is_ipr_star(g, A, inv.r, op, b); break;
    case Property::combinatorially_rich: rep = is_combinatorially_rich(g, A, inv.columns, inv.rows, b, op); break;
    }
    out << to_string(p) << " (" << to_string(op) << ") on " << g.describe() << ": " << to_string(rep.verdict)
        << (rep.window_only ? " [window only]" : "") << '\n';
    if (!rep.witness.empty())
        out << "  " << rep.witness_kind << ' ' << labels(g, rep.witness).dump() << '\n';
    if (rep.translate)
        out << "  translate " << g.label(*rep.translate) << '\n';
    if (!rep.note.empty())
        out << "  note: " << rep.note << '\n';
    inv.verdict = std::string(to_string(rep.verdict));
    inv.witness = {{"kind", rep.witness_kind},
                   {"elements", indices(rep.witness)},
                   {"translates", indices(rep.translates)},
                   {"minimal", rep.minimal},
                   {"window_only", rep.window_only}};
    if (rep.translate)
        inv.witness["translate"] = *rep.translate;
    return rep.verdict == Verdict::inconclusive ? Exit::exhausted : Exit::ok;
}

inline std::vector<Homomorphism> resolve_homs(const Invocation& inv, const GroundStructure& s, Op op) {
    std::vector<Homomorphism> out;
    for (const auto& text : inv.homs) {
        Homomorphism h;
        for (const auto& tok : detail::split_ws(text))
            h.map.push_back(static_cast<Element>(detail::parse_uint(tok, "homomorphism image")));
        h.respects_add = op == Op::add;
        h.respects_mul = op == Op::mul;
        out.push_back(std::move(h));
    }
    if (out.empty())
        out.push_back(Homomorphism::identity(s.size(), op == Op::add, op == Op::mul));
    return out;
}

inline int cmd_dset_compute(Invocation& inv, std::ostream& out) {
    const auto S = resolve_structure(inv);
    const auto R = inv.target_path.empty() ? S : parse_structure(read_input(inv, inv.target_path));
    const Op op = parse_op(inv.op);
    Budget b;
    b.nodes = inv.budget;
    DSetQuery q{S, R, resolve_subset(inv, R.size()), resolve_homs(inv, S, op), inv.adjoin_identity, op};
    if (inv.homs.empty() && S.size() != R.size())
        throw InputError("a homomorphism (--hom) is required when source and target differ");
    const auto D = compute_D_set(q, inv.max_witness, b);
    out << "D-set " << labels(S, D.elements()).dump() << " (" << D.count() << " of " << S.size() << ")\n";
    inv.verdict = D.none() ? "empty" : "nonempty";
    inv.witness = {{"dset", indices(D.elements())}};
    if (inv.t_witness) {
        const auto tw = find_t_witness(q, inv.max_witness, b);
        if (tw.found)
            out << "t-witness t=" << R.label(tw.t) << " d=" << S.label(tw.d) << '\n';
        else
            out << "t-witness none\n";
        for (const auto& u : tw.unchecked)
            out << "  unchecked hypothesis: " << u << '\n';
        inv.witness["t_witness"] = tw.found ? json{{"t", tw.t}, {"d", tw.d}} : json(nullptr);
    }
    return Exit::ok;
}

inline int cmd_pattern_find(Invocation& inv, std::ostream& out) {
    const auto cp = resolve_pattern(inv);
    const auto g = resolve_structure(inv);
    const auto coloring = resolve_coloring(inv, g.size());
    const auto inst = find_monochromatic(g, coloring, cp, inv.parallel_width);
    if (!inst) {
        out << "no monochromatic instance in " << g.describe() << '\n';
        inv.verdict = "none";
        return Exit::ok;
    }
    print_instance(out, g, cp, *inst);
    inv.verdict = "found";
    inv.witness = instance_json(g, cp, *inst);
    return Exit::ok;
}

struct SearchSetup {
    GroundStructure g;
    CompiledPattern cp;
    Window window;
    bool nat = false;
};

inline SearchSetup resolve_search(Invocation& inv) {
    SearchSetup s;
    if (!inv.preset.empty()) {
        const auto p = find_preset(inv.preset);
        if (inv.pattern.empty()) {
            inv.pattern = p.pattern;
            inv.allow_equal = !p.distinct;
        }
        if (inv.colors == 0)
            inv.colors = p.colors;
        if (p.name == "poly-conjecture") {
            s.g = GroundStructure::poly_nat(inv.max_deg, inv.max_coeff);
            s.cp = resolve_pattern(inv);
            return s;
        }
        s.window = {p.lo, p.hi};
        if (!inv.window_text.empty())
            s.window = parse_window(inv.window_text);
        s.nat = true;
        s.g = GroundStructure::nat_window(s.window.lo, s.window.hi);
        s.cp = resolve_pattern(inv);
        return s;
    }
    s.cp = resolve_pattern(inv);
    if (inv.structure_path.empty() && inv.builder.empty() && !inv.window_text.empty()) {
        s.window = parse_window(inv.window_text);
        s.nat = true;
    }
    s.g = resolve_structure(inv);
    return s;
}

inline SearchConfig search_config(const Invocation& inv) {
    SearchConfig cfg;
    cfg.colors = inv.colors == 0 ? 2 : inv.colors;
    cfg.node_budget = inv.budget;
    cfg.parallel_width = inv.parallel_width;
    cfg.seed = inv.seed;
    cfg.symmetry_breaking = !inv.no_symmetry;
    return cfg;
}

inline int cmd_search_avoid(Invocation& inv, std::ostream& out) {
    const auto s = resolve_search(inv);
    const auto cfg = search_config(inv);
    const auto ix = InstanceIndex::build(s.g, s.cp);
    const auto r = enumerate_avoiding(ix, cfg);
    out << "pattern " << s.cp.source << " on " << s.g.describe() << ", " << cfg.colors << " colors, "
        << ix.edges.size() << " instances\n";
    out << "result " << to_string(r.status) << " after " << r.nodes << " nodes\n";
    if (r.coloring)
        out << "coloring " << to_coloring_text(*r.coloring);
    inv.verdict = std::string(to_string(r.status));
    inv.witness = r.coloring ? coloring_json(*r.coloring) : json(nullptr);
    inv.extra["instances"] = ix.edges.size();
    if (inv.random_trials > 0) {
        const auto st = random_coloring_experiment(s.g, s.cp, cfg.colors, inv.random_trials, inv.seed);
        out << "random colorings with an instance: " << st.with_instance << " / " << st.trials << '\n';
        inv.extra["random"] = {{"trials", st.trials}, {"with_instance", st.with_instance}, {"fraction", st.fraction}};
    }
    return r.status == AvoidStatus::none_budget ? Exit::exhausted : Exit::ok;
}

inline int cmd_search_threshold(Invocation& inv, std::ostream& out) {
    auto s = resolve_search(inv);
    if (!s.nat)
        throw InputError("threshold search needs a nat window (--window a..b or a windowed preset)");
    const auto cfg = search_config(inv);
    const auto lo = s.window.lo;
    const auto r = compute_threshold([lo](std::uint64_t n) { return GroundStructure::nat_window(lo, n); }, s.cp, cfg,
                                     lo, s.window.hi);
    for (const auto& st : r.steps)
        out << "  n=" << st.n << ' ' << to_string(st.status) << (st.extended ? " (extended)" : "") << '\n';
    if (r.status == ThresholdStatus::exact)
        out << "threshold " << r.threshold << '\n';
    else if (r.status == ThresholdStatus::not_reached)
        out << "threshold not reached <= " << s.window.hi << '\n';
    else
        out << "budget exhausted at n=" << r.largest_checked << '\n';
    inv.verdict = {{"status", std::string(to_string(r.status))}};
    if (r.status == ThresholdStatus::exact)
        inv.verdict["threshold"] = r.threshold;
    inv.witness = r.avoiding_witness ? coloring_json(*r.avoiding_witness) : json(nullptr);
    return r.status == ThresholdStatus::budget ? Exit::exhausted : Exit::ok;
}

inline int cmd_search_cnf(Invocation& inv, std::ostream& out) {
    const auto s = resolve_search(inv);
    const std::uint32_t k = inv.colors == 0 ? 2 : inv.colors;
    const auto doc = export_cnf(s.g, s.cp, k);
    out << "p cnf " << doc.variable_count << ' ' << doc.clauses.size() << "  (" << doc.pattern_clauses
        << " pattern clauses)\n";
    if (!inv.emit_cnf.empty()) {
        std::ofstream(inv.emit_cnf, std::ios::binary)
            << doc.dimacs("avoid monochromatic " + s.cp.source + " on " + s.g.describe() + ", k=" + std::to_string(k));
        std::ofstream(inv.emit_cnf + ".map", std::ios::binary) << doc.mapping(s.g);
        out << "wrote " << inv.emit_cnf << " and " << inv.emit_cnf << ".map\n";
    }
    const auto text = doc.dimacs();
    inv.verdict = {{"variables", doc.variable_count}, {"clauses", doc.clauses.size()}};
    inv.witness = {{"cnf_sha256", sha256_hex(text)}};
    return Exit::ok;
}

inline void write_trace(const Invocation& inv, const ConstructionTrace& t, std::ostream& out) {
    if (inv.trace_path.empty())
        return;
    std::ofstream(inv.trace_path, std::ios::binary) << t.text();
    out << "trace written to " << inv.trace_path << '\n';
}

inline int construct_exit(ConstructStatus s) {
    switch (s) {
    case ConstructStatus::success: return Exit::ok;
    case ConstructStatus::precondition_failed: return Exit::precondition;
    case ConstructStatus::exhausted: return Exit::exhausted;
    case ConstructStatus::no_node_verified:
    case ConstructStatus::verification_failed: return Exit::ok;
    }
    return Exit::ok;
}

inline int cmd_construct_thick_syndetic(Invocation& inv, std::ostream& out) {
    const auto g = resolve_structure(inv);
    const auto A = resolve_subset(inv, g.size());
    const auto oracle = brute_force_thick_oracle(g, A, Op::mul);
    const auto r = thick_syndetic_constructor(g, A, inv.n, inv.k, oracle, inv.max_witness);
    out << to_string(r.status) << (r.reason.empty() ? "" : ": " + r.reason) << '\n';
    write_trace(inv, r.trace, out);
    inv.verdict = std::string(to_string(r.status));
    inv.witness = {{"xs", indices(r.xs)}, {"cover", indices(r.cover)}, {"trace_sha256", sha256_hex(r.trace.text())}};
    return construct_exit(r.status);
}

inline int cmd_construct_bowen(Invocation& inv, std::ostream& out) {
    const auto g = resolve_structure(inv);
    if (inv.colors == 0)
        inv.colors = 2;
    const auto coloring = resolve_coloring(inv, g.size());
    const auto oracle = brute_force_thick_oracle(g, coloring.color_class(0), Op::mul);
    const auto r = bowen_thick_tree(g, coloring, inv.k, inv.l, oracle);
    out << to_string(r.status) << (r.reason.empty() ? "" : ": " + r.reason) << '\n';
    write_trace(inv, r.trace, out);
    inv.verdict = std::string(to_string(r.status));
    inv.witness = r.status == ConstructStatus::success
                      ? json{{"node", r.node}, {"color", r.color}, {"x", g.label(r.x)}, {"y", g.label(r.y)}}
                      : json(nullptr);
    inv.extra["trace_sha256"] = sha256_hex(r.trace.text());
    return construct_exit(r.status);
}

inline int cmd_construct_replay(Invocation& inv, std::ostream& out) {
    const std::string path = !inv.trace_path.empty() ? inv.trace_path : inv.positional;
    if (path.empty())
        throw InputError("replay needs a trace file");
    const auto r = replay_trace(read_input(inv, path));
    if (r.identical)
        out << "replay of " << r.executor << " reproduced the trace byte-for-byte\n";
    else
        out << "replay of " << r.executor << " diverged at line " << r.first_difference << '\n';
    inv.verdict = r.identical ? "identical" : "diverged";
    inv.witness = {{"first_difference", r.first_difference}};
    return Exit::ok;
}

// ---------------------------------------------------------------------------
// manifest

inline std::string manifest_args(const std::vector<std::string>& argv) {
    // Output locations and worker count do not affect results.
    std::string s;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        const auto& a = argv[i];
        if (a == "--manifest-dir" || a == "--parallel-width" || a == "--trace" || a == "--emit-cnf") {
            ++i;
            continue;
        }
        if (a.rfind("--manifest-dir=", 0) == 0 || a.rfind("--parallel-width=", 0) == 0 ||
            a.rfind("--trace=", 0) == 0 || a.rfind("--emit-cnf=", 0) == 0)
            continue;
        s += (s.empty() ? "" : " ") + a;
    }
    return s;
}

inline void write_manifest(const Invocation& inv, int code, double wall_ms) {
    if (inv.manifest_dir.empty())
        return;
    json stable = {{"command", inv.command},
                   {"args", manifest_args(inv.argv)},
                   {"inputs", inv.input_digests},
                   {"seed", inv.seed},
                   {"budget", inv.budget},
                   {"verdict", inv.verdict},
                   {"witness", inv.witness},
                   {"exit", code}};
    const std::string digest = sha256_hex(stable.dump());
    json record = stable;
    record["details"] = inv.extra;
    record["parallel_width"] = inv.parallel_width;
    record["wall_time_ms"] = wall_ms;
    record["digest"] = digest;
    std::filesystem::create_directories(inv.manifest_dir);
    std::ofstream(std::filesystem::path(inv.manifest_dir) / (digest.substr(0, 16) + ".jsonl"), std::ios::app)
        << record.dump() << '\n';
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    Invocation inv;
    inv.argv = args;
    CLI::App app{"partition-regularity laboratory"};
    app.require_subcommand(1);

    auto shared = [&](CLI::App* c) {
        c->add_option("--structure", inv.structure_path, "structure file");
        c->add_option("--builder", inv.builder, "inline builder, e.g. \"zmod 6\"");
        c->add_option("--window", inv.window_text, "nat window a..b");
        c->add_option("--budget", inv.budget, "node budget");
        c->add_option("--seed", inv.seed, "random seed");
        c->add_option("--parallel-width", inv.parallel_width, "worker threads");
        c->add_option("--manifest-dir", inv.manifest_dir, "directory for run manifests (empty disables)");
    };
    auto subset_opts = [&](CLI::App* c) {
        c->add_option("--subset", inv.subset_path, "subset file (element indices)");
        c->add_option("--elements", inv.elements, "inline subset, e.g. \"0 2 4\"");
    };
    auto pattern_opts = [&](CLI::App* c) {
        c->add_option("--pattern", inv.pattern, "pattern family, e.g. \"{x,y,x+y}\"");
        c->add_option("--param", inv.params, "pattern parameter name=value");
        c->add_flag("--allow-equal", inv.allow_equal, "variables need not be distinct");
        c->add_option("--min-element", inv.min_element, "least admissible element index");
        c->add_option("--colors", inv.colors, "number of colors");
    };

    auto* algebra = app.add_subcommand("algebra", "structure checks");
    algebra->require_subcommand(1);
    auto* validate = algebra->add_subcommand("validate", "check semigroup/semiring axioms");
    shared(validate);
    validate->add_option("file", inv.positional, "structure file");

    auto* largeness = app.add_subcommand("largeness", "largeness notions");
    largeness->require_subcommand(1);
    auto* check = largeness->add_subcommand("check", "decide one largeness property");
    shared(check);
    subset_opts(check);
    check->add_option("--property", inv.property, "thick|syndetic|pws|ipr|ipr-star|rich");
    check->add_option("--op", inv.op, "add|mul");
    check->add_option("--r", inv.r, "multiset size for IP_r");
    check->add_option("--columns", inv.columns, "matrix columns (rich)");
    check->add_option("--rows", inv.rows, "matrix rows (rich)");
    check->add_option("--max-witness", inv.max_witness, "largest cover considered");
    check->add_option("--family-size", inv.family_size, "windowed thickness family size");

    auto* dset = app.add_subcommand("dset", "D-sets");
    dset->require_subcommand(1);
    auto* compute = dset->add_subcommand("compute", "compute D(A; homs)");
    shared(compute);
    subset_opts(compute);
    compute->add_option("--target", inv.target_path, "target structure file (defaults to the source)");
    compute->add_option("--hom", inv.homs, "homomorphism images, e.g. \"0 1 2\" (default identity)");
    compute->add_option("--op", inv.op, "add|mul");
    compute->add_flag("--adjoin-identity", inv.adjoin_identity, "also intersect with A");
    compute->add_flag("--t-witness", inv.t_witness, "also scan for (t, d)");
    compute->add_option("--max-witness", inv.max_witness, "largest cover considered");

    auto* pattern = app.add_subcommand("pattern", "pattern instances");
    pattern->require_subcommand(1);
    auto* find = pattern->add_subcommand("find", "least monochromatic instance under a coloring");
    shared(find);
    pattern_opts(find);
    find->add_option("--coloring", inv.coloring_path, "coloring file");

    auto* search = app.add_subcommand("search", "avoiding colorings");
    search->require_subcommand(1);
    auto* avoid = search->add_subcommand("avoid", "find a coloring with no monochromatic instance");
    auto* threshold = search->add_subcommand("threshold", "least window with no avoiding coloring");
    auto* cnf = search->add_subcommand("cnf", "export DIMACS");
    for (auto* c : {avoid, threshold, cnf}) {
        shared(c);
        pattern_opts(c);
        c->add_option("--preset", inv.preset, "hindman990|schur|poly-conjecture");
        c->add_option("--emit-cnf", inv.emit_cnf, "write DIMACS here (mapping to PATH.map)");
        c->add_flag("--no-symmetry", inv.no_symmetry, "disable color symmetry breaking");
        c->add_option("--max-deg", inv.max_deg, "poly-conjecture degree bound");
        c->add_option("--max-coeff", inv.max_coeff, "poly-conjecture coefficient bound");
    }
    avoid->add_option("--random-trials", inv.random_trials, "also sample random colorings");

    auto* construct = app.add_subcommand("construct", "constructive executors");
    construct->require_subcommand(1);
    auto* ts = construct->add_subcommand("thick-syndetic", "thick and syndetic set => sum-product grid");
    shared(ts);
    subset_opts(ts);
    ts->add_option("--n", inv.n, "number of elements x_i");
    ts->add_option("--k", inv.k, "largest coefficient");
    ts->add_option("--max-witness", inv.max_witness, "largest syndetic cover considered");
    ts->add_option("--trace", inv.trace_path, "write the trace here");
    auto* bowen = construct->add_subcommand("bowen-tree", "thick color class => {x,y,kx+y,x^j y}");
    shared(bowen);
    bowen->add_option("--coloring", inv.coloring_path, "coloring file");
    bowen->add_option("--colors", inv.colors, "number of colors (2)");
    bowen->add_option("--k", inv.k, "coefficient k");
    bowen->add_option("--l", inv.l, "largest exponent l");
    bowen->add_option("--trace", inv.trace_path, "write the trace here");
    auto* replay = construct->add_subcommand("replay", "re-execute a trace");
    shared(replay);
    replay->add_option("trace", inv.positional, "trace file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Exit::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Exit::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return Exit::input;
    }

    const auto started = std::chrono::steady_clock::now();
    int code = Exit::ok;
    try {
        auto* top = app.get_subcommands().front();
        auto* leaf = top->get_subcommands().front();
        inv.command = top->get_name() + " " + leaf->get_name();
        if (leaf == validate)
            code = cmd_algebra_validate(inv, out);
        else if (leaf == check)
            code = cmd_largeness_check(inv, out);
        else if (leaf == compute)
            code = cmd_dset_compute(inv, out);
        else if (leaf == find)
            code = cmd_pattern_find(inv, out);
        else if (leaf == avoid)
            code = cmd_search_avoid(inv, out);
        else if (leaf == threshold)
            code = cmd_search_threshold(inv, out);
        else if (leaf == cnf)
            code = cmd_search_cnf(inv, out);
        else if (leaf == ts)
            code = cmd_construct_thick_syndetic(inv, out);
        else if (leaf == bowen)
            code = cmd_construct_bowen(inv, out);
        else if (leaf == replay)
            code = cmd_construct_replay(inv, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        inv.verdict = "input-error";
        inv.witness = {{"position", e.position()}, {"message", e.what()}};
        code = Exit::input;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        inv.verdict = "input-error";
        inv.witness = {{"message", e.what()}};
        code = Exit::input;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << '\n';
        inv.verdict = "precondition-failed";
        inv.witness = {{"message", e.what()}};
        code = Exit::precondition;
    } catch (const BudgetExhausted& e) {
        err << "budget exhausted: " << e.what() << '\n';
        inv.verdict = "budget-exhausted";
        inv.witness = {{"message", e.what()}};
        code = Exit::exhausted;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    try {
        write_manifest(inv, code, ms);
    } catch (const std::exception& e) {
        err << "warning: manifest not written: " << e.what() << '\n';
    }
    return code;
}

} // namespace prlab::cli
