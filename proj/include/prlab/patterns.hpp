#pragma once

#include "coloring.hpp"
#include "core.hpp"
#include "largeness.hpp"
#include "pattern_ast.hpp"
#include "structure.hpp"
#include "subset.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace prlab {

// A pattern family with its binders expanded at concrete parameter values.
struct CompiledPattern {
    std::string source;
    std::vector<std::string> variables;
    std::vector<GroundTerm> terms;
    std::vector<std::string> term_text;
    PatternConstraints constraints;
    std::map<std::string, std::uint64_t> parameters;

    std::size_t arity() const { return variables.size(); }
};

namespace detail {

inline void binder_symbols(const PatternTerm& t, const std::set<std::string>& binders, std::set<std::string>& out) {
    for (const auto& s : t.amount.symbols)
        if (binders.count(s))
            out.insert(s);
    for (const auto& c : t.children)
        binder_symbols(c, binders, out);
}

inline GroundTerm ground(const PatternTerm& t, const std::vector<std::string>& vars,
                         const std::map<std::string, std::uint64_t>& env) {
    GroundTerm g;
    g.node = t.node;
    if (t.node == PatternTerm::Node::variable) {
        g.var = static_cast<std::uint32_t>(std::find(vars.begin(), vars.end(), t.name) - vars.begin());
        return g;
    }
    if (t.node == PatternTerm::Node::power || t.node == PatternTerm::Node::coeff) {
        g.amount = t.amount.evaluate(env);
        if (g.amount == 0)
            throw InputError("exponents and coefficients must be positive (got 0 in '" + render(t) + "')");
        if (g.amount == 1)
            return ground(t.children.front(), vars, env);
    }
    for (const auto& c : t.children)
        g.children.push_back(ground(c, vars, env));
    return g;
}

inline std::string render_ground(const GroundTerm& t, const std::vector<std::string>& vars) {
    using N = PatternTerm::Node;
    auto wrap = [&](const GroundTerm& c, bool w) { return w ? "(" + render_ground(c, vars) + ")" : render_ground(c, vars); };
    switch (t.node) {
    case N::variable: return vars.at(t.var);
    case N::sum: {
        std::string s;
        for (std::size_t i = 0; i < t.children.size(); ++i)
            s += (i ? "+" : "") + render_ground(t.children[i], vars);
        return s;
    }
    case N::product: {
        std::string s;
        for (std::size_t i = 0; i < t.children.size(); ++i) {
            const auto& c = t.children[i];
            s += (i ? "*" : "") + wrap(c, c.node == N::sum || c.node == N::coeff);
        }
        return s;
    }
    case N::power:
        return wrap(t.children.front(), t.children.front().node != N::variable) + "^" + std::to_string(t.amount);
    case N::coeff: {
        const auto& c = t.children.front();
        return std::to_string(t.amount) + wrap(c, c.node != N::variable && c.node != N::power);
    }
    }
    return "?";
}

inline std::uint32_t max_var(const GroundTerm& t) {
    if (t.node == PatternTerm::Node::variable)
        return t.var;
    std::uint32_t m = 0;
    for (const auto& c : t.children)
        m = std::max(m, max_var(c));
    return m;
}

} // namespace detail

// Instantiates every binder range. Terms that do not mention a binder appear
// once; duplicates after instantiation are dropped.
inline CompiledPattern compile(const PatternFamily& fam, const std::map<std::string, std::uint64_t>& params = {}) {
    CompiledPattern cp;
    cp.source = fam.source;
    cp.variables = fam.variables;
    cp.constraints = fam.constraints;
    for (const auto& p : fam.parameters) {
        auto it = params.find(p);
        if (it == params.end())
            throw InputError("pattern parameter '" + p + "' needs a value");
        cp.parameters[p] = it->second;
    }
    std::set<std::string> binder_names;
    for (const auto& b : fam.binders)
        binder_names.insert(b.index);

    for (const auto& term : fam.terms) {
        std::set<std::string> used;
        detail::binder_symbols(term, binder_names, used);
        std::vector<const Binder*> active;
        for (const auto& b : fam.binders)
            if (used.count(b.index))
                active.push_back(&b);
        std::vector<std::uint64_t> lo, hi;
        for (const auto* b : active) {
            lo.push_back(b->lower);
            hi.push_back(b->upper.evaluate(cp.parameters));
        }
        bool empty = false;
        for (std::size_t i = 0; i < active.size(); ++i)
            empty = empty || hi[i] < lo[i];
        if (empty)
            continue;
        std::vector<std::uint64_t> cur = lo;
        while (true) {
            auto env = cp.parameters;
            for (std::size_t i = 0; i < active.size(); ++i)
                env[active[i]->index] = cur[i];
            auto g = detail::ground(term, cp.variables, env);
            if (std::find(cp.terms.begin(), cp.terms.end(), g) == cp.terms.end()) {
                cp.term_text.push_back(detail::render_ground(g, cp.variables));
                cp.terms.push_back(std::move(g));
            }
            std::size_t i = active.size();
            while (i > 0 && cur[i - 1] == hi[i - 1]) {
                cur[i - 1] = lo[i - 1];
                --i;
            }
            if (i == 0)
                break;
            ++cur[i - 1];
        }
    }
    if (cp.terms.empty())
        throw InputError("pattern instantiates to no terms");
    return cp;
}

inline CompiledPattern compile_pattern(const std::string& text, const std::map<std::string, std::uint64_t>& params = {},
                                       PatternConstraints constraints = {}) {
    std::set<std::string> names;
    for (const auto& [k, v] : params)
        names.insert(k);
    auto fam = parse_pattern(text, names);
    fam.constraints = constraints;
    return compile(fam, params);
}

// Evaluates with coeff(n, t) = t added n times and power(t, n) = t multiplied
// n times, folding left to right. Undefined propagates.
inline Element eval_term(const GroundStructure& g, const GroundTerm& t, std::span<const Element> assignment) {
    using N = PatternTerm::Node;
    switch (t.node) {
    case N::variable: return assignment[t.var];
    case N::sum:
    case N::product: {
        const Op op = t.node == N::sum ? Op::add : Op::mul;
        Element acc = eval_term(g, t.children.front(), assignment);
        for (std::size_t i = 1; i < t.children.size() && acc != kUndefined; ++i)
            acc = g.apply(op, acc, eval_term(g, t.children[i], assignment));
        return acc;
    }
    case N::power:
    case N::coeff: {
        const Op op = t.node == N::power ? Op::mul : Op::add;
        const Element base = eval_term(g, t.children.front(), assignment);
        Element acc = base;
        for (std::uint64_t i = 1; i < t.amount && acc != kUndefined; ++i)
            acc = g.apply(op, acc, base);
        return acc;
    }
    }
    return kUndefined;
}

struct PatternInstance {
    std::vector<Element> assignment; // per variable
    std::vector<Element> values;     // per compiled term
    std::uint32_t color = 0;

    friend bool operator==(const PatternInstance&, const PatternInstance&) = default;
};

namespace detail {

// Depth-first scan over assignments in canonical (lexicographic) order with
// the outermost variable restricted to [outer_lo, outer_hi). Terms are
// evaluated as soon as their last variable is bound. With a coloring, only
// monochromatic assignments reach `visit`; `visit` returns true to stop.
template <class Visit>
bool scan_assignments(const GroundStructure& g, const CompiledPattern& cp, const Coloring* coloring, Element outer_lo,
                      Element outer_hi, Visit&& visit) {
    const std::size_t vars = cp.arity();
    const auto n = static_cast<Element>(g.size());
    std::vector<std::vector<std::size_t>> due(vars);
    for (std::size_t t = 0; t < cp.terms.size(); ++t)
        due[detail::max_var(cp.terms[t])].push_back(t);

    std::vector<Element> assignment(vars, 0);
    std::vector<Element> values(cp.terms.size(), kUndefined);
    std::vector<std::uint32_t> color_at(vars + 1, 0);
    std::vector<bool> color_set(vars + 1, false);
    const Element lo_bound = cp.constraints.min_element;

    std::function<bool(std::size_t)> rec = [&](std::size_t d) -> bool {
        if (d == vars)
            return visit(assignment, values, color_at[d]);
        const Element lo = std::max<Element>(d == 0 ? outer_lo : 0, lo_bound);
        const Element hi = d == 0 ? std::min(outer_hi, n) : n;
        for (Element v = lo; v < hi; ++v) {
            if (cp.constraints.distinct &&
                std::find(assignment.begin(), assignment.begin() + static_cast<std::ptrdiff_t>(d), v) !=
                    assignment.begin() + static_cast<std::ptrdiff_t>(d))
                continue;
            assignment[d] = v;
            bool have = color_set[d];
            std::uint32_t col = color_at[d];
            bool ok = true;
            bool out_of_window = false;
            for (std::size_t t : due[d]) {
                const Element val = eval_term(g, cp.terms[t], assignment);
                values[t] = val;
                if (val == kUndefined) {
                    ok = false;
                    out_of_window = true;
                    break;
                }
                if (coloring) {
                    const auto c = coloring->colors[val];
                    if (!have) {
                        have = true;
                        col = c;
                    } else if (c != col) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) {
                if (out_of_window && g.grows())
                    break;
                continue;
            }
            color_set[d + 1] = have;
            color_at[d + 1] = col;
            if (rec(d + 1))
                return true;
        }
        return false;
    };
    return rec(0);
}

} // namespace detail

// First monochromatic instance in canonical assignment order, or nullopt when
// the window holds none. `parallel_width` > 1 splits the outermost variable
// range; the reported instance is the canonical least regardless.
inline std::optional<PatternInstance> find_monochromatic(const GroundStructure& g, const Coloring& coloring,
                                                        const CompiledPattern& cp, std::size_t parallel_width = 1) {
    if (coloring.size() != g.size())
        throw InputError("coloring does not match the carrier");
    const auto n = static_cast<Element>(g.size());
    auto run = [&](Element lo, Element hi) {
        std::optional<PatternInstance> found;
        detail::scan_assignments(g, cp, &coloring, lo, hi,
                                 [&](const std::vector<Element>& a, const std::vector<Element>& v, std::uint32_t c) {
                                     found = PatternInstance{a, v, c};
                                     return true;
                                 });
        return found;
    };
    if (parallel_width <= 1 || n < 2 * parallel_width)
        return run(0, n);
    std::vector<std::optional<PatternInstance>> parts(parallel_width);
    std::vector<std::thread> workers;
    const Element chunk = (n + static_cast<Element>(parallel_width) - 1) / static_cast<Element>(parallel_width);
    for (std::size_t w = 0; w < parallel_width; ++w) {
        const Element lo = static_cast<Element>(w) * chunk;
        const Element hi = std::min<Element>(n, lo + chunk);
        workers.emplace_back([&, w, lo, hi] { parts[w] = run(lo, hi); });
    }
    for (auto& t : workers)
        t.join();
    for (auto& p : parts)
        if (p)
            return p;
    return std::nullopt;
}

struct TermDetail {
    std::string term;
    Element value = kUndefined;
    std::optional<std::uint32_t> color;
};

struct InstanceVerification {
    bool ok = false;
    std::string reason;
    std::vector<TermDetail> terms;
};

// Recomputes every term from scratch: all defined, one color, constraints met.
inline InstanceVerification verify_instance(const GroundStructure& g, const Coloring& coloring, const CompiledPattern& cp,
                                            std::span<const Element> assignment) {
    InstanceVerification r;
    if (assignment.size() != cp.arity()) {
        r.reason = "assignment covers " + std::to_string(assignment.size()) + " of " +
                   std::to_string(cp.arity()) + " variables";
        return r;
    }
    for (Element e : assignment)
        if (e >= g.size()) {
            r.reason = "assigned element outside carrier";
            return r;
        }
    std::optional<std::uint32_t> color;
    bool mixed = false, undefined = false;
    for (std::size_t t = 0; t < cp.terms.size(); ++t) {
        TermDetail d{cp.term_text[t], eval_term(g, cp.terms[t], assignment), std::nullopt};
        if (d.value == kUndefined) {
            undefined = true;
        } else {
            d.color = coloring.colors.at(d.value);
            if (!color)
                color = d.color;
            else if (*color != *d.color)
                mixed = true;
        }
        r.terms.push_back(std::move(d));
    }
    if (cp.constraints.distinct)
        for (std::size_t i = 0; i < assignment.size(); ++i)
            for (std::size_t j = i + 1; j < assignment.size(); ++j)
                if (assignment[i] == assignment[j]) {
                    r.reason = "variables " + cp.variables[i] + " and " + cp.variables[j] + " coincide";
                    return r;
                }
    for (Element e : assignment)
        if (e < cp.constraints.min_element) {
            r.reason = "variable below the minimum element";
            return r;
        }
    if (undefined) {
        r.reason = "a term is undefined in this window";
        return r;
    }
    if (mixed) {
        r.reason = "term values carry different colors";
        return r;
    }
    r.ok = true;
    return r;
}

// Ordered elementwise product FS(B_1)·FS(B_2)·…·FS(B_m).
inline ProductSet product_of_fs_blocks(const GroundStructure& g, const std::vector<std::vector<Element>>& blocks) {
    if (blocks.empty())
        throw PreconditionError("product of FS blocks needs at least one block");
    auto first = finite_sums(g, blocks.front());
    ProductSet acc = first;
    for (std::size_t b = 1; b < blocks.size(); ++b) {
        auto fs = finite_sums(g, blocks[b]);
        acc.undefined_subsets = detail::sat_add(acc.undefined_subsets, fs.undefined_subsets);
        SubsetMask next(g.size());
        const auto rhs = fs.values.elements();
        for (Element p : acc.values.elements())
            for (Element q : rhs) {
                const Element v = g.mul(p, q);
                if (v == kUndefined)
                    acc.undefined_subsets = detail::sat_add(acc.undefined_subsets, 1);
                else
                    next.insert(v);
            }
        acc.values = std::move(next);
    }
    return acc;
}

enum class SearchStatus : std::uint8_t { found, exhausted, budget };

inline std::string_view to_string(SearchStatus s) {
    switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::exhausted: return "exhausted";
    case SearchStatus::budget: return "budget";
    }
    return "?";
}

struct KeyLemmaResult {
    SearchStatus status = SearchStatus::exhausted;
    std::vector<Element> f0;
    std::vector<Element> f1;
    std::uint64_t nodes = 0;
};

namespace detail {

// Nondecreasing sequences of `size` members of `A` whose FS stays inside A,
// in lexicographic order. `visit(seq, fs_values)` returns true to stop.
template <class Visit>
bool for_each_fs_multiset(const GroundStructure& g, const SubsetMask& A, std::size_t size, std::uint64_t& nodes,
                          std::uint64_t budget, bool& capped, Visit&& visit) {
    const auto members = A.elements();
    std::vector<Element> seq;
    std::function<bool(const std::vector<Element>&, std::size_t)> rec = [&](const std::vector<Element>& fs,
                                                                          std::size_t start) -> bool {
        if (seq.size() == size)
            return visit(seq, fs);
        for (std::size_t i = start; i < members.size(); ++i) {
            if (++nodes > budget) {
                capped = true;
                return true;
            }
            const Element a = members[i];
            std::vector<Element> next = fs;
            bool ok = true;
            for (Element p : fs) {
                const Element v = g.add(p, a);
                if (v == kUndefined || !A.contains(v)) {
                    ok = false;
                    break;
                }
                next.push_back(v);
            }
            if (!ok)
                continue;
            next.push_back(a);
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            seq.push_back(a);
            if (rec(next, i))
                return true;
            seq.pop_back();
        }
        return false;
    };
    return rec({}, 0);
}

} // namespace detail

// Multisets F0, F1 with FS(F0) ⊆ C0, FS(F1) ⊆ C1 and FS(F0)·FS(F1) ⊆ C0, the
// two-block shape of the key lemma. Canonical order: F0 first, then F1.
inline KeyLemmaResult key_lemma_witness_search(const GroundStructure& g, const Coloring& coloring, std::size_t size0,
                                               std::size_t size1, std::uint64_t budget = 10'000'000) {
    if (coloring.k != 2)
        throw PreconditionError("key-lemma search needs a 2-coloring");
    if (coloring.size() != g.size())
        throw InputError("coloring does not match the carrier");
    if (size0 == 0 || size1 == 0)
        throw PreconditionError("block sizes must be at least 1");
    const auto c0 = coloring.color_class(0);
    const auto c1 = coloring.color_class(1);
    KeyLemmaResult res;
    bool capped = false;
    detail::for_each_fs_multiset(
        g, c0, size0, res.nodes, budget, capped, [&](const std::vector<Element>& f0, const std::vector<Element>& fs0) {
            return detail::for_each_fs_multiset(
                g, c1, size1, res.nodes, budget, capped,
                [&](const std::vector<Element>& f1, const std::vector<Element>& fs1) {
                    for (Element p : fs0)
                        for (Element q : fs1) {
                            ++res.nodes;
                            const Element v = g.mul(p, q);
                            if (v == kUndefined || !c0.contains(v))
                                return false;
                        }
                    res.f0 = f0;
                    res.f1 = f1;
                    res.status = SearchStatus::found;
                    return true;
                });
        });
    if (res.status != SearchStatus::found)
        res.status = capped ? SearchStatus::budget : SearchStatus::exhausted;
    if (capped && res.status == SearchStatus::found && res.f0.empty())
        res.status = SearchStatus::budget;
    return res;
}

} // namespace prlab
