#pragma once

#include "algebra.hpp"
#include "coloring.hpp"
#include "core.hpp"
#include "largeness.hpp"
#include "structure.hpp"
#include "structure_io.hpp"
#include "subset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace prlab {

// ---------------------------------------------------------------------------
// oracles and traces

// Answers "give x with F∘x ⊆ A"; nullopt means the oracle gave up.
struct ThickOracle {
    std::string name;
    std::function<std::optional<Element>(std::span<const Element>)> query;
};

// Least x in the carrier with F∘x ⊆ A.
inline ThickOracle brute_force_thick_oracle(const GroundStructure& g, SubsetMask A, Op op) {
    return {"brute-force", [&g, A = std::move(A), op](std::span<const Element> family) -> std::optional<Element> {
                for (Element x = 0; x < g.size(); ++x)
                    if (detail::translates_into(g, family, x, A, op))
                        return x;
                return std::nullopt;
            }};
}

inline ThickOracle make_oracle(const std::string& name, const GroundStructure& g, const SubsetMask& A, Op op) {
    if (name == "brute-force")
        return brute_force_thick_oracle(g, A, op);
    throw InputError("unknown oracle '" + name + "'");
}

// Append-only text log. Layout: header lines ("key value..."), then
// "step ..." lines, then one "outcome ..." line.
struct ConstructionTrace {
    std::vector<std::string> header;
    std::vector<std::string> steps;
    std::string outcome;

    void step(const std::string& s) { steps.push_back(s); }

    std::string text() const {
        std::string out;
        for (const auto& h : header)
            out += h + '\n';
        for (const auto& s : steps)
            out += "step " + s + '\n';
        out += "outcome " + outcome + '\n';
        return out;
    }

    static ConstructionTrace parse(const std::string& text) {
        ConstructionTrace t;
        std::istringstream in(text);
        bool seen_outcome = false;
        for (std::string line; std::getline(in, line);) {
            if (line.empty())
                continue;
            if (seen_outcome)
                throw InputError("trace has content after its outcome line");
            if (line.rfind("step ", 0) == 0) {
                t.steps.push_back(line.substr(5));
            } else if (line.rfind("outcome ", 0) == 0) {
                t.outcome = line.substr(8);
                seen_outcome = true;
            } else {
                if (!t.steps.empty())
                    throw InputError("trace header line after steps: '" + line + "'");
                t.header.push_back(line);
            }
        }
        if (!seen_outcome)
            throw InputError("trace has no outcome line");
        return t;
    }

    // Values of header lines starting with `key `.
    std::vector<std::string> values(const std::string& key) const {
        std::vector<std::string> out;
        for (const auto& h : header)
            if (h.rfind(key + " ", 0) == 0)
                out.push_back(h.substr(key.size() + 1));
            else if (h == key)
                out.emplace_back();
        return out;
    }

    std::string value(const std::string& key) const {
        auto v = values(key);
        if (v.size() != 1)
            throw InputError("trace header needs exactly one '" + key + "' line");
        return v.front();
    }
};

enum class ConstructStatus : std::uint8_t { success, precondition_failed, exhausted, no_node_verified, verification_failed };

inline std::string_view to_string(ConstructStatus s) {
    switch (s) {
    case ConstructStatus::success: return "success";
    case ConstructStatus::precondition_failed: return "precondition-failed";
    case ConstructStatus::exhausted: return "exhausted";
    case ConstructStatus::no_node_verified: return "no-node-verified";
    case ConstructStatus::verification_failed: return "verification-failed";
    }
    return "?";
}

namespace detail {

inline std::string join_labels(const GroundStructure& g, std::span<const Element> xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += (i ? "," : "") + g.label(xs[i]);
    return s + "]";
}

inline std::string join_numbers(std::span<const Element> xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += (i ? " " : "") + std::to_string(xs[i]);
    return s;
}

inline void structure_header(ConstructionTrace& t, const GroundStructure& g) {
    std::istringstream in(to_structure_text(g));
    for (std::string line; std::getline(in, line);)
        t.header.push_back("structure " + line);
}

inline GroundStructure structure_from_header(const ConstructionTrace& t) {
    std::string text;
    for (const auto& l : t.values("structure"))
        text += l + '\n';
    if (text.empty())
        throw InputError("trace header has no structure");
    return parse_structure(text);
}

// a added to itself c times (c >= 1).
inline Element times(const GroundStructure& g, std::uint64_t c, Element a) {
    Element acc = a;
    for (std::uint64_t i = 1; i < c && acc != kUndefined; ++i)
        acc = g.add(acc, a);
    return acc;
}

// a multiplied by itself j times (j >= 1).
inline Element power(const GroundStructure& g, Element a, std::uint64_t j) {
    Element acc = a;
    for (std::uint64_t i = 1; i < j && acc != kUndefined; ++i)
        acc = g.mul(acc, a);
    return acc;
}

inline std::optional<Element> ask(const GroundStructure& g, const SubsetMask& A, Op op, const ThickOracle& oracle,
                                  std::span<const Element> family, std::string& problem) {
    auto x = oracle.query(family);
    if (!x) {
        problem = "oracle found no translate in the window";
        return std::nullopt;
    }
    if (*x >= g.size() || !translates_into(g, family, *x, A, op)) {
        problem = "oracle answer failed re-verification";
        return std::nullopt;
    }
    return x;
}

} // namespace detail

// ---------------------------------------------------------------------------
// thick and syndetic => {x_i, x_1⋯x_n, Σ a_i x_i}

struct ThickSyndeticResult {
    ConstructStatus status = ConstructStatus::precondition_failed;
    std::vector<Element> xs;
    std::vector<Element> cover;
    std::optional<Element> translate;
    std::uint64_t grid_checked = 0;
    std::string reason;
    ConstructionTrace trace;
};

struct GridCheck {
    bool ok = true;
    std::uint64_t checked = 0;
    std::string failure;
};

// Every Σ a_i x_i with 0 <= a_i <= k (not all zero), the product x_1⋯x_n,
// and each x_i must lie in A.
inline GridCheck verify_sum_product_grid(const GroundStructure& g, const SubsetMask& A, std::span<const Element> xs,
                                         std::uint64_t k) {
    GridCheck r;
    const std::size_t n = xs.size();
    auto inside = [&](Element v) { return v != kUndefined && A.contains(v); };
    for (std::size_t i = 0; i < n; ++i) {
        ++r.checked;
        if (!inside(xs[i])) {
            r.ok = false;
            r.failure = "x" + std::to_string(i + 1) + " not in A";
            return r;
        }
    }
    Element prod = xs.empty() ? kUndefined : xs[0];
    for (std::size_t i = 1; i < n; ++i)
        prod = g.mul(prod, xs[i]);
    ++r.checked;
    if (!inside(prod)) {
        r.ok = false;
        r.failure = "product not in A";
        return r;
    }
    std::vector<std::uint64_t> a(n, 0);
    while (true) {
        std::size_t i = n;
        while (i > 0 && a[i - 1] == k) {
            a[i - 1] = 0;
            --i;
        }
        if (i == 0)
            break;
        ++a[i - 1];
        Element s = kUndefined;
        for (std::size_t j = 0; j < n; ++j) {
            if (a[j] == 0)
                continue;
            const Element term = detail::times(g, a[j], xs[j]);
            s = s == kUndefined ? term : g.add(s, term);
            if (s == kUndefined || term == kUndefined) {
                s = kUndefined;
                break;
            }
        }
        ++r.checked;
        if (!inside(s)) {
            r.ok = false;
            r.failure = "combination (";
            for (std::size_t j = 0; j < n; ++j)
                r.failure += (j ? "," : "") + std::to_string(a[j]);
            r.failure += ") not in A";
            return r;
        }
    }
    return r;
}

// Follows the thick-and-syndetic argument: syndetic cover s_1..s_m, padding
// s_{m+1}..s_{m+n-1} (least element), F = FS of k copies of each s_i, an
// oracle translate x with F·x ⊆ A, then x_1 = s_i x, x_j = s_{m+j-1} x.
inline ThickSyndeticResult thick_syndetic_constructor(const GroundStructure& g, const SubsetMask& A, std::size_t n,
                                                      std::uint64_t k, const ThickOracle& oracle,
                                                      std::size_t max_cover = 8) {
    if (!g.has(Op::add) || !g.has(Op::mul))
        throw PreconditionError("thick-syndetic construction needs a semiring");
    if (A.size() != g.size())
        throw InputError("subset does not match the carrier");
    if (n == 0 || k == 0)
        throw PreconditionError("n and k must be at least 1");
    if (std::pow(static_cast<double>(k + 1), static_cast<double>(n)) > 1e8)
        throw PreconditionError("(k+1)^n grid is too large to verify");

    ThickSyndeticResult res;
    auto& t = res.trace;
    t.header.push_back("executor thick-syndetic");
    detail::structure_header(t, g);
    t.header.push_back("subset " + detail::join_numbers(A.elements()));
    t.header.push_back("param n " + std::to_string(n));
    t.header.push_back("param k " + std::to_string(k));
    t.header.push_back("param max-cover " + std::to_string(max_cover));
    t.header.push_back("oracle " + oracle.name);

    auto finish = [&](ConstructStatus s, const std::string& why) {
        res.status = s;
        res.reason = why;
        t.outcome = std::string(to_string(s)) + (why.empty() ? "" : " " + why);
        return res;
    };

    const auto thick = is_thick(g, A, Op::mul);
    t.step("check multiplicative-thick " + std::string(to_string(thick.verdict)));
    if (thick.verdict == Verdict::no)
        return finish(ConstructStatus::precondition_failed, "A is not multiplicatively thick");
    const auto synd = is_syndetic(g, A, Op::mul, max_cover);
    t.step("check multiplicative-syndetic " + std::string(to_string(synd.verdict)));
    if (synd.verdict != Verdict::yes)
        return finish(ConstructStatus::precondition_failed, "cover not found");
    res.cover = synd.witness;
    const std::size_t m = res.cover.size();
    t.step("cover m=" + std::to_string(m) + " s=" + detail::join_labels(g, res.cover));

    std::vector<Element> s = res.cover;
    for (std::size_t j = 1; j < n; ++j)
        s.push_back(0);
    t.step("padding " + detail::join_labels(g, std::span<const Element>(s).subspan(m)));

    std::vector<Element> copies;
    for (Element e : s)
        for (std::uint64_t c = 0; c < k; ++c)
            copies.push_back(e);
    const auto fs = finite_sums(g, copies);
    const auto family = fs.values.elements();
    t.step("family |F|=" + std::to_string(family.size()) + " undefined-subsets=" +
           std::to_string(fs.undefined_subsets));

    std::string problem;
    const auto x = detail::ask(g, A, Op::mul, oracle, family, problem);
    if (!x)
        return finish(ConstructStatus::exhausted, problem);
    res.translate = x;
    t.step("oracle x=" + g.label(*x));

    Element w = *x;
    for (std::size_t j = m; j < s.size(); ++j)
        w = g.mul(g.mul(w, s[j]), *x);
    if (w == kUndefined)
        return finish(ConstructStatus::exhausted, "x s_{m+1} x ... leaves the window");
    t.step("w=" + g.label(w));

    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < m && !pick; ++i) {
        const Element v = g.mul(res.cover[i], w);
        if (v != kUndefined && A.contains(v))
            pick = i;
    }
    if (!pick)
        return finish(ConstructStatus::exhausted, "no cover element sends w into A");
    t.step("pick i=" + std::to_string(*pick + 1) + " s_i=" + g.label(res.cover[*pick]));

    res.xs.push_back(g.mul(res.cover[*pick], *x));
    for (std::size_t j = 1; j < n; ++j)
        res.xs.push_back(g.mul(s[m + j - 1], *x));
    t.step("result " + detail::join_labels(g, res.xs));

    const auto grid = verify_sum_product_grid(g, A, res.xs, k);
    res.grid_checked = grid.checked;
    t.step("verify checked=" + std::to_string(grid.checked) + (grid.ok ? " ok" : " failed " + grid.failure));
    if (!grid.ok)
        return finish(ConstructStatus::verification_failed, grid.failure);
    return finish(ConstructStatus::success, "x=" + detail::join_labels(g, res.xs));
}

// ---------------------------------------------------------------------------
// multiplicatively thick colour class => monochromatic {x, y, kx+y, x^j y}

struct BowenResult {
    ConstructStatus status = ConstructStatus::exhausted;
    std::uint32_t color = 0;
    Element x = kUndefined;
    Element y = kUndefined;
    std::string node;
    std::vector<Element> a; // a_1.. as obtained
    std::string reason;
    ConstructionTrace trace;
};

// {x, y, kx+y, x^j y : 1 <= j <= l}; nullopt if any value leaves the window.
inline std::optional<std::vector<Element>> bowen_pattern_values(const GroundStructure& g, Element x, Element y,
                                                                std::uint64_t k, std::uint64_t l) {
    if (x == kUndefined || y == kUndefined)
        return std::nullopt;
    std::vector<Element> v{x, y, g.add(detail::times(g, k, x), y)};
    Element xp = x;
    for (std::uint64_t j = 1; j <= l; ++j) {
        if (j > 1)
            xp = g.mul(xp, x);
        v.push_back(xp == kUndefined ? kUndefined : g.mul(xp, y));
    }
    if (std::find(v.begin(), v.end(), kUndefined) != v.end())
        return std::nullopt;
    return v;
}

// Runs the decision tree of the thick-colour-class argument with lazily
// materialised oracle families. a_1..a_5 are fetched just before the first
// node that needs them; each family holds only the words the tree later
// multiplies by that a_i. Returns at the first node whose pattern verifies.
inline BowenResult bowen_thick_tree(const GroundStructure& g, const Coloring& coloring, std::uint64_t k,
                                    std::uint64_t l, const ThickOracle& oracle) {
    if (coloring.k != 2)
        throw PreconditionError("the tree needs a 2-coloring");
    if (coloring.size() != g.size())
        throw InputError("coloring does not match the carrier");
    if (!g.has(Op::add) || !g.has(Op::mul))
        throw PreconditionError("the tree needs a semiring");
    if (k == 0 || l == 0)
        throw PreconditionError("k and l must be at least 1");
    const auto one = g.identity(Op::mul);
    if (!one)
        throw PreconditionError("the tree needs a multiplicative identity (the empty word)");

    BowenResult res;
    auto& t = res.trace;
    t.header.push_back("executor bowen-tree");
    detail::structure_header(t, g);
    t.header.push_back("coloring " + detail::join_numbers(coloring.colors));
    t.header.push_back("param k " + std::to_string(k));
    t.header.push_back("param l " + std::to_string(l));
    t.header.push_back("oracle " + oracle.name);

    const SubsetMask c0 = coloring.color_class(0);
    auto finish = [&](ConstructStatus s, const std::string& why) {
        res.status = s;
        res.reason = why;
        t.outcome = std::string(to_string(s)) + (why.empty() ? "" : " " + why);
        return res;
    };
    auto mul = [&](Element a, Element b) { return a == kUndefined || b == kUndefined ? kUndefined : g.mul(a, b); };
    auto add = [&](Element a, Element b) { return a == kUndefined || b == kUndefined ? kUndefined : g.add(a, b); };
    auto times = [&](std::uint64_t c, Element a) { return a == kUndefined ? kUndefined : detail::times(g, c, a); };
    auto pw = [&](Element a, std::uint64_t j) { return a == kUndefined ? kUndefined : detail::power(g, a, j); };
    const std::string kl = std::to_string(k);

    using Family = std::vector<std::pair<std::string, Element>>;
    std::string exhausted;
    auto fetch = [&](const std::string& name, const Family& fam) -> Element {
        std::vector<Element> elems;
        for (const auto& [expr, v] : fam) {
            if (v == kUndefined) {
                exhausted = "family for " + name + " needs " + expr + " outside the window";
                return kUndefined;
            }
            elems.push_back(v);
        }
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        std::string problem;
        const auto x = detail::ask(g, c0, Op::mul, oracle, elems, problem);
        if (!x) {
            exhausted = name + ": " + problem;
            return kUndefined;
        }
        t.step("oracle " + name + " family=" + detail::join_labels(g, elems) + " answer=" + g.label(*x));
        res.a.push_back(*x);
        return *x;
    };
    bool undefined_node = false;
    auto node = [&](const std::string& id, Element x, Element y) {
        const auto vals = bowen_pattern_values(g, x, y, k, l);
        if (!vals) {
            undefined_node = true;
            t.step("node " + id + " undefined");
            return false;
        }
        const std::uint32_t c = coloring.colors[vals->front()];
        const bool mono = std::all_of(vals->begin(), vals->end(), [&](Element v) { return coloring.colors[v] == c; });
        t.step("node " + id + " x=" + g.label(x) + " y=" + g.label(y) + " values=" + detail::join_labels(g, *vals) +
               (mono ? " verified color=" + std::to_string(c) : " mixed"));
        if (mono) {
            res.color = c;
            res.x = x;
            res.y = y;
            res.node = id;
        }
        return mono;
    };
    auto success = [&] {
        return finish(ConstructStatus::success, "node=" + res.node + " color=" + std::to_string(res.color) +
                                                    " x=" + g.label(res.x) + " y=" + g.label(res.y));
    };

    const Element k1 = times(k, *one);
    const Element a1 = fetch("a1", {{"1", *one}, {kl, k1}});
    if (a1 == kUndefined)
        return finish(ConstructStatus::exhausted, exhausted);
    Family f2{{kl, k1}};
    for (std::uint64_t j = 1; j <= l; ++j)
        f2.push_back({"(k a1)^" + std::to_string(j) + " k", mul(pw(times(k, a1), j), k1)});
    const Element a2 = fetch("a2", f2);
    if (a2 == kUndefined)
        return finish(ConstructStatus::exhausted, exhausted);
    if (node("1", times(k, a1), times(k, a2)))
        return success();

    const Element u = add(times(k, times(k, a1)), times(k, a2)); // k^2 a1 + k a2
    Family f3{{"1", *one}};
    for (std::uint64_t i = 1; i <= l; ++i)
        f3.push_back({"u^" + std::to_string(i), pw(u, i)});
    const Element a3 = fetch("a3", f3);
    if (a3 == kUndefined)
        return finish(ConstructStatus::exhausted, exhausted);
    const Element q = add(u, a3); // k^2 a1 + k a2 + a3
    Family f4{{"1", *one}};
    for (std::uint64_t j = 1; j <= l; ++j)
        f4.push_back({"a3^" + std::to_string(j), pw(a3, j)});
    for (std::uint64_t i = 1; i <= l; ++i) {
        const Element ui = pw(u, i);
        f4.push_back({"u^" + std::to_string(i), ui});
        for (std::uint64_t j = 1; j <= l; ++j)
            f4.push_back({"(u^" + std::to_string(i) + " a3)^" + std::to_string(j) + " u^" + std::to_string(i),
                          mul(pw(mul(ui, a3), j), ui)});
        f4.push_back({"q^" + std::to_string(i), pw(q, i)});
    }
    const Element a4 = fetch("a4", f4);
    if (a4 == kUndefined)
        return finish(ConstructStatus::exhausted, exhausted);
    if (node("2", a3, a4))
        return success();

    const Element v = add(times(k, a3), a4); // k a3 + a4
    const Element p = add(times(k, u), v);   // k^3 a1 + k^2 a2 + k a3 + a4
    Family f5{{"1", *one}};
    for (std::uint64_t j = 1; j <= l; ++j)
        f5.push_back({"a4^" + std::to_string(j), pw(a4, j)});
    for (std::uint64_t i = 1; i <= l; ++i) {
        const Element qi = pw(q, i);
        f5.push_back({"p^" + std::to_string(i), pw(p, i)});
        f5.push_back({"q^" + std::to_string(i), qi});
        for (std::uint64_t j = 1; j <= l; ++j)
            f5.push_back({"(q^" + std::to_string(i) + " a4)^" + std::to_string(j) + " q^" + std::to_string(i),
                          mul(pw(mul(qi, a4), j), qi)});
    }
    const Element a5 = fetch("a5", f5);
    if (a5 == kUndefined)
        return finish(ConstructStatus::exhausted, exhausted);
    if (node("3", a4, a5))
        return success();

    for (std::uint64_t i = 1; i <= l; ++i) {
        const Element ui = pw(u, i);
        if (node("4." + std::to_string(i), mul(ui, a3), mul(ui, a4)))
            return success();
    }
    if (node("5", u, v))
        return success();
    if (node("6", q, a4))
        return success();
    if (node("7", p, a5))
        return success();
    const Element w = add(times(k, a4), a5); // k a4 + a5
    if (node("8", q, w))
        return success();
    for (std::uint64_t i = 1; i <= l; ++i) {
        const Element qi = pw(q, i);
        if (node("9." + std::to_string(i), mul(qi, a4), mul(qi, a5)))
            return success();
    }
    if (undefined_node)
        return finish(ConstructStatus::exhausted, "a tree node left the window");
    return finish(ConstructStatus::no_node_verified, "every node mixed colors");
}

// ---------------------------------------------------------------------------
// replay

struct ReplayResult {
    bool identical = false;
    std::string executor;
    std::string reproduced;
    std::size_t first_difference = 0; // 1-based line, 0 when identical
};

namespace detail {

inline std::uint64_t header_param(const ConstructionTrace& t, const std::string& name) {
    for (const auto& p : t.values("param")) {
        auto parts = split_ws(p);
        if (parts.size() == 2 && parts[0] == name)
            return parse_uint(parts[1], "trace parameter " + name);
    }
    throw InputError("trace header lacks parameter '" + name + "'");
}

} // namespace detail

// Re-executes the recorded run from its header and compares the full text.
inline ReplayResult replay_trace(const std::string& text) {
    const auto t = ConstructionTrace::parse(text);
    ReplayResult r;
    r.executor = t.value("executor");
    const auto g = detail::structure_from_header(t);
    const std::string oracle_name = t.value("oracle");
    if (r.executor == "bowen-tree") {
        const auto coloring = parse_coloring(t.value("coloring"), g.size(), 2);
        const auto oracle = make_oracle(oracle_name, g, coloring.color_class(0), Op::mul);
        r.reproduced = bowen_thick_tree(g, coloring, detail::header_param(t, "k"), detail::header_param(t, "l"), oracle)
                           .trace.text();
    } else if (r.executor == "thick-syndetic") {
        const auto A = parse_subset(t.value("subset"), g.size());
        const auto oracle = make_oracle(oracle_name, g, A, Op::mul);
        r.reproduced = thick_syndetic_constructor(g, A, detail::header_param(t, "n"), detail::header_param(t, "k"),
                                                  oracle, detail::header_param(t, "max-cover"))
                           .trace.text();
    } else {
        throw InputError("unknown executor '" + r.executor + "'");
    }
    const std::string original = t.text();
    r.identical = original == r.reproduced;
    if (!r.identical) {
        std::istringstream a(original), b(r.reproduced);
        std::string la, lb;
        std::size_t line = 0;
        while (true) {
            ++line;
            const bool ga = static_cast<bool>(std::getline(a, la));
            const bool gb = static_cast<bool>(std::getline(b, lb));
            if (!ga || !gb || la != lb)
                break;
        }
        r.first_difference = line;
    }
    return r;
}

// ---------------------------------------------------------------------------
// finite checks of the D-set theorems

struct SzemerediResult {
    bool holds = false;
    std::optional<std::vector<std::uint32_t>> failing_partition; // cell of each distinct H element
    std::vector<Element> cells_of;                               // the distinct H elements, sorted
    std::uint64_t partitions_checked = 0;
};

// For every k-partition of H: some d in G and cell C_j with ∩_i φ_i(d)⁻¹C_j ≠ ∅
// (preimages taken in R under `op`).
inline SzemerediResult finite_szemeredi_check(const GroundStructure& gs, const GroundStructure& gr,
                                              std::span<const Element> G, std::span<const Element> H,
                                              const std::vector<Homomorphism>& homs, std::uint32_t k,
                                              Op op = Op::mul, std::uint64_t budget = 1'000'000) {
    if (k == 0)
        throw PreconditionError("k must be at least 1");
    for (const auto& h : homs)
        if (h.map.size() != gs.size())
            throw InputError("homomorphism length does not match the source carrier");
    for (Element d : G)
        if (d >= gs.size())
            throw InputError("G element outside the source carrier");
    SzemerediResult res;
    for (Element h : H) {
        if (h >= gr.size())
            throw InputError("H element outside the target carrier");
        res.cells_of.push_back(h);
    }
    std::sort(res.cells_of.begin(), res.cells_of.end());
    res.cells_of.erase(std::unique(res.cells_of.begin(), res.cells_of.end()), res.cells_of.end());
    const std::size_t m = res.cells_of.size();
    const double total = std::pow(static_cast<double>(k), static_cast<double>(m));
    if (total > static_cast<double>(budget))
        throw BudgetExhausted("k^|H| = " + std::to_string(static_cast<std::uint64_t>(total)) + " partitions exceed budget");

    std::vector<std::uint32_t> cell(m, 0);
    while (true) {
        ++res.partitions_checked;
        bool good = false;
        for (std::uint32_t j = 0; j < k && !good; ++j) {
            SubsetMask C(gr.size());
            for (std::size_t i = 0; i < m; ++i)
                if (cell[i] == j)
                    C.insert(res.cells_of[i]);
            if (C.none())
                continue;
            for (Element d : G) {
                SubsetMask I(gr.size(), true);
                for (const auto& h : homs)
                    I &= preimage(gr, h.map[d], C, op);
                if (!I.none()) {
                    good = true;
                    break;
                }
            }
        }
        if (!good) {
            res.holds = false;
            res.failing_partition = cell;
            return res;
        }
        std::size_t i = m;
        while (i > 0 && cell[i - 1] + 1 == k) {
            cell[i - 1] = 0;
            --i;
        }
        if (i == 0)
            break;
        ++cell[i - 1];
    }
    res.holds = true;
    return res;
}

struct TWitnessResult {
    bool found = false;
    Element t = kUndefined;
    Element d = kUndefined;
    std::uint64_t pairs_checked = 0;
    std::vector<std::string> unchecked; // hypotheses no finite scan certifies
};

// Least (t, d) in canonical order with ∩_i φ_i(d)⁻¹(t⁻¹A) piecewise syndetic
// (also intersected with t⁻¹A when the query adjoins the identity).
inline TWitnessResult find_t_witness(const DSetQuery& q, std::size_t max_witness = 4, const Budget& budget = {}) {
    validate_query(q);
    const auto pre = is_piecewise_syndetic(q.target, q.subset, q.op, max_witness, budget);
    if (pre.verdict == Verdict::inconclusive)
        throw BudgetExhausted("piecewise-syndetic precondition inconclusive");
    if (pre.verdict != Verdict::yes)
        throw PreconditionError("A is not piecewise syndetic in the target");
    TWitnessResult r;
    r.unchecked = {"homomorphisms pairwise commute as required", "existence of an invariant mean"};
    for (Element t = 0; t < q.target.size(); ++t) {
        const auto B = preimage(q.target, t, q.subset, q.op);
        for (Element d = 0; d < q.source.size(); ++d) {
            ++r.pairs_checked;
            const auto I = dset_intersection(q, B, d);
            const auto rep = is_piecewise_syndetic(q.target, I, q.op, max_witness, budget);
            if (rep.verdict == Verdict::inconclusive)
                throw BudgetExhausted("piecewise-syndetic check inconclusive at t=" + std::to_string(t) +
                                      ", d=" + std::to_string(d));
            if (rep.verdict == Verdict::yes) {
                r.found = true;
                r.t = t;
                r.d = d;
                return r;
            }
        }
    }
    return r;
}

struct IprStarProbe {
    SubsetMask dset;
    LargenessReport report;
    std::string label = "experimental observation";
};

// Computes the D-set and asks whether it is IP_r* in the source. A "no" is an
// observation about this homomorphism tuple only.
inline IprStarProbe ipr_star_probe(const DSetQuery& q, std::size_t r, std::size_t max_witness = 4,
                                   const Budget& budget = {}) {
    if (!is_commutative(q.source, q.op) || !is_commutative(q.target, q.op))
        throw PreconditionError("IP_r* probe needs commutative structures");
    IprStarProbe p;
    p.dset = compute_D_set(q, max_witness, budget);
    p.report = is_ipr_star(q.source, p.dset, r, q.op, budget);
    if (p.report.verdict == Verdict::no)
        p.report.note = "a single failing homomorphism tuple does not refute the general statement";
    return p;
}

} // namespace prlab
