#pragma once

// Independent reference implementations used to derive and cross-check
// expected values. Everything here works straight from the definitions,
// with plain loops over bitmasks, and shares no code with the library's
// checkers beyond GroundStructure::apply.

#include "prlab/prlab.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using prlab::Element;
using prlab::GroundStructure;
using prlab::Op;
using prlab::SubsetMask;
using Table = std::vector<Element>;
using Mask = std::uint32_t; // subsets of carriers with at most 16 elements

inline constexpr Element U = prlab::kUndefined;

// ---------------------------------------------------------------------------
// enumeration of small structures

// All associative n×n tables (labeled), by cell-by-cell backtracking.
inline std::vector<Table> semigroup_tables(std::size_t n) {
    std::vector<Table> out;
    Table t(n * n, U);
    auto at = [&](Element a, Element b) { return t[a * n + b]; };
    auto consistent = [&]() {
        for (Element a = 0; a < n; ++a)
            for (Element b = 0; b < n; ++b) {
                const Element ab = at(a, b);
                if (ab == U)
                    continue;
                for (Element c = 0; c < n; ++c) {
                    const Element bc = at(b, c);
                    if (bc == U)
                        continue;
                    const Element l = at(ab, c), r = at(a, bc);
                    if (l != U && r != U && l != r)
                        return false;
                }
            }
        return true;
    };
    std::function<void(std::size_t)> rec = [&](std::size_t cell) {
        if (cell == n * n) {
            out.push_back(t);
            return;
        }
        for (Element v = 0; v < n; ++v) {
            t[cell] = v;
            if (consistent())
                rec(cell + 1);
        }
        t[cell] = U;
    };
    rec(0);
    return out;
}

inline bool commutative_table(const Table& t, std::size_t n) {
    for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
            if (t[a * n + b] != t[b * n + a])
                return false;
    return true;
}

inline bool distributive(const Table& add, const Table& mul, std::size_t n) {
    for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
            for (Element c = 0; c < n; ++c) {
                const Element s = add[b * n + c];
                if (mul[a * n + s] != add[mul[a * n + b] * n + mul[a * n + c]])
                    return false;
                if (mul[s * n + a] != add[mul[b * n + a] * n + mul[c * n + a]])
                    return false;
            }
    return true;
}

inline const std::vector<Table>& cached_semigroups(std::size_t n) {
    static std::map<std::size_t, std::vector<Table>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, semigroup_tables(n)).first;
    return it->second;
}

struct SemiringTables {
    Table add;
    Table mul;
};

// All pairs (commutative associative add, associative mul) obeying both
// distributive laws.
inline const std::vector<SemiringTables>& cached_semirings(std::size_t n) {
    static std::map<std::size_t, std::vector<SemiringTables>> cache;
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    std::vector<SemiringTables> out;
    const auto& sg = cached_semigroups(n);
    for (const auto& a : sg) {
        if (!commutative_table(a, n))
            continue;
        for (const auto& m : sg)
            if (distributive(a, m, n))
                out.push_back({a, m});
    }
    return cache.emplace(n, std::move(out)).first->second;
}

inline GroundStructure semigroup(const Table& t, std::size_t n) {
    return GroundStructure::from_tables(prlab::Kind::semigroup, n, std::nullopt, t);
}

inline GroundStructure semiring(const SemiringTables& s, std::size_t n) {
    return GroundStructure::from_tables(prlab::Kind::semiring, n, s.add, s.mul);
}

// ---------------------------------------------------------------------------
// definitions over bitmasks (finite structures, at most 16 elements)

inline Mask full_mask(std::size_t n) { return n >= 32 ? ~Mask{0} : ((Mask{1} << n) - 1); }

inline Mask to_mask(const SubsetMask& s) {
    Mask m = 0;
    for (Element e : s.elements())
        m |= Mask{1} << e;
    return m;
}

inline SubsetMask from_mask(Mask m, std::size_t n) {
    SubsetMask s(n);
    for (Element e = 0; e < n; ++e)
        if (m >> e & 1U)
            s.insert(e);
    return s;
}

inline bool in(Mask m, Element e) { return e != U && (m >> e & 1U); }

// {y : s∘y ∈ A}
inline Mask pre(const GroundStructure& g, Op op, Element s, Mask A) {
    Mask out = 0;
    for (Element y = 0; y < g.size(); ++y)
        if (in(A, g.apply(op, s, y)))
            out |= Mask{1} << y;
    return out;
}

// Literal thickness: every nonempty F ⊆ S has some x with F∘x ⊆ A.
inline bool thick(const GroundStructure& g, Op op, Mask A) {
    const std::size_t n = g.size();
    for (Mask F = 1; F <= full_mask(n); ++F) {
        bool some = false;
        for (Element x = 0; x < n && !some; ++x) {
            bool all = true;
            for (Element s = 0; s < n && all; ++s)
                if (F >> s & 1U)
                    all = in(A, g.apply(op, s, x));
            some = all;
        }
        if (!some)
            return false;
    }
    return true;
}

inline Mask preimage_union(const GroundStructure& g, Op op, Mask F, Mask A) {
    Mask u = 0;
    for (Element s = 0; s < g.size(); ++s)
        if (F >> s & 1U)
            u |= pre(g, op, s, A);
    return u;
}

// Least cover by (size, then lexicographic element list), if any.
inline std::optional<std::vector<Element>> syndetic_cover(const GroundStructure& g, Op op, Mask A) {
    const std::size_t n = g.size();
    std::optional<std::vector<Element>> best;
    for (Mask F = 1; F <= full_mask(n); ++F) {
        if (preimage_union(g, op, F, A) != full_mask(n))
            continue;
        std::vector<Element> v;
        for (Element s = 0; s < n; ++s)
            if (F >> s & 1U)
                v.push_back(s);
        if (!best || v.size() < best->size() || (v.size() == best->size() && v < *best))
            best = v;
    }
    return best;
}

inline bool syndetic(const GroundStructure& g, Op op, Mask A) { return syndetic_cover(g, op, A).has_value(); }

// Union form: some F makes ∪ s⁻¹A thick.
inline bool pws(const GroundStructure& g, Op op, Mask A) {
    for (Mask F = 1; F <= full_mask(g.size()); ++F)
        if (thick(g, op, preimage_union(g, op, F, A)))
            return true;
    return false;
}

// Intersection form: T ∩ Y ⊆ A for some thick T and syndetic Y.
inline bool pws_intersection_form(const GroundStructure& g, Op op, Mask A) {
    const Mask all = full_mask(g.size());
    std::vector<Mask> thick_sets, synd_sets;
    for (Mask M = 0; M <= all; ++M) {
        if (thick(g, op, M))
            thick_sets.push_back(M);
        if (syndetic(g, op, M))
            synd_sets.push_back(M);
    }
    for (Mask T : thick_sets)
        for (Mask Y : synd_sets)
            if ((T & Y & ~A) == 0)
                return true;
    return false;
}

// FP by listing every nonempty index subset and multiplying in index order.
struct NaiveProducts {
    std::set<Element> values;
    std::size_t undefined = 0;
};

inline NaiveProducts naive_products(const GroundStructure& g, const std::vector<Element>& items, Op op) {
    NaiveProducts r;
    const std::size_t m = items.size();
    for (std::uint64_t sub = 1; sub < (std::uint64_t{1} << m); ++sub) {
        Element acc = U;
        bool undefined = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(sub >> i & 1U))
                continue;
            acc = acc == U ? items[i] : g.apply(op, acc, items[i]);
            if (acc == U) {
                undefined = true;
                break;
            }
        }
        if (undefined)
            ++r.undefined;
        else
            r.values.insert(acc);
    }
    return r;
}

// Least sequence (lexicographic over all n^r sequences) with FP ⊆ A.
inline std::optional<std::vector<Element>> ipr(const GroundStructure& g, Op op, Mask A, std::size_t r) {
    const std::size_t n = g.size();
    std::vector<Element> seq(r, 0);
    while (true) {
        const auto fp = naive_products(g, seq, op);
        bool ok = fp.undefined == 0;
        for (Element v : fp.values)
            ok = ok && in(A, v);
        if (ok)
            return seq;
        std::size_t i = r;
        while (i > 0 && seq[i - 1] + 1 == n) {
            seq[i - 1] = 0;
            --i;
        }
        if (i == 0)
            return std::nullopt;
        ++seq[i - 1];
    }
}

// ---------------------------------------------------------------------------
// patterns

// Direct recursive evaluation of a pattern AST over an assignment by name.
inline Element eval_naive(const GroundStructure& g, const prlab::PatternTerm& t,
                          const std::map<std::string, Element>& vars, const std::map<std::string, std::uint64_t>& env) {
    using N = prlab::PatternTerm::Node;
    switch (t.node) {
    case N::variable: return vars.at(t.name);
    case N::sum: {
        Element acc = U;
        for (const auto& c : t.children) {
            const Element v = eval_naive(g, c, vars, env);
            if (v == U)
                return U;
            acc = acc == U ? v : g.add(acc, v);
            if (acc == U)
                return U;
        }
        return acc;
    }
    case N::product: {
        Element acc = U;
        for (const auto& c : t.children) {
            const Element v = eval_naive(g, c, vars, env);
            if (v == U)
                return U;
            acc = acc == U ? v : g.mul(acc, v);
            if (acc == U)
                return U;
        }
        return acc;
    }
    case N::power:
    case N::coeff: {
        std::uint64_t amount = t.amount.literal;
        for (const auto& s : t.amount.symbols)
            amount *= env.at(s);
        const Element base = eval_naive(g, t.children.front(), vars, env);
        if (base == U)
            return U;
        Element acc = base;
        for (std::uint64_t i = 1; i < amount; ++i) {
            acc = t.node == N::power ? g.mul(acc, base) : g.add(acc, base);
            if (acc == U)
                return U;
        }
        return acc;
    }
    }
    return U;
}

// Hyperedges (term value sets) of a pattern by scanning every assignment in
// the full product space.
inline std::set<std::vector<Element>> instances(const GroundStructure& g, const prlab::CompiledPattern& cp) {
    std::set<std::vector<Element>> out;
    const std::size_t vars = cp.arity();
    const std::size_t n = g.size();
    std::vector<Element> a(vars, 0);
    if (n == 0)
        return out;
    while (true) {
        bool ok = true;
        if (cp.constraints.distinct)
            for (std::size_t i = 0; i < vars && ok; ++i)
                for (std::size_t j = i + 1; j < vars && ok; ++j)
                    ok = a[i] != a[j];
        for (std::size_t i = 0; i < vars && ok; ++i)
            ok = a[i] >= cp.constraints.min_element;
        if (ok) {
            std::vector<Element> vals;
            for (const auto& t : cp.terms) {
                const Element v = prlab::eval_term(g, t, a);
                if (v == U) {
                    ok = false;
                    break;
                }
                vals.push_back(v);
            }
            if (ok) {
                std::sort(vals.begin(), vals.end());
                vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
                out.insert(vals);
            }
        }
        std::size_t i = vars;
        while (i > 0 && a[i - 1] + 1 == n) {
            a[i - 1] = 0;
            --i;
        }
        if (i == 0)
            break;
        ++a[i - 1];
    }
    return out;
}

inline bool avoids(const std::set<std::vector<Element>>& edges, const std::vector<std::uint32_t>& colors) {
    for (const auto& e : edges) {
        bool mono = true;
        for (Element x : e)
            mono = mono && colors[x] == colors[e.front()];
        if (mono)
            return false;
    }
    return true;
}

// Every k-coloring (as color vectors) that avoids all edges.
inline std::vector<std::vector<std::uint32_t>> avoiding_colorings(const std::set<std::vector<Element>>& edges,
                                                                  std::size_t n, std::uint32_t k) {
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> c(n, 0);
    while (true) {
        if (avoids(edges, c))
            out.push_back(c);
        std::size_t i = n;
        while (i > 0 && c[i - 1] + 1 == k) {
            c[i - 1] = 0;
            --i;
        }
        if (i == 0)
            break;
        ++c[i - 1];
    }
    return out;
}

// Least assignment (lexicographic) with every term defined, one color, constraints met.
inline std::optional<std::vector<Element>> least_monochromatic(const GroundStructure& g, const prlab::Coloring& col,
                                                               const prlab::CompiledPattern& cp) {
    const std::size_t vars = cp.arity();
    const std::size_t n = g.size();
    std::vector<Element> a(vars, 0);
    while (true) {
        bool ok = true;
        if (cp.constraints.distinct)
            for (std::size_t i = 0; i < vars && ok; ++i)
                for (std::size_t j = i + 1; j < vars && ok; ++j)
                    ok = a[i] != a[j];
        for (std::size_t i = 0; i < vars && ok; ++i)
            ok = a[i] >= cp.constraints.min_element;
        std::optional<std::uint32_t> c;
        for (std::size_t t = 0; t < cp.terms.size() && ok; ++t) {
            const Element v = prlab::eval_term(g, cp.terms[t], a);
            ok = v != U && (!c || *c == col.colors[v]);
            if (ok)
                c = col.colors[v];
        }
        if (ok)
            return a;
        std::size_t i = vars;
        while (i > 0 && a[i - 1] + 1 == n) {
            a[i - 1] = 0;
            --i;
        }
        if (i == 0)
            return std::nullopt;
        ++a[i - 1];
    }
}

} // namespace oracle
