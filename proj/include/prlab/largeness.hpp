#pragma once

// Largeness notions on finite and windowed structures.
//
// On a finite structure whose operation is total every checker is exact. On a
// windowed (partial) structure the same definitions are evaluated inside the
// window: undefined results never count as members, and reports carry
// `window_only = true`. Budget exhaustion yields Verdict::inconclusive.

#include "algebra.hpp"
#include "core.hpp"
#include "structure.hpp"
#include "subset.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prlab {

enum class Property : std::uint8_t {
    thick,
    syndetic,
    piecewise_syndetic,
    ip_r,
    ip_r_star,
    combinatorially_rich,
};

inline std::string_view to_string(Property p) {
    switch (p) {
    case Property::thick: return "thick";
    case Property::syndetic: return "syndetic";
    case Property::piecewise_syndetic: return "piecewise-syndetic";
    case Property::ip_r: return "ip_r";
    case Property::ip_r_star: return "ip_r_star";
    case Property::combinatorially_rich: return "combinatorially-rich";
    }
    return "?";
}

inline Property parse_property(std::string_view s) {
    if (s == "thick")
        return Property::thick;
    if (s == "syndetic")
        return Property::syndetic;
    if (s == "piecewise-syndetic" || s == "pws")
        return Property::piecewise_syndetic;
    if (s == "ip_r" || s == "ipr")
        return Property::ip_r;
    if (s == "ip_r_star" || s == "ipr-star" || s == "ipr_star")
        return Property::ip_r_star;
    if (s == "combinatorially-rich" || s == "rich")
        return Property::combinatorially_rich;
    throw InputError("unknown property '" + std::string(s) + "'");
}

struct Budget {
    // Windowed thickness: largest test family |F|.
    std::size_t family_size = 2;
    // Windowed thickness: test families are drawn from the first `probe_elements`
    // elements. 0 selects the elements e with e∘e still inside the window.
    std::size_t probe_elements = 0;
    // Cap on elementary evaluation steps per call.
    std::uint64_t nodes = 50'000'000;
};

struct LargenessReport {
    Property property = Property::thick;
    Verdict verdict = Verdict::no;
    bool window_only = false;
    // translate | cover | multiset | counterexample-family | counterexample-multiset |
    // counterexample-matrix | uncovered-element | family-translates | none
    std::string witness_kind = "none";
    std::vector<Element> witness;
    std::optional<Element> translate; // piecewise syndetic on finite structures
    std::vector<Element> translates;  // windowed thickness: one translate per test family
    bool minimal = true;
    std::uint64_t nodes_used = 0;
    std::string note;
};

// Values of FP (or FS when op = add) together with the number of index
// subsets whose product left the window.
struct ProductSet {
    SubsetMask values;
    std::uint64_t undefined_subsets = 0;
};

namespace detail {

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    const auto s = a + b;
    return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

// Calls `visit(span)` for every combination of `size` indices out of `pool`
// in lexicographic order; stops early when `visit` returns true.
template <class Visit>
bool for_each_combination(std::span<const Element> pool, std::size_t size, Visit&& visit) {
    if (size == 0 || size > pool.size())
        return false;
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i)
        idx[i] = i;
    std::vector<Element> pick(size);
    while (true) {
        for (std::size_t i = 0; i < size; ++i)
            pick[i] = pool[idx[i]];
        if (visit(std::span<const Element>(pick)))
            return true;
        std::size_t i = size;
        while (i > 0 && idx[i - 1] == pool.size() - size + (i - 1))
            --i;
        if (i == 0)
            return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < size; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

inline std::vector<Element> iota_elements(std::size_t n) {
    std::vector<Element> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = static_cast<Element>(i);
    return v;
}

inline bool translates_into(const GroundStructure& g, std::span<const Element> family, Element x,
                            const SubsetMask& A, Op op) {
    for (Element s : family) {
        const Element v = g.apply(op, s, x);
        if (v == kUndefined || !A.contains(v))
            return false;
    }
    return true;
}

inline std::vector<Element> probe_elements(const GroundStructure& g, Op op, const Budget& b) {
    std::vector<Element> p;
    if (b.probe_elements != 0) {
        for (Element e = 0; e < std::min(b.probe_elements, g.size()); ++e)
            p.push_back(e);
        return p;
    }
    for (Element e = 0; e < g.size(); ++e)
        if (g.apply(op, e, e) != kUndefined)
            p.push_back(e);
    if (p.empty())
        p.push_back(0);
    return p;
}

inline std::vector<SubsetMask> all_preimages(const GroundStructure& g, const SubsetMask& A, Op op) {
    if (g.size() > 16384)
        throw PreconditionError("carrier too large for a preimage cover search");
    std::vector<SubsetMask> p;
    p.reserve(g.size());
    for (Element s = 0; s < g.size(); ++s)
        p.push_back(preimage(g, s, A, op));
    return p;
}

} // namespace detail

// FP of an index-ordered multiset: products a_{i1}∘…∘a_{in} over nonempty
// increasing index sets. Undefined products are counted, not included.
inline ProductSet finite_products(const GroundStructure& g, std::span<const Element> items, Op op) {
    if (items.empty())
        throw PreconditionError("finite products of an empty multiset");
    const std::size_t n = g.size();
    for (Element a : items)
        if (a >= n)
            throw InputError("multiset item " + std::to_string(a) + " outside carrier");
    // counts[v] = number of index subsets (of the items seen so far) with product v
    std::vector<std::uint64_t> counts(n, 0), next;
    std::vector<Element> live;
    std::uint64_t undefined = 0;
    for (Element a : items) {
        next = counts;
        std::uint64_t und_next = detail::sat_add(undefined, undefined);
        for (Element p : live) {
            const Element v = g.apply(op, p, a);
            if (v == kUndefined)
                und_next = detail::sat_add(und_next, counts[p]);
            else
                next[v] = detail::sat_add(next[v], counts[p]);
        }
        next[a] = detail::sat_add(next[a], 1);
        counts.swap(next);
        undefined = und_next;
        live.clear();
        for (Element v = 0; v < n; ++v)
            if (counts[v] != 0)
                live.push_back(v);
    }
    ProductSet r{SubsetMask(n), undefined};
    for (Element v : live)
        r.values.insert(v);
    return r;
}

inline ProductSet finite_sums(const GroundStructure& g, std::span<const Element> items) {
    return finite_products(g, items, Op::add);
}

// ---------------------------------------------------------------------------
// thick / syndetic / piecewise syndetic

// Finite total operation: exact, A is thick iff S∘x ⊆ A for some x (F = S is
// the hardest finite family). Windowed: every family F of at most
// `family_size` probe elements must have a translate inside the window.
inline LargenessReport is_thick(const GroundStructure& g, const SubsetMask& A, Op op, const Budget& budget = {}) {
    LargenessReport r;
    r.property = Property::thick;
    const std::size_t n = g.size();
    if (A.none()) {
        r.verdict = Verdict::no;
        r.witness_kind = "counterexample-family";
        r.witness = {0};
        r.note = "no translate of any element lands in the empty set";
        return r;
    }
    if (g.is_total(op)) {
        const auto all = detail::iota_elements(n);
        for (Element x = 0; x < n; ++x) {
            r.nodes_used += n;
            if (r.nodes_used > budget.nodes) {
                r.verdict = Verdict::inconclusive;
                r.note = "node budget exhausted";
                return r;
            }
            if (detail::translates_into(g, all, x, A, op)) {
                r.verdict = Verdict::yes;
                r.witness_kind = "translate";
                r.witness = {x};
                return r;
            }
        }
        r.verdict = Verdict::no;
        r.witness_kind = "counterexample-family";
        r.witness = all;
        return r;
    }

    r.window_only = true;
    const auto probe = detail::probe_elements(g, op, budget);
    std::optional<std::vector<Element>> failing;
    bool capped = false;
    for (std::size_t size = 1; size <= budget.family_size && !failing && !capped; ++size) {
        detail::for_each_combination(probe, size, [&](std::span<const Element> fam) {
            for (Element x = 0; x < n; ++x) {
                r.nodes_used += fam.size();
                if (r.nodes_used > budget.nodes) {
                    capped = true;
                    return true;
                }
                if (detail::translates_into(g, fam, x, A, op)) {
                    r.translates.push_back(x);
                    return false;
                }
            }
            failing.emplace(fam.begin(), fam.end());
            return true;
        });
    }
    if (failing) {
        r.verdict = Verdict::no;
        r.witness_kind = "counterexample-family";
        r.witness = *failing;
        r.translates.clear();
        r.note = "family has no translate inside the window";
    } else if (capped) {
        r.verdict = Verdict::inconclusive;
        r.translates.clear();
        r.note = "node budget exhausted";
    } else {
        r.verdict = Verdict::yes;
        r.witness_kind = "family-translates";
        r.witness = probe;
        r.note = "every family of at most " + std::to_string(budget.family_size) +
                 " probe elements has a translate inside the window";
    }
    return r;
}

namespace detail {

inline std::vector<Element> greedy_cover(const std::vector<SubsetMask>& pre, std::size_t n) {
    SubsetMask covered(n);
    std::vector<Element> cover;
    for (Element s = 0; s < pre.size(); ++s) {
        if (pre[s].subset_of(covered))
            continue;
        covered |= pre[s];
        cover.push_back(s);
    }
    return cover;
}

} // namespace detail

// Smallest (then lexicographically least) F with S = ∪_{s∈F} s⁻¹A.
inline LargenessReport is_syndetic(const GroundStructure& g, const SubsetMask& A, Op op, std::size_t max_witness,
                                   const Budget& budget = {}) {
    if (max_witness == 0)
        throw PreconditionError("max_witness must be at least 1");
    LargenessReport r;
    r.property = Property::syndetic;
    r.window_only = !g.is_total(op);
    const std::size_t n = g.size();
    const auto pre = detail::all_preimages(g, A, op);
    SubsetMask all(n);
    for (const auto& p : pre)
        all |= p;
    if (!all.all()) {
        r.verdict = Verdict::no;
        r.witness_kind = "uncovered-element";
        r.witness = {all.complement().first()};
        return r;
    }
    r.verdict = Verdict::yes;
    const auto pool = detail::iota_elements(n);
    bool capped = false;
    for (std::size_t size = 1; size <= std::min(max_witness, n) && !capped; ++size) {
        const bool found = detail::for_each_combination(pool, size, [&](std::span<const Element> fam) {
            if (++r.nodes_used > budget.nodes) {
                capped = true;
                return true;
            }
            SubsetMask u(n);
            for (Element s : fam)
                u |= pre[s];
            if (!u.all())
                return false;
            r.witness.assign(fam.begin(), fam.end());
            return true;
        });
        if (found && !capped) {
            r.witness_kind = "cover";
            return r;
        }
    }
    r.witness_kind = "cover";
    r.witness = detail::greedy_cover(pre, n);
    r.minimal = false;
    r.note = capped ? "node budget exhausted; cover is greedy, not minimal"
                    : "no cover within max_witness; cover is greedy, not minimal";
    return r;
}

// Smallest F such that ∪_{s∈F} s⁻¹A is thick.
inline LargenessReport is_piecewise_syndetic(const GroundStructure& g, const SubsetMask& A, Op op,
                                             std::size_t max_witness, const Budget& budget = {}) {
    if (max_witness == 0)
        throw PreconditionError("max_witness must be at least 1");
    LargenessReport r;
    r.property = Property::piecewise_syndetic;
    r.window_only = !g.is_total(op);
    const std::size_t n = g.size();
    const auto pre = detail::all_preimages(g, A, op);
    SubsetMask all(n);
    for (const auto& p : pre)
        all |= p;

    Budget inner = budget;
    auto top = is_thick(g, all, op, inner);
    r.nodes_used += top.nodes_used;
    if (top.verdict != Verdict::yes) {
        r.verdict = top.verdict;
        r.witness_kind = top.verdict == Verdict::no ? "counterexample-family" : "none";
        r.witness = top.witness;
        r.note = top.verdict == Verdict::no ? "union of all preimages is not thick" : top.note;
        return r;
    }
    r.verdict = Verdict::yes;
    const auto pool = detail::iota_elements(n);
    bool capped = false;
    for (std::size_t size = 1; size <= std::min(max_witness, n) && !capped; ++size) {
        const bool found = detail::for_each_combination(pool, size, [&](std::span<const Element> fam) {
            SubsetMask u(n);
            for (Element s : fam)
                u |= pre[s];
            if (r.nodes_used > budget.nodes) {
                capped = true;
                return true;
            }
            inner.nodes = budget.nodes - r.nodes_used;
            auto t = is_thick(g, u, op, inner);
            r.nodes_used += t.nodes_used + 1;
            if (t.verdict == Verdict::inconclusive) {
                capped = true;
                return true;
            }
            if (t.verdict != Verdict::yes)
                return false;
            r.witness.assign(fam.begin(), fam.end());
            if (t.witness_kind == "translate")
                r.translate = t.witness.front();
            r.translates = t.translates;
            return true;
        });
        if (found && !capped) {
            r.witness_kind = "cover";
            return r;
        }
    }
    r.witness_kind = "cover";
    r.witness.clear();
    for (Element s = 0; s < n; ++s)
        if (!pre[s].none())
            r.witness.push_back(s);
    if (top.witness_kind == "translate")
        r.translate = top.witness.front();
    r.translates = top.translates;
    r.minimal = false;
    r.note = "minimal cover not established within max_witness/budget";
    return r;
}

// ---------------------------------------------------------------------------
// IP_r and IP_r*

// Canonically least sequence F of length r (repeats allowed) with FP(F) ⊆ A.
inline LargenessReport is_ipr(const GroundStructure& g, const SubsetMask& A, std::size_t r, Op op,
                              const Budget& budget = {}) {
    if (r == 0)
        throw PreconditionError("r must be at least 1");
    LargenessReport rep;
    rep.property = Property::ip_r;
    rep.window_only = !g.is_total(op);
    const auto members = A.elements();
    // With a commutative operation the least sequence is nondecreasing.
    const bool sorted_only = members.size() > 1 && is_commutative(g, op);

    std::vector<Element> seq;
    bool capped = false;
    std::function<bool(const std::vector<Element>&, std::size_t)> dfs =
        [&](const std::vector<Element>& fp, std::size_t start) -> bool {
        if (seq.size() == r)
            return true;
        for (std::size_t i = sorted_only ? start : 0; i < members.size(); ++i) {
            if (++rep.nodes_used > budget.nodes) {
                capped = true;
                return false;
            }
            const Element a = members[i];
            std::vector<Element> next = fp;
            bool ok = true;
            for (Element p : fp) {
                const Element v = g.apply(op, p, a);
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
            if (dfs(next, i))
                return true;
            seq.pop_back();
            if (capped)
                return false;
        }
        return false;
    };
    if (dfs({}, 0)) {
        rep.verdict = Verdict::yes;
        rep.witness_kind = "multiset";
        rep.witness = seq;
    } else if (capped) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "node budget exhausted";
    } else {
        rep.verdict = Verdict::no;
    }
    return rep;
}

// A is IP_r* iff its complement is not IP_r; a counterexample multiset is
// one whose FP misses A entirely.
inline LargenessReport is_ipr_star(const GroundStructure& g, const SubsetMask& A, std::size_t r, Op op,
                                   const Budget& budget = {}) {
    auto inner = is_ipr(g, A.complement(), r, op, budget);
    LargenessReport rep = inner;
    rep.property = Property::ip_r_star;
    rep.verdict = negate(inner.verdict);
    if (inner.verdict == Verdict::yes) {
        rep.witness_kind = "counterexample-multiset";
    } else {
        rep.witness_kind = "none";
        rep.witness.clear();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// combinatorial richness for one (n, r) pair

// For every r×n matrix M there must be a nonempty row set α and s with
// s∘Σ_{i∈α} M_{i,j} ∈ A for every column j.
inline LargenessReport is_combinatorially_rich(const GroundStructure& g, const SubsetMask& A, std::size_t columns,
                                               std::size_t rows, const Budget& budget = {}, Op op = Op::add) {
    if (columns == 0 || rows == 0)
        throw PreconditionError("n and r must be at least 1");
    if (rows > 20)
        throw PreconditionError("r too large for row-subset enumeration");
    if (!g.has(op) || !is_commutative(g, op))
        throw PreconditionError("combinatorial richness needs a commutative operation");
    LargenessReport rep;
    rep.property = Property::combinatorially_rich;
    rep.window_only = !g.is_total(op);
    const std::size_t n = g.size();
    const std::size_t cells = rows * columns;
    std::vector<Element> m(cells, 0);
    std::vector<Element> sums(columns);

    auto matrix_ok = [&]() {
        for (std::uint32_t alpha = 1; alpha < (1U << rows); ++alpha) {
            bool defined = true;
            for (std::size_t j = 0; j < columns && defined; ++j) {
                Element acc = kUndefined;
                for (std::size_t i = 0; i < rows; ++i) {
                    if (!((alpha >> i) & 1U))
                        continue;
                    const Element v = m[i * columns + j];
                    acc = acc == kUndefined ? v : g.apply(op, acc, v);
                    if (acc == kUndefined) {
                        defined = false;
                        break;
                    }
                }
                sums[j] = acc;
            }
            if (!defined)
                continue;
            for (Element s = 0; s < n; ++s) {
                ++rep.nodes_used;
                bool all = true;
                for (std::size_t j = 0; j < columns && all; ++j) {
                    const Element v = g.apply(op, s, sums[j]);
                    all = v != kUndefined && A.contains(v);
                }
                if (all)
                    return true;
            }
        }
        return false;
    };

    while (true) {
        if (rep.nodes_used > budget.nodes) {
            rep.verdict = Verdict::inconclusive;
            rep.note = "node budget exhausted before all matrices were checked";
            return rep;
        }
        if (!matrix_ok()) {
            rep.verdict = Verdict::no;
            rep.witness_kind = "counterexample-matrix";
            rep.witness = m;
            return rep;
        }
        std::size_t i = cells;
        while (i > 0 && m[i - 1] == n - 1)
            m[--i] = 0;
        if (i == 0)
            break;
        ++m[i - 1];
    }
    rep.verdict = Verdict::yes;
    return rep;
}

// ---------------------------------------------------------------------------
// D-sets

struct DSetQuery {
    const GroundStructure& source; // S
    const GroundStructure& target; // R
    SubsetMask subset;             // A ⊆ R
    std::vector<Homomorphism> homs;
    bool adjoin_identity = false;  // intersect with A itself as well
    Op op = Op::mul;
};

inline void validate_query(const DSetQuery& q) {
    if (q.subset.size() != q.target.size())
        throw InputError("subset does not match the target carrier");
    if (q.homs.empty())
        throw PreconditionError("D-set needs at least one homomorphism");
    for (const auto& h : q.homs) {
        if (!h.respects(q.op))
            throw PreconditionError("homomorphism does not declare the query operation");
        auto c = check_homomorphism(q.source, q.target, h);
        if (!c.holds)
            throw PreconditionError("map is not a homomorphism (pair " + std::to_string(c.witness[0]) + "," +
                                    std::to_string(c.witness[1]) + ")");
    }
}

// ∩_i φ_i(d)⁻¹B inside R, optionally intersected with B.
inline SubsetMask dset_intersection(const DSetQuery& q, const SubsetMask& B, Element d) {
    SubsetMask I = q.adjoin_identity ? B : SubsetMask(q.target.size(), true);
    for (const auto& h : q.homs)
        I &= preimage(q.target, h.map.at(d), B, q.op);
    return I;
}

// {d ∈ S : ∩_i φ_i(d)⁻¹A is piecewise syndetic in R}
inline SubsetMask compute_D_set(const DSetQuery& q, std::size_t max_witness, const Budget& budget = {}) {
    validate_query(q);
    SubsetMask D(q.source.size());
    for (Element d = 0; d < q.source.size(); ++d) {
        const auto I = dset_intersection(q, q.subset, d);
        const auto rep = is_piecewise_syndetic(q.target, I, q.op, max_witness, budget);
        if (rep.verdict == Verdict::inconclusive)
            throw BudgetExhausted("piecewise-syndetic check inconclusive for d=" + std::to_string(d));
        if (rep.verdict == Verdict::yes)
            D.insert(d);
    }
    return D;
}

// ---------------------------------------------------------------------------
// witness re-verification

// Re-evaluates a report's witness directly from the definitions. Reports
// without a positive witness (no / inconclusive, combinatorial richness)
// verify trivially.
inline bool verify_witness(const GroundStructure& g, const SubsetMask& A, Op op, const LargenessReport& rep,
                           const Budget& budget = {}) {
    const std::size_t n = g.size();
    const auto all = detail::iota_elements(n);
    switch (rep.property) {
    case Property::thick:
        if (rep.verdict != Verdict::yes)
            return true;
        if (rep.witness_kind == "translate")
            return rep.witness.size() == 1 && detail::translates_into(g, all, rep.witness[0], A, op);
        {
            std::size_t k = 0;
            bool ok = true;
            for (std::size_t size = 1; size <= budget.family_size && ok; ++size)
                detail::for_each_combination(rep.witness, size, [&](std::span<const Element> fam) {
                    ok = k < rep.translates.size() && detail::translates_into(g, fam, rep.translates[k++], A, op);
                    return !ok;
                });
            return ok && k == rep.translates.size();
        }
    case Property::syndetic: {
        if (rep.verdict != Verdict::yes)
            return true;
        SubsetMask u(n);
        for (Element s : rep.witness)
            u |= preimage(g, s, A, op);
        return u.all();
    }
    case Property::piecewise_syndetic: {
        if (rep.verdict != Verdict::yes)
            return true;
        SubsetMask u(n);
        for (Element s : rep.witness)
            u |= preimage(g, s, A, op);
        if (rep.translate)
            return detail::translates_into(g, all, *rep.translate, u, op);
        return is_thick(g, u, op, budget).verdict == Verdict::yes;
    }
    case Property::ip_r: {
        if (rep.verdict != Verdict::yes)
            return true;
        auto fp = finite_products(g, rep.witness, op);
        return fp.undefined_subsets == 0 && fp.values.subset_of(A);
    }
    case Property::ip_r_star: {
        if (rep.verdict != Verdict::no || rep.witness.empty())
            return true;
        auto fp = finite_products(g, rep.witness, op);
        return fp.undefined_subsets == 0 && !fp.values.intersects(A);
    }
    case Property::combinatorially_rich:
        return true;
    }
    return false;
}

} // namespace prlab
