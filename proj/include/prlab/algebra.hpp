#pragma once

#include "core.hpp"
#include "structure.hpp"
#include "subset.hpp"

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace prlab {

struct AxiomCheck {
    std::string name;
    bool required = true;
    bool holds = true;
    bool complete = true;             // false when the triple budget cut the scan short
    std::vector<Element> witness;     // first violating tuple in canonical order
    std::uint64_t checked = 0;
    std::uint64_t skipped = 0;        // tuples with an undefined subterm
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;

    bool all_required_hold() const {
        for (const auto& c : checks)
            if (c.required && (!c.holds || !c.complete))
                return false;
        return true;
    }

    const AxiomCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

namespace detail {

inline AxiomCheck check_associative(const GroundStructure& g, Op op, std::uint64_t budget) {
    AxiomCheck c;
    c.name = std::string(to_string(op)) + "-associative";
    const auto n = static_cast<Element>(g.size());
    for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b) {
            const Element ab = g.apply(op, a, b);
            for (Element x = 0; x < n; ++x) {
                if (c.checked + c.skipped >= budget) {
                    c.complete = false;
                    return c;
                }
                const Element bx = g.apply(op, b, x);
                const Element lhs = g.apply(op, ab, x);
                const Element rhs = g.apply(op, a, bx);
                if (ab == kUndefined || bx == kUndefined || lhs == kUndefined || rhs == kUndefined) {
                    ++c.skipped;
                    continue;
                }
                ++c.checked;
                if (lhs != rhs) {
                    c.holds = false;
                    c.witness = {a, b, x};
                    return c;
                }
            }
        }
    return c;
}

inline AxiomCheck check_commutative(const GroundStructure& g, Op op, bool required) {
    AxiomCheck c;
    c.name = std::string(to_string(op)) + "-commutative";
    c.required = required;
    const auto n = static_cast<Element>(g.size());
    for (Element a = 0; a < n; ++a)
        for (Element b = a + 1; b < n; ++b) {
            const Element ab = g.apply(op, a, b);
            const Element ba = g.apply(op, b, a);
            if (ab == kUndefined && ba == kUndefined) {
                ++c.skipped;
                continue;
            }
            ++c.checked;
            if (ab != ba) {
                c.holds = false;
                c.witness = {a, b};
                return c;
            }
        }
    return c;
}

// left:  a(b+c) = ab+ac      right: (b+c)a = ba+ca
inline AxiomCheck check_distributive(const GroundStructure& g, bool left, std::uint64_t budget) {
    AxiomCheck c;
    c.name = left ? "left-distributive" : "right-distributive";
    const auto n = static_cast<Element>(g.size());
    for (Element a = 0; a < n; ++a)
        for (Element b = 0; b < n; ++b)
            for (Element x = 0; x < n; ++x) {
                if (c.checked + c.skipped >= budget) {
                    c.complete = false;
                    return c;
                }
                const Element s = g.add(b, x);
                const Element lhs = left ? g.mul(a, s) : g.mul(s, a);
                const Element p = left ? g.mul(a, b) : g.mul(b, a);
                const Element q = left ? g.mul(a, x) : g.mul(x, a);
                const Element rhs = g.add(p, q);
                if (s == kUndefined || lhs == kUndefined || p == kUndefined || q == kUndefined ||
                    rhs == kUndefined) {
                    ++c.skipped;
                    continue;
                }
                ++c.checked;
                if (lhs != rhs) {
                    c.holds = false;
                    c.witness = {a, b, x};
                    return c;
                }
            }
    return c;
}

} // namespace detail

// Exhaustive axiom scan. Semigroups: associativity of each present operation.
// Semirings additionally: commutativity of + and both distributive laws.
// Commutativity of * is reported but never required.
inline AxiomReport validate_axioms(const GroundStructure& g,
                                   std::uint64_t triple_budget = std::numeric_limits<std::uint64_t>::max()) {
    AxiomReport r;
    for (Op op : {Op::add, Op::mul}) {
        if (!g.has(op))
            continue;
        r.checks.push_back(detail::check_associative(g, op, triple_budget));
        r.checks.push_back(detail::check_commutative(g, op, op == Op::add && g.kind() == Kind::semiring));
    }
    if (g.kind() == Kind::semiring) {
        r.checks.push_back(detail::check_distributive(g, true, triple_budget));
        r.checks.push_back(detail::check_distributive(g, false, triple_budget));
    }
    return r;
}

inline bool is_commutative(const GroundStructure& g, Op op) {
    return detail::check_commutative(g, op, true).holds;
}

// {x : s∘x defined and in A}
inline SubsetMask preimage(const GroundStructure& g, Element s, const SubsetMask& A, Op op) {
    if (s >= g.size())
        throw InputError("element " + std::to_string(s) + " outside carrier");
    SubsetMask out(g.size());
    for (Element x = 0; x < g.size(); ++x) {
        const Element v = g.apply(op, s, x);
        if (v != kUndefined && A.contains(v))
            out.insert(x);
    }
    return out;
}

// {a∘s : a in A, a∘s defined}
inline SubsetMask right_translate(const GroundStructure& g, const SubsetMask& A, Element s, Op op) {
    if (s >= g.size())
        throw InputError("element " + std::to_string(s) + " outside carrier");
    SubsetMask out(g.size());
    for (Element a : A.elements()) {
        const Element v = g.apply(op, a, s);
        if (v != kUndefined)
            out.insert(v);
    }
    return out;
}

// Element map between two structures together with the operations it is
// claimed to respect. The claim is checked by check_homomorphism, never assumed.
struct Homomorphism {
    std::vector<Element> map;
    bool respects_add = false;
    bool respects_mul = true;

    static Homomorphism identity(std::size_t n, bool add = true, bool mul = true) {
        Homomorphism h;
        h.map.resize(n);
        std::iota(h.map.begin(), h.map.end(), Element{0});
        h.respects_add = add;
        h.respects_mul = mul;
        return h;
    }

    bool respects(Op op) const { return op == Op::add ? respects_add : respects_mul; }
};

struct HomomorphismCheck {
    bool holds = true;
    std::optional<Op> failing_op;
    std::vector<Element> witness; // pair (a, b) with map(a∘b) != map(a)∘map(b)
};

inline HomomorphismCheck check_homomorphism(const GroundStructure& source, const GroundStructure& target,
                                            const Homomorphism& h) {
    if (h.map.size() != source.size())
        throw InputError("homomorphism map has " + std::to_string(h.map.size()) +
                         " entries, source carrier has " + std::to_string(source.size()));
    for (Element v : h.map)
        if (v >= target.size())
            throw InputError("homomorphism image " + std::to_string(v) + " outside target carrier");
    HomomorphismCheck r;
    const auto n = static_cast<Element>(source.size());
    for (Op op : {Op::add, Op::mul}) {
        if (!h.respects(op))
            continue;
        if (!source.has(op) || !target.has(op))
            throw PreconditionError("homomorphism claims to respect " + std::string(to_string(op)) +
                                    " but a structure lacks it");
        for (Element a = 0; a < n; ++a)
            for (Element b = 0; b < n; ++b) {
                const Element ab = source.apply(op, a, b);
                if (ab == kUndefined)
                    continue;
                if (h.map[ab] != target.apply(op, h.map[a], h.map[b])) {
                    r.holds = false;
                    r.failing_op = op;
                    r.witness = {a, b};
                    return r;
                }
            }
    }
    return r;
}

} // namespace prlab
