#pragma once

#include "core.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prlab {

// How a structure was produced. Parameters are kept so the structure can be
// written back out and rebuilt exactly.
struct BuilderSpec {
    std::string name = "explicit-table";
    std::vector<std::uint64_t> params;

    std::string describe() const {
        std::string s = name;
        if (!params.empty()) {
            s += '(';
            for (std::size_t i = 0; i < params.size(); ++i) {
                if (i)
                    s += ',';
                s += std::to_string(params[i]);
            }
            s += ')';
        }
        return s;
    }

    friend bool operator==(const BuilderSpec&, const BuilderSpec&) = default;
};

// A finite or windowed carrier {0..n-1} with one or two partial binary
// operations. Immutable once built; all queries are const and thread-safe.
//
// Windowed builders never wrap: a result outside the window is kUndefined.
class GroundStructure {
public:
    std::size_t size() const noexcept { return size_; }
    Kind kind() const noexcept { return kind_; }
    const BuilderSpec& builder() const noexcept { return builder_; }
    std::string describe() const { return builder_.describe(); }

    bool has(Op op) const noexcept { return impl(op).rule != Rule::absent; }

    Element apply(Op op, Element a, Element b) const {
        const auto& o = impl(op);
        if (a == kUndefined || b == kUndefined)
            return kUndefined;
        switch (o.rule) {
        case Rule::absent:
            throw PreconditionError("structure " + describe() + " has no " +
                                    std::string(to_string(op)) + " operation");
        case Rule::table:
            return o.cells[static_cast<std::size_t>(a) * size_ + b];
        case Rule::nat_add: {
            std::uint64_t v = (lo_ + a) + (lo_ + b);
            return v > hi_ ? kUndefined : static_cast<Element>(v - lo_);
        }
        case Rule::nat_mul: {
            std::uint64_t v = (lo_ + a) * (lo_ + b);
            return v > hi_ ? kUndefined : static_cast<Element>(v - lo_);
        }
        case Rule::zmod_add: return static_cast<Element>((std::uint64_t{a} + b) % size_);
        case Rule::zmod_mul: return static_cast<Element>((std::uint64_t{a} * b) % size_);
        case Rule::trop_min: return std::min(a, b);
        case Rule::trop_plus: {
            std::uint64_t v = std::uint64_t{a} + b;
            return v > hi_ ? kUndefined : static_cast<Element>(v);
        }
        }
        return kUndefined;
    }

    Element add(Element a, Element b) const { return apply(Op::add, a, b); }
    Element mul(Element a, Element b) const { return apply(Op::mul, a, b); }

    // True when every pair has a defined result.
    bool is_total(Op op) const {
        const auto& o = impl(op);
        switch (o.rule) {
        case Rule::absent: return false;
        case Rule::zmod_add:
        case Rule::zmod_mul:
        case Rule::trop_min: return true;
        case Rule::table:
            return std::find(o.cells.begin(), o.cells.end(), kUndefined) == o.cells.end();
        case Rule::nat_add: return hi_ == 0;
        case Rule::nat_mul: return hi_ * hi_ <= hi_;
        case Rule::trop_plus: return hi_ == 0;
        }
        return false;
    }

    // Positive-integer windows: every operation result is at least as large as
    // both operands, so once a term leaves the window it stays out as any
    // argument grows in canonical order.
    bool grows() const noexcept { return builder_.name == "nat-window" && lo_ >= 1; }

    // Least two-sided identity for `op`, if one exists inside the carrier.
    std::optional<Element> identity(Op op) const {
        if (!has(op) || size_ == 0)
            return std::nullopt;
        const auto& o = impl(op);
        switch (o.rule) {
        case Rule::nat_add:
            return lo_ == 0 ? std::optional<Element>(0) : std::nullopt;
        case Rule::nat_mul:
            return (lo_ <= 1 && hi_ >= 1) ? std::optional<Element>(static_cast<Element>(1 - lo_))
                                          : std::nullopt;
        case Rule::zmod_add: return Element{0};
        case Rule::zmod_mul: return static_cast<Element>(size_ == 1 ? 0 : 1);
        case Rule::trop_min: return static_cast<Element>(size_ - 1);
        case Rule::trop_plus: return Element{0};
        default: break;
        }
        for (Element e = 0; e < size_; ++e) {
            bool ok = true;
            for (Element a = 0; a < size_ && ok; ++a)
                ok = apply(op, e, a) == a && apply(op, a, e) == a;
            if (ok)
                return e;
        }
        return std::nullopt;
    }

    std::string label(Element e) const {
        if (e == kUndefined)
            return "undefined";
        if (!labels_.empty())
            return labels_.at(e);
        if (builder_.name == "nat-window")
            return std::to_string(lo_ + e);
        return std::to_string(e);
    }

    std::optional<Element> find_label(const std::string& text) const {
        for (Element e = 0; e < size_; ++e)
            if (label(e) == text)
                return e;
        return std::nullopt;
    }

    // Full operation table (row a, column b), kUndefined for undefined cells.
    std::vector<Element> table(Op op) const {
        std::vector<Element> t(size_ * size_);
        for (Element a = 0; a < size_; ++a)
            for (Element b = 0; b < size_; ++b)
                t[static_cast<std::size_t>(a) * size_ + b] = apply(op, a, b);
        return t;
    }

    const std::vector<std::string>& explicit_labels() const noexcept { return labels_; }

    // Copy with a single table cell replaced; the result is an explicit table.
    GroundStructure with_entry(Op op, Element a, Element b, Element value) const {
        std::optional<std::vector<Element>> add_t, mul_t;
        if (has(Op::add))
            add_t = table(Op::add);
        if (has(Op::mul))
            mul_t = table(Op::mul);
        auto& t = op == Op::add ? add_t : mul_t;
        if (!t)
            throw PreconditionError("no " + std::string(to_string(op)) + " table to modify");
        (*t)[static_cast<std::size_t>(a) * size_ + b] = value;
        return from_tables(kind_, size_, std::move(add_t), std::move(mul_t), labels_or_default());
    }

    // ---- builders -------------------------------------------------------

    static GroundStructure from_tables(Kind kind, std::size_t n,
                                       std::optional<std::vector<Element>> add_table,
                                       std::optional<std::vector<Element>> mul_table,
                                       std::vector<std::string> labels = {}) {
        if (n == 0)
            throw InputError("carrier must be nonempty");
        if (kind == Kind::semiring && (!add_table || !mul_table))
            throw InputError("a semiring needs both add and mul tables");
        if (!add_table && !mul_table)
            throw InputError("a semigroup needs at least one operation table");
        if (!labels.empty() && labels.size() != n)
            throw InputError("label count " + std::to_string(labels.size()) +
                             " does not match carrier size " + std::to_string(n));
        GroundStructure g;
        g.size_ = n;
        g.kind_ = kind;
        g.labels_ = std::move(labels);
        auto install = [&](std::optional<std::vector<Element>>& t, OpImpl& slot, Op op) {
            if (!t)
                return;
            if (t->size() != n * n)
                throw InputError(std::string(to_string(op)) + " table has " +
                                 std::to_string(t->size()) + " cells, expected " +
                                 std::to_string(n * n));
            for (auto v : *t)
                if (v != kUndefined && v >= n)
                    throw InputError(std::string(to_string(op)) + " table entry " +
                                     std::to_string(v) + " is outside the carrier");
            slot.rule = Rule::table;
            slot.cells = std::move(*t);
        };
        install(add_table, g.add_, Op::add);
        install(mul_table, g.mul_, Op::mul);
        return g;
    }

    // Positive integers lo..hi under ordinary + and *.
    static GroundStructure nat_window(std::uint64_t lo, std::uint64_t hi) {
        if (hi < lo)
            throw InputError("nat-window needs lo <= hi");
        if (hi - lo + 1 >= kUndefined || hi > (std::uint64_t{1} << 31))
            throw InputError("nat-window too large");
        GroundStructure g;
        g.size_ = static_cast<std::size_t>(hi - lo + 1);
        g.kind_ = Kind::semiring;
        g.lo_ = lo;
        g.hi_ = hi;
        g.add_.rule = Rule::nat_add;
        g.mul_.rule = Rule::nat_mul;
        g.builder_ = {"nat-window", {lo, hi}};
        return g;
    }

    static GroundStructure nat_window(std::uint64_t max) { return nat_window(1, max); }

    static GroundStructure zmod(std::uint64_t m) {
        if (m == 0 || m > (std::uint64_t{1} << 24))
            throw InputError("zmod modulus must be in 1..2^24");
        GroundStructure g;
        g.size_ = static_cast<std::size_t>(m);
        g.kind_ = Kind::semiring;
        g.add_.rule = Rule::zmod_add;
        g.mul_.rule = Rule::zmod_mul;
        g.builder_ = {"zmod", {m}};
        return g;
    }

    // Values 0..max with min as addition and integer + as multiplication.
    static GroundStructure tropical_window(std::uint64_t max) {
        if (max >= (std::uint64_t{1} << 24))
            throw InputError("tropical-window too large");
        GroundStructure g;
        g.size_ = static_cast<std::size_t>(max + 1);
        g.kind_ = Kind::semiring;
        g.hi_ = max;
        g.add_.rule = Rule::trop_min;
        g.mul_.rule = Rule::trop_plus;
        g.builder_ = {"tropical-window", {max}};
        return g;
    }

    // Nonzero polynomials in N[x] with degree <= max_deg and every coefficient
    // <= max_coeff, ordered by degree and then by (c0, c1, ...).
    static GroundStructure poly_nat(unsigned max_deg, unsigned max_coeff) {
        if (max_coeff == 0)
            throw InputError("poly-nat needs max_coeff >= 1");
        const std::size_t width = max_deg + 1;
        double count = 1;
        for (std::size_t i = 0; i < width; ++i)
            count *= max_coeff + 1.0;
        if (count - 1 > 4096)
            throw InputError("poly-nat carrier exceeds 4096 elements");

        std::vector<std::vector<unsigned>> polys;
        std::vector<unsigned> c(width, 0);
        while (true) {
            std::size_t i = 0;
            while (i < width && c[i] == max_coeff)
                c[i++] = 0;
            if (i == width)
                break;
            ++c[i];
            polys.push_back(c);
        }
        auto degree = [](const std::vector<unsigned>& p) {
            std::size_t d = p.size() - 1;
            while (d > 0 && p[d] == 0)
                --d;
            return d;
        };
        std::sort(polys.begin(), polys.end(), [&](const auto& a, const auto& b) {
            auto da = degree(a), db = degree(b);
            if (da != db)
                return da < db;
            return a < b;
        });
        std::map<std::vector<unsigned>, Element> index;
        for (std::size_t i = 0; i < polys.size(); ++i)
            index.emplace(polys[i], static_cast<Element>(i));

        const std::size_t n = polys.size();
        std::vector<Element> add_t(n * n), mul_t(n * n);
        std::vector<std::string> labels;
        for (std::size_t a = 0; a < n; ++a) {
            labels.push_back(poly_label(polys[a]));
            for (std::size_t b = 0; b < n; ++b) {
                std::vector<unsigned> s(width);
                bool ok = true;
                for (std::size_t i = 0; i < width; ++i) {
                    s[i] = polys[a][i] + polys[b][i];
                    ok = ok && s[i] <= max_coeff;
                }
                add_t[a * n + b] = ok ? index.at(s) : kUndefined;

                std::vector<std::uint64_t> p(2 * width - 1, 0);
                for (std::size_t i = 0; i < width; ++i)
                    for (std::size_t j = 0; j < width; ++j)
                        p[i + j] += std::uint64_t{polys[a][i]} * polys[b][j];
                ok = true;
                std::vector<unsigned> q(width);
                for (std::size_t i = 0; i < p.size(); ++i) {
                    if (i >= width) {
                        ok = ok && p[i] == 0;
                    } else {
                        ok = ok && p[i] <= max_coeff;
                        q[i] = static_cast<unsigned>(p[i]);
                    }
                }
                mul_t[a * n + b] = ok ? index.at(q) : kUndefined;
            }
        }
        auto g = from_tables(Kind::semiring, n, std::move(add_t), std::move(mul_t), std::move(labels));
        g.builder_ = {"poly-nat", {max_deg, max_coeff}};
        return g;
    }

    // Nonempty words of length <= max_len over `alphabet` letters, ordered by
    // length then lexicographically, under concatenation. Semigroup only.
    static GroundStructure free_words(unsigned alphabet, unsigned max_len) {
        if (alphabet == 0 || alphabet > 26 || max_len == 0)
            throw InputError("free-words needs 1..26 letters and max_len >= 1");
        std::vector<std::string> words;
        std::vector<std::string> layer{""};
        for (unsigned len = 1; len <= max_len; ++len) {
            std::vector<std::string> next;
            for (const auto& w : layer)
                for (unsigned c = 0; c < alphabet; ++c)
                    next.push_back(w + static_cast<char>('a' + c));
            words.insert(words.end(), next.begin(), next.end());
            layer = std::move(next);
            if (words.size() > 4096)
                throw InputError("free-words carrier exceeds 4096 elements");
        }
        std::map<std::string, Element> index;
        for (std::size_t i = 0; i < words.size(); ++i)
            index.emplace(words[i], static_cast<Element>(i));
        const std::size_t n = words.size();
        std::vector<Element> mul_t(n * n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                auto it = index.find(words[a] + words[b]);
                mul_t[a * n + b] = it == index.end() ? kUndefined : it->second;
            }
        auto g = from_tables(Kind::semigroup, n, std::nullopt, std::move(mul_t), words);
        g.builder_ = {"free-words", {alphabet, max_len}};
        return g;
    }

private:
    enum class Rule : std::uint8_t { absent, table, nat_add, nat_mul, zmod_add, zmod_mul, trop_min, trop_plus };

    struct OpImpl {
        Rule rule = Rule::absent;
        std::vector<Element> cells;
    };

    const OpImpl& impl(Op op) const noexcept { return op == Op::add ? add_ : mul_; }

    std::vector<std::string> labels_or_default() const {
        if (!labels_.empty())
            return labels_;
        std::vector<std::string> l;
        if (builder_.name == "explicit-table")
            return l;
        for (Element e = 0; e < size_; ++e)
            l.push_back(label(e));
        return l;
    }

    static std::string poly_label(const std::vector<unsigned>& c) {
        std::string s;
        for (std::size_t i = c.size(); i-- > 0;) {
            if (c[i] == 0)
                continue;
            if (!s.empty())
                s += '+';
            if (i == 0) {
                s += std::to_string(c[i]);
                continue;
            }
            if (c[i] != 1)
                s += std::to_string(c[i]);
            s += 'x';
            if (i > 1)
                s += '^' + std::to_string(i);
        }
        return s;
    }

    std::size_t size_ = 0;
    Kind kind_ = Kind::semigroup;
    BuilderSpec builder_;
    std::uint64_t lo_ = 0;
    std::uint64_t hi_ = 0;
    OpImpl add_;
    OpImpl mul_;
    std::vector<std::string> labels_;
};

} // namespace prlab
