#pragma once

// Pattern DSL:
//
//   family := "{" term ("," term)* (":" binder ("," binder)*)? "}"
//   binder := ident "in" int ".." (int | ident)
//   term   := sum
//   sum    := prod ("+" prod)*
//   prod   := atom (("*")? atom)*       (juxtaposition multiplies)
//   atom   := int? ident ("^" (int | ident))? | "(" sum ")" ("^" (int | ident))?
//
// Identifiers that are binder indices or named parameters (binder upper
// bounds, or names supplied by the caller) act as amounts: inside a product
// they become a repeated-addition coefficient, after '^' an exponent. Every
// other identifier is a pattern variable.

#include "core.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace prlab {

// literal * product of named amounts (binder indices or parameters)
struct Amount {
    std::uint64_t literal = 1;
    std::vector<std::string> symbols;

    bool is_one() const { return literal == 1 && symbols.empty(); }

    std::uint64_t evaluate(const std::map<std::string, std::uint64_t>& env) const {
        std::uint64_t v = literal;
        for (const auto& s : symbols) {
            auto it = env.find(s);
            if (it == env.end())
                throw InputError("unbound index '" + s + "'");
            v *= it->second;
        }
        return v;
    }

    std::string render() const {
        std::string s;
        if (literal != 1 || symbols.empty())
            s = std::to_string(literal);
        for (const auto& sym : symbols)
            s += (s.empty() ? "" : "*") + sym;
        return s;
    }

    friend bool operator==(const Amount&, const Amount&) = default;
};

struct PatternTerm {
    enum class Node : std::uint8_t { variable, sum, product, power, coeff };

    Node node = Node::variable;
    std::string name;                  // variable
    std::vector<PatternTerm> children; // sum/product operands, or the single power/coeff operand
    Amount amount;                     // exponent or multiplier

    friend bool operator==(const PatternTerm&, const PatternTerm&) = default;
};

struct Binder {
    std::string index;
    std::uint64_t lower = 1;
    Amount upper;
};

struct PatternConstraints {
    bool distinct = true;         // variables pairwise distinct
    Element min_element = 0;      // every variable's canonical index >= this
};

struct PatternFamily {
    std::string source;
    std::vector<std::string> variables; // in order of first appearance
    std::vector<Binder> binders;
    std::vector<std::string> parameters; // free amounts to be supplied at compile time
    std::vector<PatternTerm> terms;
    PatternConstraints constraints;
};

// A term with every amount resolved and variables referenced by position.
struct GroundTerm {
    PatternTerm::Node node = PatternTerm::Node::variable;
    std::uint32_t var = 0;
    std::uint64_t amount = 1;
    std::vector<GroundTerm> children;

    friend bool operator==(const GroundTerm&, const GroundTerm&) = default;
};

namespace detail {

class PatternParser {
public:
    PatternParser(const std::string& text, const std::set<std::string>& params) : s_(text), params_(params) {}

    PatternFamily parse() {
        // Binder names must be known before the terms are read.
        std::vector<Binder> binders;
        if (auto colon = binder_colon()) {
            PatternParser bp(s_, params_);
            bp.p_ = *colon + 1;
            do
                binders.push_back(bp.parse_binder());
            while (bp.accept(','));
        }
        for (const auto& b : binders) {
            params_.insert(b.index);
            for (const auto& sym : b.upper.symbols)
                params_.insert(sym);
        }

        PatternFamily fam;
        fam.source = s_;
        expect('{');
        do
            fam.terms.push_back(parse_sum());
        while (accept(','));
        if (accept(':')) {
            do
                parse_binder();
            while (accept(','));
        }
        expect('}');
        skip();
        if (p_ != s_.size())
            fail("unexpected trailing input");
        return finish(std::move(fam), binders, params_);
    }

private:
    PatternFamily finish(PatternFamily fam, const std::vector<Binder>& binders, const std::set<std::string>& amounts) {
        fam.binders = binders;
        fam.variables.clear();
        for (const auto& t : fam.terms)
            collect_vars(t, fam.variables);
        if (fam.variables.empty())
            throw ParseError(0, "pattern has no variables");
        std::set<std::string> bound;
        for (const auto& b : binders) {
            if (bound.count(b.index))
                throw ParseError(0, "binder '" + b.index + "' declared twice");
            if (std::find(fam.variables.begin(), fam.variables.end(), b.index) != fam.variables.end())
                throw ParseError(0, "binder '" + b.index + "' also used as a variable");
            bound.insert(b.index);
        }
        for (const auto& a : amounts)
            if (!bound.count(a))
                fam.parameters.push_back(a);
        return fam;
    }

    static void collect_vars(const PatternTerm& t, std::vector<std::string>& out) {
        if (t.node == PatternTerm::Node::variable) {
            if (std::find(out.begin(), out.end(), t.name) == out.end())
                out.push_back(t.name);
            return;
        }
        for (const auto& c : t.children)
            collect_vars(c, out);
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(p_, msg); }

    std::optional<std::size_t> binder_colon() const {
        int depth = 0;
        for (std::size_t i = 0; i < s_.size(); ++i) {
            const char c = s_[i];
            if (c == '(')
                ++depth;
            else if (c == ')')
                --depth;
            else if (c == ':' && depth == 0)
                return i;
        }
        return std::nullopt;
    }

    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_])))
            ++p_;
    }

    bool accept(char c) {
        skip();
        if (p_ < s_.size() && s_[p_] == c) {
            ++p_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (p_ >= s_.size())
                fail(std::string("expected '") + c + "' but input ended");
            fail(std::string("expected '") + c + "'");
        }
    }

    bool peek_digit() {
        skip();
        return p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]));
    }

    bool peek_ident() {
        skip();
        return p_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_');
    }

    std::uint64_t parse_int() {
        if (!peek_digit())
            fail("expected an integer");
        std::uint64_t v = 0;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) {
            v = v * 10 + static_cast<std::uint64_t>(s_[p_++] - '0');
            if (v > (std::uint64_t{1} << 32))
                fail("integer too large");
        }
        return v;
    }

    std::string parse_ident() {
        if (!peek_ident())
            fail(p_ >= s_.size() ? "expected an identifier but input ended" : "expected an identifier");
        const std::size_t start = p_;
        while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_'))
            ++p_;
        return s_.substr(start, p_ - start);
    }

    Binder parse_binder() {
        Binder b;
        b.index = parse_ident();
        skip();
        if (parse_ident() != "in")
            fail("expected 'in'");
        b.lower = parse_int();
        skip();
        if (s_.compare(p_, 2, "..") != 0)
            fail("expected '..'");
        p_ += 2;
        if (peek_digit())
            b.upper.literal = parse_int();
        else
            b.upper.symbols.push_back(parse_ident());
        return b;
    }

    Amount parse_exponent() {
        Amount a;
        if (peek_digit()) {
            a.literal = parse_int();
            if (a.literal == 0)
                fail("exponents must be positive");
        } else {
            const auto pos = p_;
            auto name = parse_ident();
            if (!params_.count(name)) {
                p_ = pos;
                fail("unbound index '" + name + "' in exponent");
            }
            a.symbols.push_back(name);
        }
        return a;
    }

    PatternTerm parse_sum() {
        std::vector<PatternTerm> parts{parse_prod()};
        while (accept('+'))
            parts.push_back(parse_prod());
        if (parts.size() == 1)
            return std::move(parts.front());
        PatternTerm t;
        t.node = PatternTerm::Node::sum;
        t.children = std::move(parts);
        return t;
    }

    // A factor is either an amount (literal or named) or a term.
    struct Factor {
        std::optional<Amount> amount;
        PatternTerm term;
    };

    Factor parse_atom() {
        skip();
        const std::size_t start = p_;
        if (accept('(')) {
            Factor f;
            f.term = parse_sum();
            expect(')');
            if (accept('^'))
                f.term = power(std::move(f.term), parse_exponent());
            return f;
        }
        std::optional<std::uint64_t> coeff;
        if (peek_digit()) {
            coeff = parse_int();
            if (!peek_ident()) {
                if (*coeff == 0)
                    fail("coefficients must be positive");
                return Factor{Amount{*coeff, {}}, {}};
            }
        }
        if (!peek_ident()) {
            p_ = start;
            skip();
            fail(p_ >= s_.size() ? "expected a term but input ended" : "expected a term");
        }
        const std::string name = parse_ident();
        if (params_.count(name)) {
            if (skip(), p_ < s_.size() && s_[p_] == '^')
                fail("an index cannot be raised to a power");
            Amount a{coeff.value_or(1), {name}};
            return Factor{a, {}};
        }
        PatternTerm v;
        v.node = PatternTerm::Node::variable;
        v.name = name;
        if (accept('^'))
            v = power(std::move(v), parse_exponent());
        if (coeff) {
            if (*coeff == 0)
                fail("coefficients must be positive");
            if (*coeff != 1)
                v = scale(std::move(v), Amount{*coeff, {}});
        }
        return Factor{std::nullopt, std::move(v)};
    }

    PatternTerm parse_prod() {
        Amount coeff;
        std::vector<PatternTerm> factors;
        bool juxtaposed = false;
        do {
            auto f = parse_atom();
            if (f.amount) {
                coeff.literal *= f.amount->literal;
                coeff.symbols.insert(coeff.symbols.end(), f.amount->symbols.begin(), f.amount->symbols.end());
            } else {
                factors.push_back(std::move(f.term));
            }
            // juxtaposition multiplies: "k x", "x^j y", "2(x+y)"
            juxtaposed = peek_ident() || (p_ < s_.size() && s_[p_] == '(');
        } while (juxtaposed || accept('*'));
        if (factors.empty())
            fail("constant terms are not allowed; a product needs a variable");
        PatternTerm t;
        if (factors.size() == 1) {
            t = std::move(factors.front());
        } else {
            t.node = PatternTerm::Node::product;
            t.children = std::move(factors);
        }
        if (!coeff.is_one())
            t = scale(std::move(t), coeff);
        return t;
    }

    static PatternTerm power(PatternTerm base, Amount e) {
        PatternTerm t;
        t.node = PatternTerm::Node::power;
        t.amount = std::move(e);
        t.children.push_back(std::move(base));
        return t;
    }

    static PatternTerm scale(PatternTerm base, Amount c) {
        PatternTerm t;
        t.node = PatternTerm::Node::coeff;
        t.amount = std::move(c);
        t.children.push_back(std::move(base));
        return t;
    }

    const std::string& s_;
    std::set<std::string> params_;
    std::size_t p_ = 0;
};

} // namespace detail

// Parses pattern source. `parameters` names identifiers that act as amounts
// without being binder indices (e.g. k in "{x, y, k*x+y}").
inline PatternFamily parse_pattern(const std::string& text, const std::set<std::string>& parameters = {}) {
    detail::PatternParser p(text, parameters);
    return p.parse();
}

inline std::string render(const PatternTerm& t) {
    using N = PatternTerm::Node;
    switch (t.node) {
    case N::variable: return t.name;
    case N::sum: {
        std::string s;
        for (std::size_t i = 0; i < t.children.size(); ++i)
            s += (i ? "+" : "") + render(t.children[i]);
        return s;
    }
    case N::product: {
        std::string s;
        for (std::size_t i = 0; i < t.children.size(); ++i) {
            const auto& c = t.children[i];
            const bool wrap = c.node == N::sum || c.node == N::coeff;
            s += (i ? "*" : "") + (wrap ? "(" + render(c) + ")" : render(c));
        }
        return s;
    }
    case N::power: {
        const auto& c = t.children.front();
        const bool wrap = c.node != N::variable;
        return (wrap ? "(" + render(c) + ")" : render(c)) + "^" + t.amount.render();
    }
    case N::coeff: {
        const auto& c = t.children.front();
        const bool wrap = c.node == N::sum;
        return t.amount.render() + "*" + (wrap ? "(" + render(c) + ")" : render(c));
    }
    }
    return "?";
}

} // namespace prlab
