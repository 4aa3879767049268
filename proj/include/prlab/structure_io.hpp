#pragma once

// Text formats for structures, subsets and colorings.
//
// Structure file:
//   # comment
//   kind semiring
//   builder zmod 6                 (or nat-window LO HI | nat-window MAX | poly-nat DEG COEFF |
//                                   tropical-window MAX | free-words LETTERS MAXLEN)
// or an explicit structure:
//   kind semigroup
//   size 3
//   labels a b c                   (optional)
//   table mul
//   0 1 2
//   1 2 -                          ('-' marks an undefined cell)
//   ...
//
// Subset file: element indices, one per line.  Coloring file: one color index
// per carrier element in canonical order (any whitespace separates).

#include "coloring.hpp"
#include "core.hpp"
#include "structure.hpp"
#include "subset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace prlab {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;)
        out.push_back(tok);
    return out;
}

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::uint64_t parse_uint(const std::string& tok, const std::string& what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw InputError("expected a non-negative integer for " + what + ", got '" + tok + "'");
    return v;
}

} // namespace detail

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline GroundStructure build_structure(const std::string& name, const std::vector<std::uint64_t>& p,
                                       std::optional<Kind> declared) {
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (p.size() < lo || p.size() > hi)
            throw InputError("builder " + name + " takes " + std::to_string(lo) +
                             (lo == hi ? "" : ".." + std::to_string(hi)) + " parameters");
    };
    GroundStructure g;
    if (name == "nat-window") {
        need(1, 2);
        g = p.size() == 1 ? GroundStructure::nat_window(p[0]) : GroundStructure::nat_window(p[0], p[1]);
    } else if (name == "zmod") {
        need(1, 1);
        g = GroundStructure::zmod(p[0]);
    } else if (name == "poly-nat") {
        need(2, 2);
        g = GroundStructure::poly_nat(static_cast<unsigned>(p[0]), static_cast<unsigned>(p[1]));
    } else if (name == "tropical-window") {
        need(1, 1);
        g = GroundStructure::tropical_window(p[0]);
    } else if (name == "free-words") {
        need(2, 2);
        if (declared == Kind::semiring)
            throw InputError("free-words is semigroup-only (no addition)");
        g = GroundStructure::free_words(static_cast<unsigned>(p[0]), static_cast<unsigned>(p[1]));
    } else {
        throw InputError("unknown builder '" + name + "'");
    }
    return g;
}

inline GroundStructure parse_structure(const std::string& text) {
    std::istringstream in(text);
    std::optional<Kind> kind;
    std::optional<std::size_t> size;
    std::vector<std::string> labels;
    std::optional<std::vector<Element>> tables[2];
    std::optional<std::string> builder;
    std::vector<std::uint64_t> builder_params;

    std::vector<std::vector<std::string>> lines;
    std::vector<std::size_t> line_numbers;
    std::size_t lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        auto toks = detail::split_ws(detail::strip_comment(raw));
        if (!toks.empty()) {
            lines.push_back(std::move(toks));
            line_numbers.push_back(lineno);
        }
    }

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& t = lines[i];
        const std::string where = "line " + std::to_string(line_numbers[i]) + ": ";
        if (t[0] == "kind") {
            if (t.size() != 2 || (t[1] != "semiring" && t[1] != "semigroup"))
                throw InputError(where + "expected 'kind semiring|semigroup'");
            kind = t[1] == "semiring" ? Kind::semiring : Kind::semigroup;
        } else if (t[0] == "builder") {
            if (t.size() < 2)
                throw InputError(where + "builder needs a name");
            builder = t[1];
            for (std::size_t j = 2; j < t.size(); ++j)
                builder_params.push_back(detail::parse_uint(t[j], "builder parameter"));
        } else if (t[0] == "size") {
            if (t.size() != 2)
                throw InputError(where + "expected 'size N'");
            size = static_cast<std::size_t>(detail::parse_uint(t[1], "size"));
            if (*size == 0 || *size > 4096)
                throw InputError(where + "explicit carrier size must be in 1..4096");
        } else if (t[0] == "labels") {
            labels.assign(t.begin() + 1, t.end());
        } else if (t[0] == "table") {
            if (t.size() != 2)
                throw InputError(where + "expected 'table add|mul'");
            if (!size)
                throw InputError(where + "'size' must precede tables");
            const Op op = parse_op(t[1]);
            const std::size_t n = *size;
            std::vector<Element> cells;
            cells.reserve(n * n);
            for (std::size_t r = 0; r < n; ++r) {
                if (++i >= lines.size())
                    throw InputError(where + "table " + t[1] + " has fewer than " + std::to_string(n) + " rows");
                const auto& row = lines[i];
                if (row.size() != n)
                    throw InputError("line " + std::to_string(line_numbers[i]) + ": table row has " +
                                     std::to_string(row.size()) + " entries, expected " + std::to_string(n));
                for (const auto& cell : row) {
                    if (cell == "-") {
                        cells.push_back(kUndefined);
                        continue;
                    }
                    auto v = detail::parse_uint(cell, "table entry");
                    if (v >= n)
                        throw InputError("line " + std::to_string(line_numbers[i]) + ": entry " + cell +
                                         " is outside the carrier {0.." + std::to_string(n - 1) + "}");
                    cells.push_back(static_cast<Element>(v));
                }
            }
            tables[op == Op::add ? 0 : 1] = std::move(cells);
        } else {
            throw InputError(where + "unknown field '" + t[0] + "'");
        }
    }

    if (builder && *builder != "explicit-table") {
        if (size || tables[0] || tables[1])
            throw InputError("a builder structure cannot also carry explicit tables");
        auto g = build_structure(*builder, builder_params, kind);
        if (kind && *kind != g.kind())
            throw InputError("declared kind does not match builder " + g.describe());
        return g;
    }
    if (!size)
        throw InputError("explicit structure needs 'size'");
    if (!kind)
        kind = (tables[0] && tables[1]) ? Kind::semiring : Kind::semigroup;
    return GroundStructure::from_tables(*kind, *size, tables[0], tables[1], labels);
}

inline GroundStructure load_structure_file(const std::string& path) { return parse_structure(read_text_file(path)); }

inline std::string to_structure_text(const GroundStructure& g) {
    std::ostringstream out;
    out << "kind " << to_string(g.kind()) << '\n';
    if (g.builder().name != "explicit-table") {
        out << "builder " << g.builder().name;
        for (auto p : g.builder().params)
            out << ' ' << p;
        out << '\n';
        return out.str();
    }
    out << "size " << g.size() << '\n';
    if (!g.explicit_labels().empty()) {
        out << "labels";
        for (const auto& l : g.explicit_labels())
            out << ' ' << l;
        out << '\n';
    }
    for (Op op : {Op::add, Op::mul}) {
        if (!g.has(op))
            continue;
        out << "table " << to_string(op) << '\n';
        for (Element a = 0; a < g.size(); ++a) {
            for (Element b = 0; b < g.size(); ++b) {
                const Element v = g.apply(op, a, b);
                out << (b ? " " : "") << (v == kUndefined ? std::string("-") : std::to_string(v));
            }
            out << '\n';
        }
    }
    return out.str();
}

inline SubsetMask parse_subset(const std::string& text, std::size_t carrier_size) {
    SubsetMask m(carrier_size);
    std::istringstream in(text);
    for (std::string raw; std::getline(in, raw);)
        for (const auto& tok : detail::split_ws(detail::strip_comment(raw))) {
            auto v = detail::parse_uint(tok, "subset element");
            if (v >= carrier_size)
                throw InputError("subset element " + tok + " outside carrier of size " +
                                 std::to_string(carrier_size));
            m.insert(static_cast<Element>(v));
        }
    return m;
}

inline std::string to_subset_text(const SubsetMask& m) {
    std::string s;
    for (Element e : m.elements())
        s += std::to_string(e) + '\n';
    return s;
}

// `k == 0` infers the color count as max color + 1 (at least 2).
inline Coloring parse_coloring(const std::string& text, std::size_t carrier_size, std::uint32_t k = 0) {
    std::vector<std::uint32_t> colors;
    std::istringstream in(text);
    for (std::string raw; std::getline(in, raw);)
        for (const auto& tok : detail::split_ws(detail::strip_comment(raw)))
            colors.push_back(static_cast<std::uint32_t>(detail::parse_uint(tok, "color")));
    if (colors.size() != carrier_size)
        throw InputError("coloring has " + std::to_string(colors.size()) + " entries, carrier has " +
                         std::to_string(carrier_size));
    if (k == 0) {
        k = 2;
        for (auto c : colors)
            k = std::max(k, c + 1);
    }
    return Coloring(std::move(colors), k);
}

inline std::string to_coloring_text(const Coloring& c) {
    std::string s;
    for (std::size_t i = 0; i < c.colors.size(); ++i)
        s += (i ? " " : "") + std::to_string(c.colors[i]);
    return s + '\n';
}

} // namespace prlab
