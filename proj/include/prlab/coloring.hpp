#pragma once

#include "core.hpp"
#include "subset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace prlab {

// Assignment of one of `k` colors to every carrier element, in canonical order.
struct Coloring {
    std::vector<std::uint32_t> colors;
    std::uint32_t k = 2;

    Coloring() = default;
    Coloring(std::vector<std::uint32_t> c, std::uint32_t k_) : colors(std::move(c)), k(k_) { validate(); }

    static Coloring uniform(std::size_t n, std::uint32_t k, std::uint32_t color = 0) {
        return Coloring(std::vector<std::uint32_t>(n, color), k);
    }

    template <class Pred>
    static Coloring by_predicate(std::size_t n, Pred&& is_color_one) {
        std::vector<std::uint32_t> c(n);
        for (std::size_t i = 0; i < n; ++i)
            c[i] = is_color_one(static_cast<Element>(i)) ? 1U : 0U;
        return Coloring(std::move(c), 2);
    }

    std::size_t size() const noexcept { return colors.size(); }
    std::uint32_t operator[](Element e) const { return colors.at(e); }

    SubsetMask color_class(std::uint32_t c) const {
        SubsetMask m(colors.size());
        for (std::size_t i = 0; i < colors.size(); ++i)
            if (colors[i] == c)
                m.insert(static_cast<Element>(i));
        return m;
    }

    void validate() const {
        if (k == 0)
            throw InputError("a coloring needs at least one color");
        for (auto c : colors)
            if (c >= k)
                throw InputError("color " + std::to_string(c) + " out of range for k=" + std::to_string(k));
    }

    friend bool operator==(const Coloring&, const Coloring&) = default;
};

} // namespace prlab
