#pragma once

#include "core.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace prlab {

// Membership mask over a carrier of fixed size. Bits past `size()` are kept
// zero so word-level comparisons stay exact.
class SubsetMask {
public:
    SubsetMask() = default;

    explicit SubsetMask(std::size_t n, bool full = false)
        : size_(n), words_((n + 63) / 64, full ? ~std::uint64_t{0} : 0) {
        trim();
    }

    static SubsetMask of(std::size_t n, std::span<const Element> members) {
        SubsetMask m(n);
        for (Element e : members)
            m.insert(e);
        return m;
    }

    static SubsetMask of(std::size_t n, std::initializer_list<Element> members) {
        return of(n, std::span<const Element>(members.begin(), members.size()));
    }

    template <class Pred>
    static SubsetMask where(std::size_t n, Pred&& pred) {
        SubsetMask m(n);
        for (std::size_t i = 0; i < n; ++i)
            if (pred(static_cast<Element>(i)))
                m.insert(static_cast<Element>(i));
        return m;
    }

    std::size_t size() const noexcept { return size_; }

    bool contains(Element e) const noexcept {
        return e < size_ && ((words_[e >> 6] >> (e & 63)) & 1U) != 0;
    }

    void insert(Element e) {
        check(e);
        words_[e >> 6] |= std::uint64_t{1} << (e & 63);
    }

    void erase(Element e) {
        check(e);
        words_[e >> 6] &= ~(std::uint64_t{1} << (e & 63));
    }

    std::size_t count() const noexcept {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool none() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
    }

    bool all() const noexcept { return count() == size_; }

    // Least member, or kUndefined when empty.
    Element first() const noexcept {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w] != 0)
                return static_cast<Element>(w * 64 + std::countr_zero(words_[w]));
        return kUndefined;
    }

    SubsetMask complement() const {
        SubsetMask r(*this);
        for (auto& w : r.words_)
            w = ~w;
        r.trim();
        return r;
    }

    SubsetMask& operator&=(const SubsetMask& o) {
        same_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= o.words_[i];
        return *this;
    }

    SubsetMask& operator|=(const SubsetMask& o) {
        same_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= o.words_[i];
        return *this;
    }

    friend SubsetMask operator&(SubsetMask a, const SubsetMask& b) { return a &= b; }
    friend SubsetMask operator|(SubsetMask a, const SubsetMask& b) { return a |= b; }

    bool subset_of(const SubsetMask& o) const {
        same_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if ((words_[i] & ~o.words_[i]) != 0)
                return false;
        return true;
    }

    bool intersects(const SubsetMask& o) const {
        same_size(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if ((words_[i] & o.words_[i]) != 0)
                return true;
        return false;
    }

    std::vector<Element> elements() const {
        std::vector<Element> out;
        out.reserve(count());
        for (std::size_t w = 0; w < words_.size(); ++w) {
            auto bits = words_[w];
            while (bits != 0) {
                out.push_back(static_cast<Element>(w * 64 + std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

private:
    void trim() {
        if (size_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
    }

    void check(Element e) const {
        if (e >= size_)
            throw InputError("element " + std::to_string(e) + " outside carrier of size " +
                             std::to_string(size_));
    }

    void same_size(const SubsetMask& o) const {
        if (o.size_ != size_)
            throw InputError("subset size mismatch: " + std::to_string(size_) + " vs " +
                             std::to_string(o.size_));
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace prlab
