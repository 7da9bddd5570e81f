#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace blowup {

// Fixed-universe dynamic bitset. Unused tail bits are kept zero so popcounts
// and whole-word comparisons need no masking.
class Bitset {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Bitset() = default;
    explicit Bitset(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    static Bitset all_set(std::size_t bits) {
        Bitset b(bits);
        for (auto& w : b.words_) w = ~std::uint64_t{0};
        b.trim();
        return b;
    }

    std::size_t universe() const { return bits_; }

    bool test(std::size_t i) const {
        check(i);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    void set(std::size_t i) {
        check(i);
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    void reset(std::size_t i) {
        check(i);
        words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    Bitset& operator&=(const Bitset& o) {
        match(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        match(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }
    /// this := this \ o
    Bitset& subtract(const Bitset& o) {
        match(o);
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
        return *this;
    }

    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
    friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
    friend Bitset difference(Bitset a, const Bitset& b) { return a.subtract(b); }

    bool operator==(const Bitset& o) const { return bits_ == o.bits_ && words_ == o.words_; }

    /// |a ∩ b|
    static std::size_t count_and(const Bitset& a, const Bitset& b) {
        a.match(b);
        std::size_t c = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k)
            c += static_cast<std::size_t>(std::popcount(a.words_[k] & b.words_[k]));
        return c;
    }
    /// |a ∩ b ∩ c|
    static std::size_t count_and(const Bitset& a, const Bitset& b, const Bitset& c) {
        a.match(b);
        a.match(c);
        std::size_t n = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k)
            n += static_cast<std::size_t>(std::popcount(a.words_[k] & b.words_[k] & c.words_[k]));
        return n;
    }
    /// |a \ b|
    static std::size_t count_minus(const Bitset& a, const Bitset& b) {
        a.match(b);
        std::size_t c = 0;
        for (std::size_t k = 0; k < a.words_.size(); ++k)
            c += static_cast<std::size_t>(std::popcount(a.words_[k] & ~b.words_[k]));
        return c;
    }
    static bool intersects(const Bitset& a, const Bitset& b) {
        a.match(b);
        for (std::size_t k = 0; k < a.words_.size(); ++k)
            if (a.words_[k] & b.words_[k]) return true;
        return false;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                std::size_t bit = static_cast<std::size_t>(std::countr_zero(w));
                f(k * 64 + bit);
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> to_indices() const {
        std::vector<std::size_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    std::size_t first() const {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
        return npos;
    }

    std::span<const std::uint64_t> words() const { return words_; }

private:
    void check(std::size_t i) const {
        if (i >= bits_) throw std::out_of_range("Bitset: index out of range");
    }
    void match(const Bitset& o) const {
        if (bits_ != o.bits_) throw std::invalid_argument("Bitset: universe mismatch");
    }
    void trim() {
        if (bits_ & 63) words_.back() &= (std::uint64_t{1} << (bits_ & 63)) - 1;
    }

    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace blowup
