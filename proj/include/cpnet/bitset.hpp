#pragma once

// Dense dynamically-sized bit set. Used for node sets, relation rows and
// reachability frontiers; all set algebra the algorithms need (union,
// difference, subset, iteration) runs word-parallel.

#include <array>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cpnet {

class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const { return size_; }

    bool test(std::size_t i) const {
        assert(i < size_);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i) {
        assert(i < size_);
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }

    void reset(std::size_t i) {
        assert(i < size_);
        words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    void clear() { words_.assign(words_.size(), 0); }

    bool any() const {
        for (std::uint64_t w : words_)
            if (w) return true;
        return false;
    }

    bool none() const { return !any(); }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    Bitset& operator|=(const Bitset& other) {
        assert(size_ == other.size_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    Bitset& operator&=(const Bitset& other) {
        assert(size_ == other.size_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
        return *this;
    }

    // Set difference: removes every element of `other`.
    Bitset& operator-=(const Bitset& other) {
        assert(size_ == other.size_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
        return *this;
    }

    // this = a - b, without touching previous contents. Reuses the existing
    // allocation, which matters in per-pair inner loops.
    void assign_difference(const Bitset& a, const Bitset& b) {
        assert(size_ == a.size_ && size_ == b.size_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] = a.words_[i] & ~b.words_[i];
    }

    friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
    friend Bitset operator-(Bitset a, const Bitset& b) { return a -= b; }

    bool operator==(const Bitset& other) const {
        return size_ == other.size_ && words_ == other.words_;
    }

    bool intersects(const Bitset& other) const {
        assert(size_ == other.size_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & other.words_[i]) return true;
        return false;
    }

    bool is_subset_of(const Bitset& other) const {
        assert(size_ == other.size_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    // this |= (add - sub); returns true when at least one new bit appeared.
    // Fused form of the accumulation step the relation builders run hottest.
    bool union_difference(const Bitset& add, const Bitset& sub) {
        assert(size_ == add.size_ && size_ == sub.size_);
        std::uint64_t grew = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            const std::uint64_t incoming = add.words_[i] & ~sub.words_[i];
            grew |= incoming & ~words_[i];
            words_[i] |= incoming;
        }
        return grew != 0;
    }

    // Calls fn(index) for every set bit in ascending order.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                const int bit = std::countr_zero(w);
                fn(static_cast<std::size_t>(wi * 64 + static_cast<std::size_t>(bit)));
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> to_vector() const {
        std::vector<std::size_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    // Raw word access for algorithms that work on whole rows at once.
    const std::vector<std::uint64_t>& words() const { return words_; }

    // OR a whole word in; the caller must not introduce bits beyond size().
    void or_word(std::size_t word_index, std::uint64_t bits) {
        assert(word_index < words_.size());
        assert(word_index + 1 < words_.size() || (size_ & 63) == 0 ||
               (bits >> (size_ & 63)) == 0);
        words_[word_index] |= bits;
    }

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

namespace detail {

// In-place transpose of a 64x64 bit matrix held as 64 row words, bit c of
// row r being column c. Recursive block swap on half-size submatrices
// (Hacker's Delight, section 7-3, adapted to bit 0 = column 0).
inline void transpose64(std::array<std::uint64_t, 64>& a) {
    std::uint64_t m = 0x00000000FFFFFFFFull;
    for (int j = 32; j != 0; j >>= 1, m ^= m << j) {
        for (int k = 0; k < 64; k = ((k | j) + 1) & ~j) {
            const std::uint64_t t = ((a[k] >> j) ^ a[k | j]) & m;
            a[k] ^= t << j;
            a[k | j] ^= t;
        }
    }
}

}  // namespace detail

}  // namespace cpnet
