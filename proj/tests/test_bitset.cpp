#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <random>

#include "cpnet/bitset.hpp"

using cpnet::Bitset;

TEST_CASE("bitset basic set/test/reset") {
    Bitset b(130);
    REQUIRE(b.size() == 130);
    REQUIRE(b.none());
    b.set(0);
    b.set(64);
    b.set(129);
    REQUIRE(b.test(0));
    REQUIRE(b.test(64));
    REQUIRE(b.test(129));
    REQUIRE_FALSE(b.test(1));
    REQUIRE(b.count() == 3);
    REQUIRE(b.any());
    b.reset(64);
    REQUIRE_FALSE(b.test(64));
    REQUIRE(b.count() == 2);
    b.clear();
    REQUIRE(b.none());
}

TEST_CASE("bitset set algebra") {
    Bitset a(100), b(100);
    a.set(1);
    a.set(70);
    b.set(70);
    b.set(99);

    Bitset u = a | b;
    REQUIRE(u.count() == 3);
    REQUIRE(u.test(1));
    REQUIRE(u.test(70));
    REQUIRE(u.test(99));

    Bitset i = a & b;
    REQUIRE(i.count() == 1);
    REQUIRE(i.test(70));

    Bitset d = a - b;
    REQUIRE(d.count() == 1);
    REQUIRE(d.test(1));

    REQUIRE(a.intersects(b));
    REQUIRE_FALSE(d.intersects(b));
    REQUIRE(i.is_subset_of(a));
    REQUIRE(i.is_subset_of(b));
    REQUIRE_FALSE(a.is_subset_of(b));
    REQUIRE(a == a);
    REQUIRE_FALSE(a == b);
}

TEST_CASE("bitset union_difference reports growth") {
    Bitset target(80), add(80), sub(80);
    add.set(3);
    add.set(40);
    add.set(77);
    sub.set(40);

    REQUIRE(target.union_difference(add, sub));
    REQUIRE(target.test(3));
    REQUIRE_FALSE(target.test(40));
    REQUIRE(target.test(77));

    // Same request again adds nothing.
    REQUIRE_FALSE(target.union_difference(add, sub));

    // Everything new already masked out.
    Bitset masked(80);
    sub.set(3);
    sub.set(77);
    REQUIRE_FALSE(masked.union_difference(add, sub));
    REQUIRE(masked.none());
}

TEST_CASE("bitset iteration is ascending") {
    Bitset b(200);
    const std::vector<std::size_t> want = {0, 5, 63, 64, 65, 128, 199};
    for (std::size_t i : want) b.set(i);
    REQUIRE(b.to_vector() == want);
}

TEST_CASE("assign_difference overwrites in place") {
    Bitset a(70), b(70), d(70);
    a.set(0);
    a.set(65);
    a.set(69);
    b.set(65);
    d.set(3);  // stale content must vanish
    d.assign_difference(a, b);
    REQUIRE(d.count() == 2);
    REQUIRE(d.test(0));
    REQUIRE(d.test(69));
    REQUIRE_FALSE(d.test(3));
    REQUIRE_FALSE(d.test(65));
    REQUIRE(d == a - b);
}

TEST_CASE("word access round-trips through or_word") {
    Bitset a(130);
    a.set(5);
    a.set(64);
    a.set(129);
    Bitset b(130);
    for (std::size_t wi = 0; wi < a.words().size(); ++wi)
        b.or_word(wi, a.words()[wi]);
    REQUIRE(a == b);
    b.or_word(0, 0b110);
    REQUIRE(b.test(1));
    REQUIRE(b.test(2));
    REQUIRE(b.count() == 5);
}

TEST_CASE("64x64 block transpose matches the naive definition") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 20; ++round) {
        std::array<std::uint64_t, 64> m;
        for (std::uint64_t& w : m) w = rng();
        std::array<std::uint64_t, 64> t = m;
        cpnet::detail::transpose64(t);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c) {
                const bool orig = (m[r] >> c) & 1;
                const bool flipped = (t[c] >> r) & 1;
                if (orig != flipped) {
                    CAPTURE(round, r, c);
                    REQUIRE(orig == flipped);
                }
            }
    }
    std::array<std::uint64_t, 64> twice;
    for (std::uint64_t& w : twice) w = rng();
    const std::array<std::uint64_t, 64> original = twice;
    cpnet::detail::transpose64(twice);
    cpnet::detail::transpose64(twice);
    REQUIRE(twice == original);
}
