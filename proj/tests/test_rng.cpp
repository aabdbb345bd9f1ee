#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "rgw/parallel.hpp"
#include "rgw/rng.hpp"

using namespace rgw;

TEST_CASE("Philox4x32-10 known answers") {
    using C = std::array<std::uint32_t, 4>;
    using K = std::array<std::uint32_t, 2>;
    CHECK(philox4x32_10(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 1), b(42, 1), c(42, 2), d(43, 1);
    for (int i = 0; i < 100; ++i) {
        auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
    }
    RngStream root(7, 0);
    RngStream s1 = root.substream(5);
    RngStream s2 = root.substream(5);
    RngStream s3 = root.substream(6);
    CHECK(s1.next_u64() == s2.next_u64());
    CHECK(s1.next_u64() != s3.next_u64());
    // substream does not advance the parent
    RngStream fresh(7, 0);
    CHECK(root.next_u64() == fresh.next_u64());
}

TEST_CASE("uniform, below, categorical, binomial moments") {
    RngStream r(1, 0);
    const int n = 200000;
    double s = 0.0, mn = 1.0, mx = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = r.uniform();
        s += u;
        mn = std::min(mn, u);
        mx = std::max(mx, u);
    }
    CHECK(mn > 0.0);
    CHECK(mx < 1.0);
    CHECK(std::abs(s / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n) + 1e-3);

    std::vector<int> hist(7, 0);
    for (int i = 0; i < n; ++i) ++hist[r.below(7)];
    for (int h : hist) CHECK(std::abs(h / double(n) - 1.0 / 7.0) < 4.0 * std::sqrt(1.0 / 7.0 * 6.0 / 7.0 / n));

    std::vector<double> w{1.0, 0.0, 3.0};
    std::vector<int> cat(3, 0);
    for (int i = 0; i < n; ++i) ++cat[r.categorical(w)];
    CHECK(cat[1] == 0);
    CHECK(std::abs(cat[2] / double(n) - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / n));

    double bs = 0.0;
    for (int i = 0; i < 20000; ++i) bs += static_cast<double>(r.binomial(50, 0.3));
    CHECK(std::abs(bs / 20000 - 15.0) < 4.0 * std::sqrt(50 * 0.3 * 0.7 / 20000.0));
}

TEST_CASE("parallel_for covers every index once and nests safely") {
    std::vector<std::atomic<int>> hits(1000);
    set_default_threads(4);
    parallel_for(hits.size(), [&](std::size_t i) {
        hits[i]++;
        parallel_for(3, [&](std::size_t) {});
    });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 3) throw std::runtime_error("x"); }), std::runtime_error);
}
