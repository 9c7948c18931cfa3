// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "semseg/rng.hpp"

using semseg::Rng;

TEST_CASE("identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and forks decorrelate") {
    Rng a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 256; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);

    Rng parent(7);
    Rng c0 = parent.fork(0);
    Rng c1 = parent.fork(1);
    equal = 0;
    for (int i = 0; i < 256; ++i)
        if (c0.next_u64() == c1.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("forking does not disturb the parent stream") {
    Rng a(9), b(9);
    (void)a.fork(3);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 stays in [0,1) and covers the range") {
    Rng rng(11);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_int respects inclusive bounds") {
    Rng rng(13);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 5000; ++i) {
        const auto v = rng.uniform_int(-2, 2);
        REQUIRE(v >= -2);
        REQUIRE(v <= 2);
        ++counts[static_cast<std::size_t>(v + 2)];
    }
    for (int c : counts) CHECK(c > 800); // ~1000 each
}

TEST_CASE("normal variates have standard moments") {
    Rng rng(17);
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}
