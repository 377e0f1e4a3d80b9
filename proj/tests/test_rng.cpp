#include <doctest.h>

#include <cmath>

#include "tmag/rng.hpp"

using tmag::Rng;

TEST_CASE("streams are reproducible and seed-dependent") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    bool any_diff = false;
    Rng a2(42);
    for (int i = 0; i < 100; ++i) any_diff |= a2.next_u64() != c.next_u64();
    CHECK(any_diff);
}

TEST_CASE("child streams are stable and distinct") {
    Rng root(7);
    Rng c0 = root.child(0), c0_again = root.child(0), c1 = root.child(1);
    CHECK(c0.next_u64() == c0_again.next_u64());
    CHECK(c0.next_u64() != c1.next_u64());
}

TEST_CASE("uniform stays in range, gaussian has sane moments") {
    Rng rng(1234);
    double sum = 0, sum2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
        const double g = rng.gaussian();
        sum += g;
        sum2 += g * g;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}
