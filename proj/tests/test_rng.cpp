#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cvauth/rng.hpp"

using Catch::Matchers::WithinAbs;

TEST_CASE("counter stream matches the splitmix64 reference sequence") {
    cvauth::CounterRng r0(0);
    CHECK(r0.next_u64() == 0xE220A8397B1DCDAFull);
    CHECK(r0.next_u64() == 0x6E789E6AA1B965F4ull);
    CHECK(r0.next_u64() == 0x06C45D188009454Full);

    cvauth::CounterRng r42(42);
    CHECK(r42.next_u64() == 0xBDD732262FEB6E95ull);
    CHECK(r42.next_u64() == 0x28EFE333B266F103ull);
    CHECK(r42.next_u64() == 0x47526757130F9F52ull);
}

TEST_CASE("key derivation") {
    CHECK(cvauth::derive_key(7, 3) == 0x953AEB70673E29CBull);
    CHECK(cvauth::derive_key(7, 3) == cvauth::derive_key(7, 3));
    CHECK(cvauth::derive_key(7, 3) != cvauth::derive_key(7, 4));
    CHECK(cvauth::derive_key(7, 3) != cvauth::derive_key(8, 3));

    // Streams for the same (session, query, tag) coincide; any coordinate
    // change separates them.
    auto a = cvauth::query_stream(1, 2, cvauth::StreamTag::kChallenge);
    auto b = cvauth::query_stream(1, 2, cvauth::StreamTag::kChallenge);
    auto c = cvauth::query_stream(1, 2, cvauth::StreamTag::kOutcome);
    auto d = cvauth::query_stream(1, 3, cvauth::StreamTag::kChallenge);
    std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
    CHECK(va != d.next_u64());
}

TEST_CASE("unit doubles are uniform on [0, 1)") {
    cvauth::CounterRng rng(123);
    const int m = 100000;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        double u = rng.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // 4 sigma band around the mean of Uniform(0,1).
    CHECK_THAT(sum / m, WithinAbs(0.5, 4.0 / std::sqrt(12.0 * m)));
}

TEST_CASE("bounded integers are uniform") {
    cvauth::CounterRng rng(9);
    const std::uint64_t n = 7;
    const int m = 70000;
    std::vector<int> counts(n, 0);
    for (int i = 0; i < m; ++i) {
        std::uint64_t v = rng.next_below(n);
        REQUIRE(v < n);
        ++counts[static_cast<std::size_t>(v)];
    }
    double expect = static_cast<double>(m) / n;
    double band = 4.0 * std::sqrt(expect * (1.0 - 1.0 / n));
    for (int c : counts) CHECK_THAT(static_cast<double>(c), WithinAbs(expect, band));
}

TEST_CASE("normal draws have standard-normal statistics") {
    cvauth::CounterRng rng(77);
    const int m = 200000;
    double sum = 0.0;
    double sq = 0.0;
    int within1 = 0;
    for (int i = 0; i < m; ++i) {
        double z = rng.next_normal();
        sum += z;
        sq += z * z;
        if (std::abs(z) < 1.0) ++within1;
    }
    double mean = sum / m;
    double var = sq / m - mean * mean;
    CHECK_THAT(mean, WithinAbs(0.0, 4.0 / std::sqrt(static_cast<double>(m))));
    CHECK_THAT(var, WithinAbs(1.0, 4.0 * std::sqrt(2.0 / m)));
    double p = 0.68268949213708590;
    CHECK_THAT(static_cast<double>(within1) / m, WithinAbs(p, 4.0 * std::sqrt(p * (1 - p) / m)));
}

TEST_CASE("identical keys replay identical sequences") {
    cvauth::CounterRng a(314159);
    cvauth::CounterRng b(314159);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}
