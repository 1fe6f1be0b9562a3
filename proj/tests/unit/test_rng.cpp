#include <doctest.h>

#include <cmath>
#include <set>

#include "superrad/rng.hpp"

using namespace superrad;

// Published Philox4x32-10 known-answer vectors.
TEST_CASE("philox known answers") {
    CHECK(rng::philox4x32({0, 0, 0, 0}, {0, 0}) == rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(rng::philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
          rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          rng::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform ranges") {
    const auto lo = rng::uniforms({0, 0, 0, 0});
    CHECK(lo.open_low == 1.0);
    CHECK(lo.closed_low == 0.0);
    const auto hi = rng::uniforms({~0u, ~0u, ~0u, ~0u});
    CHECK(hi.open_low > 0.0);
    CHECK(hi.open_low < 1e-15);
    CHECK(hi.closed_low < 1.0);
}

TEST_CASE("wiener increments have variance dt") {
    const TrajectorySchedule sch{42, 3, 1'000'000, 0.01};
    double s = 0.0, s2 = 0.0;
    std::size_t n = 0;
    for (std::int64_t k = 0; k < 1'000'000 / 6 + 1; ++k) {
        const WienerBlock b = generate_wiener(sch, k, 6);
        REQUIRE(b.increments.size() == 6);
        for (double x : b.increments) {
            s += x;
            s2 += x * x;
            ++n;
        }
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(var / 0.01 - 1.0) < 0.01);
    CHECK(std::abs(mean) < 3.0 * std::sqrt(0.01 / n));
}

TEST_CASE("empty block for a noiseless model") { CHECK(generate_wiener({1, 0, 10, 0.1}, 0, 0).increments.empty()); }

TEST_CASE("streams are pure functions of their coordinates") {
    const TrajectorySchedule a{7, 11, 100, 0.01};
    const TrajectorySchedule b{7, 11, 100, 0.01};
    CHECK(generate_wiener(a, 5, 13).increments == generate_wiener(b, 5, 13).increments);
    // Different step, trajectory or seed give different numbers.
    const auto base = generate_wiener(a, 5, 13).increments;
    CHECK(generate_wiener(a, 6, 13).increments != base);
    CHECK(generate_wiener({7, 12, 100, 0.01}, 5, 13).increments != base);
    CHECK(generate_wiener({8, 11, 100, 0.01}, 5, 13).increments != base);
}

TEST_CASE("a longer block extends a shorter one") {
    const TrajectorySchedule sch{1, 2, 10, 0.25};
    const auto short_block = generate_wiener(sch, 3, 5).increments;
    const auto long_block = generate_wiener(sch, 3, 21).increments;
    for (std::size_t i = 0; i < short_block.size(); ++i) CHECK(short_block[i] == long_block[i]);
}

TEST_CASE("normals are uncorrelated across adjacent slots") {
    const rng::StreamId id{rng::key_from_seed(99), 0, 0};
    std::vector<double> z(200'000);
    rng::fill_normals(id, z);
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); i += 2) c += z[i] * z[i + 1];
    c /= static_cast<double>(z.size() / 2);
    CHECK(std::abs(c) < 4.0 / std::sqrt(z.size() / 2.0));
}

TEST_CASE("mix_seed separates nearby salts") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t n = 0; n < 1000; ++n) seen.insert(rng::mix_seed(7, n));
    CHECK(seen.size() == 1000);
    CHECK(rng::mix_seed(7, 50) == rng::mix_seed(7, 50));
}
