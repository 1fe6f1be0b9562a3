#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace superrad {

/**
 * Counter-based random streams (Philox4x32-10).
 *
 * Every random number is a pure function of (master seed, trajectory, step,
 * position within the step), so results do not depend on which thread runs a
 * trajectory or in what order.
 */
namespace rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t philox_m0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_w1 = 0xBB67AE85u;
inline constexpr int philox_rounds = 10;

constexpr Counter philox4x32(Counter ctr, Key key) {
    for (int r = 0; r < philox_rounds; ++r) {
        const std::uint64_t p0 = std::uint64_t{philox_m0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{philox_m1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += philox_w0;
        key[1] += philox_w1;
    }
    return ctr;
}

/// Step slot reserved for initial-state sampling.
inline constexpr std::uint32_t initial_step = 0xFFFFFFFFu;

/// Identifies the random stream of one (trajectory, step) pair.
struct StreamId {
    Key key;
    std::uint32_t step;
    std::uint64_t trajectory;

    Counter counter(std::uint32_t block) const {
        return {block, step, static_cast<std::uint32_t>(trajectory), static_cast<std::uint32_t>(trajectory >> 32)};
    }
};

constexpr Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// SplitMix64 finalizer; used to derive per-entry seeds inside sweeps.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Fills `out` with standard normal samples; sample k comes from block k/2.
void fill_normals(const StreamId& id, std::span<double> out);

/// Two uniform doubles in (0, 1] and [0, 1) derived from one block.
struct UniformPair {
    double open_low;   // (0, 1]
    double closed_low; // [0, 1)
};
UniformPair uniforms(const Counter& bits);

/// Raw 32-bit words of block `block`; used for discrete sampling.
inline Counter raw_block(const StreamId& id, std::uint32_t block) { return philox4x32(id.counter(block), id.key); }

}  // namespace rng

/// Identifies the random stream of one trajectory.
struct TrajectorySchedule {
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory = 0;
    std::int64_t n_steps = 0;
    double dt = 0.0;

    rng::StreamId stream(std::uint32_t step) const { return {rng::key_from_seed(master_seed), step, trajectory}; }
};

/// Real Gaussian increments with mean 0 and variance dt.
struct WienerBlock {
    std::vector<double> increments;
};

WienerBlock generate_wiener(const TrajectorySchedule& schedule, std::int64_t step, std::size_t count);

/// In-place variant used by the ensemble runner: writes sqrt(dt) * N(0,1) into `out`.
void generate_wiener_into(const TrajectorySchedule& schedule, std::int64_t step, std::span<double> out);

}  // namespace superrad
