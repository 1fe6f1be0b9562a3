#include "superrad/rng.hpp"

#include <bit>
#include <cmath>

#include "superrad/kernels.hpp"

namespace superrad {
namespace rng {

namespace {

// 52 random mantissa bits under the exponent of 1.0 give a double in [1, 2).
double unit_interval_plus_one(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 12;
    return std::bit_cast<double>(bits | 0x3FF0000000000000ull);
}

}  // namespace

UniformPair uniforms(const Counter& bits) {
    return {2.0 - unit_interval_plus_one(bits[0], bits[1]), unit_interval_plus_one(bits[2], bits[3]) - 1.0};
}

}  // namespace rng

WienerBlock generate_wiener(const TrajectorySchedule& schedule, std::int64_t step, std::size_t count) {
    WienerBlock block;
    block.increments.resize(count);
    generate_wiener_into(schedule, step, block.increments);
    return block;
}

void generate_wiener_into(const TrajectorySchedule& schedule, std::int64_t step, std::span<double> out) {
    if (out.empty()) return;
    rng::fill_normals(schedule.stream(static_cast<std::uint32_t>(step)), out);
    const double scale = std::sqrt(schedule.dt);
    for (double& x : out) x *= scale;
}

}  // namespace superrad
