#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "superrad/rng.hpp"

/**
 * Data-parallel inner loops.
 *
 * Each kernel has a scalar reference implementation and, on x86-64, an
 * AVX2/FMA variant. The variant is chosen once at startup from the CPU
 * features (override with SUPERRAD_KERNEL=scalar|avx2). The two paths agree
 * to rounding; tests/test_kernels.cpp pins the tolerance.
 */
namespace superrad::kernels {

enum class Isa { scalar, avx2 };

std::string to_string(Isa isa);

/// True if the binary carries the variant and the CPU can run it.
bool available(Isa isa);

/// The variant used by the dispatching entry points below.
Isa active();

/// Forces a variant (tests and benchmarks). Throws if it is not available.
void set_active(Isa isa);

/// Coefficients of one Euler-Maruyama step of the spin-lattice equations.
struct DtwaStepCoefficients {
    double omega_a = 0.0;
    double omega_c = 0.0;
    double g = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
    double dt = 0.0;
};

/// Inputs and results of one in-place lattice step.
struct DtwaLattice {
    std::span<double> sx;
    std::span<double> sy;
    std::span<double> sz;
    double eta_re = 0.0;
    double eta_im = 0.0;
};

/**
 * Advances the lattice by one step. `dw` holds one increment per atom followed
 * by the two cavity increments (already scaled by sqrt(dt)). Returns the sum of
 * s_z over the updated lattice.
 */
using DtwaStepFn = double (*)(DtwaLattice& lattice, std::span<const double> dw, const DtwaStepCoefficients& c);
using FillNormalsFn = void (*)(const rng::StreamId& id, std::span<double> out);

double dtwa_step(DtwaLattice& lattice, std::span<const double> dw, const DtwaStepCoefficients& c);

namespace scalar {
void fill_normals(const rng::StreamId& id, std::span<double> out);
double dtwa_step(DtwaLattice& lattice, std::span<const double> dw, const DtwaStepCoefficients& c);
}  // namespace scalar

#if defined(SUPERRAD_HAVE_AVX2)
namespace avx2 {
void fill_normals(const rng::StreamId& id, std::span<double> out);
double dtwa_step(DtwaLattice& lattice, std::span<const double> dw, const DtwaStepCoefficients& c);
}  // namespace avx2
#endif

}  // namespace superrad::kernels
