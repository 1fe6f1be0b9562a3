#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "superrad/kernels.hpp"

namespace superrad::kernels {

namespace {

struct Table {
    Isa isa;
    FillNormalsFn fill_normals;
    DtwaStepFn dtwa_step;
};

Table table_for(Isa isa) {
#if defined(SUPERRAD_HAVE_AVX2)
    if (isa == Isa::avx2) return {Isa::avx2, &avx2::fill_normals, &avx2::dtwa_step};
#endif
    return {Isa::scalar, &scalar::fill_normals, &scalar::dtwa_step};
}

Isa detect() {
    if (const char* forced = std::getenv("SUPERRAD_KERNEL")) {
        const std::string name(forced);
        if (name == "scalar") return Isa::scalar;
        if (name == "avx2" && available(Isa::avx2)) return Isa::avx2;
    }
    return available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Table& current() {
    static Table t = table_for(detect());
    return t;
}

}  // namespace

std::string to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool available(Isa isa) {
    if (isa == Isa::scalar) return true;
#if defined(SUPERRAD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active() { return current().isa; }

void set_active(Isa isa) {
    if (!available(isa)) throw std::runtime_error("kernel variant " + to_string(isa) + " is not available");
    current() = table_for(isa);
}

double dtwa_step(DtwaLattice& lattice, std::span<const double> dw, const DtwaStepCoefficients& c) {
    return current().dtwa_step(lattice, dw, c);
}

}  // namespace superrad::kernels

namespace superrad::rng {

void fill_normals(const StreamId& id, std::span<double> out) { kernels::current().fill_normals(id, out); }

}  // namespace superrad::rng
