#include <bit>
#include <cmath>
#include <numbers>

#include "superrad/kernels.hpp"

namespace superrad::kernels::scalar {

void fill_normals(const rng::StreamId& id, std::span<double> out) {
    const std::size_t n = out.size();
    for (std::size_t k = 0; k < n; k += 2) {
        const auto u = rng::uniforms(rng::philox4x32(id.counter(static_cast<std::uint32_t>(k / 2)), id.key));
        const double r = std::sqrt(-2.0 * std::log(u.open_low));
        const double theta = std::numbers::pi * (2.0 * u.closed_low - 1.0);
        out[k] = r * std::cos(theta);
        if (k + 1 < n) out[k + 1] = r * std::sin(theta);
    }
}

double dtwa_step(DtwaLattice& lat, std::span<const double> dw, const DtwaStepCoefficients& c) {
    const std::size_t n = lat.sx.size();
    const double dt = c.dt;
    const double amp = std::sqrt(2.0 * c.gamma);
    const double er = lat.eta_re;
    const double ei = lat.eta_im;
    const double two_g = 2.0 * c.g;

    double sum_x = 0.0;
    double sum_y = 0.0;
    double sum_z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = lat.sx[i];
        const double y = lat.sy[i];
        const double z = lat.sz[i];
        const double w = dw[i];
        sum_x += x;
        sum_y += y;
        lat.sx[i] = x + (-c.omega_a * y - two_g * z * ei - c.gamma * x) * dt - amp * y * w;
        lat.sy[i] = y + (c.omega_a * x - two_g * z * er - c.gamma * y) * dt + amp * x * w;
        const double nz = z + (two_g * (y * er + x * ei) - 2.0 * c.gamma * (z + 1.0)) * dt + amp * (z + 1.0) * w;
        lat.sz[i] = nz;
        sum_z += nz;
    }

    const double cav = std::sqrt(0.5 * c.kappa);
    const double d_re = c.omega_c * ei - c.kappa * er - 0.5 * c.g * sum_y;
    const double d_im = -c.omega_c * er - c.kappa * ei - 0.5 * c.g * sum_x;
    lat.eta_re = er + d_re * dt + cav * dw[n];
    lat.eta_im = ei + d_im * dt + cav * dw[n + 1];
    return sum_z;
}

}  // namespace superrad::kernels::scalar
