#include <immintrin.h>

#include <array>
#include <cmath>
#include <numbers>

#include "superrad/kernels.hpp"

namespace superrad::kernels::avx2 {

namespace {

// Philox state: four 32-bit words, one trajectory block per 64-bit lane.
struct PhiloxLanes {
    __m256i w0, w1, w2, w3;
};

inline PhiloxLanes philox(PhiloxLanes c, const rng::Key& key) {
    const __m256i m0 = _mm256_set1_epi64x(rng::philox_m0);
    const __m256i m1 = _mm256_set1_epi64x(rng::philox_m1);
    const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFll);
    std::uint32_t k0 = key[0];
    std::uint32_t k1 = key[1];
    for (int r = 0; r < rng::philox_rounds; ++r) {
        const __m256i p0 = _mm256_mul_epu32(m0, c.w0);
        const __m256i p1 = _mm256_mul_epu32(m1, c.w2);
        const __m256i kk0 = _mm256_set1_epi64x(k0);
        const __m256i kk1 = _mm256_set1_epi64x(k1);
        c = {_mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c.w1), kk0), _mm256_and_si256(p1, lo_mask),
             _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c.w3), kk1), _mm256_and_si256(p0, lo_mask)};
        k0 += rng::philox_w0;
        k1 += rng::philox_w1;
    }
    return c;
}

inline __m256d unit_plus_one(__m256i lo, __m256i hi) {
    const __m256i bits = _mm256_srli_epi64(_mm256_or_si256(_mm256_slli_epi64(hi, 32), lo), 12);
    return _mm256_castsi256_pd(_mm256_or_si256(bits, _mm256_set1_epi64x(0x3FF0000000000000ll)));
}

// Natural log on (0, 1]; same reduction and polynomial as fdlibm's log.
inline __m256d log_unit(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
    // Biased exponent as double via the 2^52 magic constant.
    const __m256i biased = _mm256_srli_epi64(bits, 52);
    const __m256d magic = _mm256_set1_pd(4503599627370496.0);
    __m256d k = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(magic))), magic);
    k = _mm256_sub_pd(k, _mm256_set1_pd(1023.0));

    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(std::numbers::sqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    k = _mm256_add_pd(k, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

    const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
    const __m256d hfsq = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_mul_pd(f, f));
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d w = _mm256_mul_pd(z, z);
    const __m256d t1 = _mm256_mul_pd(
        w, _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, _mm256_set1_pd(1.531383769920937332e-01), _mm256_set1_pd(2.222219843214978396e-01)),
                           _mm256_set1_pd(3.999999999940941908e-01)));
    const __m256d t2 = _mm256_mul_pd(
        z, _mm256_fmadd_pd(
               w,
               _mm256_fmadd_pd(w, _mm256_fmadd_pd(w, _mm256_set1_pd(1.479819860511658591e-01), _mm256_set1_pd(1.818357216161805012e-01)),
                               _mm256_set1_pd(2.857142874366239149e-01)),
               _mm256_set1_pd(6.666666666666735130e-01)));
    const __m256d r = _mm256_add_pd(t2, t1);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    // s*(hfsq+R) + k*ln2_lo - hfsq + f + k*ln2_hi
    __m256d out = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r), _mm256_mul_pd(k, ln2_lo));
    out = _mm256_add_pd(_mm256_sub_pd(out, hfsq), f);
    return _mm256_fmadd_pd(k, ln2_hi, out);
}

inline __m256d sin_kernel(__m256d x) {
    const __m256d z = _mm256_mul_pd(x, x);
    const __m256d w = _mm256_mul_pd(z, z);
    const __m256d v = _mm256_mul_pd(z, x);
    __m256d r = _mm256_fmadd_pd(z, _mm256_fmadd_pd(z, _mm256_set1_pd(2.75573137070700676789e-06), _mm256_set1_pd(-1.98412698298579493134e-04)),
                                _mm256_set1_pd(8.33333333332248946124e-03));
    r = _mm256_fmadd_pd(_mm256_mul_pd(z, w),
                        _mm256_fmadd_pd(z, _mm256_set1_pd(1.58969099521155010221e-10), _mm256_set1_pd(-2.50507602534068634195e-08)), r);
    return _mm256_fmadd_pd(v, _mm256_fmadd_pd(z, r, _mm256_set1_pd(-1.66666666666666324348e-01)), x);
}

inline __m256d cos_kernel(__m256d x) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d z = _mm256_mul_pd(x, x);
    const __m256d w = _mm256_mul_pd(z, z);
    const __m256d r1 = _mm256_mul_pd(
        z, _mm256_fmadd_pd(z, _mm256_fmadd_pd(z, _mm256_set1_pd(2.48015872894767294178e-05), _mm256_set1_pd(-1.38888888888741095749e-03)),
                           _mm256_set1_pd(4.16666666666666019037e-02)));
    const __m256d r2 = _mm256_mul_pd(
        _mm256_mul_pd(w, w),
        _mm256_fmadd_pd(z, _mm256_fmadd_pd(z, _mm256_set1_pd(-1.13596475577881948265e-11), _mm256_set1_pd(2.08757232129817482790e-09)),
                        _mm256_set1_pd(-2.75573143513906633035e-07)));
    const __m256d r = _mm256_add_pd(r1, r2);
    const __m256d hz = _mm256_mul_pd(_mm256_set1_pd(0.5), z);
    const __m256d ww = _mm256_sub_pd(one, hz);
    return _mm256_add_pd(ww, _mm256_fmadd_pd(z, r, _mm256_sub_pd(_mm256_sub_pd(one, ww), hz)));
}

// sin and cos on [-pi, pi] via quadrant reduction by pi/2.
inline void sincos_pi(__m256d theta, __m256d& s_out, __m256d& c_out) {
    const __m256d j = _mm256_round_pd(_mm256_mul_pd(theta, _mm256_set1_pd(2.0 / std::numbers::pi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d y = _mm256_fnmadd_pd(j, _mm256_set1_pd(1.57079632673412561417e+00), theta);
    y = _mm256_fnmadd_pd(j, _mm256_set1_pd(6.07710050650619224932e-11), y);
    const __m256d s = sin_kernel(y);
    const __m256d c = cos_kernel(y);
    // Quadrant q = j mod 4 in {0, 1, 2, 3}.
    const __m256d q = _mm256_sub_pd(j, _mm256_mul_pd(_mm256_set1_pd(4.0),
                                                     _mm256_floor_pd(_mm256_mul_pd(j, _mm256_set1_pd(0.25)))));
    const __m256d q1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d q2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d q3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
    const __m256d swap = _mm256_or_pd(q1, q3);
    const __m256d sign_bit = _mm256_set1_pd(-0.0);
    const __m256d sin_neg = _mm256_and_pd(_mm256_or_pd(q2, q3), sign_bit);
    const __m256d cos_neg = _mm256_and_pd(_mm256_or_pd(q1, q2), sign_bit);
    s_out = _mm256_xor_pd(_mm256_blendv_pd(s, c, swap), sin_neg);
    c_out = _mm256_xor_pd(_mm256_blendv_pd(c, s, swap), cos_neg);
}

// Eight normals from blocks [block, block + 4), interleaved (cos, sin) per block.
inline void normals8(const rng::StreamId& id, std::uint32_t block, double* dst) {
    const rng::Counter tail = id.counter(0);
    PhiloxLanes c{_mm256_setr_epi64x(block, block + 1ll, block + 2ll, block + 3ll), _mm256_set1_epi64x(tail[1]),
                  _mm256_set1_epi64x(tail[2]), _mm256_set1_epi64x(tail[3])};
    // The lane values of w0 must stay 32-bit.
    c.w0 = _mm256_and_si256(c.w0, _mm256_set1_epi64x(0xFFFFFFFFll));
    const PhiloxLanes out = philox(c, id.key);

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d u1 = _mm256_sub_pd(_mm256_set1_pd(2.0), unit_plus_one(out.w0, out.w1));
    const __m256d u2 = _mm256_sub_pd(unit_plus_one(out.w2, out.w3), one);
    const __m256d theta = _mm256_mul_pd(_mm256_set1_pd(std::numbers::pi), _mm256_sub_pd(_mm256_add_pd(u2, u2), one));
    const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), log_unit(u1)));
    __m256d s, co;
    sincos_pi(theta, s, co);
    const __m256d zc = _mm256_mul_pd(r, co);
    const __m256d zs = _mm256_mul_pd(r, s);
    const __m256d lo = _mm256_unpacklo_pd(zc, zs);
    const __m256d hi = _mm256_unpackhi_pd(zc, zs);
    _mm256_storeu_pd(dst, _mm256_permute2f128_pd(lo, hi, 0x20));
    _mm256_storeu_pd(dst + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void fill_normals(const rng::StreamId& id, std::span<double> out) {
    const std::size_t n = out.size();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) normals8(id, static_cast<std::uint32_t>(k / 2), out.data() + k);
    if (k < n) {
        alignas(32) std::array<double, 8> tmp{};
        normals8(id, static_cast<std::uint32_t>(k / 2), tmp.data());
        for (std::size_t j = 0; k + j < n; ++j) out[k + j] = tmp[j];
    }
}

double dtwa_step(DtwaLattice& lat, std::span<const double> dw, const DtwaStepCoefficients& c) {
    const std::size_t n = lat.sx.size();
    const double amp = std::sqrt(2.0 * c.gamma);
    const double er = lat.eta_re;
    const double ei = lat.eta_im;
    const double two_g = 2.0 * c.g;

    const __m256d v_dt = _mm256_set1_pd(c.dt);
    const __m256d v_wa = _mm256_set1_pd(c.omega_a);
    const __m256d v_gam = _mm256_set1_pd(c.gamma);
    const __m256d v_two_gam = _mm256_set1_pd(2.0 * c.gamma);
    const __m256d v_amp = _mm256_set1_pd(amp);
    const __m256d v_ger = _mm256_set1_pd(two_g * er);
    const __m256d v_gei = _mm256_set1_pd(two_g * ei);
    const __m256d one = _mm256_set1_pd(1.0);

    __m256d acc_x = _mm256_setzero_pd();
    __m256d acc_y = _mm256_setzero_pd();
    __m256d acc_z = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(lat.sx.data() + i);
        const __m256d y = _mm256_loadu_pd(lat.sy.data() + i);
        const __m256d z = _mm256_loadu_pd(lat.sz.data() + i);
        const __m256d w = _mm256_loadu_pd(dw.data() + i);
        acc_x = _mm256_add_pd(acc_x, x);
        acc_y = _mm256_add_pd(acc_y, y);

        __m256d fx = _mm256_mul_pd(v_wa, y);
        fx = _mm256_fmadd_pd(v_gei, z, fx);
        fx = _mm256_fmadd_pd(v_gam, x, fx);  // fx = -(drift_x)
        __m256d nx = _mm256_fnmadd_pd(fx, v_dt, x);
        nx = _mm256_fnmadd_pd(_mm256_mul_pd(v_amp, y), w, nx);

        __m256d fy = _mm256_mul_pd(v_wa, x);
        fy = _mm256_fnmadd_pd(v_ger, z, fy);
        fy = _mm256_fnmadd_pd(v_gam, y, fy);
        __m256d ny = _mm256_fmadd_pd(fy, v_dt, y);
        ny = _mm256_fmadd_pd(_mm256_mul_pd(v_amp, x), w, ny);

        const __m256d zp1 = _mm256_add_pd(z, one);
        __m256d fz = _mm256_fmadd_pd(v_ger, y, _mm256_mul_pd(v_gei, x));
        fz = _mm256_fnmadd_pd(v_two_gam, zp1, fz);
        __m256d nz = _mm256_fmadd_pd(fz, v_dt, z);
        nz = _mm256_fmadd_pd(_mm256_mul_pd(v_amp, zp1), w, nz);

        _mm256_storeu_pd(lat.sx.data() + i, nx);
        _mm256_storeu_pd(lat.sy.data() + i, ny);
        _mm256_storeu_pd(lat.sz.data() + i, nz);
        acc_z = _mm256_add_pd(acc_z, nz);
    }
    double sum_x = hsum(acc_x);
    double sum_y = hsum(acc_y);
    double sum_z = hsum(acc_z);
    for (; i < n; ++i) {
        const double x = lat.sx[i];
        const double y = lat.sy[i];
        const double z = lat.sz[i];
        const double w = dw[i];
        sum_x += x;
        sum_y += y;
        lat.sx[i] = x + (-c.omega_a * y - two_g * z * ei - c.gamma * x) * c.dt - amp * y * w;
        lat.sy[i] = y + (c.omega_a * x - two_g * z * er - c.gamma * y) * c.dt + amp * x * w;
        const double nz = z + (two_g * (y * er + x * ei) - 2.0 * c.gamma * (z + 1.0)) * c.dt + amp * (z + 1.0) * w;
        lat.sz[i] = nz;
        sum_z += nz;
    }

    const double cav = std::sqrt(0.5 * c.kappa);
    const double d_re = c.omega_c * ei - c.kappa * er - 0.5 * c.g * sum_y;
    const double d_im = -c.omega_c * er - c.kappa * ei - 0.5 * c.g * sum_x;
    lat.eta_re = er + d_re * c.dt + cav * dw[n];
    lat.eta_im = ei + d_im * c.dt + cav * dw[n + 1];
    return sum_z;
}

}  // namespace superrad::kernels::avx2
