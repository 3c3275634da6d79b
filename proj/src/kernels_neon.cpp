#include "retrax/kernels.hpp"

#if defined(RETRAX_HAVE_NEON_KERNELS)

#include <arm_neon.h>

namespace retrax::kernels::neon {

// vmulq/vaddq kept separate; vfmaq would change rounding versus scalar.
void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out) {
    const std::size_t n = in.size();
    const float64x2_t ox = vdupq_n_f64(origin[0]);
    const float64x2_t oy = vdupq_n_f64(origin[1]);
    const float64x2_t oz = vdupq_n_f64(origin[2]);
    const float64x2_t ax = vdupq_n_f64(axis[0]);
    const float64x2_t ay = vdupq_n_f64(axis[1]);
    const float64x2_t az = vdupq_n_f64(axis[2]);
    const float64x2_t zero = vdupq_n_f64(0.0);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t dx = vsubq_f64(vld1q_f64(in.x.data() + i), ox);
        const float64x2_t dy = vsubq_f64(vld1q_f64(in.y.data() + i), oy);
        const float64x2_t dz = vsubq_f64(vld1q_f64(in.z.data() + i), oz);
        float64x2_t d = vaddq_f64(vmulq_f64(dx, ax), vmulq_f64(dy, ay));
        d = vaddq_f64(d, vmulq_f64(dz, az));
        // select instead of vmaxq: vmaxq propagates NaN, the scalar kernel does not
        const uint64x2_t pos = vcgtq_f64(d, zero);
        vst1q_f64(out.data() + i, vbslq_f64(pos, d, zero));
    }
    for (; i < n; ++i) {
        out[i] = scalar::project_clamped_one(in.x[i], in.y[i], in.z[i], origin, axis);
    }
}

void magnitudes(Channels3 in, std::span<double> out) {
    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vld1q_f64(in.x.data() + i);
        const float64x2_t y = vld1q_f64(in.y.data() + i);
        const float64x2_t z = vld1q_f64(in.z.data() + i);
        float64x2_t s = vaddq_f64(vmulq_f64(x, x), vmulq_f64(y, y));
        s = vaddq_f64(s, vmulq_f64(z, z));
        vst1q_f64(out.data() + i, vsqrtq_f64(s));
    }
    for (; i < n; ++i) out[i] = scalar::magnitude_one(in.x[i], in.y[i], in.z[i]);
}

}  // namespace retrax::kernels::neon

#endif
