// Compiled with -mavx2 (and without -mfma). Only reached after a runtime
// CPU check in kernels.cpp.

#include "retrax/kernels.hpp"

#if defined(RETRAX_HAVE_AVX2_KERNELS)

#include <immintrin.h>

namespace retrax::kernels::avx2 {

void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out) {
    const std::size_t n = in.size();
    const __m256d ox = _mm256_set1_pd(origin[0]);
    const __m256d oy = _mm256_set1_pd(origin[1]);
    const __m256d oz = _mm256_set1_pd(origin[2]);
    const __m256d ax = _mm256_set1_pd(axis[0]);
    const __m256d ay = _mm256_set1_pd(axis[1]);
    const __m256d az = _mm256_set1_pd(axis[2]);
    const __m256d zero = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(in.x.data() + i), ox);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(in.y.data() + i), oy);
        const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(in.z.data() + i), oz);
        // ((dx*ax + dy*ay) + dz*az), same association as the scalar kernel
        __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, ax), _mm256_mul_pd(dy, ay));
        d = _mm256_add_pd(d, _mm256_mul_pd(dz, az));
        // max_pd(d, 0) yields +0 for -0 and NaN, matching `d > 0 ? d : 0`
        _mm256_storeu_pd(out.data() + i, _mm256_max_pd(d, zero));
    }
    for (; i < n; ++i) {
        out[i] = scalar::project_clamped_one(in.x[i], in.y[i], in.z[i], origin, axis);
    }
}

void magnitudes(Channels3 in, std::span<double> out) {
    const std::size_t n = in.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(in.x.data() + i);
        const __m256d y = _mm256_loadu_pd(in.y.data() + i);
        const __m256d z = _mm256_loadu_pd(in.z.data() + i);
        __m256d s = _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
        s = _mm256_add_pd(s, _mm256_mul_pd(z, z));
        _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(s));
    }
    for (; i < n; ++i) out[i] = scalar::magnitude_one(in.x[i], in.y[i], in.z[i]);
}

}  // namespace retrax::kernels::avx2

#endif
