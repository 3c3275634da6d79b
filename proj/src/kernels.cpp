#include "retrax/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>

#include "retrax/errors.hpp"

namespace retrax::kernels {

namespace scalar {

double magnitude_one(double x, double y, double z) {
    return std::sqrt(x * x + y * y + z * z);
}

void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out) {
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = project_clamped_one(in.x[i], in.y[i], in.z[i], origin, axis);
    }
}

void magnitudes(Channels3 in, std::span<double> out) {
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) out[i] = magnitude_one(in.x[i], in.y[i], in.z[i]);
}

}  // namespace scalar

namespace {

bool cpu_has(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(RETRAX_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(RETRAX_HAVE_NEON_KERNELS)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend detect() {
    const char* force = std::getenv("RETRAX_FORCE_SCALAR");
    if (force != nullptr && *force != '\0') return Backend::Scalar;
    if (cpu_has(Backend::Avx2)) return Backend::Avx2;
    if (cpu_has(Backend::Neon)) return Backend::Neon;
    return Backend::Scalar;
}

std::atomic<int>& selected() {
    static std::atomic<int> b{static_cast<int>(detect())};
    return b;
}

}  // namespace

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

bool backend_available(Backend b) { return cpu_has(b); }

Backend active_backend() { return static_cast<Backend>(selected().load(std::memory_order_relaxed)); }

void set_backend(Backend b) {
    if (!cpu_has(b)) throw ConfigError("kernel backend not available: " + std::string(backend_name(b)));
    selected().store(static_cast<int>(b), std::memory_order_relaxed);
}

void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out) {
    switch (active_backend()) {
#if defined(RETRAX_HAVE_AVX2_KERNELS)
        case Backend::Avx2:
            return avx2::project_clamped(in, origin, axis, out);
#endif
#if defined(RETRAX_HAVE_NEON_KERNELS)
        case Backend::Neon:
            return neon::project_clamped(in, origin, axis, out);
#endif
        default:
            return scalar::project_clamped(in, origin, axis, out);
    }
}

void magnitudes(Channels3 in, std::span<double> out) {
    switch (active_backend()) {
#if defined(RETRAX_HAVE_AVX2_KERNELS)
        case Backend::Avx2:
            return avx2::magnitudes(in, out);
#endif
#if defined(RETRAX_HAVE_NEON_KERNELS)
        case Backend::Neon:
            return neon::magnitudes(in, out);
#endif
        default:
            return scalar::magnitudes(in, out);
    }
}

}  // namespace retrax::kernels
