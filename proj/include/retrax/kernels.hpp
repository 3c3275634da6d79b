#pragma once

// Batch arithmetic over pose channels stored as structure-of-arrays.
//
// Every backend performs the same IEEE operations in the same order (no fused
// multiply-add, correctly rounded sqrt) so results are bit-identical to the
// scalar reference. The streaming path calls the scalar kernels on single
// samples and the replay path calls the dispatched batch kernels; equal bits
// keep the two event logs byte-equal.

#include <cstddef>
#include <span>
#include <string_view>

namespace retrax::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

/// Backend chosen at first use: the widest one the CPU supports, unless the
/// RETRAX_FORCE_SCALAR environment variable is set to a non-empty value.
Backend active_backend();

/// Overrides the dispatch target (tests). Throws ConfigError if the requested
/// backend was not compiled in or the CPU lacks it.
void set_backend(Backend b);

bool backend_available(Backend b);

struct Channels3 {
    std::span<const double> x;
    std::span<const double> y;
    std::span<const double> z;

    std::size_t size() const { return x.size(); }
};

/// out[i] = max(0, (x[i]-ox)*ax + (y[i]-oy)*ay + (z[i]-oz)*az)
void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out);

/// out[i] = sqrt(x[i]^2 + y[i]^2 + z[i]^2)
void magnitudes(Channels3 in, std::span<double> out);

namespace scalar {

inline double project_clamped_one(double x, double y, double z, const double origin[3], const double axis[3]) {
    const double dx = x - origin[0];
    const double dy = y - origin[1];
    const double dz = z - origin[2];
    const double d = dx * axis[0] + dy * axis[1] + dz * axis[2];
    return d > 0.0 ? d : 0.0;
}

double magnitude_one(double x, double y, double z);

void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out);
void magnitudes(Channels3 in, std::span<double> out);

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RETRAX_HAVE_AVX2_KERNELS 1
namespace avx2 {
void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out);
void magnitudes(Channels3 in, std::span<double> out);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define RETRAX_HAVE_NEON_KERNELS 1
namespace neon {
void project_clamped(Channels3 in, const double origin[3], const double axis[3], std::span<double> out);
void magnitudes(Channels3 in, std::span<double> out);
}  // namespace neon
#endif

}  // namespace retrax::kernels
