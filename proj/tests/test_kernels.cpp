#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "retrax/errors.hpp"
#include "retrax/kernels.hpp"

using namespace retrax::kernels;

namespace {

struct Data {
    std::vector<double> x, y, z;
    Channels3 view() const { return {x, y, z}; }
};

Data make_data(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        d.x.push_back(u(rng));
        d.y.push_back(u(rng) * 1e-3 + 1.6);
        d.z.push_back(u(rng) * 0.1);
    }
    return d;
}

void expect_bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i])) << "index " << i;
    }
}

std::vector<Backend> vector_backends() {
    std::vector<Backend> out;
    for (auto b : {Backend::Avx2, Backend::Neon}) {
        if (backend_available(b)) out.push_back(b);
    }
    return out;
}

}  // namespace

TEST(Kernels, ScalarBackendAlwaysAvailable) {
    EXPECT_TRUE(backend_available(Backend::Scalar));
    EXPECT_EQ(backend_name(Backend::Scalar), "scalar");
}

TEST(Kernels, ProjectionMatchesScalarBitForBitIncludingTails) {
    const double origin[3] = {0.01, 1.6, -0.02};
    const double axis[3] = {0.6, 0.0, 0.8};
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 1000u, 1003u}) {
        const Data d = make_data(n, n + 1);
        std::vector<double> ref(n), got(n);
        scalar::project_clamped(d.view(), origin, axis, ref);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(ref[i], scalar::project_clamped_one(d.x[i], d.y[i], d.z[i], origin, axis));
        }
        for (auto b : vector_backends()) {
            set_backend(b);
            project_clamped(d.view(), origin, axis, got);
            expect_bits_equal(ref, got);
        }
    }
    set_backend(Backend::Scalar);
}

TEST(Kernels, MagnitudesMatchScalarBitForBit) {
    for (std::size_t n : {1u, 3u, 4u, 6u, 17u, 4096u}) {
        const Data d = make_data(n, 100 + n);
        std::vector<double> ref(n), got(n);
        scalar::magnitudes(d.view(), ref);
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(ref[i], scalar::magnitude_one(d.x[i], d.y[i], d.z[i]));
        for (auto b : vector_backends()) {
            set_backend(b);
            magnitudes(d.view(), got);
            expect_bits_equal(ref, got);
        }
    }
    set_backend(Backend::Scalar);
}

TEST(Kernels, SpecialValues) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    Data d;
    d.x = {0.0, -0.0, nan, inf, -inf, 1e-310, -1e-310, 0.5};
    d.y = {0.0, -0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    d.z = {-0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -0.5};
    const double origin[3] = {0, 0, 0};
    const double axis[3] = {1, 0, 0};
    std::vector<double> ref(d.x.size()), got(d.x.size());
    scalar::project_clamped(d.view(), origin, axis, ref);
    EXPECT_EQ(ref[4], 0.0);
    for (auto b : vector_backends()) {
        set_backend(b);
        project_clamped(d.view(), origin, axis, got);
        expect_bits_equal(ref, got);
    }
    scalar::magnitudes(d.view(), ref);
    for (auto b : vector_backends()) {
        set_backend(b);
        magnitudes(d.view(), got);
        expect_bits_equal(ref, got);
    }
    set_backend(Backend::Scalar);
}

TEST(Kernels, UnavailableBackendRejected) {
    for (auto b : {Backend::Avx2, Backend::Neon}) {
        if (!backend_available(b)) EXPECT_THROW(set_backend(b), retrax::ConfigError);
    }
}
