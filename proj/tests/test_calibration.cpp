#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle/rotation.hpp"
#include "retrax/calibration.hpp"
#include "retrax/errors.hpp"

using namespace retrax;

namespace {

PoseSample at(Vec3 p, Quat q = {}) {
    PoseSample s;
    s.position = p;
    s.orientation = q;
    return s;
}

}  // namespace

TEST(CaptureNeutral, IdentityAxisPointsBackward) {
    const auto p = capture_neutral(at({0, 1.6, 0}), Movement::Retraction);
    EXPECT_EQ(p.axis, (Vec3{0, 0, 1}));
    EXPECT_EQ(p.neutral_position, (Vec3{0, 1.6, 0}));
}

TEST(CaptureNeutral, YawedQuarterTurnMatchesMatrixOracle) {
    const double angle = std::numbers::pi / 2;
    const auto fwd = oracle::apply(oracle::yaw_matrix(angle), {0, 0, -1});
    const auto p = capture_neutral(at({}, Quat::from_axis_angle({0, 1, 0}, angle)), Movement::Retraction);
    EXPECT_NEAR(p.axis.x, -fwd[0], 1e-12);
    EXPECT_NEAR(p.axis.y, 0.0, 0.0);
    EXPECT_NEAR(p.axis.z, -fwd[2], 1e-12);
    EXPECT_NEAR(p.axis.x, 1.0, 1e-12);
}

TEST(CaptureNeutral, PitchedNearVerticalIsDegenerate) {
    const double pitch = 89.99 * std::numbers::pi / 180.0;
    EXPECT_THROW(capture_neutral(at({}, Quat::from_axis_angle({1, 0, 0}, -pitch)), Movement::Retraction),
                 DegeneratePoseError);
}

TEST(CaptureNeutral, RetractionAxisIsHorizontalUnit) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(-1.2, 1.2);
    for (int i = 0; i < 200; ++i) {
        const Quat q = Quat::from_axis_angle({0, 1, 0}, a(rng) * 3) * Quat::from_axis_angle({1, 0, 0}, a(rng));
        const auto p = capture_neutral(at({}, q), Movement::Retraction);
        EXPECT_NEAR(p.axis.norm(), 1.0, 1e-12);
        EXPECT_EQ(p.axis.y, 0.0);
    }
}

TEST(CaptureNeutral, OtherMovements) {
    const auto bend = capture_neutral(at({}), Movement::Bending);
    EXPECT_NEAR(bend.axis.y, -std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(bend.axis.z, -std::sqrt(0.5), 1e-12);
    const auto ext = capture_neutral(at({}), Movement::Extension);
    EXPECT_NEAR(ext.axis.y, -std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(ext.axis.z, std::sqrt(0.5), 1e-12);
    const auto custom = capture_neutral(at({}), Movement::Custom, Vec3{0, 3, 4});
    EXPECT_NEAR(custom.axis.y, 0.6, 1e-12);
    EXPECT_NEAR(custom.axis.z, 0.8, 1e-12);
    EXPECT_THROW(capture_neutral(at({}), Movement::Custom), Error);
}

TEST(ManualRange, BoundsAreInclusive) {
    const auto partial = capture_neutral(at({}), Movement::Retraction);
    const auto p = set_manual_range(partial, 0.04);
    EXPECT_EQ(p.max_range_m, 0.04);
    EXPECT_EQ(p.mode, CalibrationMode::Manual);
    EXPECT_THROW(set_manual_range(partial, 0.001), RangeError);
    EXPECT_EQ(set_manual_range(partial, 0.30).max_range_m, 0.30);
    EXPECT_EQ(set_manual_range(partial, 0.005).max_range_m, 0.005);
    EXPECT_THROW(set_manual_range(partial, 0.3000001), RangeError);
}

TEST(AutoCalibrate, Examples) {
    const PoseSample start = at({0.1, 1.6, -0.2});
    const auto partial = capture_neutral(start, Movement::Retraction);
    const auto p = auto_calibrate(partial, start, at(start.position + 0.05 * partial.axis));
    EXPECT_NEAR(p.max_range_m, 0.05, 1e-15);
    EXPECT_EQ(p.mode, CalibrationMode::Automatic);
    EXPECT_THROW(auto_calibrate(partial, start, start), InsufficientMotionError);
    EXPECT_THROW(auto_calibrate(partial, start, at(start.position + Vec3{0.05, 0, 0})), InsufficientMotionError);
    EXPECT_THROW(auto_calibrate(partial, start, at(start.position - 0.05 * partial.axis)), WrongDirectionError);
    EXPECT_THROW(auto_calibrate(partial, start, at(start.position + 0.5 * partial.axis)), RangeError);
}

TEST(AutoCalibrate, StartMarkBecomesNeutralWhenNoneCaptured) {
    const PoseSample start = at({1, 1.5, 2}, Quat::from_axis_angle({0, 1, 0}, 0.3));
    const auto p = auto_calibrate(std::nullopt, start, at(start.position + Vec3{0, 0, 0.04}));
    EXPECT_EQ(p.neutral_position, start.position);
    EXPECT_EQ(p.neutral_orientation, start.orientation);
}

TEST(RetractionDistance, Examples) {
    const auto p = set_manual_range(capture_neutral(at({0, 1.6, 0}), Movement::Retraction), 0.05);
    EXPECT_EQ(retraction_distance(p, at({0, 1.6, 0})), 0.0);
    EXPECT_NEAR(retraction_distance(p, at(Vec3{0, 1.6, 0} + 0.03 * p.axis)), 0.03, 1e-15);
    EXPECT_EQ(retraction_distance(p, at(Vec3{0, 1.6, 0} - 0.02 * p.axis)), 0.0);
}

TEST(RetractionDistance, TranslationEquivariant) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-10, 10);
    std::uniform_real_distribution<double> small(-0.2, 0.2);
    auto base = set_manual_range(capture_neutral(at({0, 1.6, 0}, Quat::from_axis_angle({0, 1, 0}, 0.7)),
                                                 Movement::Retraction),
                                 0.05);
    for (int i = 0; i < 100; ++i) {
        const Vec3 offset{u(rng), u(rng), u(rng)};
        const Vec3 p{small(rng), 1.6 + small(rng), small(rng)};
        auto shifted = base;
        shifted.neutral_position = base.neutral_position + offset;
        const double d0 = retraction_distance(base, at(p));
        const double d1 = retraction_distance(shifted, at(p + offset));
        EXPECT_NEAR(d0, d1, 1e-9);
        EXPECT_GE(d1, 0.0);
    }
}

TEST(AutoCalibrate, EndMarkDistanceEqualsRange) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> yaw(-3.1, 3.1);
    std::uniform_real_distribution<double> r(0.006, 0.29);
    std::uniform_real_distribution<double> off(-0.02, 0.02);
    for (int i = 0; i < 200; ++i) {
        const PoseSample start = at({off(rng), 1.6, off(rng)}, Quat::from_axis_angle({0, 1, 0}, yaw(rng)));
        const auto partial = capture_neutral(start, Movement::Retraction);
        const Vec3 perp = cross(partial.axis, kWorldUp);
        const PoseSample end = at(start.position + r(rng) * partial.axis + off(rng) * perp + Vec3{0, off(rng), 0});
        const auto p = auto_calibrate(partial, start, end);
        EXPECT_NEAR(retraction_distance(p, end), p.max_range_m, 1e-9);
    }
}

TEST(Profile, Validate) {
    auto p = set_manual_range(capture_neutral(at({}), Movement::Retraction), 0.05);
    EXPECT_NO_THROW(validate_profile(p));
    p.axis = {0, 0.1, 1};
    EXPECT_THROW(validate_profile(p), ValidationError);
    p.axis = {0, 0, 1};
    p.max_range_m = 0.5;
    EXPECT_THROW(validate_profile(p), ValidationError);
}
