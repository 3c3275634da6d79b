#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "retrax/errors.hpp"
#include "retrax/motion_guard.hpp"

using namespace retrax;

namespace {

PoseSample sample(double t, std::optional<Vec3> w, std::optional<Vec3> a = Vec3{}) {
    PoseSample s;
    s.t = t;
    s.angular_velocity = w;
    s.linear_acceleration = a;
    return s;
}

}  // namespace

TEST(MotionGuard, StillHeadNoWarning) {
    MotionGuard g;
    EXPECT_TRUE(g.check(sample(0, Vec3{})).empty());
}

TEST(MotionGuard, AboveThresholdWarns) {
    MotionGuard g;
    const auto w = g.check(sample(1.0, Vec3{0, 2.5, 0}));
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0].channel, GuardChannel::AngularVelocity);
    EXPECT_DOUBLE_EQ(w[0].value, 2.5);
    EXPECT_EQ(w[0].t, 1.0);
}

TEST(MotionGuard, ExactlyAtThresholdDoesNotWarn) {
    MotionGuard g;
    EXPECT_TRUE(g.check(sample(0, Vec3{0, 2.0, 0}, Vec3{8.0, 0, 0})).empty());
}

TEST(MotionGuard, CooldownSuppresses) {
    MotionGuard g;
    EXPECT_EQ(g.check(sample(0.0, Vec3{0, 2.5, 0})).size(), 1u);
    EXPECT_EQ(g.check(sample(0.2, Vec3{0, 2.5, 0})).size(), 0u);
    EXPECT_EQ(g.check(sample(1.0, Vec3{0, 2.5, 0})).size(), 1u);
    EXPECT_EQ(g.warning_count(), 2u);
}

TEST(MotionGuard, ChannelsHaveIndependentCooldowns) {
    MotionGuard g;
    EXPECT_EQ(g.check(sample(0.0, Vec3{0, 3, 0})).size(), 1u);
    const auto w = g.check(sample(0.1, Vec3{0, 3, 0}, Vec3{0, 0, 9}));
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0].channel, GuardChannel::LinearAcceleration);
    EXPECT_DOUBLE_EQ(w[0].value, 9.0);
}

TEST(MotionGuard, MissingChannelPolicies) {
    MotionGuard lenient;
    EXPECT_TRUE(lenient.check(sample(0, std::nullopt, std::nullopt)).empty());
    EXPECT_TRUE(lenient.disabled_by_missing_data(GuardChannel::AngularVelocity));
    EXPECT_TRUE(lenient.check(sample(1, Vec3{0, 5, 0})).empty());

    GuardParams p;
    p.missing_channel = MissingChannelPolicy::Error;
    MotionGuard strict(p);
    EXPECT_THROW(strict.check(sample(0, std::nullopt)), ChannelUnavailableError);

    p.angular_velocity_enabled = false;
    MotionGuard off(p);
    EXPECT_TRUE(off.check(sample(0, std::nullopt)).empty());
}

TEST(MotionGuard, ParamsValidated) {
    GuardParams p;
    p.max_angular_speed = 0;
    EXPECT_THROW(MotionGuard{p}, ConfigError);
    p = {};
    p.warning_cooldown_s = -1;
    EXPECT_THROW(MotionGuard{p}, ConfigError);
}

TEST(MotionGuard, CountBoundedByDurationOverCooldown) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 4);
    std::uniform_real_distribution<double> cd(0.05, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        GuardParams p;
        p.warning_cooldown_s = cd(rng);
        MotionGuard g(p);
        std::array<std::size_t, 2> per{};
        const double rate = 100.0;
        const int n = 1000;
        for (int i = 0; i < n; ++i) {
            for (const auto& w : g.check(sample(i / rate, Vec3{0, u(rng), 0}, Vec3{u(rng) * 4, 0, 0}))) {
                ++per[static_cast<std::size_t>(w.channel)];
            }
        }
        const double duration = (n - 1) / rate;
        const auto bound = static_cast<std::size_t>(std::ceil(duration / p.warning_cooldown_s));
        EXPECT_LE(per[0], bound);
        EXPECT_LE(per[1], bound);
    }
}

TEST(MotionGuard, LoweringThresholdNeverDecreasesCount) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 4);
    std::vector<PoseSample> trace;
    for (int i = 0; i < 2000; ++i) trace.push_back(sample(i * 0.013, Vec3{u(rng), 0, 0}, Vec3{0, u(rng) * 3, 0}));
    std::size_t previous = 0;
    for (double th = 4.0; th > 0.2; th -= 0.1) {
        GuardParams p;
        p.max_angular_speed = th;
        p.max_linear_accel = th * 3;
        MotionGuard g(p);
        for (const auto& s : trace) g.check(s);
        EXPECT_GE(g.warning_count(), previous) << "threshold " << th;
        previous = g.warning_count();
    }
}
