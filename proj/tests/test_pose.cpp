#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracle/rotation.hpp"
#include "retrax/errors.hpp"
#include "retrax/pose.hpp"

using namespace retrax;

TEST(ParseSample, IdentityPose) {
    const auto s = parse_sample(R"({"t":0.5,"p":[0,0,0],"q":[1,0,0,0]})");
    EXPECT_EQ(s.t, 0.5);
    EXPECT_EQ(s.position, (Vec3{0, 0, 0}));
    EXPECT_EQ(s.orientation, (Quat{1, 0, 0, 0}));
    EXPECT_FALSE(s.angular_velocity);
    EXPECT_FALSE(s.linear_acceleration);
}

TEST(ParseSample, RenormalizesNearUnitQuaternion) {
    const auto s = parse_sample(R"({"t":0,"p":[0,0,0],"q":[0.70710,0,0.70710,0]})");
    EXPECT_NEAR(s.orientation.norm(), 1.0, 1e-12);
    EXPECT_NEAR(s.orientation.w, std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(s.orientation.y, std::sqrt(0.5), 1e-12);
}

TEST(ParseSample, RejectsNaNPosition) {
    try {
        parse_sample(R"({"t":0,"p":[0,"NaN",0],"q":[1,0,0,0]})");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "p[1]");
    }
}

TEST(ParseSample, RejectsFarFromUnitQuaternion) {
    EXPECT_THROW(parse_sample(R"({"t":0,"p":[0,0,0],"q":[2,0,0,0]})"), ValidationError);
    EXPECT_THROW(parse_sample(R"({"t":0,"p":[0,0,0],"q":[0.98,0,0,0]})"), ValidationError);
    EXPECT_NO_THROW(parse_sample(R"({"t":0,"p":[0,0,0],"q":[1.009,0,0,0]})"));
}

TEST(ParseSample, MalformedNamesField) {
    try {
        parse_sample(R"({"t":0,"p":[0,0],"q":[1,0,0,0]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "p");
    }
    try {
        parse_sample(R"({"p":[0,0,0],"q":[1,0,0,0]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "t");
    }
    EXPECT_THROW(parse_sample("not json"), ParseError);
    EXPECT_THROW(parse_sample(R"({"t":0,"p":[0,0,0],"q":[1,0,0,0],"w":[1,"x",0]})"), ParseError);
}

TEST(ParseSample, OptionalChannels) {
    const auto s = parse_sample(R"({"t":1,"p":[1,2,3],"q":[1,0,0,0],"w":[0.1,0.2,0.3],"a":[4,5,6]})");
    ASSERT_TRUE(s.angular_velocity);
    ASSERT_TRUE(s.linear_acceleration);
    EXPECT_EQ(*s.angular_velocity, (Vec3{0.1, 0.2, 0.3}));
    EXPECT_EQ(*s.linear_acceleration, (Vec3{4, 5, 6}));
}

TEST(HeadForward, IdentityLooksDownNegativeZ) {
    const Vec3 f = head_forward(Quat{});
    EXPECT_EQ(f, (Vec3{0, 0, -1}));
}

TEST(HeadForward, HalfTurnYaw) {
    const Vec3 f = head_forward(Quat::from_axis_angle({0, 1, 0}, std::numbers::pi));
    EXPECT_NEAR(f.x, 0.0, 1e-12);
    EXPECT_NEAR(f.y, 0.0, 1e-12);
    EXPECT_NEAR(f.z, 1.0, 1e-12);
}

TEST(HeadForward, QuarterYawMatchesRotationMatrix) {
    const double angle = std::numbers::pi / 2;
    const auto expected = oracle::apply(oracle::yaw_matrix(angle), {0, 0, -1});
    const Vec3 f = head_forward(Quat::from_axis_angle({0, 1, 0}, angle));
    EXPECT_NEAR(f.x, expected[0], 1e-12);
    EXPECT_NEAR(f.y, expected[1], 1e-12);
    EXPECT_NEAR(f.z, expected[2], 1e-12);
    EXPECT_NEAR(f.x, -1.0, 1e-12);
}

TEST(HeadForward, RandomQuaternionsAgreeWithMatrixAndStayUnit) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 1000; ++i) {
        const Quat q = Quat{g(rng), g(rng), g(rng), g(rng)}.normalized();
        const Vec3 f = head_forward(q);
        EXPECT_NEAR(f.norm(), 1.0, 1e-9);
        const auto m = oracle::apply(oracle::quat_matrix(q.w, q.x, q.y, q.z), {0, 0, -1});
        EXPECT_NEAR(f.x, m[0], 1e-12);
        EXPECT_NEAR(f.y, m[1], 1e-12);
        EXPECT_NEAR(f.z, m[2], 1e-12);
    }
}

TEST(Serialize, RoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
        PoseSample s;
        s.t = std::abs(u(rng)) * 100;
        s.position = {u(rng), u(rng), u(rng)};
        s.orientation = Quat{u(rng), u(rng), u(rng), u(rng)}.normalized();
        if (i % 2) s.angular_velocity = Vec3{u(rng), u(rng), u(rng)};
        if (i % 3) s.linear_acceleration = Vec3{u(rng), u(rng), u(rng)};
        const PoseSample a = parse_sample(serialize_sample(s));
        const PoseSample b = parse_sample(serialize_sample(a));
        EXPECT_NEAR(a.t, s.t, 1e-9);
        EXPECT_NEAR(a.position.x, s.position.x, 1e-9);
        EXPECT_NEAR(a.orientation.w, s.orientation.w, 1e-9);
        EXPECT_EQ(a.angular_velocity.has_value(), s.angular_velocity.has_value());
        // a second pass may only move the renormalized quaternion by rounding
        EXPECT_EQ(a.t, b.t);
        EXPECT_EQ(a.position, b.position);
        EXPECT_NEAR(a.orientation.w, b.orientation.w, 1e-15);
        EXPECT_NEAR(a.orientation.x, b.orientation.x, 1e-15);
        EXPECT_NEAR(a.orientation.y, b.orientation.y, 1e-15);
        EXPECT_NEAR(a.orientation.z, b.orientation.z, 1e-15);
        EXPECT_EQ(a.angular_velocity, b.angular_velocity);
        EXPECT_EQ(a.linear_acceleration, b.linear_acceleration);
    }
}

TEST(Trace, ReadReportsLineNumbers) {
    std::istringstream in(
        "{\"t\":0,\"p\":[0,0,0],\"q\":[1,0,0,0]}\n\n{\"t\":0.1,\"p\":[0,0,0],\"q\":[1,0,0,0]}\n{\"t\":0.2,\"p\":[0,0\n");
    try {
        read_trace(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(Trace, ValidateRequiresIncreasingTime) {
    Trace tr;
    EXPECT_THROW(validate_trace(tr), ValidationError);
    tr.samples.push_back({});
    tr.samples.push_back({});
    EXPECT_THROW(validate_trace(tr), ValidationError);
    tr.samples[1].t = 0.02;
    EXPECT_NO_THROW(validate_trace(tr));
}

TEST(Trace, WriteReadRoundTripAndRate) {
    Trace tr;
    for (int i = 0; i < 51; ++i) tr.samples.push_back({i / 50.0, {0, 1.6, i * 0.001}, {}, {}, {}});
    std::stringstream ss;
    write_trace(ss, tr);
    const Trace back = read_trace(ss);
    ASSERT_EQ(back.size(), tr.size());
    EXPECT_EQ(back.samples, tr.samples);
    EXPECT_NEAR(back.nominal_rate_hz, 50.0, 1e-9);
}
