#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "oracle/segmenter.hpp"
#include "retrax/calibration.hpp"
#include "retrax/errors.hpp"
#include "retrax/trace_synth.hpp"

using namespace retrax;

TEST(TraceSynth, EmptyScriptStaysAtNeutral) {
    const auto p = testutil::profile();
    TraceScript sc;
    sc.lead_in_s = 3.0;
    const auto r = generate(sc, p);
    EXPECT_TRUE(r.truth.excursions.empty());
    EXPECT_EQ(r.trace.size(), 151u);
    for (const auto& s : r.trace.samples) {
        EXPECT_EQ(s.position, p.neutral_position);
        EXPECT_EQ(retraction_distance(p, s), 0.0);
    }
}

TEST(TraceSynth, SameSeedIsBitIdentical) {
    const auto p = testutil::profile();
    TraceScript sc = testutil::script(5, 0.8);
    sc.noise = {0.001, 0.05, 0.01};
    sc.jerk_events = {{4.0, 3.0}};
    sc.seed = 99;
    const auto a = generate(sc, p);
    const auto b = generate(sc, p);
    EXPECT_EQ(a.trace.samples, b.trace.samples);
    sc.seed = 100;
    EXPECT_NE(generate(sc, p).trace.samples, a.trace.samples);
}

TEST(TraceSynth, CleanPeaksEqualAmplitude) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> amp(0.0, 1.5), dur(0.0, 3.0), rate(10, 200);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = testutil::profile(0.03 + trial * 0.001);
        TraceScript sc;
        sc.sample_rate_hz = rate(rng);
        sc.excursions.push_back({amp(rng), dur(rng), dur(rng), dur(rng), dur(rng)});
        const auto r = generate(sc, p);
        double peak = 0.0;
        for (const auto& s : r.trace.samples) peak = std::max(peak, retraction_distance(p, s));
        EXPECT_NEAR(peak, sc.excursions[0].amplitude_fraction * p.max_range_m, 1e-9);
        EXPECT_NEAR(r.truth.excursions[0].peak_m, peak, 1e-9);
    }
}

TEST(TraceSynth, GroundTruthForCleanLevelThreeScript) {
    const auto p = testutil::profile();
    const auto r = generate(testutil::script(30, 0.95), p, builtin_level(3));
    ASSERT_EQ(r.truth.excursions.size(), 30u);
    EXPECT_EQ(r.truth.valid_reps(), 30u);
    const auto ex = oracle::segment(p, builtin_level(3), {}, r.trace.samples);
    ASSERT_EQ(ex.size(), 30u);
    for (std::size_t i = 0; i < ex.size(); ++i) {
        EXPECT_TRUE(ex[i].valid);
        // sampled movement time lies within one sample period of the analytic value
        EXPECT_NEAR(ex[i].movement_s, r.truth.excursions[i].movement_s, 0.02 + 1e-9);
    }
}

TEST(TraceSynth, GroundTruthReasons) {
    const auto p = testutil::profile();
    TraceScript sc;
    sc.excursions = {{0.5, 2, 4, 2, 1}, {0.95, 1, 1, 1, 1}, {0.95, 2, 9, 2, 1}, {0.95, 2, 11, 2, 1}, {0.05, 1, 1, 1, 1}};
    const auto r = generate(sc, p, builtin_level(6));
    const auto& e = r.truth.excursions;
    EXPECT_EQ(e[0].reason, RejectReason::TargetNotReached);
    EXPECT_EQ(e[1].reason, RejectReason::TooShort);
    EXPECT_EQ(e[2].reason, RejectReason::HoldTooShort);
    EXPECT_TRUE(e[3].valid_rep);
    EXPECT_FALSE(e[4].detected);
    EXPECT_EQ(r.truth.valid_reps(), 1u);
}

TEST(TraceSynth, JerkEventsProduceRequestedAngularSpeed) {
    const auto p = testutil::profile();
    TraceScript sc;
    sc.lead_in_s = 5.0;
    sc.jerk_events = {{2.0, 2.5}};
    const auto r = generate(sc, p);
    double peak = 0.0;
    int over = 0;
    for (const auto& s : r.trace.samples) {
        const double w = s.angular_velocity->norm();
        peak = std::max(peak, w);
        over += w > 0.0;
    }
    EXPECT_DOUBLE_EQ(peak, 2.5);
    EXPECT_EQ(over, 10);  // 0.2 s at 50 Hz
    EXPECT_EQ(r.trace.samples.back().orientation, p.neutral_orientation);
}

TEST(TraceSynth, ValidatesScript) {
    const auto p = testutil::profile();
    TraceScript sc = testutil::script(1, 1.6);
    EXPECT_THROW(generate(sc, p), ConfigError);
    sc = testutil::script(1, 0.5);
    sc.sample_rate_hz = 0;
    EXPECT_THROW(generate(sc, p), ConfigError);
    sc = testutil::script(1, 0.5);
    sc.noise.spike_probability_per_sample = 1.5;
    EXPECT_THROW(generate(sc, p), ConfigError);
}
