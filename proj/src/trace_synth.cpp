#include "retrax/trace_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "retrax/errors.hpp"

namespace retrax {

namespace {

constexpr double kPi = std::numbers::pi;

class NoiseSource {
  public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

    // 53 random mantissa bits -> [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Box-Muller, cosine branch only.
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

  private:
    std::mt19937_64 engine_;
};

struct Segments {
    long rise = 0;
    long hold = 0;
    long fall = 0;
    long rest = 0;
    long total() const { return rise + hold + fall + rest; }
};

long to_samples(double seconds, double rate) { return std::lround(seconds * rate); }

// Time after the segment start at which a raised-cosine rise of length T and
// amplitude A first reaches `level` (level <= A).
double rise_crossing(double T, double A, double level) {
    if (T <= 0.0) return 0.0;
    return T * std::acos(std::clamp(1.0 - 2.0 * level / A, -1.0, 1.0)) / kPi;
}

// Time after the fall start at which a raised-cosine fall drops below `level`.
double fall_crossing(double T, double A, double level) {
    if (T <= 0.0) return 0.0;
    return T * std::acos(std::clamp(2.0 * level / A - 1.0, -1.0, 1.0)) / kPi;
}

ExpectedExcursion expect(const ExcursionScript& e, std::size_t index, double start_t, double range_m,
                         const LevelSpec& level, const EngineParams& params) {
    ExpectedExcursion x;
    x.index = index;
    x.start_t = start_t;
    const double A = e.amplitude_fraction * range_m;
    x.peak_m = A;
    const double release = params.release_fraction * range_m;
    const double ret = (params.release_fraction - params.hysteresis_band) * range_m;
    const double target = level.target_fraction * range_m;
    const double band = (level.target_fraction - params.hysteresis_band) * range_m;

    x.detected = A >= release;
    if (!x.detected) return x;
    x.movement_s = e.rise_s - rise_crossing(e.rise_s, A, release) + e.hold_s + fall_crossing(e.fall_s, A, ret);
    if (A >= target) {
        x.hold_s = e.rise_s - rise_crossing(e.rise_s, A, target) + e.hold_s + fall_crossing(e.fall_s, A, band);
    }

    if (A < target) {
        x.reason = RejectReason::TargetNotReached;
    } else if (x.movement_s < level.min_movement_s) {
        x.reason = RejectReason::TooShort;
    } else if (level.kind == LevelKind::Endurance && x.hold_s < level.min_hold_s) {
        x.reason = RejectReason::HoldTooShort;
    }
    x.valid_rep = !x.reason;
    return x;
}

}  // namespace

void TraceScript::validate() const {
    if (!(sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be > 0");
    if (!(lead_in_s >= 0.0)) throw ConfigError("lead_in_s must be >= 0");
    for (const auto& e : excursions) {
        if (!(e.amplitude_fraction >= 0.0 && e.amplitude_fraction <= 1.5)) {
            throw ConfigError("amplitude_fraction must be in [0, 1.5]");
        }
        if (!(e.rise_s >= 0.0 && e.hold_s >= 0.0 && e.fall_s >= 0.0 && e.rest_s >= 0.0)) {
            throw ConfigError("excursion durations must be >= 0");
        }
    }
    if (!(noise.gaussian_sigma_m >= 0.0)) throw ConfigError("gaussian_sigma_m must be >= 0");
    if (!(noise.spike_probability_per_sample >= 0.0 && noise.spike_probability_per_sample <= 1.0)) {
        throw ConfigError("spike_probability_per_sample must be in [0, 1]");
    }
    if (!(noise.spike_magnitude_m >= 0.0)) throw ConfigError("spike_magnitude_m must be >= 0");
    for (const auto& j : jerk_events) {
        if (!(j.duration_s > 0.0) || !(j.angular_speed_rad_s >= 0.0) || !std::isfinite(j.t)) {
            throw ConfigError("jerk events need t, speed >= 0 and duration > 0");
        }
    }
}

std::size_t GroundTruth::valid_reps() const {
    std::size_t n = 0;
    for (const auto& e : excursions) n += e.valid_rep ? 1 : 0;
    return n;
}

double excursion_displacement(const ExcursionScript& e, double A, double u) {
    if (u < 0.0) return 0.0;
    if (u < e.rise_s) return A * (1.0 - std::cos(kPi * u / e.rise_s)) / 2.0;
    u -= e.rise_s;
    if (u <= e.hold_s) return A;
    u -= e.hold_s;
    if (u < e.fall_s) return A * (1.0 + std::cos(kPi * u / e.fall_s)) / 2.0;
    return 0.0;
}

SynthResult generate(const TraceScript& script, const CalibrationProfile& profile, const LevelSpec& level,
                     const EngineParams& params) {
    script.validate();
    const double rate = script.sample_rate_hz;
    const double R = profile.max_range_m;

    std::vector<Segments> segs;
    segs.reserve(script.excursions.size());
    const long lead = to_samples(script.lead_in_s, rate);
    long total = lead;
    for (const auto& e : script.excursions) {
        Segments s{to_samples(e.rise_s, rate), to_samples(e.hold_s, rate), to_samples(e.fall_s, rate),
                   to_samples(e.rest_s, rate)};
        total += s.total();
        segs.push_back(s);
    }

    SynthResult result;
    result.truth.level = level;
    result.truth.params = params;
    {
        long start = lead;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto& s = segs[i];
            // expectations use the durations actually rendered
            ExcursionScript q = script.excursions[i];
            q.rise_s = static_cast<double>(s.rise) / rate;
            q.hold_s = static_cast<double>(s.hold) / rate;
            q.fall_s = static_cast<double>(s.fall) / rate;
            q.rest_s = static_cast<double>(s.rest) / rate;
            result.truth.excursions.push_back(expect(q, i, static_cast<double>(start) / rate, R, level, params));
            start += s.total();
        }
    }

    NoiseSource noise(script.seed);
    Trace& trace = result.trace;
    trace.nominal_rate_hz = rate;
    trace.samples.reserve(static_cast<std::size_t>(total + 1));

    std::vector<long> starts;
    starts.reserve(segs.size());
    for (long at = lead; const auto& s : segs) {
        starts.push_back(at);
        at += s.total();
    }

    std::size_t ex = 0;
    for (long k = 0; k <= total; ++k) {
        while (ex < segs.size() && k >= starts[ex] + segs[ex].total()) ++ex;
        const long ex_start = ex < segs.size() ? starts[ex] : total + 1;

        double disp = 0.0;
        double accel = 0.0;
        if (ex < segs.size() && k >= ex_start) {
            const auto& s = segs[ex];
            const double A = script.excursions[ex].amplitude_fraction * R;
            const long j = k - ex_start;
            if (j < s.rise) {
                const double T = static_cast<double>(s.rise) / rate;
                const double phase = kPi * static_cast<double>(j) / static_cast<double>(s.rise);
                disp = A * (1.0 - std::cos(phase)) / 2.0;
                accel = A * (kPi / T) * (kPi / T) * std::cos(phase) / 2.0;
            } else if (j <= s.rise + s.hold) {
                disp = A;
            } else if (j <= s.rise + s.hold + s.fall) {
                const double T = static_cast<double>(s.fall) / rate;
                const double phase = kPi * static_cast<double>(j - s.rise - s.hold) / static_cast<double>(s.fall);
                disp = A * (1.0 + std::cos(phase)) / 2.0;
                accel = -A * (kPi / T) * (kPi / T) * std::cos(phase) / 2.0;
            }
        }

        PoseSample p;
        p.t = static_cast<double>(k) / rate;
        Vec3 offset = profile.axis * disp;
        if (script.noise.gaussian_sigma_m > 0.0) {
            const double sx = noise.gaussian();
            const double sy = noise.gaussian();
            const double sz = noise.gaussian();
            offset = offset + Vec3{sx, sy, sz} * script.noise.gaussian_sigma_m;
        }
        if (script.noise.spike_probability_per_sample > 0.0) {
            const bool spike = noise.uniform() < script.noise.spike_probability_per_sample;
            const double sign = noise.uniform() < 0.5 ? -1.0 : 1.0;
            if (spike) offset = offset + profile.axis * (sign * script.noise.spike_magnitude_m);
        }
        p.position = profile.neutral_position + offset;

        double yaw = 0.0;
        double yaw_rate = 0.0;
        for (const auto& j : script.jerk_events) {
            const double u = p.t - j.t;
            if (u < 0.0 || u >= j.duration_s) continue;
            const double half = j.duration_s / 2.0;
            if (u < half) {
                yaw += j.angular_speed_rad_s * u;
                yaw_rate += j.angular_speed_rad_s;
            } else {
                yaw += j.angular_speed_rad_s * (j.duration_s - u);
                yaw_rate -= j.angular_speed_rad_s;
            }
        }
        p.orientation = yaw == 0.0 ? profile.neutral_orientation
                                   : (Quat::from_axis_angle(kWorldUp, yaw) * profile.neutral_orientation).normalized();
        p.angular_velocity = Vec3{0.0, yaw_rate, 0.0};
        p.linear_acceleration = profile.axis * accel;
        trace.samples.push_back(p);
    }
    return result;
}

}  // namespace retrax
