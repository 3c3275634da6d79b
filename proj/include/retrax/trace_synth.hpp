#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "retrax/calibration.hpp"
#include "retrax/pose.hpp"
#include "retrax/session.hpp"

namespace retrax {

struct ExcursionScript {
    double amplitude_fraction = 0.0;  // of R, in [0, 1.5]
    double rise_s = 0.0;
    double hold_s = 0.0;
    double fall_s = 0.0;
    double rest_s = 0.0;

    bool operator==(const ExcursionScript&) const = default;
};

struct NoiseScript {
    double gaussian_sigma_m = 0.0;
    double spike_probability_per_sample = 0.0;
    double spike_magnitude_m = 0.0;

    bool operator==(const NoiseScript&) const = default;
};

/// Brief head rotation about world +Y: the first half turns at +speed, the
/// second half at -speed, so the orientation returns to where it started.
struct JerkEvent {
    double t = 0.0;
    double angular_speed_rad_s = 0.0;
    double duration_s = 0.2;

    bool operator==(const JerkEvent&) const = default;
};

struct TraceScript {
    std::vector<ExcursionScript> excursions;
    double sample_rate_hz = 50.0;
    double lead_in_s = 1.0;  // time at neutral before the first excursion
    NoiseScript noise;
    std::vector<JerkEvent> jerk_events;
    std::uint64_t seed = 0;

    bool operator==(const TraceScript&) const = default;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Expected outcome of one scripted excursion on the clean (noise-free)
/// displacement curve, with crossing times solved in closed form.
struct ExpectedExcursion {
    std::size_t index = 0;
    double start_t = 0.0;          // first sample of the excursion's rise
    double peak_m = 0.0;
    bool detected = false;         // false if the amplitude never leaves Neutral
    bool valid_rep = false;
    std::optional<RejectReason> reason;
    double movement_s = 0.0;       // continuous-time estimate
    double hold_s = 0.0;           // continuous-time estimate
};

struct GroundTruth {
    LevelSpec level;
    EngineParams params;
    std::vector<ExpectedExcursion> excursions;

    std::size_t valid_reps() const;
};

struct SynthResult {
    Trace trace;
    GroundTruth truth;
};

/// Deterministic synthetic trace. Segment durations are rounded to whole
/// sample periods so every plateau and peak lands on a sample. Noise draws
/// come from std::mt19937_64 (seeded with script.seed) converted to doubles
/// and Gaussians by fixed formulas, so output does not depend on the
/// standard library's distribution implementations.
SynthResult generate(const TraceScript& script, const CalibrationProfile& profile,
                     const LevelSpec& level = builtin_level(3), const EngineParams& params = {});

/// Displacement of the raised-cosine excursion at local time `u` seconds.
double excursion_displacement(const ExcursionScript& e, double amplitude_m, double u);

}  // namespace retrax
