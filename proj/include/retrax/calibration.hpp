#pragma once

#include <optional>
#include <string_view>

#include "retrax/geometry.hpp"
#include "retrax/pose.hpp"

namespace retrax {

enum class CalibrationMode { Manual, Automatic };

/// Which movement the range measures. Retraction is a horizontal backward
/// translation; Bending and Extension lie in the sagittal plane
/// (forward-down and backward-down respectively); Custom takes a caller axis.
enum class Movement { Retraction, Bending, Extension, Custom };

std::string_view to_string(CalibrationMode m);
std::string_view to_string(Movement m);
CalibrationMode calibration_mode_from_string(std::string_view s);
Movement movement_from_string(std::string_view s);

struct RangeBounds {
    double min_m = 0.005;
    double max_m = 0.30;
};

// Horizontal forward component below this norm means the head faces
// (almost) straight up or down, leaving no usable retraction axis.
inline constexpr double kMinHorizontalForward = 1e-3;

struct CalibrationProfile {
    Vec3 neutral_position;
    Quat neutral_orientation;
    Vec3 axis;               // unit, direction of increasing displacement
    double max_range_m = 0.0;
    CalibrationMode mode = CalibrationMode::Manual;
    Movement movement = Movement::Retraction;

    bool operator==(const CalibrationProfile&) const = default;
};

/// Neutral anchor plus frozen axis, awaiting a range.
struct PartialProfile {
    Vec3 neutral_position;
    Quat neutral_orientation;
    Vec3 axis;
    Movement movement = Movement::Retraction;
};

/// Captures the neutral pose and freezes the measurement axis. `custom_axis`
/// is required (and normalized) for Movement::Custom, ignored otherwise.
PartialProfile capture_neutral(const PoseSample& sample, Movement movement,
                               std::optional<Vec3> custom_axis = std::nullopt);

CalibrationProfile set_manual_range(const PartialProfile& partial, double range_m, RangeBounds bounds = {});

/// Two-mark calibration: range is the displacement from mark_start to
/// mark_end projected onto the frozen axis. If `partial` is empty the
/// start mark becomes the neutral anchor.
CalibrationProfile auto_calibrate(const std::optional<PartialProfile>& partial, const PoseSample& mark_start,
                                  const PoseSample& mark_end, Movement movement = Movement::Retraction,
                                  RangeBounds bounds = {});

/// Non-negative displacement of `sample` from neutral along the axis.
double retraction_distance(const CalibrationProfile& profile, const PoseSample& sample);

/// Throws ValidationError if the profile violates its invariants.
void validate_profile(const CalibrationProfile& profile, RangeBounds bounds = {});

}  // namespace retrax
