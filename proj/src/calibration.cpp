#include "retrax/calibration.hpp"

#include <cmath>
#include <sstream>

#include "retrax/errors.hpp"
#include "retrax/kernels.hpp"

namespace retrax {

namespace {

std::string bounds_text(RangeBounds b) {
    std::ostringstream os;
    os << "[" << b.min_m << ", " << b.max_m << "] m";
    return os.str();
}

Vec3 horizontal_forward(const Quat& orientation) {
    const Vec3 fwd = head_forward(orientation);
    const Vec3 h{fwd.x, 0.0, fwd.z};
    if (h.norm() < kMinHorizontalForward) {
        throw DegeneratePoseError("neutral pose faces nearly vertical; no horizontal forward direction");
    }
    return normalized(h);
}

constexpr double kDirectionEpsilon = 1e-9;

}  // namespace

std::string_view to_string(CalibrationMode m) {
    return m == CalibrationMode::Manual ? "Manual" : "Automatic";
}

std::string_view to_string(Movement m) {
    switch (m) {
        case Movement::Retraction: return "Retraction";
        case Movement::Bending: return "Bending";
        case Movement::Extension: return "Extension";
        case Movement::Custom: return "Custom";
    }
    return "Retraction";
}

CalibrationMode calibration_mode_from_string(std::string_view s) {
    if (s == "Manual" || s == "manual") return CalibrationMode::Manual;
    if (s == "Automatic" || s == "automatic" || s == "auto") return CalibrationMode::Automatic;
    throw ParseError("mode", "unknown calibration mode '" + std::string(s) + "'");
}

Movement movement_from_string(std::string_view s) {
    if (s == "Retraction" || s == "retraction") return Movement::Retraction;
    if (s == "Bending" || s == "bending") return Movement::Bending;
    if (s == "Extension" || s == "extension") return Movement::Extension;
    if (s == "Custom" || s == "custom") return Movement::Custom;
    throw ParseError("movement", "unknown movement '" + std::string(s) + "'");
}

PartialProfile capture_neutral(const PoseSample& sample, Movement movement, std::optional<Vec3> custom_axis) {
    PartialProfile p;
    p.neutral_position = sample.position;
    p.neutral_orientation = sample.orientation;
    p.movement = movement;

    switch (movement) {
        case Movement::Retraction:
            p.axis = -horizontal_forward(sample.orientation);
            break;
        case Movement::Bending:
            p.axis = normalized(horizontal_forward(sample.orientation) - kWorldUp);
            break;
        case Movement::Extension:
            p.axis = normalized(-horizontal_forward(sample.orientation) - kWorldUp);
            break;
        case Movement::Custom: {
            if (!custom_axis) throw ConfigError("custom movement requires an axis");
            const double n = custom_axis->norm();
            if (!std::isfinite(n) || n < 1e-9) throw ConfigError("custom axis must be a non-zero finite vector");
            p.axis = normalized(*custom_axis);
            break;
        }
    }
    // drop signed zeros so saved profiles read cleanly
    p.axis = p.axis + Vec3{0.0, 0.0, 0.0};
    return p;
}

CalibrationProfile set_manual_range(const PartialProfile& partial, double range_m, RangeBounds bounds) {
    if (!std::isfinite(range_m) || range_m < bounds.min_m || range_m > bounds.max_m) {
        std::ostringstream os;
        os << "range " << range_m << " m outside " << bounds_text(bounds);
        throw RangeError(os.str());
    }
    return {partial.neutral_position, partial.neutral_orientation, partial.axis,
            range_m, CalibrationMode::Manual, partial.movement};
}

CalibrationProfile auto_calibrate(const std::optional<PartialProfile>& partial, const PoseSample& mark_start,
                                  const PoseSample& mark_end, Movement movement, RangeBounds bounds) {
    const PartialProfile base = partial ? *partial : capture_neutral(mark_start, movement);
    const double range = dot(mark_end.position - mark_start.position, base.axis);
    // perpendicular marks project to +/- rounding noise; only a real
    // backward component counts as the wrong direction
    if (range < -kDirectionEpsilon) {
        std::ostringstream os;
        os << "end mark lies " << -range << " m opposite the movement axis";
        throw WrongDirectionError(os.str());
    }
    if (range < bounds.min_m) {
        std::ostringstream os;
        os << "measured range " << range << " m below minimum " << bounds.min_m << " m";
        throw InsufficientMotionError(os.str());
    }
    if (range > bounds.max_m) {
        std::ostringstream os;
        os << "measured range " << range << " m outside " << bounds_text(bounds);
        throw RangeError(os.str());
    }
    CalibrationProfile profile{base.neutral_position, base.neutral_orientation, base.axis,
                               range, CalibrationMode::Automatic, base.movement};
    return profile;
}

double retraction_distance(const CalibrationProfile& profile, const PoseSample& sample) {
    const double origin[3] = {profile.neutral_position.x, profile.neutral_position.y, profile.neutral_position.z};
    const double axis[3] = {profile.axis.x, profile.axis.y, profile.axis.z};
    return kernels::scalar::project_clamped_one(sample.position.x, sample.position.y, sample.position.z,
                                                origin, axis);
}

void validate_profile(const CalibrationProfile& profile, RangeBounds bounds) {
    if (!profile.neutral_position.finite()) throw ValidationError("neutral_position", "non-finite value");
    if (!profile.neutral_orientation.finite() || std::abs(profile.neutral_orientation.norm() - 1.0) > 1e-6) {
        throw ValidationError("neutral_orientation", "not a unit quaternion");
    }
    if (!profile.axis.finite() || std::abs(profile.axis.norm() - 1.0) > 1e-9) {
        throw ValidationError("axis", "not a unit vector");
    }
    if (profile.movement == Movement::Retraction && std::abs(profile.axis.y) > 1e-9) {
        throw ValidationError("axis", "retraction axis must be horizontal");
    }
    if (!std::isfinite(profile.max_range_m) || profile.max_range_m < bounds.min_m ||
        profile.max_range_m > bounds.max_m) {
        throw ValidationError("max_range_m", "outside " + bounds_text(bounds));
    }
}

}  // namespace retrax
