#include "retrax/motion_guard.hpp"

#include <cmath>

#include "retrax/errors.hpp"
#include "retrax/kernels.hpp"

namespace retrax {

std::string_view to_string(GuardChannel c) {
    return c == GuardChannel::AngularVelocity ? "AngularVelocity" : "LinearAcceleration";
}

GuardChannel guard_channel_from_string(std::string_view s) {
    if (s == "AngularVelocity") return GuardChannel::AngularVelocity;
    if (s == "LinearAcceleration") return GuardChannel::LinearAcceleration;
    throw ParseError("channel", "unknown guard channel '" + std::string(s) + "'");
}

void GuardParams::validate() const {
    if (!(max_angular_speed > 0.0)) throw ConfigError("max_angular_speed must be > 0");
    if (!(max_linear_accel > 0.0)) throw ConfigError("max_linear_accel must be > 0");
    if (!(warning_cooldown_s >= 0.0)) throw ConfigError("warning_cooldown_s must be >= 0");
}

MotionGuard::MotionGuard(GuardParams params) : params_(params) { params_.validate(); }

std::optional<Warning> MotionGuard::check_channel(GuardChannel c, double t, std::optional<double> magnitude) {
    const std::size_t i = index(c);
    if (!params_.enabled(c) || auto_disabled_[i]) return std::nullopt;
    if (!magnitude) {
        if (params_.missing_channel == MissingChannelPolicy::Error) {
            throw ChannelUnavailableError(std::string(to_string(c)) + " enabled but missing from sample");
        }
        auto_disabled_[i] = true;
        return std::nullopt;
    }
    if (!(*magnitude > params_.threshold(c))) return std::nullopt;
    if (last_warning_t_[i] && t - *last_warning_t_[i] < params_.warning_cooldown_s) return std::nullopt;
    last_warning_t_[i] = t;
    ++warning_count_;
    return Warning{t, c, *magnitude};
}

std::vector<Warning> MotionGuard::check_magnitudes(double t, std::optional<double> angular_speed,
                                                   std::optional<double> linear_accel) {
    std::vector<Warning> out;
    if (auto w = check_channel(GuardChannel::AngularVelocity, t, angular_speed)) out.push_back(*w);
    if (auto w = check_channel(GuardChannel::LinearAcceleration, t, linear_accel)) out.push_back(*w);
    return out;
}

std::vector<Warning> MotionGuard::check(const PoseSample& sample) {
    auto magnitude = [](const std::optional<Vec3>& v) -> std::optional<double> {
        if (!v) return std::nullopt;
        return kernels::scalar::magnitude_one(v->x, v->y, v->z);
    };
    return check_magnitudes(sample.t, magnitude(sample.angular_velocity), magnitude(sample.linear_acceleration));
}

}  // namespace retrax
