#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "retrax/pose.hpp"

namespace retrax {

enum class GuardChannel { AngularVelocity = 0, LinearAcceleration = 1 };

std::string_view to_string(GuardChannel c);
GuardChannel guard_channel_from_string(std::string_view s);

/// What to do when an enabled channel is absent from a sample.
enum class MissingChannelPolicy { Error, Disable };

// Defaults are placeholders for a runnable tool, not clinical thresholds.
struct GuardParams {
    double max_angular_speed = 2.0;   // rad/s
    double max_linear_accel = 8.0;    // m/s^2
    double warning_cooldown_s = 1.0;
    bool angular_velocity_enabled = true;
    bool linear_acceleration_enabled = true;
    MissingChannelPolicy missing_channel = MissingChannelPolicy::Disable;

    bool operator==(const GuardParams&) const = default;

    bool enabled(GuardChannel c) const {
        return c == GuardChannel::AngularVelocity ? angular_velocity_enabled : linear_acceleration_enabled;
    }
    double threshold(GuardChannel c) const {
        return c == GuardChannel::AngularVelocity ? max_angular_speed : max_linear_accel;
    }

    /// Throws ConfigError on non-positive thresholds or negative cooldown.
    void validate() const;
};

struct Warning {
    double t = 0.0;
    GuardChannel channel = GuardChannel::AngularVelocity;
    double value = 0.0;  // magnitude that exceeded the threshold

    bool operator==(const Warning&) const = default;
};

/// Magnitude threshold detector with an independent cooldown per channel.
class MotionGuard {
  public:
    explicit MotionGuard(GuardParams params = {});

    /// Checks one sample. Returns at most one warning per channel.
    std::vector<Warning> check(const PoseSample& sample);

    /// Same as check() but with magnitudes already computed; nullopt means the
    /// channel is missing from the sample.
    std::vector<Warning> check_magnitudes(double t, std::optional<double> angular_speed,
                                          std::optional<double> linear_accel);

    const GuardParams& params() const { return params_; }

    /// Channels switched off because a sample lacked them (Disable policy).
    bool disabled_by_missing_data(GuardChannel c) const { return auto_disabled_[index(c)]; }

    std::size_t warning_count() const { return warning_count_; }

  private:
    static std::size_t index(GuardChannel c) { return static_cast<std::size_t>(c); }
    std::optional<Warning> check_channel(GuardChannel c, double t, std::optional<double> magnitude);

    GuardParams params_;
    std::array<std::optional<double>, 2> last_warning_t_{};
    std::array<bool, 2> auto_disabled_{};
    std::size_t warning_count_ = 0;
};

}  // namespace retrax
