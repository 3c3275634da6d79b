#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retrax/geometry.hpp"

namespace retrax {

/// One timestamped 6-DoF reading. Angular velocity and linear acceleration
/// are optional; a missing channel means the producer could not supply it.
struct PoseSample {
    double t = 0.0;          // seconds, monotonic session clock
    Vec3 position;           // meters, world frame
    Quat orientation;        // world-from-head, unit norm
    std::optional<Vec3> angular_velocity;     // rad/s
    std::optional<Vec3> linear_acceleration;  // m/s^2, gravity removed

    bool operator==(const PoseSample&) const = default;
};

struct Trace {
    std::vector<PoseSample> samples;
    double nominal_rate_hz = 0.0;

    std::span<const PoseSample> view() const { return samples; }
    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    double duration() const {
        return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
    }
};

// Quaternions whose norm falls outside this band are rejected; inside it they
// are renormalized.
inline constexpr double kQuatNormLow = 0.99;
inline constexpr double kQuatNormHigh = 1.01;

/// Parses one pose JSONL record:
///   {"t":<s>,"p":[x,y,z],"q":[w,x,y,z],"w":[wx,wy,wz],"a":[ax,ay,az]}
/// Throws ParseError for malformed input and ValidationError for non-finite
/// values or an out-of-band quaternion norm.
PoseSample parse_sample(std::string_view line);

/// Serializes a sample as a single JSONL record (no trailing newline).
std::string serialize_sample(const PoseSample& sample);

/// World-frame direction of the head's local forward axis (0,0,-1).
Vec3 head_forward(const Quat& orientation);

/// Throws ValidationError unless the trace is non-empty with strictly
/// increasing timestamps.
void validate_trace(const Trace& trace);

/// Reads a pose JSONL stream. Blank lines are skipped; parse failures carry
/// the 1-based line number. The nominal rate is estimated from the span.
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);

void write_trace(std::ostream& out, const Trace& trace);
void write_trace_file(const std::string& path, const Trace& trace);

}  // namespace retrax
