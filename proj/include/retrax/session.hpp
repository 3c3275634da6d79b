#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "retrax/calibration.hpp"
#include "retrax/motion_guard.hpp"
#include "retrax/pose.hpp"

namespace retrax {

enum class LevelKind { Strength, Endurance };

std::string_view to_string(LevelKind k);
LevelKind level_kind_from_string(std::string_view s);

struct LevelSpec {
    int level_index = 1;          // 1..6 for built-in levels, anything >= 1 for custom
    double target_fraction = 0.30;
    int required_reps = 30;
    double min_movement_s = 6.0;
    double min_hold_s = 0.0;
    LevelKind kind = LevelKind::Strength;

    bool operator==(const LevelSpec&) const = default;

    /// Throws ConfigError when the invariants do not hold.
    void validate() const;
};

/// Levels 1-3 are strength at 30/60/90 % of range, levels 4-6 repeat the
/// same targets as endurance levels with a 10 s hold. All need 30 reps of
/// at least 6 s each.
std::vector<LevelSpec> builtin_levels();

/// Built-in level by 1-based index; throws UsageError outside 1..6.
LevelSpec builtin_level(int index);

struct EngineParams {
    double release_fraction = 0.10;       // leave Neutral at d >= release*R
    double hysteresis_band = 0.05;        // re-enter Neutral below (release-band)*R; hold band is (target-band)*R
    double hold_dropout_tolerance_s = 0.15;

    bool operator==(const EngineParams&) const = default;

    /// Checks the level-independent invariants.
    void validate() const;
};

enum class RejectReason { TargetNotReached, TooShort, HoldTooShort };

std::string_view to_string(RejectReason r);
RejectReason reject_reason_from_string(std::string_view s);

struct RepRecord {
    int index = 0;
    double peak_m = 0.0;
    double movement_s = 0.0;
    double hold_s = 0.0;

    bool operator==(const RepRecord&) const = default;
};

struct DistanceStats {
    double max_m = 0.0;
    double min_m = 0.0;
    double mean_m = 0.0;
    double range_m = 0.0;

    bool operator==(const DistanceStats&) const = default;
};

/// Max/min/mean/range over per-rep peaks; nullopt when there are no reps.
std::optional<DistanceStats> compute_distance_stats(std::span<const RepRecord> reps);

struct SessionSummary {
    std::vector<RepRecord> reps;
    std::optional<DistanceStats> distance_stats;
    bool completed = false;
    int required_reps = 0;
    std::size_t rejected_count = 0;
    double wall_time_s = 0.0;  // session-clock span from first to last sample
    std::size_t warning_count = 0;

    bool operator==(const SessionSummary&) const = default;
};

struct RepCompleted {
    RepRecord rep;
    bool operator==(const RepCompleted&) const = default;
};

struct RepRejected {
    RejectReason reason = RejectReason::TargetNotReached;
    double peak_m = 0.0;
    double movement_s = 0.0;
    double hold_s = 0.0;
    bool operator==(const RepRejected&) const = default;
};

struct WarningIssued {
    GuardChannel channel = GuardChannel::AngularVelocity;
    double value = 0.0;
    bool operator==(const WarningIssued&) const = default;
};

struct LevelCompleted {
    SessionSummary summary;
    bool operator==(const LevelCompleted&) const = default;
};

struct SessionEvent {
    double t = 0.0;
    std::variant<RepCompleted, RepRejected, WarningIssued, LevelCompleted> kind;

    bool operator==(const SessionEvent&) const = default;

    template <class T>
    bool is() const { return std::holds_alternative<T>(kind); }
    template <class T>
    const T& as() const { return std::get<T>(kind); }
};

enum class SessionState { Neutral, Moving, AtTarget, Returning };

std::string_view to_string(SessionState s);

/// Streaming rep detector for one level. A rep is one excursion from Neutral
/// back to Neutral; it is scored when the distance falls back below the
/// return threshold.
///
/// Single owner: may be moved between threads but not used concurrently.
class Session {
  public:
    /// Throws ConfigError for invalid level/params combinations and
    /// ValidationError for an invalid profile.
    Session(CalibrationProfile profile, LevelSpec level, EngineParams params = {}, GuardParams guard = {});

    /// Feeds one sample. Throws StreamOrderError if t does not increase and
    /// SessionClosedError once the level is complete or finish() was called.
    std::vector<SessionEvent> ingest(const PoseSample& sample);

    /// Feeds a whole trace; distances and channel magnitudes are computed with
    /// the dispatched batch kernels. Produces exactly the events that feeding
    /// the samples one at a time would. Stops at level completion; remaining
    /// samples are ignored.
    std::vector<SessionEvent> ingest_trace(std::span<const PoseSample> samples);

    /// Closes the session. An excursion still in progress is discarded.
    SessionSummary finish();

    SessionSummary summary() const;

    SessionState state() const;
    bool completed() const { return level_done_; }
    bool closed() const { return closed_; }
    int rep_count() const { return static_cast<int>(reps_.size()); }
    const std::vector<SessionEvent>& events() const { return log_; }

    const CalibrationProfile& profile() const { return profile_; }
    const LevelSpec& level() const { return level_; }
    const EngineParams& params() const { return params_; }
    const GuardParams& guard_params() const { return guard_.params(); }

    double target_m() const { return target_m_; }
    double release_m() const { return release_m_; }
    double return_m() const { return return_m_; }
    double hold_band_m() const { return hold_band_m_; }

  private:
    void check_open(double t) const;
    void step(double t, double distance, const std::vector<Warning>& warnings, std::vector<SessionEvent>& out);
    void track_hold(double t, double distance);
    void close_hold_run();
    void score_excursion(double t, std::vector<SessionEvent>& out);
    void emit(SessionEvent e, std::vector<SessionEvent>& out);

    CalibrationProfile profile_;
    LevelSpec level_;
    EngineParams params_;
    MotionGuard guard_;

    double target_m_;
    double release_m_;
    double return_m_;
    double hold_band_m_;

    bool in_excursion_ = false;
    bool reached_target_ = false;
    double excursion_start_t_ = 0.0;
    double peak_m_ = 0.0;

    bool run_active_ = false;
    double run_start_t_ = 0.0;
    double last_in_band_t_ = 0.0;
    std::optional<double> dip_start_t_;
    double best_hold_s_ = 0.0;

    std::optional<double> first_t_;
    std::optional<double> last_t_;
    std::vector<RepRecord> reps_;
    std::size_t rejected_ = 0;
    std::size_t warnings_ = 0;
    bool level_done_ = false;
    bool closed_ = false;
    std::vector<SessionEvent> log_;
};

}  // namespace retrax
