#include "retrax/session.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "retrax/errors.hpp"
#include "retrax/kernels.hpp"

namespace retrax {

std::string_view to_string(LevelKind k) { return k == LevelKind::Strength ? "Strength" : "Endurance"; }

LevelKind level_kind_from_string(std::string_view s) {
    if (s == "Strength") return LevelKind::Strength;
    if (s == "Endurance") return LevelKind::Endurance;
    throw ParseError("kind", "unknown level kind '" + std::string(s) + "'");
}

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::TargetNotReached: return "TargetNotReached";
        case RejectReason::TooShort: return "TooShort";
        case RejectReason::HoldTooShort: return "HoldTooShort";
    }
    return "TargetNotReached";
}

RejectReason reject_reason_from_string(std::string_view s) {
    if (s == "TargetNotReached") return RejectReason::TargetNotReached;
    if (s == "TooShort") return RejectReason::TooShort;
    if (s == "HoldTooShort") return RejectReason::HoldTooShort;
    throw ParseError("reason", "unknown reject reason '" + std::string(s) + "'");
}

std::string_view to_string(SessionState s) {
    switch (s) {
        case SessionState::Neutral: return "Neutral";
        case SessionState::Moving: return "Moving";
        case SessionState::AtTarget: return "AtTarget";
        case SessionState::Returning: return "Returning";
    }
    return "Neutral";
}

void LevelSpec::validate() const {
    if (level_index < 1) throw ConfigError("level_index must be >= 1");
    if (!(target_fraction > 0.0 && target_fraction <= 1.0)) throw ConfigError("target_fraction must be in (0, 1]");
    if (required_reps < 1) throw ConfigError("required_reps must be >= 1");
    if (!(min_movement_s >= 0.0) || !(min_hold_s >= 0.0)) throw ConfigError("durations must be >= 0");
    if (kind == LevelKind::Strength && min_hold_s != 0.0) throw ConfigError("strength levels have no hold time");
}

std::vector<LevelSpec> builtin_levels() {
    constexpr double kFractions[3] = {0.30, 0.60, 0.90};
    constexpr int kReps = 30;
    constexpr double kMovementS = 6.0;
    constexpr double kHoldS = 10.0;

    std::vector<LevelSpec> levels;
    levels.reserve(6);
    for (int i = 0; i < 3; ++i) {
        levels.push_back({i + 1, kFractions[i], kReps, kMovementS, 0.0, LevelKind::Strength});
    }
    for (int i = 0; i < 3; ++i) {
        levels.push_back({i + 4, kFractions[i], kReps, kMovementS, kHoldS, LevelKind::Endurance});
    }
    return levels;
}

LevelSpec builtin_level(int index) {
    if (index < 1 || index > 6) throw UsageError("level must be in 1..6, got " + std::to_string(index));
    return builtin_levels()[static_cast<std::size_t>(index - 1)];
}

void EngineParams::validate() const {
    if (!(release_fraction > 0.0 && release_fraction < 1.0)) throw ConfigError("release_fraction must be in (0, 1)");
    if (!(hysteresis_band >= 0.0 && hysteresis_band < release_fraction)) {
        throw ConfigError("hysteresis_band must be in [0, release_fraction)");
    }
    if (!(hold_dropout_tolerance_s >= 0.0)) throw ConfigError("hold_dropout_tolerance_s must be >= 0");
}

std::optional<DistanceStats> compute_distance_stats(std::span<const RepRecord> reps) {
    if (reps.empty()) return std::nullopt;
    DistanceStats s;
    s.max_m = reps.front().peak_m;
    s.min_m = reps.front().peak_m;
    double sum = 0.0;
    for (const auto& r : reps) {
        s.max_m = std::max(s.max_m, r.peak_m);
        s.min_m = std::min(s.min_m, r.peak_m);
        sum += r.peak_m;
    }
    s.mean_m = sum / static_cast<double>(reps.size());
    s.range_m = s.max_m - s.min_m;
    return s;
}

Session::Session(CalibrationProfile profile, LevelSpec level, EngineParams params, GuardParams guard)
    : profile_(profile), level_(level), params_(params), guard_(guard) {
    validate_profile(profile_, {0.0, std::numeric_limits<double>::infinity()});
    if (!(profile_.max_range_m > 0.0)) throw ValidationError("max_range_m", "must be > 0");
    level_.validate();
    params_.validate();
    if (params_.release_fraction >= level_.target_fraction) {
        std::ostringstream os;
        os << "release_fraction " << params_.release_fraction << " must be below target_fraction "
           << level_.target_fraction;
        throw ConfigError(os.str());
    }
    const double range = profile_.max_range_m;
    target_m_ = level_.target_fraction * range;
    release_m_ = params_.release_fraction * range;
    return_m_ = (params_.release_fraction - params_.hysteresis_band) * range;
    hold_band_m_ = (level_.target_fraction - params_.hysteresis_band) * range;
}

SessionState Session::state() const {
    if (!in_excursion_) return SessionState::Neutral;
    if (run_active_) return SessionState::AtTarget;
    return reached_target_ ? SessionState::Returning : SessionState::Moving;
}

void Session::check_open(double t) const {
    if (closed_ || level_done_) throw SessionClosedError("session is closed");
    if (last_t_ && !(t > *last_t_)) {
        std::ostringstream os;
        os << "sample t=" << t << " does not follow previous t=" << *last_t_;
        throw StreamOrderError(os.str());
    }
}

std::vector<SessionEvent> Session::ingest(const PoseSample& sample) {
    check_open(sample.t);
    const auto warnings = guard_.check(sample);
    std::vector<SessionEvent> out;
    step(sample.t, retraction_distance(profile_, sample), warnings, out);
    return out;
}

std::vector<SessionEvent> Session::ingest_trace(std::span<const PoseSample> samples) {
    std::vector<SessionEvent> out;
    if (samples.empty()) return out;
    check_open(samples.front().t);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].t > samples[i - 1].t)) {
            throw StreamOrderError("trace timestamps not strictly increasing at sample " + std::to_string(i));
        }
    }

    const std::size_t n = samples.size();
    std::vector<double> px(n), py(n), pz(n), wx(n), wy(n), wz(n), ax(n), ay(n), az(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[i];
        px[i] = s.position.x;
        py[i] = s.position.y;
        pz[i] = s.position.z;
        if (s.angular_velocity) {
            wx[i] = s.angular_velocity->x;
            wy[i] = s.angular_velocity->y;
            wz[i] = s.angular_velocity->z;
        }
        if (s.linear_acceleration) {
            ax[i] = s.linear_acceleration->x;
            ay[i] = s.linear_acceleration->y;
            az[i] = s.linear_acceleration->z;
        }
    }

    const double origin[3] = {profile_.neutral_position.x, profile_.neutral_position.y, profile_.neutral_position.z};
    const double axis[3] = {profile_.axis.x, profile_.axis.y, profile_.axis.z};
    std::vector<double> dist(n), wmag(n), amag(n);
    kernels::project_clamped({px, py, pz}, origin, axis, dist);
    kernels::magnitudes({wx, wy, wz}, wmag);
    kernels::magnitudes({ax, ay, az}, amag);

    for (std::size_t i = 0; i < n && !level_done_; ++i) {
        const auto& s = samples[i];
        const auto warnings = guard_.check_magnitudes(
            s.t, s.angular_velocity ? std::optional<double>(wmag[i]) : std::nullopt,
            s.linear_acceleration ? std::optional<double>(amag[i]) : std::nullopt);
        step(s.t, dist[i], warnings, out);
    }
    return out;
}

void Session::emit(SessionEvent e, std::vector<SessionEvent>& out) {
    log_.push_back(e);
    out.push_back(std::move(e));
}

void Session::step(double t, double distance, const std::vector<Warning>& warnings,
                   std::vector<SessionEvent>& out) {
    if (!first_t_) first_t_ = t;
    last_t_ = t;

    for (const auto& w : warnings) {
        ++warnings_;
        emit({w.t, WarningIssued{w.channel, w.value}}, out);
    }

    if (!in_excursion_) {
        if (distance < release_m_) return;
        in_excursion_ = true;
        reached_target_ = false;
        excursion_start_t_ = t;
        peak_m_ = distance;
        run_active_ = false;
        dip_start_t_.reset();
        best_hold_s_ = 0.0;
        track_hold(t, distance);
        return;
    }

    peak_m_ = std::max(peak_m_, distance);
    track_hold(t, distance);
    if (distance < return_m_) {
        if (run_active_) close_hold_run();
        score_excursion(t, out);
        in_excursion_ = false;
    }
}

// A hold run starts when the distance reaches the target and lasts while it
// stays at or above the hold band. A dip below the band ends the run only if
// it persists for the dropout tolerance; the run then ends at the last
// in-band sample.
void Session::track_hold(double t, double distance) {
    if (run_active_ && dip_start_t_ && t - *dip_start_t_ >= params_.hold_dropout_tolerance_s) {
        close_hold_run();
    }
    if (distance >= target_m_) {
        reached_target_ = true;
        if (!run_active_) {
            run_active_ = true;
            run_start_t_ = t;
        }
        last_in_band_t_ = t;
        dip_start_t_.reset();
    } else if (distance >= hold_band_m_) {
        if (run_active_) {
            last_in_band_t_ = t;
            dip_start_t_.reset();
        }
    } else if (run_active_ && !dip_start_t_) {
        dip_start_t_ = t;
    }
}

void Session::close_hold_run() {
    best_hold_s_ = std::max(best_hold_s_, last_in_band_t_ - run_start_t_);
    run_active_ = false;
    dip_start_t_.reset();
}

void Session::score_excursion(double t, std::vector<SessionEvent>& out) {
    const double movement = t - excursion_start_t_;
    std::optional<RejectReason> reason;
    if (!(peak_m_ >= target_m_)) {
        reason = RejectReason::TargetNotReached;
    } else if (movement < level_.min_movement_s) {
        reason = RejectReason::TooShort;
    } else if (level_.kind == LevelKind::Endurance && best_hold_s_ < level_.min_hold_s) {
        reason = RejectReason::HoldTooShort;
    }

    if (reason) {
        ++rejected_;
        emit({t, RepRejected{*reason, peak_m_, movement, best_hold_s_}}, out);
        return;
    }

    const RepRecord rep{static_cast<int>(reps_.size()) + 1, peak_m_, movement, best_hold_s_};
    reps_.push_back(rep);
    emit({t, RepCompleted{rep}}, out);
    if (static_cast<int>(reps_.size()) >= level_.required_reps) {
        level_done_ = true;
        emit({t, LevelCompleted{summary()}}, out);
    }
}

SessionSummary Session::summary() const {
    SessionSummary s;
    s.reps = reps_;
    s.distance_stats = compute_distance_stats(reps_);
    s.required_reps = level_.required_reps;
    s.completed = static_cast<int>(reps_.size()) >= level_.required_reps;
    s.rejected_count = rejected_;
    s.wall_time_s = (first_t_ && last_t_) ? *last_t_ - *first_t_ : 0.0;
    s.warning_count = warnings_;
    return s;
}

SessionSummary Session::finish() {
    closed_ = true;
    in_excursion_ = false;
    run_active_ = false;
    return summary();
}

}  // namespace retrax
