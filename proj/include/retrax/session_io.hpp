#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "retrax/calibration.hpp"
#include "retrax/motion_guard.hpp"
#include "retrax/session.hpp"
#include "retrax/trace_synth.hpp"

namespace retrax {

inline constexpr int kSchemaVersion = 1;

/// Artifact-wide tunables: one JSON document with "engine" and "guard".
struct Params {
    EngineParams engine;
    GuardParams guard;

    bool operator==(const Params&) const = default;
};

using ojson = nlohmann::ordered_json;

// Document codecs. Readers accept any key order, fill absent optional
// keys with defaults, and throw ParseError naming the bad field.
ojson to_json(const CalibrationProfile& p);
ojson to_json(const LevelSpec& l);
ojson to_json(const EngineParams& p);
ojson to_json(const GuardParams& p);
ojson to_json(const Params& p);
ojson to_json(const SessionSummary& s);
ojson to_json(const SessionEvent& e);
ojson to_json(const TraceScript& s);
ojson to_json(const GroundTruth& g);

CalibrationProfile profile_from_json(const nlohmann::json& j);
LevelSpec level_from_json(const nlohmann::json& j);
Params params_from_json(const nlohmann::json& j);
SessionSummary summary_from_json(const nlohmann::json& j);
SessionEvent event_from_json(const nlohmann::json& j);
TraceScript script_from_json(const nlohmann::json& j);

/// One event as a single JSONL line without the trailing newline.
std::string event_line(const SessionEvent& e);

void write_events(std::ostream& out, std::span<const SessionEvent> events);
/// Throws ParseError carrying the 1-based line number of a bad line.
std::vector<SessionEvent> read_events(std::istream& in);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const ojson& doc);

CalibrationProfile read_profile_file(const std::filesystem::path& path);
Params read_params_file(const std::filesystem::path& path);
TraceScript read_script_file(const std::filesystem::path& path);

struct SessionRecord {
    std::string session_id;
    CalibrationProfile profile;
    LevelSpec level;
    Params params;
    std::vector<SessionEvent> events;
    SessionSummary summary;
    std::string created_at;  // UTC, ISO-8601
    int schema_version = kSchemaVersion;

    bool operator==(const SessionRecord&) const = default;
};

/// UTC wall-clock time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

/// Writes <root>/<session_id>/{profile.json, params.json, events.jsonl,
/// summary.json, meta.json} and returns the session directory. meta.json is
/// written last so a directory without it is an incomplete session.
std::filesystem::path save_session(const std::filesystem::path& root, const SessionRecord& record);

/// Throws NotFoundError for missing files, VersionError for a newer schema and
/// ParseError for malformed content.
SessionRecord load_session(const std::filesystem::path& session_dir);

/// Each path is either a session directory (holding meta.json) or a directory
/// whose immediate children are session directories. Sorted by session id.
std::vector<SessionRecord> load_sessions(std::span<const std::filesystem::path> paths);

/// Per-session rows plus a final cross-session "ALL" row. Throws UsageError on
/// an empty list.
std::string report_csv(std::span<const SessionRecord> records);
std::string report_text(std::span<const SessionRecord> records);

}  // namespace retrax
