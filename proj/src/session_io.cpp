#include "retrax/session_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "retrax/errors.hpp"

namespace retrax {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) throw ParseError(where, "expected a JSON object");
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ParseError(where.empty() ? key : where + "." + key, "unknown field");
    }
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(where.empty() ? key : where + "." + key, "missing required field");
    }
    return j.at(key);
}

std::string path_of(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double num(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number()) throw ParseError(path_of(where, key), "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? num(j, key, where) : fallback;
}

long long integer(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_number_integer()) throw ParseError(path_of(where, key), "expected an integer");
    return v.get<long long>();
}

std::string str(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_string()) throw ParseError(path_of(where, key), "expected a string");
    return v.get<std::string>();
}

bool boolean(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_boolean()) throw ParseError(path_of(where, key), "expected a boolean");
    return v.get<bool>();
}

template <std::size_t N>
std::array<double, N> numbers(const json& j, const char* key, const std::string& where) {
    const json& v = need(j, key, where);
    if (!v.is_array() || v.size() != N) {
        throw ParseError(path_of(where, key), "expected an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!v[i].is_number()) throw ParseError(path_of(where, key), "expected numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

Vec3 vec3(const json& j, const char* key, const std::string& where) {
    const auto a = numbers<3>(j, key, where);
    return {a[0], a[1], a[2]};
}

// Wraps an enum-from-string parser so its ParseError names the full path.
template <class F>
auto named(F&& f, const std::string& field) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(field, e.detail());
    }
}

RepRecord rep_from_json(const json& j, const std::string& where) {
    reject_unknown(j, {"index", "peak_m", "movement_s", "hold_s"}, where);
    return {static_cast<int>(integer(j, "index", where)), num(j, "peak_m", where), num(j, "movement_s", where),
            num(j, "hold_s", where)};
}

ojson rep_to_json(const RepRecord& r) {
    ojson j;
    j["index"] = r.index;
    j["peak_m"] = r.peak_m;
    j["movement_s"] = r.movement_s;
    j["hold_s"] = r.hold_s;
    return j;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// encoders

ojson to_json(const CalibrationProfile& p) {
    ojson j;
    j["neutral_position"] = p.neutral_position.to_array();
    j["neutral_orientation"] = {p.neutral_orientation.w, p.neutral_orientation.x, p.neutral_orientation.y,
                                p.neutral_orientation.z};
    j["axis"] = p.axis.to_array();
    j["max_range_m"] = p.max_range_m;
    j["mode"] = std::string(to_string(p.mode));
    j["movement"] = std::string(to_string(p.movement));
    return j;
}

ojson to_json(const LevelSpec& l) {
    ojson j;
    j["level_index"] = l.level_index;
    j["kind"] = std::string(to_string(l.kind));
    j["target_fraction"] = l.target_fraction;
    j["required_reps"] = l.required_reps;
    j["min_movement_s"] = l.min_movement_s;
    j["min_hold_s"] = l.min_hold_s;
    return j;
}

ojson to_json(const EngineParams& p) {
    ojson j;
    j["release_fraction"] = p.release_fraction;
    j["hysteresis_band"] = p.hysteresis_band;
    j["hold_dropout_tolerance_s"] = p.hold_dropout_tolerance_s;
    return j;
}

ojson to_json(const GuardParams& p) {
    ojson j;
    j["max_angular_speed"] = p.max_angular_speed;
    j["max_linear_accel"] = p.max_linear_accel;
    j["warning_cooldown_s"] = p.warning_cooldown_s;
    ojson channels = ojson::array();
    if (p.angular_velocity_enabled) channels.push_back("AngularVelocity");
    if (p.linear_acceleration_enabled) channels.push_back("LinearAcceleration");
    j["enabled_channels"] = channels;
    j["missing_channel"] = p.missing_channel == MissingChannelPolicy::Error ? "error" : "disable";
    return j;
}

ojson to_json(const Params& p) {
    ojson j;
    j["engine"] = to_json(p.engine);
    j["guard"] = to_json(p.guard);
    return j;
}

ojson to_json(const SessionSummary& s) {
    ojson j;
    j["completed"] = s.completed;
    j["required_reps"] = s.required_reps;
    j["rep_count"] = s.reps.size();
    j["rejected_count"] = s.rejected_count;
    j["warning_count"] = s.warning_count;
    j["wall_time_s"] = s.wall_time_s;
    if (s.distance_stats) {
        ojson d;
        d["max_m"] = s.distance_stats->max_m;
        d["min_m"] = s.distance_stats->min_m;
        d["mean_m"] = s.distance_stats->mean_m;
        d["range_m"] = s.distance_stats->range_m;
        j["distance_stats"] = d;
    } else {
        j["distance_stats"] = nullptr;
    }
    ojson reps = ojson::array();
    for (const auto& r : s.reps) reps.push_back(rep_to_json(r));
    j["reps"] = reps;
    return j;
}

ojson to_json(const SessionEvent& e) {
    ojson j;
    j["t"] = e.t;
    std::visit(
        [&j](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, RepCompleted>) {
                j["type"] = "RepCompleted";
                j["index"] = k.rep.index;
                j["peak_m"] = k.rep.peak_m;
                j["movement_s"] = k.rep.movement_s;
                j["hold_s"] = k.rep.hold_s;
            } else if constexpr (std::is_same_v<K, RepRejected>) {
                j["type"] = "RepRejected";
                j["reason"] = std::string(to_string(k.reason));
                j["peak_m"] = k.peak_m;
                j["movement_s"] = k.movement_s;
                j["hold_s"] = k.hold_s;
            } else if constexpr (std::is_same_v<K, WarningIssued>) {
                j["type"] = "WarningIssued";
                j["channel"] = std::string(to_string(k.channel));
                j["value"] = k.value;
            } else {
                j["type"] = "LevelCompleted";
                j["summary"] = to_json(k.summary);
            }
        },
        e.kind);
    return j;
}

ojson to_json(const TraceScript& s) {
    ojson j;
    ojson ex = ojson::array();
    for (const auto& e : s.excursions) {
        ojson o;
        o["amplitude_fraction"] = e.amplitude_fraction;
        o["rise_s"] = e.rise_s;
        o["hold_s"] = e.hold_s;
        o["fall_s"] = e.fall_s;
        o["rest_s"] = e.rest_s;
        ex.push_back(o);
    }
    j["excursions"] = ex;
    j["sample_rate_hz"] = s.sample_rate_hz;
    j["lead_in_s"] = s.lead_in_s;
    j["noise"] = {{"gaussian_sigma_m", s.noise.gaussian_sigma_m},
                  {"spike_probability_per_sample", s.noise.spike_probability_per_sample},
                  {"spike_magnitude_m", s.noise.spike_magnitude_m}};
    ojson jerks = ojson::array();
    for (const auto& k : s.jerk_events) {
        ojson o;
        o["t"] = k.t;
        o["angular_speed_rad_s"] = k.angular_speed_rad_s;
        o["duration_s"] = k.duration_s;
        jerks.push_back(o);
    }
    j["jerk_events"] = jerks;
    j["seed"] = s.seed;
    return j;
}

ojson to_json(const GroundTruth& g) {
    ojson j;
    j["level"] = to_json(g.level);
    j["engine"] = to_json(g.params);
    j["valid_reps"] = g.valid_reps();
    ojson ex = ojson::array();
    for (const auto& e : g.excursions) {
        ojson o;
        o["index"] = e.index;
        o["start_t"] = e.start_t;
        o["peak_m"] = e.peak_m;
        o["expected"] = !e.detected ? "None" : (e.valid_rep ? "RepCompleted" : "RepRejected");
        o["reason"] = e.reason ? ojson(std::string(to_string(*e.reason))) : ojson(nullptr);
        o["movement_s"] = e.movement_s;
        o["hold_s"] = e.hold_s;
        ex.push_back(o);
    }
    j["excursions"] = ex;
    return j;
}

// ---------------------------------------------------------------------------
// decoders

CalibrationProfile profile_from_json(const json& j) {
    const std::string w;
    reject_unknown(j, {"neutral_position", "neutral_orientation", "axis", "max_range_m", "mode", "movement"}, w);
    CalibrationProfile p;
    p.neutral_position = vec3(j, "neutral_position", w);
    const auto q = numbers<4>(j, "neutral_orientation", w);
    p.neutral_orientation = {q[0], q[1], q[2], q[3]};
    p.axis = vec3(j, "axis", w);
    p.max_range_m = num(j, "max_range_m", w);
    p.mode = named([&] { return calibration_mode_from_string(str(j, "mode", w)); }, "mode");
    p.movement = named([&] { return movement_from_string(str(j, "movement", w)); }, "movement");
    return p;
}

LevelSpec level_from_json(const json& j) {
    const std::string w = "level";
    reject_unknown(j, {"level_index", "kind", "target_fraction", "required_reps", "min_movement_s", "min_hold_s"}, w);
    LevelSpec l;
    l.level_index = static_cast<int>(integer(j, "level_index", w));
    l.kind = named([&] { return level_kind_from_string(str(j, "kind", w)); }, "level.kind");
    l.target_fraction = num(j, "target_fraction", w);
    l.required_reps = static_cast<int>(integer(j, "required_reps", w));
    l.min_movement_s = num(j, "min_movement_s", w);
    l.min_hold_s = num(j, "min_hold_s", w);
    return l;
}

Params params_from_json(const json& j) {
    reject_unknown(j, {"engine", "guard"}, "");
    Params p;
    if (j.contains("engine")) {
        const json& e = j["engine"];
        const std::string w = "engine";
        reject_unknown(e, {"release_fraction", "hysteresis_band", "hold_dropout_tolerance_s"}, w);
        p.engine.release_fraction = num_or(e, "release_fraction", p.engine.release_fraction, w);
        p.engine.hysteresis_band = num_or(e, "hysteresis_band", p.engine.hysteresis_band, w);
        p.engine.hold_dropout_tolerance_s = num_or(e, "hold_dropout_tolerance_s", p.engine.hold_dropout_tolerance_s, w);
    }
    if (j.contains("guard")) {
        const json& g = j["guard"];
        const std::string w = "guard";
        reject_unknown(g, {"max_angular_speed", "max_linear_accel", "warning_cooldown_s", "enabled_channels",
                           "missing_channel"},
                       w);
        p.guard.max_angular_speed = num_or(g, "max_angular_speed", p.guard.max_angular_speed, w);
        p.guard.max_linear_accel = num_or(g, "max_linear_accel", p.guard.max_linear_accel, w);
        p.guard.warning_cooldown_s = num_or(g, "warning_cooldown_s", p.guard.warning_cooldown_s, w);
        if (g.contains("enabled_channels")) {
            const json& c = g["enabled_channels"];
            if (!c.is_array()) throw ParseError("guard.enabled_channels", "expected an array of channel names");
            p.guard.angular_velocity_enabled = false;
            p.guard.linear_acceleration_enabled = false;
            for (const auto& name : c) {
                if (!name.is_string()) throw ParseError("guard.enabled_channels", "expected channel names");
                const auto ch = named([&] { return guard_channel_from_string(name.get<std::string>()); },
                                      "guard.enabled_channels");
                (ch == GuardChannel::AngularVelocity ? p.guard.angular_velocity_enabled
                                                     : p.guard.linear_acceleration_enabled) = true;
            }
        }
        if (g.contains("missing_channel")) {
            const std::string m = str(g, "missing_channel", w);
            if (m == "error") {
                p.guard.missing_channel = MissingChannelPolicy::Error;
            } else if (m == "disable") {
                p.guard.missing_channel = MissingChannelPolicy::Disable;
            } else {
                throw ParseError("guard.missing_channel", "expected \"error\" or \"disable\"");
            }
        }
    }
    try {
        p.engine.validate();
        p.guard.validate();
    } catch (const ConfigError& e) {
        throw ValidationError("params", e.what());
    }
    return p;
}

SessionSummary summary_from_json(const json& j) {
    const std::string w = "summary";
    reject_unknown(j, {"completed", "required_reps", "rep_count", "rejected_count", "warning_count", "wall_time_s",
                       "distance_stats", "reps"},
                   w);
    SessionSummary s;
    s.completed = boolean(j, "completed", w);
    s.required_reps = static_cast<int>(integer(j, "required_reps", w));
    s.rejected_count = static_cast<std::size_t>(integer(j, "rejected_count", w));
    s.warning_count = static_cast<std::size_t>(integer(j, "warning_count", w));
    s.wall_time_s = num(j, "wall_time_s", w);
    const json& d = need(j, "distance_stats", w);
    if (!d.is_null()) {
        const std::string dw = w + ".distance_stats";
        reject_unknown(d, {"max_m", "min_m", "mean_m", "range_m"}, dw);
        s.distance_stats = DistanceStats{num(d, "max_m", dw), num(d, "min_m", dw), num(d, "mean_m", dw),
                                         num(d, "range_m", dw)};
    }
    const json& reps = need(j, "reps", w);
    if (!reps.is_array()) throw ParseError("summary.reps", "expected an array");
    for (const auto& r : reps) s.reps.push_back(rep_from_json(r, "summary.reps[]"));
    if (integer(j, "rep_count", w) != static_cast<long long>(s.reps.size())) {
        throw ParseError("summary.rep_count", "does not match the reps list");
    }
    return s;
}

SessionEvent event_from_json(const json& j) {
    SessionEvent e;
    e.t = num(j, "t", "");
    const std::string type = str(j, "type", "");
    if (type == "RepCompleted") {
        reject_unknown(j, {"t", "type", "index", "peak_m", "movement_s", "hold_s"}, "");
        e.kind = RepCompleted{{static_cast<int>(integer(j, "index", "")), num(j, "peak_m", ""),
                               num(j, "movement_s", ""), num(j, "hold_s", "")}};
    } else if (type == "RepRejected") {
        reject_unknown(j, {"t", "type", "reason", "peak_m", "movement_s", "hold_s"}, "");
        e.kind = RepRejected{named([&] { return reject_reason_from_string(str(j, "reason", "")); }, "reason"),
                             num(j, "peak_m", ""), num(j, "movement_s", ""), num(j, "hold_s", "")};
    } else if (type == "WarningIssued") {
        reject_unknown(j, {"t", "type", "channel", "value"}, "");
        e.kind = WarningIssued{named([&] { return guard_channel_from_string(str(j, "channel", "")); }, "channel"),
                               num(j, "value", "")};
    } else if (type == "LevelCompleted") {
        reject_unknown(j, {"t", "type", "summary"}, "");
        e.kind = LevelCompleted{summary_from_json(need(j, "summary", ""))};
    } else {
        throw ParseError("type", "unknown event type '" + type + "'");
    }
    return e;
}

TraceScript script_from_json(const json& j) {
    reject_unknown(j, {"excursions", "sample_rate_hz", "lead_in_s", "noise", "jerk_events", "seed"}, "");
    TraceScript s;
    s.sample_rate_hz = num_or(j, "sample_rate_hz", s.sample_rate_hz, "");
    s.lead_in_s = num_or(j, "lead_in_s", s.lead_in_s, "");
    if (j.contains("seed")) s.seed = static_cast<std::uint64_t>(integer(j, "seed", ""));
    if (j.contains("excursions")) {
        const json& ex = j["excursions"];
        if (!ex.is_array()) throw ParseError("excursions", "expected an array");
        for (const auto& e : ex) {
            const std::string w = "excursions[]";
            reject_unknown(e, {"amplitude_fraction", "rise_s", "hold_s", "fall_s", "rest_s", "repeat"}, w);
            const ExcursionScript one{num(e, "amplitude_fraction", w), num_or(e, "rise_s", 0.0, w),
                                      num_or(e, "hold_s", 0.0, w), num_or(e, "fall_s", 0.0, w),
                                      num_or(e, "rest_s", 0.0, w)};
            const long long repeat = e.contains("repeat") ? integer(e, "repeat", w) : 1;
            if (repeat < 0) throw ParseError("excursions[].repeat", "must be >= 0");
            for (long long i = 0; i < repeat; ++i) s.excursions.push_back(one);
        }
    }
    if (j.contains("noise")) {
        const json& n = j["noise"];
        const std::string w = "noise";
        reject_unknown(n, {"gaussian_sigma_m", "spike_probability_per_sample", "spike_magnitude_m"}, w);
        s.noise.gaussian_sigma_m = num_or(n, "gaussian_sigma_m", 0.0, w);
        s.noise.spike_probability_per_sample = num_or(n, "spike_probability_per_sample", 0.0, w);
        s.noise.spike_magnitude_m = num_or(n, "spike_magnitude_m", 0.0, w);
    }
    if (j.contains("jerk_events")) {
        const json& jerks = j["jerk_events"];
        if (!jerks.is_array()) throw ParseError("jerk_events", "expected an array");
        for (const auto& k : jerks) {
            const std::string w = "jerk_events[]";
            reject_unknown(k, {"t", "angular_speed_rad_s", "duration_s"}, w);
            s.jerk_events.push_back({num(k, "t", w), num(k, "angular_speed_rad_s", w), num_or(k, "duration_s", 0.2, w)});
        }
    }
    try {
        s.validate();
    } catch (const ConfigError& e) {
        throw ValidationError("script", e.what());
    }
    return s;
}

// ---------------------------------------------------------------------------
// streams and files

std::string event_line(const SessionEvent& e) { return to_json(e).dump(); }

void write_events(std::ostream& out, std::span<const SessionEvent> events) {
    for (const auto& e : events) out << event_line(e) << '\n';
}

std::vector<SessionEvent> read_events(std::istream& in) {
    std::vector<SessionEvent> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            events.push_back(event_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw ParseError("", e.what(), lineno);
        } catch (const ParseError& e) {
            throw ParseError(e.field(), e.detail(), lineno);
        }
    }
    return events;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("", path.string() + ": " + e.what());
    }
}

void write_json_file(const fs::path& path, const ojson& doc) {
    std::ofstream out(path);
    if (!out) throw NotFoundError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

CalibrationProfile read_profile_file(const fs::path& path) {
    auto p = profile_from_json(read_json_file(path));
    validate_profile(p);
    return p;
}

Params read_params_file(const fs::path& path) { return params_from_json(read_json_file(path)); }

TraceScript read_script_file(const fs::path& path) { return script_from_json(read_json_file(path)); }

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path save_session(const fs::path& root, const SessionRecord& r) {
    if (r.session_id.empty() || r.session_id.find('/') != std::string::npos) {
        throw ValidationError("session_id", "must be a non-empty single path component");
    }
    const fs::path dir = root / r.session_id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw NotFoundError("cannot create " + dir.string() + ": " + ec.message());

    write_json_file(dir / "profile.json", to_json(r.profile));
    write_json_file(dir / "params.json", to_json(r.params));
    {
        std::ofstream out(dir / "events.jsonl");
        if (!out) throw NotFoundError("cannot write " + (dir / "events.jsonl").string());
        write_events(out, r.events);
    }
    write_json_file(dir / "summary.json", to_json(r.summary));

    ojson meta;
    meta["schema_version"] = r.schema_version;
    meta["session_id"] = r.session_id;
    meta["created_at"] = r.created_at;
    meta["level"] = to_json(r.level);
    meta["files"] = {{"profile", "profile.json"},
                     {"params", "params.json"},
                     {"events", "events.jsonl"},
                     {"summary", "summary.json"}};
    write_json_file(dir / "meta.json", meta);
    return dir;
}

SessionRecord load_session(const fs::path& dir) {
    const fs::path meta_path = dir / "meta.json";
    if (!fs::exists(meta_path)) throw NotFoundError("no meta.json in " + dir.string());
    const json meta = read_json_file(meta_path);

    SessionRecord r;
    r.schema_version = static_cast<int>(integer(meta, "schema_version", "meta"));
    if (r.schema_version > kSchemaVersion) {
        throw VersionError("session schema_version " + std::to_string(r.schema_version) +
                           " is newer than supported version " + std::to_string(kSchemaVersion));
    }
    r.session_id = str(meta, "session_id", "meta");
    r.created_at = str(meta, "created_at", "meta");
    r.level = level_from_json(need(meta, "level", "meta"));

    const json files = meta.contains("files") ? meta["files"] : json::object();
    auto file = [&](const char* key, const char* fallback) {
        const fs::path p = dir / (files.contains(key) ? files[key].get<std::string>() : std::string(fallback));
        if (!fs::exists(p)) throw NotFoundError("missing session file " + p.string());
        return p;
    };

    r.profile = profile_from_json(read_json_file(file("profile", "profile.json")));
    r.params = params_from_json(read_json_file(file("params", "params.json")));
    r.summary = summary_from_json(read_json_file(file("summary", "summary.json")));
    std::ifstream events(file("events", "events.jsonl"));
    r.events = read_events(events);
    return r;
}

std::vector<SessionRecord> load_sessions(std::span<const fs::path> paths) {
    std::vector<SessionRecord> out;
    for (const auto& p : paths) {
        if (!fs::is_directory(p)) throw NotFoundError("not a directory: " + p.string());
        if (fs::exists(p / "meta.json")) {
            out.push_back(load_session(p));
            continue;
        }
        std::vector<fs::path> children;
        for (const auto& entry : fs::directory_iterator(p)) {
            if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) children.push_back(entry.path());
        }
        std::sort(children.begin(), children.end());
        for (const auto& c : children) out.push_back(load_session(c));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SessionRecord& a, const SessionRecord& b) { return a.session_id < b.session_id; });
    return out;
}

namespace {

struct ReportRow {
    std::string id;
    std::string level;
    std::string kind;
    std::size_t reps = 0;
    std::string required;
    std::string completed;
    std::size_t rejected = 0;
    std::size_t warnings = 0;
    std::optional<DistanceStats> stats;
    double wall_time_s = 0.0;
};

std::vector<ReportRow> report_rows(std::span<const SessionRecord> records) {
    if (records.empty()) throw UsageError("report needs at least one session");
    std::vector<ReportRow> rows;
    std::vector<RepRecord> all_reps;
    std::size_t done = 0, rejected = 0, warnings = 0, required = 0;
    double wall = 0.0;
    for (const auto& r : records) {
        const auto& s = r.summary;
        rows.push_back({r.session_id, std::to_string(r.level.level_index), std::string(to_string(r.level.kind)),
                        s.reps.size(), std::to_string(s.required_reps), s.completed ? "true" : "false",
                        s.rejected_count, s.warning_count, s.distance_stats, s.wall_time_s});
        all_reps.insert(all_reps.end(), s.reps.begin(), s.reps.end());
        done += s.completed ? 1 : 0;
        rejected += s.rejected_count;
        warnings += s.warning_count;
        required += static_cast<std::size_t>(s.required_reps);
        wall += s.wall_time_s;
    }
    // Cross-session stats over every rep: max of maxima, min of minima.
    rows.push_back({"ALL", "", "", all_reps.size(), std::to_string(required),
                    std::to_string(done) + "/" + std::to_string(records.size()), rejected, warnings,
                    compute_distance_stats(all_reps), wall});
    return rows;
}

}  // namespace

std::string report_csv(std::span<const SessionRecord> records) {
    std::ostringstream os;
    os << "session_id,level,kind,reps,required_reps,completed,rejected,warnings,max_m,min_m,mean_m,range_m,"
          "wall_time_s\n";
    for (const auto& row : report_rows(records)) {
        os << row.id << ',' << row.level << ',' << row.kind << ',' << row.reps << ',' << row.required << ','
           << row.completed << ',' << row.rejected << ',' << row.warnings << ',';
        if (row.stats) {
            os << format_double(row.stats->max_m) << ',' << format_double(row.stats->min_m) << ','
               << format_double(row.stats->mean_m) << ',' << format_double(row.stats->range_m);
        } else {
            os << ",,,";
        }
        os << ',' << format_double(row.wall_time_s) << '\n';
    }
    return os.str();
}

std::string report_text(std::span<const SessionRecord> records) {
    const auto rows = report_rows(records);
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %5s %-9s %9s %9s %8s %9s %9s %9s %9s\n", "session", "level", "kind", "reps",
                  "completed", "warnings", "max_m", "min_m", "mean_m", "range_m");
    os << buf;
    for (const auto& r : rows) {
        const std::string reps = std::to_string(r.reps) + "/" + r.required;
        auto cell = [&](double DistanceStats::*m) { return r.stats ? format_double((*r.stats).*m) : std::string("-"); };
        std::snprintf(buf, sizeof buf, "%-28s %5s %-9s %9s %9s %8zu %9s %9s %9s %9s\n", r.id.c_str(), r.level.c_str(),
                      r.kind.c_str(), reps.c_str(), r.completed.c_str(), r.warnings,
                      cell(&DistanceStats::max_m).c_str(), cell(&DistanceStats::min_m).c_str(),
                      cell(&DistanceStats::mean_m).c_str(), cell(&DistanceStats::range_m).c_str());
        os << buf;
    }
    return os.str();
}

}  // namespace retrax
