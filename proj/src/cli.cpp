#include "retrax/cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "retrax/calibration.hpp"
#include "retrax/errors.hpp"
#include "retrax/kernels.hpp"
#include "retrax/session.hpp"
#include "retrax/session_io.hpp"
#include "retrax/stream_server.hpp"
#include "retrax/trace_synth.hpp"
#include "retrax/ux_eval.hpp"

namespace retrax::cli {

namespace {

struct Options {
    std::string params_path;
    bool verbose = false;

    // shared
    std::string profile_path;
    int level = 0;
    std::string in_path = "-";
    std::string listen;
    std::string out_path;

    // calibrate
    std::string mode;
    double range_m = 0.0;
    std::string movement = "retraction";
    std::string axis;
    std::size_t neutral_index = 0;
    std::size_t start_index = 0;
    std::optional<std::size_t> end_index;
    double r_min = RangeBounds{}.min_m;
    double r_max = RangeBounds{}.max_m;

    // gen-trace
    std::string script_path;
    std::string truth_path;

    // run / replay
    std::string trace_path;
    std::string events_path;
    std::string summary_path;
    std::string session_dir;
    std::string session_id;

    // serve
    std::string bind;
    std::string store_dir = "sessions";
    double idle_timeout_s = 30.0;
    bool strict = false;
    std::size_t max_connections = 0;

    // report
    std::vector<std::string> sessions;
    std::string format = "csv";

    // score-ux
    std::string instrument;
    std::string setting;
    std::string text_path;
    std::string instruments_path;
};

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

Endpoint parse_endpoint(const std::string& s) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw UsageError("expected ADDR:PORT, got '" + s + "'");
    Endpoint e;
    e.host = s.substr(0, colon);
    if (e.host.size() >= 2 && e.host.front() == '[' && e.host.back() == ']') e.host = e.host.substr(1, e.host.size() - 2);
    const std::string port = s.substr(colon + 1);
    try {
        std::size_t used = 0;
        const int p = std::stoi(port, &used);
        if (used != port.size() || p < 0 || p > 65535) throw std::out_of_range("port");
        e.port = static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
        throw UsageError("invalid port in '" + s + "'");
    }
    return e;
}

Vec3 parse_axis(const std::string& s) {
    std::istringstream ss(s);
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) {
        try {
            v.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw UsageError("--axis expects x,y,z");
        }
    }
    if (v.size() != 3) throw UsageError("--axis expects x,y,z");
    return {v[0], v[1], v[2]};
}

Params load_params(const Options& o) {
    return o.params_path.empty() ? Params{} : read_params_file(o.params_path);
}

Trace load_poses(const Options& o, std::istream& in) {
    Trace trace;
    if (!o.listen.empty()) {
        const Endpoint ep = parse_endpoint(o.listen);
        trace = receive_trace(ep.host, ep.port, o.idle_timeout_s);
    } else if (o.in_path == "-") {
        trace = read_trace(in);
    } else {
        trace = read_trace_file(o.in_path);
    }
    validate_trace(trace);
    return trace;
}

class OutputFile {
  public:
    OutputFile(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw NotFoundError("cannot write " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

  private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

int cmd_calibrate(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
    const RangeBounds bounds{o.r_min, o.r_max};
    const Movement movement = movement_from_string(o.movement);
    std::optional<Vec3> custom;
    if (movement == Movement::Custom) {
        if (o.axis.empty()) throw UsageError("--movement custom requires --axis");
        custom = parse_axis(o.axis);
    }

    const Trace trace = load_poses(o, in);
    CalibrationProfile profile;
    if (o.mode == "manual") {
        if (o.range_m <= 0.0) throw UsageError("--mode manual requires --range-m");
        if (o.neutral_index >= trace.size()) throw UsageError("--neutral-index beyond end of trace");
        const auto partial = capture_neutral(trace.samples[o.neutral_index], movement, custom);
        profile = set_manual_range(partial, o.range_m, bounds);
    } else {
        if (o.start_index >= trace.size()) throw UsageError("--start-index beyond end of trace");
        const PoseSample& start = trace.samples[o.start_index];
        const auto partial = capture_neutral(start, movement, custom);
        std::size_t end = trace.size() - 1;
        if (o.end_index) {
            if (*o.end_index >= trace.size()) throw UsageError("--end-index beyond end of trace");
            end = *o.end_index;
        } else {
            // default end mark: the sample displaced furthest along the axis
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = o.start_index; i < trace.size(); ++i) {
                const double d = dot(trace.samples[i].position - start.position, partial.axis);
                if (d > best) {
                    best = d;
                    end = i;
                }
            }
        }
        profile = auto_calibrate(partial, start, trace.samples[end], movement, bounds);
    }

    write_json_file(o.out_path, to_json(profile));
    if (o.verbose) err << "calibrated range " << profile.max_range_m << " m -> " << o.out_path << "\n";
    (void)out;
    return kExitOk;
}

int cmd_gen_trace(const Options& o, std::ostream& err) {
    const TraceScript script = read_script_file(o.script_path);
    const CalibrationProfile profile = read_profile_file(o.profile_path);
    const Params params = load_params(o);
    const SynthResult r = generate(script, profile, builtin_level(o.level), params.engine);
    write_trace_file(o.out_path, r.trace);
    if (!o.truth_path.empty()) write_json_file(o.truth_path, to_json(r.truth));
    if (o.verbose) err << r.trace.size() << " samples, " << r.truth.valid_reps() << " expected reps\n";
    return kExitOk;
}

void finish_outputs(const Options& o, Session& session, const Params& params, std::ostream& out) {
    const SessionSummary summary = session.finish();
    if (!o.summary_path.empty()) {
        OutputFile f(o.summary_path, out);
        f.get() << to_json(summary).dump(2) << '\n';
    } else if (o.events_path.empty()) {
        out << to_json(summary).dump(2) << '\n';
    }
    if (!o.session_dir.empty()) {
        SessionRecord record{o.session_id.empty() ? "session-" + utc_timestamp() : o.session_id,
                             session.profile(),
                             session.level(),
                             params,
                             session.events(),
                             summary,
                             utc_timestamp(),
                             kSchemaVersion};
        save_session(o.session_dir, record);
    }
}

int cmd_run(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
    const CalibrationProfile profile = read_profile_file(o.profile_path);
    const Params params = load_params(o);
    Session session(profile, builtin_level(o.level), params.engine, params.guard);

    std::optional<OutputFile> events;
    if (!o.events_path.empty()) events.emplace(o.events_path, out);

    auto emit = [&](const std::vector<SessionEvent>& batch) {
        if (!events) return;
        for (const auto& e : batch) events->get() << event_line(e) << '\n';
        events->get().flush();
    };

    if (!o.listen.empty()) {
        emit(session.ingest_trace(load_poses(o, in).view()));
    } else {
        std::ifstream file;
        std::istream* src = &in;
        if (o.in_path != "-") {
            file.open(o.in_path);
            if (!file) throw NotFoundError("cannot open " + o.in_path);
            src = &file;
        }
        std::string line;
        std::size_t lineno = 0;
        while (!session.completed() && std::getline(*src, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                emit(session.ingest(parse_sample(line)));
            } catch (const ParseError& e) {
                throw ParseError(e.field(), e.detail(), lineno);
            }
        }
    }
    if (o.verbose) err << session.rep_count() << " reps\n";
    finish_outputs(o, session, params, out);
    return kExitOk;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
    const CalibrationProfile profile = read_profile_file(o.profile_path);
    const Params params = load_params(o);
    const Trace trace = read_trace_file(o.trace_path);
    validate_trace(trace);
    Session session(profile, builtin_level(o.level), params.engine, params.guard);
    const auto events = session.ingest_trace(trace.view());
    if (!o.events_path.empty()) {
        OutputFile f(o.events_path, out);
        write_events(f.get(), events);
    }
    if (o.verbose) {
        err << session.rep_count() << " reps (" << kernels::backend_name(kernels::active_backend()) << " kernels)\n";
    }
    finish_outputs(o, session, params, out);
    return kExitOk;
}

StreamServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
    const Endpoint ep = parse_endpoint(o.bind);
    StreamConfig config;
    config.bind_address = ep.host;
    config.port = ep.port;
    config.profile = read_profile_file(o.profile_path);
    config.level = builtin_level(o.level);
    config.params = load_params(o);
    config.idle_timeout_s = o.idle_timeout_s;
    config.strict = o.strict;
    config.store_dir = o.store_dir;
    config.max_connections = o.max_connections;

    StreamServer server(config);
    const auto port = server.start();
    out << "listening on " << ep.host << ":" << port << std::endl;

    g_server = &server;
    auto old_int = std::signal(SIGINT, on_signal);
    auto old_term = std::signal(SIGTERM, on_signal);
    server.run();
    std::signal(SIGINT, old_int);
    std::signal(SIGTERM, old_term);
    g_server = nullptr;

    if (o.verbose) {
        for (const auto& r : server.results()) {
            err << r.session_id << ": " << r.summary.reps.size() << " reps, " << to_string(r.reason) << "\n";
        }
    }
    return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
    std::vector<std::filesystem::path> paths(o.sessions.begin(), o.sessions.end());
    const auto records = load_sessions(paths);
    OutputFile f(o.out_path, out);
    f.get() << (o.format == "text" ? report_text(records) : report_csv(records));
    return kExitOk;
}

int cmd_score_ux(const Options& o, std::istream& in, std::ostream& out) {
    const ux::Instruments inst =
        o.instruments_path.empty() ? ux::Instruments::defaults() : ux::Instruments::load(o.instruments_path);
    std::ifstream file;
    std::istream* src = &in;
    if (o.in_path != "-") {
        file.open(o.in_path);
        if (!file) throw NotFoundError("cannot open " + o.in_path);
        src = &file;
    }

    std::string csv;
    std::string text;
    if (o.instrument == "bipolar") {
        const auto responses = ux::read_bipolar_csv(*src);
        const auto means = ux::aspect_means(responses);
        csv = ux::bipolar_csv(means, inst);
        text = ux::bipolar_text(means, responses.size(), inst);
    } else {
        const auto responses = ux::read_engagement_csv(*src);
        std::vector<ux::Setting> settings;
        if (!o.setting.empty()) {
            settings.push_back(ux::setting_from_string(o.setting));
        } else {
            for (auto s : {ux::Setting::Setting1, ux::Setting::Setting2}) {
                for (const auto& r : responses) {
                    if (r.setting == s) {
                        settings.push_back(s);
                        break;
                    }
                }
            }
        }
        if (settings.empty()) throw UsageError("no engagement responses");
        for (std::size_t i = 0; i < settings.size(); ++i) {
            const auto dist = ux::response_distribution(responses, settings[i]);
            std::string table = ux::engagement_csv(settings[i], dist, inst);
            if (i > 0) table.erase(0, table.find('\n') + 1);  // one header only
            csv += table;
            text += ux::engagement_text(settings[i], dist, inst);
        }
    }

    if (o.out_path.empty()) {
        out << csv;
        if (!o.text_path.empty()) {
            OutputFile t(o.text_path, out);
            t.get() << text;
        }
    } else {
        OutputFile f(o.out_path, out);
        f.get() << csv;
        OutputFile t(o.text_path, out);
        t.get() << text;
    }
    return kExitOk;
}

enum class Command { None, Calibrate, GenTrace, Run, Replay, Serve, Report, ScoreUx };

struct AppBundle {
    std::unique_ptr<CLI::App> app;
    Command command = Command::None;
};

void build(AppBundle& b, Options& o) {
    b.app = std::make_unique<CLI::App>("Neck exercise session engine: calibration, rep detection, replay and scoring",
                                       "retrax");
    CLI::App& app = *b.app;
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--params", o.params_path, "JSON file with engine and guard parameters")
        ->check(CLI::ExistingFile);
    app.add_flag("--verbose", o.verbose, "Print progress details to stderr");

    auto level_opt = [&](CLI::App* sub) {
        sub->add_option("--level", o.level, "Built-in level 1..6")->required()->check(CLI::Range(1, 6));
    };
    auto profile_opt = [&](CLI::App* sub) {
        sub->add_option("--profile", o.profile_path, "Calibration profile JSON")->required()->check(CLI::ExistingFile);
    };

    auto* cal = app.add_subcommand("calibrate", "Build a calibration profile from recorded poses");
    cal->add_option("--mode", o.mode, "Calibration mode")->required()->check(CLI::IsMember({"manual", "auto"}));
    cal->add_option("--range-m", o.range_m, "Maximum range in meters (manual mode)");
    cal->add_option("--in", o.in_path, "Pose JSONL file, '-' for stdin");
    cal->add_option("--listen", o.listen, "Receive poses from one TCP client at ADDR:PORT instead of --in");
    cal->add_option("--movement", o.movement, "Measured movement")
        ->check(CLI::IsMember({"retraction", "bending", "extension", "custom"}));
    cal->add_option("--axis", o.axis, "Axis x,y,z for --movement custom");
    cal->add_option("--neutral-index", o.neutral_index, "Sample used as neutral pose (manual mode)");
    cal->add_option("--start-index", o.start_index, "Sample marking the start of the motion (auto mode)");
    cal->add_option("--end-index", o.end_index,
                    "Sample marking the end of the motion (auto mode; default: furthest along the axis)");
    cal->add_option("--r-min", o.r_min, "Smallest accepted range in meters");
    cal->add_option("--r-max", o.r_max, "Largest accepted range in meters");
    cal->add_option("--idle-timeout", o.idle_timeout_s, "Seconds to wait for data with --listen");
    cal->add_option("--out", o.out_path, "Profile JSON to write")->required();
    cal->callback([&b] { b.command = Command::Calibrate; });

    auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic pose trace with ground truth");
    gen->add_option("--script", o.script_path, "Trace script JSON")->required()->check(CLI::ExistingFile);
    profile_opt(gen);
    gen->add_option("--out", o.out_path, "Pose JSONL file to write")->required();
    gen->add_option("--truth", o.truth_path, "Ground truth JSON to write");
    gen->add_option("--level", o.level, "Level whose rules the ground truth applies")->check(CLI::Range(1, 6));
    gen->callback([&b] { b.command = Command::GenTrace; });

    auto* run = app.add_subcommand("run", "Score a pose stream sample by sample");
    profile_opt(run);
    level_opt(run);
    run->add_option("--in", o.in_path, "Pose JSONL file, '-' for stdin");
    run->add_option("--listen", o.listen, "Receive poses from one TCP client at ADDR:PORT instead of --in");
    run->add_option("--idle-timeout", o.idle_timeout_s, "Seconds to wait for data with --listen");
    run->add_option("--events", o.events_path, "Event JSONL output, '-' for stdout");
    run->add_option("--summary", o.summary_path, "Summary JSON output (default: stdout when no --events)");
    run->add_option("--session-dir", o.session_dir, "Also save the session under this directory");
    run->add_option("--session-id", o.session_id, "Session id used with --session-dir");
    run->callback([&b] { b.command = Command::Run; });

    auto* replay = app.add_subcommand("replay", "Deterministically re-score a recorded trace");
    replay->add_option("trace", o.trace_path, "Pose JSONL trace")->required()->check(CLI::ExistingFile);
    profile_opt(replay);
    level_opt(replay);
    replay->add_option("--events", o.events_path, "Event JSONL output, '-' for stdout");
    replay->add_option("--summary", o.summary_path, "Summary JSON output (default: stdout when no --events)");
    replay->add_option("--session-dir", o.session_dir, "Also save the session under this directory");
    replay->add_option("--session-id", o.session_id, "Session id used with --session-dir");
    replay->callback([&b] { b.command = Command::Replay; });

    auto* serve = app.add_subcommand("serve", "Serve live sessions over TCP, one per connection");
    serve->add_option("--bind", o.bind, "Listen address ADDR:PORT")->required();
    profile_opt(serve);
    level_opt(serve);
    serve->add_option("--store", o.store_dir, "Directory receiving one folder per session");
    serve->add_option("--idle-timeout", o.idle_timeout_s, "Seconds of silence before a session is closed");
    serve->add_flag("--strict", o.strict, "Close the connection on the first malformed line");
    serve->add_option("--max-connections", o.max_connections, "Exit after serving this many connections (0: never)");
    serve->callback([&b] { b.command = Command::Serve; });

    auto* report = app.add_subcommand("report", "Tabulate saved sessions");
    report->add_option("--sessions", o.sessions, "Session directories or directories of sessions")
        ->required()
        ->expected(1, -1);
    report->add_option("--out", o.out_path, "Output file (default stdout)");
    report->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "text"}));
    report->callback([&b] { b.command = Command::Report; });

    auto* ux = app.add_subcommand("score-ux", "Score questionnaire responses");
    ux->add_option("--instrument", o.instrument, "Questionnaire")
        ->required()
        ->check(CLI::IsMember({"engagement", "bipolar"}));
    ux->add_option("--in", o.in_path, "Responses CSV (participant_id,setting,q1..q7), '-' for stdin");
    ux->add_option("--setting", o.setting, "Only this setting (engagement)")->check(CLI::IsMember({"1", "2"}));
    ux->add_option("--out", o.out_path, "CSV output file (default stdout)");
    ux->add_option("--text", o.text_path, "Plain-text report file (default stdout when --out is given)");
    ux->add_option("--instruments", o.instruments_path, "JSON with question and aspect wording")
        ->check(CLI::ExistingFile);
    ux->callback([&b] { b.command = Command::ScoreUx; });

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    Options o;
    AppBundle b;
    build(b, o);
    try {
        b.app->parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = b.app->exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (b.command == Command::GenTrace && o.level == 0) o.level = 3;
    try {
        switch (b.command) {
            case Command::Calibrate: return cmd_calibrate(o, in, out, err);
            case Command::GenTrace: return cmd_gen_trace(o, err);
            case Command::Run: return cmd_run(o, in, out, err);
            case Command::Replay: return cmd_replay(o, out, err);
            case Command::Serve: return cmd_serve(o, out, err);
            case Command::Report: return cmd_report(o, out);
            case Command::ScoreUx: return cmd_score_ux(o, in, out);
            case Command::None: break;
        }
        err << "retrax: no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "retrax: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "retrax: " << e.what() << "\n";
        return kExitData;
    }
}

std::vector<std::pair<std::string, std::vector<FlagDoc>>> subcommand_flags() {
    Options o;
    AppBundle b;
    build(b, o);
    std::vector<std::pair<std::string, std::vector<FlagDoc>>> out;
    for (const auto* sub : b.app->get_subcommands({})) {
        std::vector<FlagDoc> flags;
        for (const auto* opt : sub->get_options()) {
            if (opt->get_name() == "--help" || opt->get_name() == "-h,--help") continue;
            std::string name = opt->get_positional() ? opt->get_name(true, false) : opt->get_name();
            flags.push_back({name, opt->get_description()});
        }
        out.emplace_back(sub->get_name(), std::move(flags));
    }
    return out;
}

}  // namespace retrax::cli
