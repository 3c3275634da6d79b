#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "retrax/errors.hpp"
#include "retrax/session.hpp"
#include "retrax/session_io.hpp"
#include "retrax/trace_synth.hpp"

using namespace retrax;
namespace fs = std::filesystem;

namespace {

SessionRecord make_record(const std::string& id, double amplitude, int level = 1) {
    const auto p = testutil::profile();
    TraceScript sc = testutil::script(30, amplitude);
    sc.jerk_events = {{2.0, 3.0}};
    const auto r = generate(sc, p);
    Params params;
    params.guard.max_linear_accel = 7.5;
    Session s(p, builtin_level(level), params.engine, params.guard);
    s.ingest_trace(r.trace.view());
    return {id, p, builtin_level(level), params, s.events(), s.finish(), "2026-01-02T03:04:05Z", kSchemaVersion};
}

}  // namespace

TEST(SessionIo, SaveLoadRoundTrip) {
    const auto root = testutil::temp_dir("io");
    const auto rec = make_record("s-1", 0.95);
    const auto dir = save_session(root, rec);
    for (const char* f : {"profile.json", "params.json", "events.jsonl", "summary.json", "meta.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const auto back = load_session(dir);
    EXPECT_EQ(back, rec);
    fs::remove_all(root);
}

TEST(SessionIo, NewerSchemaRejected) {
    const auto root = testutil::temp_dir("io");
    const auto dir = save_session(root, make_record("s-2", 0.95));
    auto meta = read_json_file(dir / "meta.json");
    meta["schema_version"] = 999;
    std::ofstream(dir / "meta.json") << meta.dump();
    EXPECT_THROW(load_session(dir), VersionError);
    fs::remove_all(root);
}

TEST(SessionIo, MissingFileIsNotFound) {
    const auto root = testutil::temp_dir("io");
    const auto dir = save_session(root, make_record("s-3", 0.95));
    fs::remove(dir / "summary.json");
    EXPECT_THROW(load_session(dir), NotFoundError);
    EXPECT_THROW(load_session(root / "nope"), NotFoundError);
    fs::remove_all(root);
}

TEST(SessionIo, TruncatedEventLogReportsLine) {
    const auto root = testutil::temp_dir("io");
    const auto dir = save_session(root, make_record("s-4", 0.95));
    std::ifstream in(dir / "events.jsonl");
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    in.close();
    ASSERT_GT(lines.size(), 5u);
    std::ofstream out(dir / "events.jsonl");
    for (std::size_t i = 0; i < 4; ++i) out << lines[i] << '\n';
    out << lines[4].substr(0, lines[4].size() / 2);
    out.close();
    try {
        load_session(dir);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 5u);
    }
    fs::remove_all(root);
}

TEST(SessionIo, EventJsonRoundTrip) {
    const auto rec = make_record("s-5", 0.95);
    std::stringstream ss;
    write_events(ss, rec.events);
    EXPECT_EQ(read_events(ss), rec.events);
    for (const auto& e : rec.events) EXPECT_EQ(event_from_json(nlohmann::json::parse(event_line(e))), e);
}

TEST(SessionIo, DocumentsRoundTrip) {
    const auto p = testutil::profile();
    EXPECT_EQ(profile_from_json(nlohmann::json::parse(to_json(p).dump())), p);
    const auto l = builtin_level(5);
    EXPECT_EQ(level_from_json(nlohmann::json::parse(to_json(l).dump())), l);
    Params params;
    params.engine.hold_dropout_tolerance_s = 0.2;
    params.guard.linear_acceleration_enabled = false;
    params.guard.missing_channel = MissingChannelPolicy::Error;
    EXPECT_EQ(params_from_json(nlohmann::json::parse(to_json(params).dump())), params);
    TraceScript sc = testutil::script(3, 0.4);
    sc.noise = {0.001, 0.01, 0.02};
    sc.jerk_events = {{1, 2, 0.3}};
    sc.seed = 12345678901234ull;
    EXPECT_EQ(script_from_json(nlohmann::json::parse(to_json(sc).dump())), sc);
}

TEST(SessionIo, PartialParamsTakeDefaults) {
    const auto params = params_from_json(nlohmann::json::parse(R"({"guard":{"max_angular_speed":3.0}})"));
    EXPECT_EQ(params.engine, EngineParams{});
    EXPECT_EQ(params.guard.max_angular_speed, 3.0);
    EXPECT_EQ(params.guard.max_linear_accel, 8.0);
    try {
        params_from_json(nlohmann::json::parse(R"({"engine":{"release":0.1}})"));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("release"), std::string::npos);
    }
}

TEST(SessionIo, ScriptRepeat) {
    const auto sc = script_from_json(nlohmann::json::parse(
        R"({"excursions":[{"amplitude_fraction":0.95,"rise_s":2,"hold_s":4,"fall_s":2,"rest_s":1,"repeat":30}]})"));
    EXPECT_EQ(sc.excursions.size(), 30u);
}

TEST(SessionIo, ReportRowsAndCrossSessionMax) {
    auto a = make_record("a", 0.95);
    auto b = make_record("b", 0.95);
    for (auto& rep : a.summary.reps) rep.peak_m = 0.045;
    a.summary.reps[3].peak_m = 0.050;
    for (auto& rep : b.summary.reps) rep.peak_m = 0.045;
    b.summary.reps[7].peak_m = 0.055;
    const std::vector<SessionRecord> both{a, b};
    const std::string csv = report_csv(both);
    std::istringstream in(csv);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0].rfind("session_id,level,kind,reps", 0), 0u);
    EXPECT_EQ(lines[3].rfind("ALL,", 0), 0u);
    EXPECT_NE(lines[3].find("0.055000"), std::string::npos);

    const std::vector<SessionRecord> one{make_record("c", 0.95, 1)};
    const std::string single = report_csv(one);
    EXPECT_NE(single.find("\nc,1,Strength,30,30,true,"), std::string::npos) << single;

    EXPECT_THROW(report_csv({}), UsageError);
    EXPECT_THROW(report_text({}), UsageError);
}

TEST(SessionIo, LoadSessionsFromParent) {
    const auto root = testutil::temp_dir("io");
    save_session(root, make_record("x2", 0.95));
    save_session(root, make_record("x1", 0.5));
    const std::vector<fs::path> paths{root};
    const auto recs = load_sessions(paths);
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].session_id, "x1");
    fs::remove_all(root);
}
