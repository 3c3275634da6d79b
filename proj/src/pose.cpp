#include "retrax/pose.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "retrax/errors.hpp"

namespace retrax {

namespace {

using nlohmann::json;

// Accepts a JSON number, or a string holding a number (so that producers
// writing "NaN" or "inf" get a validation error rather than a parse error).
double read_number(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        char* end = nullptr;
        errno = 0;
        const double d = std::strtod(s.c_str(), &end);
        if (!s.empty() && end == s.c_str() + s.size()) return d;
        throw ParseError(field, "expected a number, got \"" + s + "\"");
    }
    throw ParseError(field, std::string("expected a number, got ") + v.type_name());
}

template <std::size_t N>
std::array<double, N> read_array(const json& rec, const char* key) {
    const json& v = rec.at(key);
    if (!v.is_array() || v.size() != N) {
        throw ParseError(key, "expected an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        const std::string field = std::string(key) + "[" + std::to_string(i) + "]";
        out[i] = read_number(v[i], field);
        if (!std::isfinite(out[i])) throw ValidationError(field, "non-finite value");
    }
    return out;
}

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace

PoseSample parse_sample(std::string_view line) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError("", e.what());
    }
    if (!rec.is_object()) throw ParseError("", "record is not a JSON object");
    for (const char* key : {"t", "p", "q"}) {
        if (!rec.contains(key)) throw ParseError(key, "missing required field");
    }

    PoseSample s;
    s.t = read_number(rec["t"], "t");
    if (!std::isfinite(s.t)) throw ValidationError("t", "non-finite value");
    s.position = to_vec(read_array<3>(rec, "p"));

    const auto q = read_array<4>(rec, "q");
    const Quat raw{q[0], q[1], q[2], q[3]};
    const double n = raw.norm();
    if (n < kQuatNormLow || n > kQuatNormHigh) {
        throw ValidationError("q", "quaternion norm " + std::to_string(n) + " outside [0.99, 1.01]");
    }
    s.orientation = raw.normalized();

    if (rec.contains("w") && !rec["w"].is_null()) s.angular_velocity = to_vec(read_array<3>(rec, "w"));
    if (rec.contains("a") && !rec["a"].is_null()) s.linear_acceleration = to_vec(read_array<3>(rec, "a"));
    return s;
}

std::string serialize_sample(const PoseSample& s) {
    nlohmann::ordered_json rec;
    rec["t"] = s.t;
    rec["p"] = s.position.to_array();
    rec["q"] = {s.orientation.w, s.orientation.x, s.orientation.y, s.orientation.z};
    if (s.angular_velocity) rec["w"] = s.angular_velocity->to_array();
    if (s.linear_acceleration) rec["a"] = s.linear_acceleration->to_array();
    return rec.dump();
}

Vec3 head_forward(const Quat& orientation) {
    return orientation.rotate(kHeadForwardLocal);
}

void validate_trace(const Trace& trace) {
    if (trace.samples.empty()) throw ValidationError("samples", "trace is empty");
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        if (!(trace.samples[i].t > trace.samples[i - 1].t)) {
            throw ValidationError("t", "timestamps not strictly increasing at sample " + std::to_string(i));
        }
    }
}

Trace read_trace(std::istream& in) {
    Trace trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            trace.samples.push_back(parse_sample(line));
        } catch (const ParseError& e) {
            throw ParseError(e.field(), e.detail(), lineno);
        } catch (const ValidationError& e) {
            throw ValidationError(e.field(), "line " + std::to_string(lineno) + ": " + e.detail());
        }
    }
    if (trace.samples.size() > 1 && trace.duration() > 0.0) {
        trace.nominal_rate_hz = static_cast<double>(trace.samples.size() - 1) / trace.duration();
    }
    return trace;
}

Trace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open trace file: " + path);
    return read_trace(in);
}

void write_trace(std::ostream& out, const Trace& trace) {
    for (const auto& s : trace.samples) out << serialize_sample(s) << '\n';
}

void write_trace_file(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw NotFoundError("cannot write trace file: " + path);
    write_trace(out, trace);
}

}  // namespace retrax
