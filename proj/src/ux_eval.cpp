#include "retrax/ux_eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "retrax/errors.hpp"

namespace retrax::ux {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct Row {
    std::string participant;
    std::string setting;
    Answers answers{};
};

std::vector<Row> read_rows(std::istream& in) {
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        if (!header) {
            header = true;
            if (cells.size() != 2 + kItems || cells[0] != "participant_id" || cells[1] != "setting") {
                throw ParseError("header", "expected participant_id,setting,q1..q7", lineno);
            }
            continue;
        }
        if (cells.size() != 2 + kItems) {
            throw ParseError("", "expected " + std::to_string(2 + kItems) + " columns, got " +
                                     std::to_string(cells.size()), lineno);
        }
        Row r{cells[0], cells[1], {}};
        for (std::size_t q = 0; q < kItems; ++q) {
            const std::string field = "q" + std::to_string(q + 1);
            const std::string& c = cells[2 + q];
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(c, &used);
            } catch (const std::exception&) {
                throw ParseError(field, "expected an integer, got '" + c + "'", lineno);
            }
            if (used != c.size()) throw ParseError(field, "expected an integer, got '" + c + "'", lineno);
            if (v < -1 || v > 1) {
                throw ValidationError(field, "line " + std::to_string(lineno) + ": answer " + c + " not in {-1,0,1}");
            }
            r.answers[q] = v;
        }
        rows.push_back(std::move(r));
    }
    if (!header) throw ParseError("header", "empty input");
    return rows;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string_view to_string(Setting s) { return s == Setting::Setting1 ? "Setting1" : "Setting2"; }

Setting setting_from_string(std::string_view s) {
    if (s == "1" || s == "Setting1" || s == "setting1") return Setting::Setting1;
    if (s == "2" || s == "Setting2" || s == "setting2") return Setting::Setting2;
    throw ParseError("setting", "unknown setting '" + std::string(s) + "'");
}

Instruments Instruments::defaults() {
    return {{"engaging", "fun", "felt like physical exercise", "would repeat", "would repeat if health required",
             "preferred over video instruction", "audio feedback essential"},
            {AspectPair{"obstructive", "supportive"},
             {"complicated", "easy"},
             {"confusing", "clear"},
             {"boring", "exciting"},
             {"not interesting", "interesting"},
             {"conventional", "inventive"},
             {"usual", "leading edge"}}};
}

Instruments Instruments::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open instruments file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", e.what());
    }
    Instruments inst = defaults();
    if (j.contains("engagement_questions")) {
        const auto& q = j["engagement_questions"];
        if (!q.is_array() || q.size() != kItems) throw ParseError("engagement_questions", "expected 7 strings");
        for (std::size_t i = 0; i < kItems; ++i) inst.engagement_questions[i] = q[i].get<std::string>();
    }
    if (j.contains("bipolar_aspects")) {
        const auto& a = j["bipolar_aspects"];
        if (!a.is_array() || a.size() != kItems) throw ParseError("bipolar_aspects", "expected 7 pairs");
        for (std::size_t i = 0; i < kItems; ++i) {
            if (!a[i].is_array() || a[i].size() != 2) throw ParseError("bipolar_aspects", "expected [negative, positive]");
            inst.bipolar_aspects[i] = {a[i][0].get<std::string>(), a[i][1].get<std::string>()};
        }
    }
    return inst;
}

double round2(double v) {
    const double r = std::round(v * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;
}

std::array<double, kItems> aspect_means(std::span<const BipolarResponse> responses) {
    if (responses.empty()) throw UsageError("aspect_means needs at least one response");
    std::array<double, kItems> means{};
    for (std::size_t a = 0; a < kItems; ++a) {
        int sum = 0;
        for (const auto& r : responses) sum += r.answers[a];
        means[a] = round2(static_cast<double>(sum) / static_cast<double>(responses.size()));
    }
    return means;
}

Distribution response_distribution(std::span<const EngagementResponse> responses, Setting setting) {
    Distribution d{};
    bool any = false;
    for (const auto& r : responses) {
        if (r.setting != setting) continue;
        any = true;
        for (std::size_t q = 0; q < kItems; ++q) ++d[q][static_cast<std::size_t>(r.answers[q] + 1)];
    }
    if (!any) throw UsageError("no responses for " + std::string(to_string(setting)));
    return d;
}

std::vector<EngagementResponse> read_engagement_csv(std::istream& in) {
    std::vector<EngagementResponse> out;
    for (auto& row : read_rows(in)) {
        out.push_back({std::move(row.participant), setting_from_string(row.setting), row.answers});
    }
    return out;
}

std::vector<BipolarResponse> read_bipolar_csv(std::istream& in) {
    std::vector<BipolarResponse> out;
    for (auto& row : read_rows(in)) out.push_back({std::move(row.participant), row.answers});
    return out;
}

std::string bipolar_csv(const std::array<double, kItems>& means, const Instruments& inst) {
    std::ostringstream os;
    os << "aspect,negative_pole,positive_pole,mean\n";
    for (std::size_t a = 0; a < kItems; ++a) {
        os << (a + 1) << ',' << inst.bipolar_aspects[a].negative << ',' << inst.bipolar_aspects[a].positive << ','
           << fixed2(means[a]) << '\n';
    }
    return os.str();
}

std::string bipolar_text(const std::array<double, kItems>& means, std::size_t respondents, const Instruments& inst) {
    std::ostringstream os;
    os << "User experience, mean score per aspect (n=" << respondents << ", scale -1..+1)\n";
    char buf[160];
    for (std::size_t a = 0; a < kItems; ++a) {
        std::snprintf(buf, sizeof buf, "  %-16s %6s  %s\n", inst.bipolar_aspects[a].negative.c_str(),
                      fixed2(means[a]).c_str(), inst.bipolar_aspects[a].positive.c_str());
        os << buf;
    }
    return os.str();
}

std::string engagement_csv(Setting setting, const Distribution& d, const Instruments& inst) {
    std::ostringstream os;
    os << "setting,question,text,minus_one,zero,plus_one\n";
    for (std::size_t q = 0; q < kItems; ++q) {
        os << to_string(setting) << ",q" << (q + 1) << ",\"" << inst.engagement_questions[q] << "\"," << d[q][0]
           << ',' << d[q][1] << ',' << d[q][2] << '\n';
    }
    return os.str();
}

std::string engagement_text(Setting setting, const Distribution& d, const Instruments& inst) {
    std::ostringstream os;
    os << "Engagement responses, " << to_string(setting) << " (counts of -1 / 0 / +1)\n";
    char buf[256];
    for (std::size_t q = 0; q < kItems; ++q) {
        std::snprintf(buf, sizeof buf, "  q%zu %3d %3d %3d  %s\n", q + 1, d[q][0], d[q][1], d[q][2],
                      inst.engagement_questions[q].c_str());
        os << buf;
    }
    return os.str();
}

}  // namespace retrax::ux
