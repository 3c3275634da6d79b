#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retrax::ux {

inline constexpr std::size_t kItems = 7;

enum class Setting { Setting1 = 1, Setting2 = 2 };

std::string_view to_string(Setting s);
Setting setting_from_string(std::string_view s);

/// Answers on the three-point scale {-1, 0, +1}.
using Answers = std::array<int, kItems>;

struct EngagementResponse {
    std::string participant_id;
    Setting setting = Setting::Setting1;
    Answers answers{};
};

struct BipolarResponse {
    std::string participant_id;
    Answers answers{};
};

struct AspectPair {
    std::string negative;
    std::string positive;
};

/// Instrument wording, kept as data so it can be revised without a rebuild.
struct Instruments {
    std::array<std::string, kItems> engagement_questions;
    std::array<AspectPair, kItems> bipolar_aspects;

    static Instruments defaults();
    /// JSON: {"engagement_questions":[7 strings],"bipolar_aspects":[[neg,pos] x7]}
    static Instruments load(const std::filesystem::path& path);
};

/// Rounds half away from zero to two decimals; never returns -0.
double round2(double v);

/// Per-aspect mean of the bipolar answers, rounded to two decimals.
/// Throws UsageError on an empty list.
std::array<double, kItems> aspect_means(std::span<const BipolarResponse> responses);

/// counts[q] = {#-1, #0, #+1} for question q among responses of `setting`.
using Distribution = std::array<std::array<int, 3>, kItems>;

/// Throws UsageError when no response belongs to `setting`.
Distribution response_distribution(std::span<const EngagementResponse> responses, Setting setting);

/// CSV input: header `participant_id,setting,q1,...,q7`. For the bipolar
/// instrument the setting column may be empty. Throws ParseError with the
/// 1-based line number on malformed rows and ValidationError on answers
/// outside {-1, 0, +1}.
std::vector<EngagementResponse> read_engagement_csv(std::istream& in);
std::vector<BipolarResponse> read_bipolar_csv(std::istream& in);

std::string bipolar_csv(const std::array<double, kItems>& means, const Instruments& inst);
std::string bipolar_text(const std::array<double, kItems>& means, std::size_t respondents, const Instruments& inst);
std::string engagement_csv(Setting setting, const Distribution& d, const Instruments& inst);
std::string engagement_text(Setting setting, const Distribution& d, const Instruments& inst);

}  // namespace retrax::ux
