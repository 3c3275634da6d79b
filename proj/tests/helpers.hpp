#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "retrax/calibration.hpp"
#include "retrax/trace_synth.hpp"

namespace testutil {

inline retrax::CalibrationProfile profile(double range_m = 0.05) {
    retrax::CalibrationProfile p;
    p.neutral_position = {0.0, 1.6, 0.0};
    p.neutral_orientation = {};
    p.axis = {0.0, 0.0, 1.0};
    p.max_range_m = range_m;
    p.mode = retrax::CalibrationMode::Manual;
    return p;
}

// n excursions of 2 s rise, `hold_s` plateau, 2 s fall, 1 s rest.
inline retrax::TraceScript script(std::size_t n, double amplitude, double hold_s = 4.0) {
    retrax::TraceScript s;
    s.excursions.assign(n, retrax::ExcursionScript{amplitude, 2.0, hold_s, 2.0, 1.0});
    return s;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    std::random_device rd;
    auto dir = std::filesystem::temp_directory_path() / ("retrax-" + tag + "-" + std::to_string(rd()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testutil
