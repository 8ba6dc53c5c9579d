#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "wheelodom/errors.hpp"

namespace wheelodom {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Geometry of the differential-drive wheel pair. counts_per_rev is the number
// of decoded counts per full mechanical revolution; with x4 quadrature
// decoding a 1024-pulse encoder yields 4096.
struct WheelParams {
    double wheel_base_m = 0.64;
    double wheel_radius_m = 0.164;
    std::int32_t counts_per_rev = 4096;
};

inline bool is_valid(const WheelParams& p) {
    return std::isfinite(p.wheel_base_m) && p.wheel_base_m > 0.0 &&
           std::isfinite(p.wheel_radius_m) && p.wheel_radius_m > 0.0 && p.counts_per_rev > 0;
}

inline void require_valid(const WheelParams& p) {
    if (!is_valid(p))
        throw ValidationError("wheel parameters must be positive (wheel_base_m, wheel_radius_m, counts_per_rev)");
}

// Planar pose. theta is an unwrapped heading: integration accumulates it
// without normalization so full turns remain visible.
struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

inline bool is_finite(const Pose2D& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.theta);
}

// Arc travel of each wheel between two consecutive encoder samples.
struct WheelDelta {
    double d_left_m = 0.0;
    double d_right_m = 0.0;
};

// Largest per-step wheel travel accepted as genuine motion. One meter between
// samples at vehicle speeds of <= 25 km/h means the log is corrupt.
inline constexpr double kDefaultMaxStepM = 1.0;

struct TimedPose {
    std::uint64_t timestamp_us = 0;
    Pose2D pose;
};

// Timestamps are strictly increasing; the first pose is the integration's
// initial pose.
using Trajectory = std::vector<TimedPose>;

// Cumulative signed decoded counts per wheel at strictly increasing
// timestamps. Counts are logical 64-bit values: 32-bit counter wrap-around is
// resolved on ingestion.
struct TickSample {
    std::uint64_t timestamp_us = 0;
    std::int64_t left_ticks = 0;
    std::int64_t right_ticks = 0;

    friend bool operator==(const TickSample&, const TickSample&) = default;
};

using TickLog = std::vector<TickSample>;

enum class ExperimentKind { kForward, kBackward, kCircle };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::kForward: return "forward";
        case ExperimentKind::kBackward: return "backward";
        case ExperimentKind::kCircle: return "circle";
    }
    return "?";
}

// One calibration experiment: a drive of known ground-truth extent. For
// forward/backward kinds gt_value_m is the tape-measured travel; for circle
// it is the tape-measured circle diameter.
struct ExperimentRecord {
    ExperimentKind kind = ExperimentKind::kForward;
    double gt_value_m = 0.0;
    TickLog log;
};

// Wraps an unwrapped heading into (-pi, pi] for display.
inline double normalize_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r > std::numbers::pi) r -= kTwoPi;
    if (r <= -std::numbers::pi) r += kTwoPi;
    return r;
}

}  // namespace wheelodom
