#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "wheelodom/circle_fit.hpp"
#include "wheelodom/errors.hpp"
#include "wheelodom/types.hpp"

namespace wheelodom {

// Arc length travelled by a wheel for a signed count difference:
// radius * delta * 2*pi / counts_per_rev.
inline double ticks_to_travel(std::int64_t delta_ticks, const WheelParams& params) {
    return params.wheel_radius_m * static_cast<double>(delta_ticks) * kTwoPi /
           static_cast<double>(params.counts_per_rev);
}

// One step of the differential-drive model. The heading used for the position
// update is the heading at the old pose; no midpoint or arc correction.
//
//   x'     = x + (d_l + d_r)/2 * cos(theta)
//   y'     = y + (d_l + d_r)/2 * sin(theta)
//   theta' = theta + (d_r - d_l) / L
inline Pose2D integrate_step(const Pose2D& pose, const WheelDelta& delta,
                             const WheelParams& params, double max_step_m = kDefaultMaxStepM,
                             std::size_t step_index = 0) {
    if (!(std::abs(delta.d_left_m) <= max_step_m) || !(std::abs(delta.d_right_m) <= max_step_m))
        throw StepTooLargeError(delta.d_left_m, delta.d_right_m, max_step_m, step_index);
    const double mean = (delta.d_left_m + delta.d_right_m) / 2.0;
    Pose2D next;
    next.x = pose.x + mean * std::cos(pose.theta);
    next.y = pose.y + mean * std::sin(pose.theta);
    next.theta = pose.theta + (delta.d_right_m - delta.d_left_m) / params.wheel_base_m;
    return next;
}

// Dead-reckons a whole tick log. One pose per log entry; the first pose is
// `initial` at the log's first timestamp.
inline Trajectory integrate_log(const TickLog& log, const WheelParams& params,
                                const Pose2D& initial = {},
                                double max_step_m = kDefaultMaxStepM) {
    require_valid(params);
    if (log.empty()) throw EmptyInputError("integrate_log: tick log is empty");
    if (!is_finite(initial)) throw ValidationError("integrate_log: initial pose is not finite");

    Trajectory traj;
    traj.reserve(log.size());
    traj.push_back({log.front().timestamp_us, initial});
    for (std::size_t k = 1; k < log.size(); ++k) {
        if (log[k].timestamp_us <= log[k - 1].timestamp_us)
            throw ValidationError("integrate_log: timestamps not strictly increasing at entry " +
                                  std::to_string(k));
        WheelDelta delta;
        delta.d_left_m = ticks_to_travel(log[k].left_ticks - log[k - 1].left_ticks, params);
        delta.d_right_m = ticks_to_travel(log[k].right_ticks - log[k - 1].right_ticks, params);
        traj.push_back(
            {log[k].timestamp_us, integrate_step(traj.back().pose, delta, params, max_step_m, k)});
    }
    return traj;
}

// Total distance travelled along the trajectory: the sum of Euclidean
// distances between consecutive positions. For the model above this equals
// the summed per-step mean wheel travel magnitudes.
inline double path_length(const Trajectory& traj) {
    if (traj.empty()) throw EmptyInputError("path_length: trajectory is empty");
    double total = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double dx = traj[k].pose.x - traj[k - 1].pose.x;
        const double dy = traj[k].pose.y - traj[k - 1].pose.y;
        total += std::sqrt(dx * dx + dy * dy);
    }
    return total;
}

// Diameter of the least-squares circle through the trajectory positions.
inline double circle_diameter(const Trajectory& traj) {
    std::vector<double> xs, ys;
    xs.reserve(traj.size());
    ys.reserve(traj.size());
    for (const TimedPose& tp : traj) {
        xs.push_back(tp.pose.x);
        ys.push_back(tp.pose.y);
    }
    return 2.0 * fit_circle_kasa(xs, ys).radius;
}

// |measured - ground_truth| / ground_truth.
inline double relative_error(double measured, double ground_truth) {
    if (!(ground_truth > 0.0))
        throw ValidationError("relative_error: ground truth must be positive");
    return std::abs(measured - ground_truth) / ground_truth;
}

}  // namespace wheelodom
