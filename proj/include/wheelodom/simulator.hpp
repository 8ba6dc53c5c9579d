#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "wheelodom/errors.hpp"
#include "wheelodom/odometry.hpp"
#include "wheelodom/quadrature.hpp"
#include "wheelodom/types.hpp"

namespace wheelodom {

// One constant-velocity command: linear velocity v and angular velocity
// omega, held for duration_s.
struct ProfileSegment {
    double v_mps = 0.0;
    double omega_radps = 0.0;
    double duration_s = 0.0;
};

struct CommandProfile {
    std::vector<ProfileSegment> segments;
    double sample_rate_hz = 100.0;
};

// Exact (pre-quantization) trajectory plus per-wheel cumulative angles,
// aligned one-to-one with the trajectory entries.
struct GroundTruth {
    Trajectory trajectory;
    std::vector<double> left_angle_rad;
    std::vector<double> right_angle_rad;
};

struct SimulationResult {
    GroundTruth ground_truth;
    TickLog ticks;
};

// Optional measurement jitter: an integer offset added to the reported count
// of one sample (wheel 0 = left, 1 = right). Models latch/reporting noise on
// the counter readout, not encoder slip, so offsets do not accumulate. The
// ground truth and any synthesized quadrature stay noise-free.
using TickNoiseHook = std::function<std::int64_t(std::size_t sample_index, int wheel)>;

// Continuous wheel angle expressed in count units. Shared by the tick
// quantizer and the quadrature synthesizer so both see identical positions.
inline double count_position(double angle_rad, std::int32_t counts_per_rev) {
    return angle_rad * static_cast<double>(counts_per_rev) / kTwoPi;
}

inline void require_valid(const CommandProfile& profile, const WheelParams& params,
                          double max_step_m = kDefaultMaxStepM) {
    require_valid(params);
    if (profile.segments.empty()) throw EmptyInputError("command profile has no segments");
    if (!(profile.sample_rate_hz > 0.0) || !(profile.sample_rate_hz <= 1e6))
        throw ValidationError("sample rate must be in (0, 1e6] Hz");
    const double dt = 1.0 / profile.sample_rate_hz;
    for (std::size_t i = 0; i < profile.segments.size(); ++i) {
        const ProfileSegment& seg = profile.segments[i];
        if (!(seg.duration_s > 0.0))
            throw ValidationError("segment " + std::to_string(i) + ": duration must be positive");
        if (std::llround(seg.duration_s * profile.sample_rate_hz) < 1)
            throw ValidationError("segment " + std::to_string(i) +
                                  ": duration shorter than one sample period");
        const double worst_wheel =
            (std::abs(seg.v_mps) + std::abs(seg.omega_radps) * params.wheel_base_m / 2.0) * dt;
        if (!(worst_wheel <= max_step_m))
            throw ValidationError("segment " + std::to_string(i) +
                                  ": per-step wheel travel exceeds the sanity bound");
    }
}

// Drives the profile through the same Euler stepping the integrator uses and
// synthesizes the tick log an ideal encoder pair would report. Ticks are the
// floor of the cumulative wheel angle in count units, i.e. a cumulative
// hardware counter: the quantization residual is carried, never lost.
inline SimulationResult simulate(const CommandProfile& profile, const WheelParams& params,
                                 const Pose2D& initial = {}, std::uint64_t start_timestamp_us = 0,
                                 double max_step_m = kDefaultMaxStepM,
                                 const TickNoiseHook& tick_noise = {}) {
    require_valid(profile, params, max_step_m);
    if (!is_finite(initial)) throw ValidationError("simulate: initial pose is not finite");

    SimulationResult result;
    GroundTruth& gt = result.ground_truth;
    const double dt = 1.0 / profile.sample_rate_hz;

    double angle_left = 0.0, angle_right = 0.0;
    std::uint64_t sample_index = 0;
    auto timestamp_at = [&](std::uint64_t k) {
        return start_timestamp_us +
               static_cast<std::uint64_t>(std::llround(static_cast<double>(k) * 1e6 /
                                                       profile.sample_rate_hz));
    };
    auto emit = [&](const Pose2D& pose) {
        const std::uint64_t t = timestamp_at(sample_index);
        std::int64_t left =
            static_cast<std::int64_t>(std::floor(count_position(angle_left, params.counts_per_rev)));
        std::int64_t right =
            static_cast<std::int64_t>(std::floor(count_position(angle_right, params.counts_per_rev)));
        if (tick_noise) {
            left += tick_noise(sample_index, 0);
            right += tick_noise(sample_index, 1);
        }
        gt.trajectory.push_back({t, pose});
        gt.left_angle_rad.push_back(angle_left);
        gt.right_angle_rad.push_back(angle_right);
        result.ticks.push_back({t, left, right});
        ++sample_index;
    };

    Pose2D pose = initial;
    emit(pose);
    for (const ProfileSegment& seg : profile.segments) {
        const std::int64_t steps = std::llround(seg.duration_s * profile.sample_rate_hz);
        WheelDelta delta;
        delta.d_left_m = (seg.v_mps - seg.omega_radps * params.wheel_base_m / 2.0) * dt;
        delta.d_right_m = (seg.v_mps + seg.omega_radps * params.wheel_base_m / 2.0) * dt;
        for (std::int64_t k = 0; k < steps; ++k) {
            pose = integrate_step(pose, delta, params, max_step_m);
            angle_left += delta.d_left_m / params.wheel_radius_m;
            angle_right += delta.d_right_m / params.wheel_radius_m;
            emit(pose);
        }
    }
    return result;
}

// Synthesizes the sampled A/B channel streams an ideal encoder would produce
// for the simulated motion. oversample_factor is the minimum number of signal
// samples per count at the fastest count rate; below 4 the stream could alias
// into illegal transitions, so generation refuses.
//
// Decoding the returned streams reproduces the simulation's tick counts
// exactly at every ground-truth timestamp.
inline std::pair<QuadSampleStream, QuadSampleStream> emit_quadrature(
    const GroundTruth& ground_truth, const WheelParams& params, int oversample_factor = 8) {
    if (oversample_factor < 4)
        throw AliasingError("oversample factor below 4 cannot keep quadrature transitions legal");
    require_valid(params);
    const std::size_t n = ground_truth.trajectory.size();
    if (n == 0) throw EmptyInputError("emit_quadrature: empty ground truth");
    if (ground_truth.left_angle_rad.size() != n || ground_truth.right_angle_rad.size() != n)
        throw ValidationError("emit_quadrature: wheel angles misaligned with trajectory");

    QuadSampleStream left, right;
    auto synthesize = [&](const std::vector<double>& angles, QuadSampleStream& out) {
        std::vector<double> phi(n);
        for (std::size_t k = 0; k < n; ++k)
            phi[k] = count_position(angles[k], params.counts_per_rev);
        auto state_at = [](double position) {
            return quad_state_at_phase(static_cast<int>(
                ((static_cast<std::int64_t>(std::floor(position)) % 4) + 4) % 4));
        };
        out.push_back({ground_truth.trajectory.front().timestamp_us, state_at(phi[0])});
        std::int64_t prev_floor = static_cast<std::int64_t>(std::floor(phi[0]));
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const std::uint64_t t0 = ground_truth.trajectory[k].timestamp_us;
            const std::uint64_t t1 = ground_truth.trajectory[k + 1].timestamp_us;
            const double dphi = phi[k + 1] - phi[k];
            const std::int64_t n_sub = std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::ceil(std::abs(dphi))) * oversample_factor);
            for (std::int64_t j = 1; j <= n_sub; ++j) {
                const double p = (j == n_sub)
                                     ? phi[k + 1]
                                     : phi[k] + dphi * static_cast<double>(j) / static_cast<double>(n_sub);
                const std::int64_t f = static_cast<std::int64_t>(std::floor(p));
                if (std::llabs(f - prev_floor) > 1)
                    throw AliasingError("quadrature synthesis crossed more than one count per sample");
                prev_floor = f;
                const std::uint64_t t =
                    t0 + static_cast<std::uint64_t>(std::llround(static_cast<double>(t1 - t0) *
                                                                 static_cast<double>(j) /
                                                                 static_cast<double>(n_sub)));
                out.push_back({t, state_at(p)});
            }
        }
    };
    synthesize(ground_truth.left_angle_rad, left);
    synthesize(ground_truth.right_angle_rad, right);
    return {std::move(left), std::move(right)};
}

}  // namespace wheelodom
