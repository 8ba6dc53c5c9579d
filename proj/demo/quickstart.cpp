// Simulate a lap around a square, feed the synthetic encoder ticks back
// through the integrator, and compare against ground truth.

#include <cstdio>

#include "wheelodom/odometry.hpp"
#include "wheelodom/simulator.hpp"

int main() {
    using namespace wheelodom;

    const WheelParams params{0.64, 0.164, 4096};

    CommandProfile square;
    square.sample_rate_hz = 200.0;
    for (int side = 0; side < 4; ++side) {
        square.segments.push_back({0.8, 0.0, 5.0});                    // 4 m edge
        square.segments.push_back({0.0, kTwoPi / 4.0 / 2.0, 2.0});     // 90 degree turn
    }

    const SimulationResult sim = simulate(square, params);
    const Trajectory estimated = integrate_log(sim.ticks, params);
    const Pose2D truth = sim.ground_truth.trajectory.back().pose;
    const Pose2D est = estimated.back().pose;

    std::printf("ground truth final pose: (%.4f, %.4f, %.4f)\n", truth.x, truth.y, truth.theta);
    std::printf("integrated  final pose: (%.4f, %.4f, %.4f)\n", est.x, est.y, est.theta);
    std::printf("path length: %.4f m (commanded 16 m of edges)\n", path_length(estimated));
    return 0;
}
