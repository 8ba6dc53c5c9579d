// Recover wheel geometry from synthetic experiments: generate tick logs at a
// hidden (L, R), then grid-search them back.

#include <cstdio>
#include <vector>

#include "wheelodom/calibration.hpp"
#include "wheelodom/io.hpp"
#include "wheelodom/simulator.hpp"

int main() {
    using namespace wheelodom;

    const WheelParams hidden{0.6521, 0.1617, 4096};

    std::vector<ExperimentRecord> experiments;
    const SimulationResult fwd = simulate({{{1.0, 0.0, 8.0}}, 100.0}, hidden);
    experiments.push_back({ExperimentKind::kForward, 8.0, fwd.ticks});

    const double omega = kTwoPi / 40.0;
    const SimulationResult circ = simulate({{{1.315 * omega, omega, 40.0}}, 200.0}, hidden);
    experiments.push_back({ExperimentKind::kCircle, 2.63, circ.ticks});

    GridSearchOptions options;
    options.threads = 2;
    const CalibrationResult result = grid_search(experiments, GridSpec{}, options);

    std::printf("hidden    L=%.4f R=%.4f\n", hidden.wheel_base_m, hidden.wheel_radius_m);
    std::printf("recovered L=%.4f R=%.4f\n", result.best_params.wheel_base_m,
                result.best_params.wheel_radius_m);
    std::fputs(render_report_text(result).c_str(), stdout);
    return 0;
}
