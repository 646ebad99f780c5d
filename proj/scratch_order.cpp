// throwaway: measure integrator order ratio for the acceptance criterion
#include <cmath>
#include <cstdio>
#include <vector>

#include "ddechart/chart.hpp"
#include "ddechart/ddeint.hpp"
#include "ddechart/manifold.hpp"

using namespace ddechart;

int main() {
    const double h = 1.0;
    const GridSpec grid{64, 2048};
    const ScalarField f = fields::sine();
    const auto d = IntegralDelay::reference(h);
    ChartAtlas atlas(f, d, 1.0, grid);

    // Nonzero manifold point: pull back a small X_0 element through the chart.
    const IntervalFunction seed = IntervalFunction::fit(
        [h](double t) { return 0.05 * std::sin(3 * t) * (t + h) * (t + h) + 0.03 * t * t * (t + h); },
        [h](double t) {
            return 0.05 * (3 * std::cos(3 * t) * (t + h) * (t + h) + std::sin(3 * t) * 2 * (t + h)) +
                   0.03 * (2 * t * (t + h) + t * t);
        },
        h, grid);
    const IntervalFunction psi0 = project_X0(seed);
    const IntervalFunction phi0 = atlas.chart_manifold(psi0);
    std::printf("phi0 residual = %.3e, norm_C1 = %.3f, phi0(0)=%.4f\n",
                residual(f, *d, phi0), norm_C1(phi0), phi0.eval(0.0));

    auto max_resid = [&](double dt) {
        const Trajectory traj = integrate(f, *d, phi0, 2.0, dt, 3);
        const std::vector<double> nodes = traj.step_times();
        std::vector<double> samples;
        const std::vector<double> thetas{0.08, 0.15, 0.2113, 0.30, 0.40, 0.50,
                                         0.60, 0.70, 0.7887, 0.85, 0.92};
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            if (nodes[i] < 1.2) continue;
            for (double th : thetas) samples.push_back(nodes[i] + th * (nodes[i + 1] - nodes[i]));
        }
        double worst = 0.0;
        for (double r : manifold_residual_along(traj, f, *d, samples))
            worst = std::max(worst, std::abs(r));
        // delay magnitude sanity
        std::printf("  dt=%g: d(x_2)=%.4f, x(2)=%.5f, max_resid=%.6e\n", dt,
                    d->eval(traj.segment(2.0)), traj.eval(2.0), worst);
        return worst;
    };

    const double e1 = max_resid(2e-3);
    const double e2 = max_resid(1e-3);
    std::printf("ratio = %.3f (need >= 8)\n", e1 / e2);
    return 0;
}
