#include "ddechart/sampling.hpp"

#include <array>
#include <cmath>

namespace ddechart {

IntervalFunction random_c1(Rng& rng, double h, const GridSpec& grid, double deriv_cap,
                           double offset_cap) {
    constexpr int terms = 4;
    std::array<double, terms> amp{}, freq{}, phase{};
    for (int j = 0; j < terms; ++j) {
        amp[j] = rng.uniform(-1.0, 1.0);
        freq[j] = rng.uniform(0.5, 4.5) / h;
        phase[j] = rng.uniform(0.0, 2 * M_PI);
    }
    const double offset = rng.uniform(-offset_cap, offset_cap);

    auto osc = [&](double t) {
        double acc = 0.0;
        for (int j = 0; j < terms; ++j) acc += amp[j] * std::sin(freq[j] * t + phase[j]);
        return acc;
    };
    auto dosc = [&](double t) {
        double acc = 0.0;
        for (int j = 0; j < terms; ++j)
            acc += amp[j] * freq[j] * std::cos(freq[j] * t + phase[j]);
        return acc;
    };

    double max_d = 0.0;
    for (int i = 0; i <= 4096; ++i)
        max_d = std::max(max_d, std::abs(dosc(-h + (i * h) / 4096)));
    const double target = deriv_cap * rng.uniform(0.2, 0.95);
    const double s = max_d > 1e-12 ? target / max_d : 0.0;

    return IntervalFunction::fit([&](double t) { return offset + s * osc(t); },
                                 [&](double t) { return s * dosc(t); }, h, grid);
}

double random_r(Rng& rng, double h, double margin) {
    return rng.uniform(-h + margin * h, -margin * h);
}

void random_direction(Rng& rng, double& vhat, double& rhat) {
    const double angle = rng.uniform(0.0, 2 * M_PI);
    vhat = std::cos(angle);
    rhat = std::sin(angle);
}

}  // namespace ddechart
