#pragma once

#include "ddechart/funcspace.hpp"
#include "ddechart/rng.hpp"

namespace ddechart {

// Random trigonometric C^1 function with sampled sup|phi'| scaled to
// deriv_cap * u for u in [0.2, 0.95], plus a uniform offset in
// [-offset_cap, offset_cap]. Used by property checks that need members of
// U_b with a safety margin.
IntervalFunction random_c1(Rng& rng, double h, const GridSpec& grid, double deriv_cap,
                           double offset_cap);

// Random r in (-h + margin, -margin).
double random_r(Rng& rng, double h, double margin = 0.05);

// Random unit vector in R^2.
void random_direction(Rng& rng, double& vhat, double& rhat);

}  // namespace ddechart
