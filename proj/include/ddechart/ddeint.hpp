#pragma once

#include <vector>

#include "ddechart/delay.hpp"
#include "ddechart/hermite.hpp"

namespace ddechart {

// Dense C^1 solution history of x'(t) = f(x(t + d(x_t))) on [-h, t_end].
class Trajectory {
public:
    Trajectory(HermiteSeries history, double h, GridSpec grid, double t_end,
               double initial_residual);

    double h() const { return h_; }
    double t_end() const { return t_end_; }
    double initial_residual() const { return initial_residual_; }
    const HermiteSeries& history() const { return history_; }

    // Node times at and after 0 (step boundaries).
    std::vector<double> step_times() const;

    double eval(double t) const;        // t in [-h, t_end]
    double eval_deriv(double t) const;  // t in [-h, t_end]

    // The segment x_t resampled onto the standard grid, for t in [0, t_end].
    IntervalFunction segment(double t) const;

private:
    HermiteSeries history_;
    double h_;
    GridSpec grid_;
    double t_end_;
    double initial_residual_;
};

// Method-of-steps integration with fixed step dt. Each step evaluates the
// right-hand side through the resampled segment at the stage times of the
// classical 4-stage Runge-Kutta tableau; because the delayed argument may
// fall inside the current step, the stage sweep is repeated K_corr times
// against a provisional Hermite extension of the history (predictor-
// corrector). phi0 should satisfy phi0'(0) = F(phi0); larger residuals are
// recorded on the returned Trajectory, not rejected.
Trajectory integrate(const ScalarField& f, const DelayFunctional& d,
                     const IntervalFunction& phi0, double t_end, double dt, int K_corr = 3);

// residual(f, d, x_t) at each requested time.
std::vector<double> manifold_residual_along(const Trajectory& traj, const ScalarField& f,
                                            const DelayFunctional& d,
                                            const std::vector<double>& sample_times);

}  // namespace ddechart
