#include "ddechart/ddeint.hpp"

#include <algorithm>
#include <cmath>

#include "ddechart/error.hpp"

namespace ddechart {

Trajectory::Trajectory(HermiteSeries history, double h, GridSpec grid, double t_end,
                       double initial_residual)
    : history_(std::move(history)),
      h_(h),
      grid_(grid),
      t_end_(t_end),
      initial_residual_(initial_residual) {}

std::vector<double> Trajectory::step_times() const {
    std::vector<double> out;
    for (double t : history_.nodes())
        if (t >= -1e-15) out.push_back(t);
    return out;
}

double Trajectory::eval(double t) const {
    if (t < -h_ - 1e-12 || t > t_end_ + 1e-12)
        fail("out-of-range", "trajectory evaluated outside [-h, t_end]");
    return history_.value(std::clamp(t, -h_, t_end_));
}

double Trajectory::eval_deriv(double t) const {
    if (t < -h_ - 1e-12 || t > t_end_ + 1e-12)
        fail("out-of-range", "trajectory evaluated outside [-h, t_end]");
    return history_.deriv(std::clamp(t, -h_, t_end_));
}

IntervalFunction Trajectory::segment(double t) const {
    if (t < -1e-12 || t > t_end_ + 1e-12)
        fail("out-of-range", "segment time outside [0, t_end]");
    t = std::clamp(t, 0.0, t_end_);
    std::vector<double> nodes(static_cast<std::size_t>(grid_.N) + 1);
    std::vector<double> values(nodes.size()), derivs(nodes.size());
    for (int i = 0; i <= grid_.N; ++i) {
        const double s = -h_ + (i * h_) / grid_.N;
        const double x = std::clamp(t + s, -h_, t_end_);
        nodes[static_cast<std::size_t>(i)] = s;
        values[static_cast<std::size_t>(i)] = history_.value(x);
        derivs[static_cast<std::size_t>(i)] = history_.deriv(x);
    }
    nodes.front() = -h_;
    nodes.back() = 0.0;
    return IntervalFunction(h_, std::move(nodes), std::move(values), std::move(derivs),
                            grid_.M);
}

namespace {

// Dense lookup over committed history plus the provisional cubic on the
// current step [t0, t0+dt].
struct ProvisionalHistory {
    const HermiteSeries* hist;
    double t0, dt;
    double y0, yd0;  // committed state at t0
    double y1, yd1;  // provisional state at t0 + dt

    double value(double t) const {
        if (t <= t0) return hist->value(t);
        const double s = (t - t0) / dt;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * dt * yd0 +
               (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * dt * yd1;
    }
    double deriv(double t) const {
        if (t <= t0) return hist->deriv(t);
        const double s = (t - t0) / dt;
        const double s2 = s * s;
        return (6 * s2 - 6 * s) / dt * y0 + (3 * s2 - 4 * s + 1) * yd0 +
               (-6 * s2 + 6 * s) / dt * y1 + (3 * s2 - 2 * s) * yd1;
    }

    IntervalFunction segment(double t, double h, const GridSpec& grid) const {
        std::vector<double> nodes(static_cast<std::size_t>(grid.N) + 1);
        std::vector<double> values(nodes.size()), derivs(nodes.size());
        for (int i = 0; i <= grid.N; ++i) {
            const double s = -h + (i * h) / grid.N;
            nodes[static_cast<std::size_t>(i)] = s;
            values[static_cast<std::size_t>(i)] = value(t + s);
            derivs[static_cast<std::size_t>(i)] = deriv(t + s);
        }
        nodes.front() = -h;
        nodes.back() = 0.0;
        return IntervalFunction(h, std::move(nodes), std::move(values), std::move(derivs),
                                grid.M);
    }
};

}  // namespace

Trajectory integrate(const ScalarField& f, const DelayFunctional& d,
                     const IntervalFunction& phi0, double t_end, double dt, int K_corr) {
    if (!(t_end > 0)) fail("invalid-domain", "integrate requires t_end > 0");
    if (!(dt > 0 && dt <= t_end)) fail("invalid-domain", "integrate requires 0 < dt <= t_end");
    if (K_corr < 1) fail("invalid-domain", "integrate requires K_corr >= 1");
    const double h = d.horizon();
    if (std::abs(phi0.h() - h) > 1e-12 * h)
        fail("incompatible-domain", "phi0 horizon differs from the delay functional's");

    const double initial_residual = residual(f, d, phi0);
    const GridSpec grid{static_cast<int>(phi0.nodes().size()) - 1 >= 8
                            ? static_cast<int>(phi0.nodes().size()) - 1
                            : 8,
                        phi0.norm_samples()};

    HermiteSeries hist(phi0.nodes(), phi0.values(), phi0.derivs());
    double t = 0.0;
    double y0 = phi0.eval(0.0), yd0 = phi0.eval_deriv(0.0);

    const std::size_t n_steps =
        static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    for (std::size_t step_idx = 0; step_idx < n_steps; ++step_idx) {
        const double step = std::min(dt, t_end - t);
        ProvisionalHistory prov{&hist, t, step, y0, yd0, y0 + step * yd0, yd0};

        auto rhs = [&](double tau) {
            const IntervalFunction seg = prov.segment(tau, h, grid);
            const double delay = d.eval(seg);
            if (!(tau + delay < tau))  // delay causality: d < 0
                fail("contract-violation", "delayed argument is not in the past");
            return f.value(seg.eval(delay));
        };

        double first_update = -1.0, last_update = 0.0;
        for (int sweep = 0; sweep <= K_corr; ++sweep) {
            const double k1 = rhs(t);
            const double k2 = rhs(t + 0.5 * step);
            const double k3 = k2;  // the functional RHS has no pointwise stage argument
            const double k4 = rhs(t + step);
            const double y1 = y0 + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            last_update = std::abs(y1 - prov.y1);
            if (sweep == 0) first_update = last_update;
            prov.y1 = y1;
            prov.yd1 = k4;
        }
        if (last_update > std::max(first_update, 1e-9 * (1.0 + std::abs(prov.y1))) &&
            first_update > 0)
            fail("step-size-too-large",
                 "stage corrections diverge; the delay is shorter than dt resolves");

        hist.append(t + step, prov.y1, prov.yd1);
        t += step;
        y0 = prov.y1;
        yd0 = prov.yd1;
    }
    return Trajectory(std::move(hist), h, grid, t, initial_residual);
}

std::vector<double> manifold_residual_along(const Trajectory& traj, const ScalarField& f,
                                            const DelayFunctional& d,
                                            const std::vector<double>& sample_times) {
    std::vector<double> out;
    out.reserve(sample_times.size());
    for (double t : sample_times) out.push_back(residual(f, d, traj.segment(t)));
    return out;
}

}  // namespace ddechart
