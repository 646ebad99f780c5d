#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddechart/hermite.hpp"

namespace ddechart {

// Node count N (panels of the uniform base grid) and norm-sampling
// resolution M. Norms are evaluated on the M+1-point uniform grid plus
// every node, so M should comfortably oversample the panels.
struct GridSpec {
    int N = 64;
    int M = 2048;

    void validate() const;  // N >= 8, M >= 16*N
};

// A C^1 function [-h,0] -> R stored as piecewise cubic Hermite data.
// Immutable after construction; all operations are pure.
class IntervalFunction {
public:
    IntervalFunction(double h, std::vector<double> nodes, std::vector<double> values,
                     std::vector<double> derivs, int norm_samples = 2048);

    static IntervalFunction constant(double y, double h, const GridSpec& grid = {});

    // Sample a callable pair (value, derivative) on the uniform grid plus
    // extra_nodes. Extra nodes make kinked-but-C^1 shapes (bumps, ramps)
    // exactly representable.
    static IntervalFunction fit(const std::function<double(double)>& value,
                                const std::function<double(double)>& deriv, double h,
                                const GridSpec& grid = {},
                                const std::vector<double>& extra_nodes = {});

    double h() const { return h_; }
    int norm_samples() const { return norm_samples_; }
    const std::vector<double>& nodes() const { return series_.nodes(); }
    const std::vector<double>& values() const { return series_.values(); }
    const std::vector<double>& derivs() const { return series_.derivs(); }

    double eval(double t) const;        // t in [-h, 0]
    double eval_deriv(double t) const;  // t in [-h, 0]

private:
    double h_;
    HermiteSeries series_;
    int norm_samples_;
};

// D ev(phi,t)(phi_hat,t_hat) = phi_hat(t) + phi'(t) * t_hat, for t in the
// open interval (-h, 0).
double ev_diff(const IntervalFunction& phi, double t, const IntervalFunction& phi_hat,
               double t_hat);

// Sup norms by dense sampling (M-grid plus nodes). norm_C1 = norm_C + sup|phi'|.
// M_override > 0 replaces the stored sampling resolution.
double norm_C(const IntervalFunction& phi, int M_override = 0);
double norm_C1(const IntervalFunction& phi, int M_override = 0);

// Windowed sampled maxima over [lo, hi] (grid points, nodes, both endpoints).
double max_abs_on(const IntervalFunction& phi, double lo, double hi);
double max_abs_deriv_on(const IntervalFunction& phi, double lo, double hi);

// a*x + y on the merged node set; exact for piecewise cubics.
IntervalFunction axpy(double a, const IntervalFunction& x, const IntervalFunction& y);

IntervalFunction scale(double a, const IntervalFunction& x);

// JSON object {h, nodes, values, derivs} and CSV "t,value,deriv" rows.
std::string to_json(const IntervalFunction& phi);
IntervalFunction interval_function_from_json(const std::string& text);
std::string to_csv(const IntervalFunction& phi);

}  // namespace ddechart
