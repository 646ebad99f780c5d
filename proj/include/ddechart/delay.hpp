#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ddechart/funcspace.hpp"

namespace ddechart {

// A scalar map together with its derivative, both in closed form.
struct ScalarField {
    std::function<double(double)> value;
    std::function<double(double)> deriv;

    double operator()(double x) const { return value(x); }
};

namespace fields {

ScalarField sine();
ScalarField square();
ScalarField identity();
ScalarField polynomial(const std::vector<double>& coeffs);  // c0 + c1 x + ...
ScalarField zero();

// Reference pair for integral delays on horizon h:
//   delta(w) = -h / (1 + e^w), increasing, range (-h,0), sup|delta'| = h/4,
//   v(y) = 0 for y <= 0 and y - log(1+y) for y > 0, C^1, v' in [0,1).
ScalarField reference_delta(double h);
ScalarField reference_v();

// Hermite-tabulated field on [lo, hi], constant-extended outside.
ScalarField tabulated(std::vector<double> xs, std::vector<double> values,
                      std::vector<double> derivs);

}  // namespace fields

// Largest relative mismatch between field.deriv and a central finite
// difference of field.value over n equispaced points of [lo, hi].
double deriv_consistency_error(const ScalarField& field, double lo, double hi, int n,
                               double step = 1e-5);

// Delay functional d: C^1 -> (-h, 0) with an extended derivative
// D_e d(phi): C -> R that uses only the values of its argument.
class DelayFunctional {
public:
    virtual ~DelayFunctional() = default;

    virtual double horizon() const = 0;
    virtual double eval(const IntervalFunction& phi) const = 0;
    virtual double ext_deriv_apply(const IntervalFunction& phi,
                                   const IntervalFunction& dir) const = 0;
    // Certified bound for |D_e d(phi)| as an operator on C, valid whenever
    // |phi'(-h)| < b.
    virtual double ded_bound(double b) const = 0;

    // Derivative along a C^1 direction; coincides with the extension there.
    virtual double deriv_apply(const IntervalFunction& phi, const IntervalFunction& dir) const {
        return ext_deriv_apply(phi, dir);
    }
};

// d(phi) = delta( integral_{-h}^{0} v(phi(t)) dt ), with composite
// Gauss-Legendre quadrature aligned to the Hermite panels of phi.
class IntegralDelay final : public DelayFunctional {
public:
    IntegralDelay(double h, ScalarField delta, ScalarField v, double sup_abs_ddelta,
                  double sup_abs_dv, int gl_points = 8);

    static std::shared_ptr<IntegralDelay> reference(double h, int gl_points = 8);

    double horizon() const override { return h_; }
    double eval(const IntervalFunction& phi) const override;
    double ext_deriv_apply(const IntervalFunction& phi,
                           const IntervalFunction& dir) const override;
    double ded_bound(double b) const override;

    double integral_of_v(const IntervalFunction& phi) const;
    const ScalarField& delta() const { return delta_; }
    const ScalarField& v() const { return v_; }
    int gl_points() const { return gl_points_; }

private:
    double h_;
    ScalarField delta_, v_;
    double sup_abs_ddelta_, sup_abs_dv_;
    int gl_points_;
};

// F(phi) = f(phi(d(phi))) and its derivative along dir:
//   DF(phi)dir = f'(phi(d(phi))) [dir(d(phi)) + phi'(d(phi)) Dd(phi)dir].
// With extended=true the delay derivative acts through values of dir only.
double F_eval(const ScalarField& f, const DelayFunctional& d, const IntervalFunction& phi);
double DF_apply(const ScalarField& f, const DelayFunctional& d, const IntervalFunction& phi,
                const IntervalFunction& dir, bool extended);

// phi'(0) - F(phi); zero exactly on the solution manifold.
double residual(const ScalarField& f, const DelayFunctional& d, const IntervalFunction& phi);

// Membership in U_b = {|phi'| < b on [-h, d(phi)]} and its product-space
// analogue with an explicit r. Open sets: equality at the sampled maximum
// counts as outside.
bool in_Ub(const DelayFunctional& d, const IntervalFunction& phi, double b);
bool in_Ub_times(const IntervalFunction& phi, double r, double b);

}  // namespace ddechart
