#include "ddechart/delay.hpp"

#include <cmath>
#include <utility>

#include "ddechart/error.hpp"
#include "ddechart/hermite.hpp"
#include "ddechart/numerics.hpp"

namespace ddechart {

namespace fields {

ScalarField sine() {
    return {[](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }};
}

ScalarField square() {
    return {[](double x) { return x * x; }, [](double x) { return 2 * x; }};
}

ScalarField identity() {
    return {[](double x) { return x; }, [](double) { return 1.0; }};
}

ScalarField zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

ScalarField polynomial(const std::vector<double>& coeffs) {
    if (coeffs.empty()) fail("invalid-domain", "polynomial needs at least one coefficient");
    auto value = [coeffs](double x) {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
        return acc;
    };
    auto deriv = [coeffs](double x) {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 1;)
            acc = acc * x + coeffs[i] * static_cast<double>(i);
        return acc;
    };
    return {value, deriv};
}

ScalarField reference_delta(double h) {
    if (!(h > 0)) fail("invalid-domain", "reference_delta requires h > 0");
    auto value = [h](double w) { return -h / (1.0 + std::exp(w)); };
    auto deriv = [h](double w) {
        const double e = std::exp(w);
        return h * e / ((1.0 + e) * (1.0 + e));
    };
    return {value, deriv};
}

ScalarField reference_v() {
    auto value = [](double y) { return y <= 0 ? 0.0 : y - std::log1p(y); };
    auto deriv = [](double y) { return y <= 0 ? 0.0 : y / (1.0 + y); };
    return {value, deriv};
}

ScalarField tabulated(std::vector<double> xs, std::vector<double> values,
                      std::vector<double> derivs) {
    auto table = std::make_shared<HermiteSeries>(std::move(xs), std::move(values),
                                                 std::move(derivs));
    auto value = [table](double x) {
        if (x <= table->front_time()) return table->values().front();
        if (x >= table->back_time()) return table->values().back();
        return table->value(x);
    };
    auto deriv = [table](double x) {
        if (x <= table->front_time() || x >= table->back_time()) return 0.0;
        return table->deriv(x);
    };
    return {value, deriv};
}

}  // namespace fields

double deriv_consistency_error(const ScalarField& field, double lo, double hi, int n,
                               double step) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * (i + 0.5) / n;
        const double fd = (field.value(x + step) - field.value(x - step)) / (2 * step);
        const double an = field.deriv(x);
        const double scale = std::max({std::abs(an), std::abs(fd), 1.0});
        worst = std::max(worst, std::abs(fd - an) / scale);
    }
    return worst;
}

IntegralDelay::IntegralDelay(double h, ScalarField delta, ScalarField v,
                             double sup_abs_ddelta, double sup_abs_dv, int gl_points)
    : h_(h),
      delta_(std::move(delta)),
      v_(std::move(v)),
      sup_abs_ddelta_(sup_abs_ddelta),
      sup_abs_dv_(sup_abs_dv),
      gl_points_(gl_points) {
    if (!(h > 0)) fail("invalid-domain", "IntegralDelay requires h > 0");
    if (!(sup_abs_ddelta_ >= 0) || !std::isfinite(sup_abs_ddelta_))
        fail("invalid-domain", "sup|delta'| must be finite and nonnegative");
    if (!(sup_abs_dv_ >= 0) || !std::isfinite(sup_abs_dv_))
        fail("invalid-domain", "sup|v'| must be finite and nonnegative");
    if (gl_points_ < 2 || gl_points_ > 32)
        fail("invalid-domain", "quadrature resolution must be in [2, 32]");
    // Spot-check the range contract of delta over a wide argument window.
    for (int i = 0; i <= 64; ++i) {
        const double w = -32.0 + i;
        const double dw = delta_.value(w);
        if (!(dw > -h_ && dw < 0))
            fail("contract-violation", "delta must map into (-h, 0)");
    }
}

std::shared_ptr<IntegralDelay> IntegralDelay::reference(double h, int gl_points) {
    return std::make_shared<IntegralDelay>(h, fields::reference_delta(h),
                                           fields::reference_v(), h / 4.0, 1.0, gl_points);
}

namespace {

double panel_quadrature(const IntervalFunction& phi, int gl_points,
                        const std::function<double(double)>& integrand) {
    const GaussRule& rule = gauss_legendre(gl_points);
    const auto& t = phi.nodes();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double mid = 0.5 * (t[i] + t[i + 1]), half = 0.5 * (t[i + 1] - t[i]);
        double panel = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
            panel += rule.weights[k] * integrand(mid + half * rule.nodes[k]);
        sum += half * panel;
    }
    return sum;
}

void require_matching_h(double a, double b) {
    if (std::abs(a - b) > 1e-12 * std::max(a, b))
        fail("incompatible-domain", "history length mismatch");
}

}  // namespace

double IntegralDelay::integral_of_v(const IntervalFunction& phi) const {
    require_matching_h(phi.h(), h_);
    return panel_quadrature(phi, gl_points_, [&](double t) { return v_.value(phi.eval(t)); });
}

double IntegralDelay::eval(const IntervalFunction& phi) const {
    const double d = delta_.value(integral_of_v(phi));
    if (!(d > -h_ && d < 0))
        fail("contract-violation", "integral delay left the interval (-h, 0)");
    return d;
}

double IntegralDelay::ext_deriv_apply(const IntervalFunction& phi,
                                      const IntervalFunction& dir) const {
    require_matching_h(phi.h(), h_);
    require_matching_h(dir.h(), h_);
    const double w = integral_of_v(phi);
    const double inner = panel_quadrature(
        phi, gl_points_, [&](double t) { return v_.deriv(phi.eval(t)) * dir.eval(t); });
    return delta_.deriv(w) * inner;
}

double IntegralDelay::ded_bound(double) const { return h_ * sup_abs_ddelta_ * sup_abs_dv_; }

double F_eval(const ScalarField& f, const DelayFunctional& d, const IntervalFunction& phi) {
    return f.value(phi.eval(d.eval(phi)));
}

double DF_apply(const ScalarField& f, const DelayFunctional& d, const IntervalFunction& phi,
                const IntervalFunction& dir, bool extended) {
    const double r = d.eval(phi);
    const double dd = extended ? d.ext_deriv_apply(phi, dir) : d.deriv_apply(phi, dir);
    return f.deriv(phi.eval(r)) * (dir.eval(r) + phi.eval_deriv(r) * dd);
}

double residual(const ScalarField& f, const DelayFunctional& d, const IntervalFunction& phi) {
    return phi.eval_deriv(0.0) - F_eval(f, d, phi);
}

bool in_Ub(const DelayFunctional& d, const IntervalFunction& phi, double b) {
    if (!(b > 0)) fail("invalid-domain", "U_b requires b > 0");
    return max_abs_deriv_on(phi, -phi.h(), d.eval(phi)) < b;
}

bool in_Ub_times(const IntervalFunction& phi, double r, double b) {
    if (!(b > 0)) fail("invalid-domain", "U_b^x requires b > 0");
    if (!(r > -phi.h() && r < 0))
        fail("out-of-range", "U_b^x requires r in (-h, 0)");
    return max_abs_deriv_on(phi, -phi.h(), r) < b;
}

}  // namespace ddechart
