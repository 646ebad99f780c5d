#include "ddechart/transversal.hpp"

#include <cmath>

#include "ddechart/error.hpp"

namespace ddechart {

Rect rect(double m, double h) {
    if (!(m >= 1)) fail("invalid-domain", "rect requires m >= 1");
    if (!(h > 0)) fail("invalid-domain", "rect requires h > 0");
    return Rect{m, h};
}

IntervalFunction bump_psi(double z, double eps, double h, const GridSpec& grid) {
    if (!(z > -h && z < 0)) fail("invalid-domain", "bump_psi requires z in (-h, 0)");
    if (!(eps > 0)) fail("invalid-domain", "bump_psi requires eps > 0");
    const double zs = std::max(z, -eps);
    auto value = [zs](double t) { return t <= zs ? 0.0 : (t - zs) * (t - zs) / (-2 * zs); };
    auto deriv = [zs](double t) { return t <= zs ? 0.0 : (t - zs) / (-zs); };
    return IntervalFunction::fit(value, deriv, h, grid, {z, zs});
}

IntervalFunction affine_chi(double /*v*/, double r, double h, const GridSpec& grid) {
    if (!(r > -h && r < 0)) fail("out-of-range", "affine_chi requires r in (-h, 0)");
    return IntervalFunction::fit([r](double t) { return t - r; }, [](double) { return 1.0; },
                                 h, grid, {r});
}

namespace {

// One-dimensional C^1 plateau: 1 on [lo_in, hi_in], 0 outside (lo_out, hi_out),
// cubic smoothstep rho(s) = 3s^2 - 2s^3 on the two transition bands.
struct Ramp1D {
    double lo_out, lo_in, hi_in, hi_out;

    static double rho(double s) { return s * s * (3 - 2 * s); }
    static double drho(double s) { return 6 * s * (1 - s); }

    double value(double x) const {
        if (x <= lo_out || x >= hi_out) return 0.0;
        if (x >= lo_in && x <= hi_in) return 1.0;
        if (x < lo_in) return rho((x - lo_out) / (lo_in - lo_out));
        return rho((hi_out - x) / (hi_out - hi_in));
    }
    double deriv(double x) const {
        if (x <= lo_out || x >= hi_out) return 0.0;
        if (x >= lo_in && x <= hi_in) return 0.0;
        if (x < lo_in) return drho((x - lo_out) / (lo_in - lo_out)) / (lo_in - lo_out);
        return -drho((hi_out - x) / (hi_out - hi_in)) / (hi_out - hi_in);
    }
    double max_abs_deriv() const {
        // |rho'| peaks at 3/2; the two bands may have different widths.
        return 1.5 / std::min(lo_in - lo_out, hi_out - hi_in);
    }
};

Ramp1D v_ramp(int n) {
    const double in = n + 1.0 / 3.0, out = n + 2.0 / 3.0;
    return Ramp1D{-out, -in, in, out};
}

Ramp1D r_ramp(int n, double h) {
    const Rect inner = rect(n + 1.0 / 3.0, h);
    const Rect outer = rect(n + 2.0 / 3.0, h);
    return Ramp1D{outer.r_lo(), inner.r_lo(), inner.r_hi(), outer.r_hi()};
}

}  // namespace

TransversalFamily::TransversalFamily(double h, BoundFunction H, GridSpec grid)
    : h_(h), H_(std::move(H)), grid_(grid) {
    if (!(h > 0)) fail("invalid-domain", "TransversalFamily requires h > 0");
    grid_.validate();
}

CutoffValue TransversalFamily::cutoff(int n, double v, double r) const {
    if (n < 1) fail("invalid-domain", "cutoff index must be >= 1");
    const Ramp1D rv = v_ramp(n), rr = r_ramp(n, h_);
    const double av = rv.value(v), ar = rr.value(r);
    return CutoffValue{av * ar, rv.deriv(v) * ar, av * rr.deriv(r)};
}

const TransversalFamily::Entry& TransversalFamily::entry(int n) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    // Build the monotone chains A_1 <= A_2 <= ..., eps_1 >= eps_2 >= ...
    // up to n in one pass.
    double prev_A = 0.0, prev_H = std::numeric_limits<double>::infinity();
    double prev_eps = std::numeric_limits<double>::infinity();
    int start = 1;
    if (!cache_.empty() && cache_.rbegin()->first < n) {
        start = cache_.rbegin()->first + 1;
        const Constants& c = cache_.rbegin()->second.constants;
        prev_A = c.A;
        prev_H = c.Hn;
        prev_eps = c.eps;
    }
    for (int k = start; k <= n; ++k) {
        const Ramp1D rv = v_ramp(k), rr = r_ramp(k, h_);
        const double grad_bound = std::hypot(rv.max_abs_deriv(), rr.max_abs_deriv());
        const double A = std::max(prev_A, grad_bound);
        double sampled = std::numeric_limits<double>::infinity();
        const int samples = 10000;
        for (int j = 0; j <= samples; ++j) {
            const double v = -(k + 2.0) + (2.0 * (k + 2.0) * j) / samples;
            sampled = std::min(sampled, H_(v));
        }
        if (!(sampled > 0)) fail("contract-violation", "bound function H must be positive");
        const double Hn = std::min(prev_H, 0.9 * sampled);
        const double eps = std::min(prev_eps, Hn / (1 + 2 * A));
        Entry e{Constants{A, Hn, eps}, bump_psi(-h_ / (3.0 * (k + 2)), eps, h_, grid_)};
        it = cache_.emplace(k, std::move(e)).first;
        prev_A = A;
        prev_H = Hn;
        prev_eps = eps;
    }
    return it->second;
}

TransversalFamily::Constants TransversalFamily::constants(int n) const {
    if (n < 1) fail("invalid-domain", "constants index must be >= 1");
    return entry(n).constants;
}

const IntervalFunction& TransversalFamily::psi(int n) const {
    if (n < 1) fail("invalid-domain", "psi index must be >= 1");
    return entry(n).psi;
}

int TransversalFamily::domain_index(double v, double r) const {
    if (!(r > -h_ && r < 0)) fail("out-of-range", "domain_index requires r in (-h, 0)");
    // dom_1 = U_{2,0} = rect(2 + 1/3); dom_n = U_{n+1,0} \ cl U_n for n >= 2.
    // The smallest n with (v,r) in rect(n + 4/3) automatically avoids cl U_n.
    for (int n = 1; n < 100000; ++n) {
        if (rect(n + 4.0 / 3.0, h_).contains_open(v, r)) return n;
    }
    fail("out-of-range", "domain_index: point not covered (r too close to 0 or -h)");
}

IntervalFunction TransversalFamily::sigma(int n, double v, double r) const {
    if (n < 1) fail("invalid-domain", "sigma index must be >= 1");
    if (n == 1) return psi(2);
    const CutoffValue a = cutoff(n, v, r);
    return axpy(a.value, psi(n), scale(1.0 - a.value, psi(n + 1)));
}

IntervalFunction TransversalFamily::chi(double v, double r) const {
    return sigma(domain_index(v, r), v, r);
}

IntervalFunction TransversalFamily::dchi(double v, double r, double vhat, double rhat) const {
    const int n = domain_index(v, r);
    if (n == 1) return IntervalFunction::constant(0.0, h_, grid_);
    const CutoffValue a = cutoff(n, v, r);
    const double slope = a.dv * vhat + a.dr * rhat;
    return scale(slope, axpy(-1.0, psi(n + 1), psi(n)));
}

}  // namespace ddechart
