#include "ddechart/chart.hpp"

#include <cmath>
#include <utility>

#include "ddechart/error.hpp"

namespace ddechart {

ChartAtlas::ChartAtlas(ScalarField f, std::shared_ptr<const DelayFunctional> d, double b,
                       GridSpec grid)
    : f_(std::move(f)),
      d_(std::move(d)),
      b_(b),
      c_(d_->ded_bound(b)),
      grid_(grid),
      family_(d_->horizon(),
              BoundFunction{[f = f_, b, c = d_->ded_bound(b)](double v) {
                  return 1.0 / (2.0 * (b + 1.0) * c *
                                (1.0 + std::abs(f.value(v)) + std::abs(f.deriv(v))));
              }},
              grid) {
    if (!(b_ > 0)) fail("invalid-domain", "ChartAtlas requires b > 0");
    if (!(c_ > 0) || !std::isfinite(c_))
        fail("contract-violation", "ded_bound must be positive and finite");
}

IntervalFunction ChartAtlas::A_map(const IntervalFunction& phi, double r) const {
    if (!(r > -h() && r < 0)) fail("out-of-range", "A_map requires r in (-h, 0)");
    const double g = f_.value(phi.eval(r));
    return axpy(-g, family_.chi(phi.eval(r), r), phi);
}

IntervalFunction ChartAtlas::B_map(const IntervalFunction& psi, double r) const {
    if (!(r > -h() && r < 0)) fail("out-of-range", "B_map requires r in (-h, 0)");
    const double g = f_.value(psi.eval(r));
    return axpy(g, family_.chi(psi.eval(r), r), psi);
}

StatePair ChartAtlas::T_map(const StatePair& sp) const {
    return StatePair{A_map(sp.phi, sp.r), sp.r};
}

StatePair ChartAtlas::Y_map(const StatePair& sp) const {
    return StatePair{B_map(sp.phi, sp.r), sp.r};
}

IntervalFunction ChartAtlas::chart_forward(const IntervalFunction& phi) const {
    if (!in_Ub(*d_, phi, b_)) fail("not-in-U_b", "chart_forward requires phi in U_b");
    return A_map(phi, d_->eval(phi));
}

double ChartAtlas::d2dB(const IntervalFunction& psi, double r) const {
    if (!(r > -h() && r < 0)) fail("out-of-range", "d2dB requires r in (-h, 0)");
    const double pv = psi.eval(r), pd = psi.eval_deriv(r);
    // D_2(I o B)(psi,r)1 = f'(psi(r)) psi'(r) chi(psi(r),r)
    //                      + f(psi(r)) D(I o chi)(psi(r),r)(psi'(r), 1)
    const IntervalFunction w =
        axpy(f_.deriv(pv) * pd, family_.chi(pv, r),
             scale(f_.value(pv), family_.dchi(pv, r, pd, 1.0)));
    return d_->ext_deriv_apply(B_map(psi, r), w);
}

ChartAtlas::InverseResult ChartAtlas::chart_inverse(const IntervalFunction& psi,
                                                    std::optional<double> r0) const {
    double r = r0.value_or(-h() / 2.0);
    if (!(r > -h() && r < 0)) fail("out-of-range", "start r0 must lie in (-h, 0)");
    std::vector<double> iterates{r};
    for (int k = 0; k < max_iter_; ++k) {
        const double next = d_->eval(B_map(psi, r));
        if (!(next > -h() && next < 0))
            fail("iterate-escaped", "fixed-point iterate left (-h, 0)");
        iterates.push_back(next);
        const double step = std::abs(next - r);
        r = next;
        if (step <= fixed_point_tol_) {
            IntervalFunction phi = B_map(psi, r);
            if (!in_Ub(*d_, phi, b_))
                fail("not-in-image", "fixed point found but B(psi, r) is not in U_b");
            return InverseResult{std::move(phi), r, std::move(iterates)};
        }
    }
    fail("no-convergence", "fixed-point iteration did not converge (contraction violated?)");
}

IntervalFunction ChartAtlas::chart_manifold(const IntervalFunction& psi,
                                            double residual_tol) const {
    InverseResult res = chart_inverse(psi);
    const double res_phi = residual(f_, *d_, res.phi);
    if (std::abs(res_phi) > residual_tol)
        fail("residual-too-large",
             "inverse image misses the solution manifold (is psi'(0) = 0 and psi in the "
             "chart image?)");
    return std::move(res.phi);
}

}  // namespace ddechart
