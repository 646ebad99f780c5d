#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ddechart/delay.hpp"
#include "ddechart/transversal.hpp"

namespace ddechart {

struct StatePair {
    IntervalFunction phi;
    double r;  // in (-h, 0)
};

// Bundles (f, f', d, b) with the transversal family built for
//   H(v) = 1 / (2 (b+1) c (1 + |f(v)| + |f'(v)|)),   c = ded_bound(b),
// and exposes the shear maps A, B, T, Y, the forward chart
// Pi(phi) = A(phi, d(phi)) and its contraction-based inverse.
class ChartAtlas {
public:
    ChartAtlas(ScalarField f, std::shared_ptr<const DelayFunctional> d, double b,
               GridSpec grid = {});

    double h() const { return d_->horizon(); }
    double b() const { return b_; }
    double contraction_constant() const { return c_; }
    double H(double v) const { return family_.H(v); }
    const ScalarField& f() const { return f_; }
    const DelayFunctional& delay() const { return *d_; }
    const TransversalFamily& family() const { return family_; }
    const GridSpec& grid() const { return grid_; }

    // A(phi,r) = phi - f(phi(r)) chi(phi(r), r); leaves phi unchanged on [-h, r].
    IntervalFunction A_map(const IntervalFunction& phi, double r) const;
    // B(psi,r) = psi + f(psi(r)) chi(psi(r), r); inverse shear of A at fixed r.
    IntervalFunction B_map(const IntervalFunction& psi, double r) const;

    StatePair T_map(const StatePair& sp) const;
    StatePair Y_map(const StatePair& sp) const;

    // Pi(phi) = A(phi, d(phi)); requires phi in U_b, maps the solution
    // manifold into X_0 = {psi'(0) = 0}.
    IntervalFunction chart_forward(const IntervalFunction& phi) const;

    // The scalar D_2(d o B)(psi, r) 1; bounded by 1/2 on U_b^x.
    double d2dB(const IntervalFunction& psi, double r) const;

    struct InverseResult {
        IntervalFunction phi;
        double r;
        std::vector<double> iterates;  // r_0, r_1, ..., r_final
    };

    // Solve r = d(B(psi, r)) by fixed-point iteration (rate <= 1/2 on U_b^x),
    // then return phi = B(psi, r). Errors: "iterate-escaped" if some r_k
    // leaves (-h, 0), "no-convergence" after max_iter steps, "not-in-image"
    // if the fixed point gives B(psi, r) outside U_b.
    InverseResult chart_inverse(const IntervalFunction& psi,
                                std::optional<double> r0 = std::nullopt) const;

    // Inverse chart restricted to X_0: requires psi'(0) = 0, returns a point
    // of the solution manifold X_{F,b}; "residual-too-large" if the result
    // fails the manifold test.
    IntervalFunction chart_manifold(const IntervalFunction& psi,
                                    double residual_tol = 1e-8) const;

    double fixed_point_tol() const { return fixed_point_tol_; }

private:
    ScalarField f_;
    std::shared_ptr<const DelayFunctional> d_;
    double b_;
    double c_;
    GridSpec grid_;
    TransversalFamily family_;
    double fixed_point_tol_ = 1e-12;
    int max_iter_ = 200;
};

}  // namespace ddechart
