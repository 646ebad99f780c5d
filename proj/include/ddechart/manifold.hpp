#pragma once

#include <optional>
#include <vector>

#include "ddechart/delay.hpp"
#include "ddechart/numerics.hpp"

namespace ddechart {

struct FindPointResult {
    IntervalFunction phi;
    double s;                              // parameter along the homotopy
    double residual;                       // phi'(0) - F(phi)
    double c;                              // sampled sup bound for |f| on [-1,1]
    int oscillation;                       // slope parameter M = ceil(c) + 1
    std::vector<BisectionStep> bisection;  // interval-halving log
};

// Locate a point of the solution manifold X_F inside {|phi|_C <= 1} by
// bisecting z(s) = Phi(s)'(0) - F(Phi(s)) along the segment between
// phi_-(t) = -sin(Mt) and phi_+(t) = sin(Mt).
FindPointResult find_point(const ScalarField& f, const DelayFunctional& d, double tol,
                           const GridSpec& grid = {});

// Remove the phi'(0) component: subtract phi'(0) * eta with
// eta(t) = t (1 + t/h)^2, so the result lies in X_0 = {phi'(0) = 0}.
IntervalFunction project_X0(const IntervalFunction& phi);

// A continuous linear functional on C^1: point terms c * phi(t) or
// c * phi'(t) plus an optional integral term with Hermite-represented weight.
struct LinearFunctional {
    struct PointTerm {
        double t;
        double coeff;
        bool on_deriv = false;
    };
    std::vector<PointTerm> points;
    std::optional<IntervalFunction> weight;  // adds integral of weight * phi

    double apply(const IntervalFunction& phi) const;
};

// Z = common kernel of finitely many functionals (a closed subspace of
// finite codimension). Construction checks the functionals' independence
// through the Gram matrix of their coordinate rows.
class SubspaceZ {
public:
    SubspaceZ(std::vector<LinearFunctional> functionals, double h, const GridSpec& grid = {});

    std::size_t codimension() const { return functionals_.size(); }
    const std::vector<LinearFunctional>& functionals() const { return functionals_; }

    // Orthonormal kernel elements obtained by projecting Hermite basis hats
    // onto the kernel and Gram-Schmidt orthogonalizing the results.
    std::vector<IntervalFunction> kernel_basis(int count) const;

private:
    std::vector<LinearFunctional> functionals_;
    double h_;
    GridSpec grid_;
    std::vector<std::vector<double>> rows_;  // functional coordinates over DOFs
};

struct Prop4Row {
    int n;
    double value;  // |D_e F(n) 1| = |f'(n)|
};

struct Prop4Result {
    std::vector<Prop4Row> rows;
    bool unbounded_evidence;  // strictly increasing along n = 1..nmax
};

// Evidence table for unboundedness of |D_e F| on U_b when sup_n |f'(n)|
// is infinite (e.g. f(x) = x^2).
Prop4Result scenario_prop4(const ScalarField& f, const DelayFunctional& d, double b, int nmax,
                           const GridSpec& grid = {});

struct Prop5Result {
    IntervalFunction phi;  // constant c
    IntervalFunction psi;  // equals c on [-h,s], rises on (s,0]
    double s;
    double w_s;    // delta(w) > s for w >= w_s
    double c;      // plateau level
    double d_psi;  // delay of psi; > s
    double F_phi, F_psi;
    double gap;  // |F(phi) - F(psi)| > 0
};

// Two states agreeing on [-h, s] with different F-values: the delay is not
// bounded away from zero. Requires injective f and the growth conditions
// on delta, v (satisfied by the reference pair).
Prop5Result scenario_prop5(const ScalarField& f, const IntegralDelay& d, double b, double s,
                           const GridSpec& grid = {}, double c_margin = 1.0,
                           double rise_margin = 0.9);

struct Prop6Result {
    IntervalFunction phi;  // kernel element, positive somewhere, |phi'| < b/2
    double d1, d2, d4;     // d(phi), d(2 phi), d(4 phi)
    double gap12, gap24;   // both > 0: d is not constant on U_b n Z
};

Prop6Result scenario_prop6(const IntegralDelay& d, const SubspaceZ& Z, double b,
                           const GridSpec& grid = {});

}  // namespace ddechart
