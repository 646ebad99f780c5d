#pragma once

#include <functional>
#include <map>
#include <mutex>

#include "ddechart/funcspace.hpp"

namespace ddechart {

// Continuous positive bound H(v) controlling the C-size of the transversals.
struct BoundFunction {
    std::function<double(double)> value;

    double operator()(double v) const { return value(v); }
};

// Open rectangle (-m, m) x (-h + h/(3m), -h/(3m)).
struct Rect {
    double m = 1.0;
    double h = 1.0;

    double v_lo() const { return -m; }
    double v_hi() const { return m; }
    double r_lo() const { return -h + h / (3 * m); }
    double r_hi() const { return -h / (3 * m); }

    bool contains_open(double v, double r) const {
        return v > v_lo() && v < v_hi() && r > r_lo() && r < r_hi();
    }
    bool contains_closed(double v, double r) const {
        return v >= v_lo() && v <= v_hi() && r >= r_lo() && r <= r_hi();
    }
};

Rect rect(double m, double h);  // requires m >= 1

// Value and gradient of the C^1 plateau cutoff a_n.
struct CutoffValue {
    double value;
    double dv;
    double dr;
};

// The family chi: R x (-h,0) -> C^1 with
//   chi(v,r)'(0) = 1,
//   chi(v,r) = 0 on [-h, r],
//   |chi(v,r)|_C <= H(v),
//   |D(I o chi)(v,r)| <= H(v),
// built from quadratic-spline bumps psi_n glued by tensor-product smoothstep
// cutoffs over the nested rectangles rect(n) c rect(n+1/3) c rect(n+2/3)
// c rect(n+1). Per-index data is memoized under a lock; evaluation after
// caching is pure.
class TransversalFamily {
public:
    TransversalFamily(double h, BoundFunction H, GridSpec grid = {});

    double h() const { return h_; }
    double H(double v) const { return H_(v); }
    const GridSpec& grid() const { return grid_; }

    IntervalFunction chi(double v, double r) const;

    // Derivative of I o chi at (v,r) applied to (vhat, rhat); only the values
    // of the result are meaningful (a C-element).
    IntervalFunction dchi(double v, double r, double vhat, double rhat) const;

    // Smallest n with (v,r) in dom_n; total on R x (-h, 0).
    int domain_index(double v, double r) const;

    // The piece defining chi on dom_n (sigma_1 = psi_2 is constant).
    IntervalFunction sigma(int n, double v, double r) const;

    CutoffValue cutoff(int n, double v, double r) const;

    struct Constants {
        double A;    // bound for max |Da_n|, nondecreasing in n
        double Hn;   // sampled min of H over [-n-2, n+2] with safety factor
        double eps;  // H_n / (1 + 2 A_n), nonincreasing in n
    };
    Constants constants(int n) const;

    const IntervalFunction& psi(int n) const;  // bump with cutoff z_n = -h/(3(n+2))

private:
    struct Entry {
        Constants constants;
        IntervalFunction psi;
    };
    const Entry& entry(int n) const;

    double h_;
    BoundFunction H_;
    GridSpec grid_;
    mutable std::mutex mu_;
    mutable std::map<int, Entry> cache_;
};

// The quadratic-spline bump: with z* = max(z, -eps),
//   psi(t) = 0 for t <= z*,  psi(t) = (t - z*)^2 / (2 (-z*)) for t >= z*,
// so psi'(0) = 1, psi = 0 on [-h, z], |psi|_C = -z*/2 < eps. Both z and z*
// are inserted as grid nodes, making the support and psi'(0) exact.
IntervalFunction bump_psi(double z, double eps, double h, const GridSpec& grid = {});

// The trivial affine transversal chi(v,r)(t) = t - r (does not vanish on
// [-h, r] and has no C-norm bound).
IntervalFunction affine_chi(double v, double r, double h, const GridSpec& grid = {});

}  // namespace ddechart
