#pragma once

#include <array>
#include <functional>
#include <vector>

namespace ddechart {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order via
// Newton iteration on P_n and cached.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// Integrate f over [a, b] with an n-point rule.
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n);

struct BisectionStep {
    double lo, hi, mid, f_mid;
};

// Bisection on [lo, hi] until |f(mid)| <= value_tol. Requires a sign change;
// throws Error("sign-condition-failed") otherwise.
double bisect(const std::function<double(double)>& f, double lo, double hi, double value_tol,
              int max_iter = 200, std::vector<BisectionStep>* log = nullptr);

// Solve f(x) = target for increasing f, expanding [lo, hi] to the right until
// the target is bracketed. Throws Error("parameter-search-failed") if the
// bracket cannot be established.
double solve_increasing(const std::function<double(double)>& f, double target, double lo,
                        double hi, double tol = 1e-12);

}  // namespace ddechart
