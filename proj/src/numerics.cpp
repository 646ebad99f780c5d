#include "ddechart/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ddechart/error.hpp"

namespace ddechart {

namespace {

GaussRule compute_gauss(int n) {
    if (n < 1 || n > 64) fail("invalid-domain", "Gauss-Legendre order must be in [1, 64]");
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * sum;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double value_tol,
              int max_iter, std::vector<BisectionStep>* log) {
    double f_lo = f(lo), f_hi = f(hi);
    if (std::abs(f_lo) <= value_tol) return lo;
    if (std::abs(f_hi) <= value_tol) return hi;
    if (f_lo * f_hi > 0)
        fail("sign-condition-failed", "bisection bracket has no sign change");
    for (int k = 0; k < max_iter; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (log) log->push_back({lo, hi, mid, f_mid});
        if (std::abs(f_mid) <= value_tol) return mid;
        if (f_lo * f_mid < 0) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    fail("no-convergence", "bisection did not reach the requested tolerance");
}

double solve_increasing(const std::function<double(double)>& f, double target, double lo,
                        double hi, double tol) {
    double f_hi = f(hi);
    int guard = 0;
    while (f_hi < target) {
        lo = hi;
        hi = hi <= 0 ? 1.0 : 2.0 * hi;
        f_hi = f(hi);
        if (++guard > 200)
            fail("parameter-search-failed", "monotone solve could not bracket the target");
    }
    if (f(lo) > target) fail("parameter-search-failed", "target below the search interval");
    return bisect([&](double x) { return f(x) - target; }, lo, hi, tol, 200, nullptr);
}

}  // namespace ddechart
