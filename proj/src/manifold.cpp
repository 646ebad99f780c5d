#include "ddechart/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddechart/error.hpp"

namespace ddechart {

FindPointResult find_point(const ScalarField& f, const DelayFunctional& d, double tol,
                           const GridSpec& grid) {
    if (!(tol > 0)) fail("invalid-domain", "find_point requires tol > 0");
    const double h = d.horizon();
    // Sampled sup of |f| over [-1,1] with a 10% safety margin.
    double sup_f = 0.0;
    const int samples = 10000;
    for (int i = 0; i <= samples; ++i)
        sup_f = std::max(sup_f, std::abs(f.value(-1.0 + 2.0 * i / samples)));
    const double c = 1.1 * sup_f;
    const int M = static_cast<int>(std::ceil(c)) + 1;

    const IntervalFunction plus = IntervalFunction::fit(
        [M](double t) { return std::sin(M * t); }, [M](double t) { return M * std::cos(M * t); },
        h, grid);
    const IntervalFunction minus = scale(-1.0, plus);
    const IntervalFunction span = axpy(-1.0, minus, plus);  // phi_+ - phi_-

    auto segment_point = [&](double s) { return axpy(s, span, minus); };
    auto z = [&](double s) { return residual(f, d, segment_point(s)); };

    std::vector<BisectionStep> log;
    const double s_star = bisect(z, 0.0, 1.0, tol, 200, &log);
    IntervalFunction phi = segment_point(s_star);
    const double res = residual(f, d, phi);
    return FindPointResult{std::move(phi), s_star, res, c, M, std::move(log)};
}

IntervalFunction project_X0(const IntervalFunction& phi) {
    const double h = phi.h();
    const GridSpec grid{static_cast<int>(phi.nodes().size()) - 1 >= 8
                            ? static_cast<int>(phi.nodes().size()) - 1
                            : 8,
                        phi.norm_samples()};
    const IntervalFunction eta = IntervalFunction::fit(
        [h](double t) { return t * (1 + t / h) * (1 + t / h); },
        [h](double t) { return (1 + t / h) * (1 + t / h) + 2 * t * (1 + t / h) / h; }, h,
        GridSpec{std::max(grid.N, 8), std::max(grid.M, 16 * std::max(grid.N, 8))});
    return axpy(-phi.eval_deriv(0.0), eta, phi);
}

double LinearFunctional::apply(const IntervalFunction& phi) const {
    double acc = 0.0;
    for (const PointTerm& p : points)
        acc += p.coeff * (p.on_deriv ? phi.eval_deriv(p.t) : phi.eval(p.t));
    if (weight) {
        // Exact on the merged panels: integrand is piecewise degree <= 6.
        std::vector<double> panels = phi.nodes();
        panels.insert(panels.end(), weight->nodes().begin(), weight->nodes().end());
        std::sort(panels.begin(), panels.end());
        panels.erase(std::unique(panels.begin(), panels.end()), panels.end());
        const GaussRule& rule = gauss_legendre(8);
        for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
            const double mid = 0.5 * (panels[i] + panels[i + 1]);
            const double half = 0.5 * (panels[i + 1] - panels[i]);
            double panel = 0.0;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const double t = mid + half * rule.nodes[k];
                panel += rule.weights[k] * weight->eval(t) * phi.eval(t);
            }
            acc += half * panel;
        }
    }
    return acc;
}

namespace {

std::vector<double> uniform_nodes(double h, int N) {
    std::vector<double> t(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) t[static_cast<std::size_t>(i)] = -h + (i * h) / N;
    t.front() = -h;
    t.back() = 0.0;
    return t;
}

IntervalFunction dof_function(const std::vector<double>& nodes, const std::vector<double>& x,
                              double h, int M) {
    const std::size_t n = nodes.size();
    std::vector<double> v(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = x[2 * i];
        d[i] = x[2 * i + 1];
    }
    return IntervalFunction(h, nodes, std::move(v), std::move(d), M);
}

// Solve the small dense system A y = b by Gauss elimination with partial
// pivoting; A is overwritten. Throws if A is (near) singular.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = A.size();
    double scale_ref = 0.0;
    for (const auto& row : A)
        for (double x : row) scale_ref = std::max(scale_ref, std::abs(x));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) <= 1e-12 * std::max(scale_ref, 1e-300))
            fail("invalid-domain", "functionals are not linearly independent (singular Gram)");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = A[r][col] / A[col][col];
            for (std::size_t cc = col; cc < n; ++cc) A[r][cc] -= m * A[col][cc];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= A[i][j] * y[j];
        y[i] = acc / A[i][i];
    }
    return y;
}

}  // namespace

SubspaceZ::SubspaceZ(std::vector<LinearFunctional> functionals, double h, const GridSpec& grid)
    : functionals_(std::move(functionals)), h_(h), grid_(grid) {
    if (functionals_.empty()) fail("invalid-domain", "SubspaceZ needs at least one functional");
    grid_.validate();
    const auto nodes = uniform_nodes(h_, grid_.N);
    const std::size_t dof = 2 * nodes.size();
    rows_.assign(functionals_.size(), std::vector<double>(dof, 0.0));
    std::vector<double> e(dof, 0.0);
    for (std::size_t j = 0; j < dof; ++j) {
        e[j] = 1.0;
        const IntervalFunction basis = dof_function(nodes, e, h_, grid_.M);
        for (std::size_t i = 0; i < functionals_.size(); ++i)
            rows_[i][j] = functionals_[i].apply(basis);
        e[j] = 0.0;
    }
    // Independence check: the Gram matrix of the coordinate rows must be
    // nonsingular (solve_dense throws otherwise).
    const std::size_t k = rows_.size();
    std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            gram[i][j] = std::inner_product(rows_[i].begin(), rows_[i].end(), rows_[j].begin(),
                                            0.0);
    std::vector<double> probe(k, 1.0);
    (void)solve_dense(gram, probe);
}

std::vector<IntervalFunction> SubspaceZ::kernel_basis(int count) const {
    const auto nodes = uniform_nodes(h_, grid_.N);
    const std::size_t dof = 2 * nodes.size();
    const std::size_t k = rows_.size();

    auto project = [&](std::vector<double> x) {
        // x - L^T (L L^T)^{-1} L x
        std::vector<double> lx(k, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            lx[i] = std::inner_product(rows_[i].begin(), rows_[i].end(), x.begin(), 0.0);
        std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                gram[i][j] = std::inner_product(rows_[i].begin(), rows_[i].end(),
                                                rows_[j].begin(), 0.0);
        const std::vector<double> y = solve_dense(std::move(gram), std::move(lx));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < dof; ++j) x[j] -= rows_[i][j] * y[i];
        return x;
    };

    // Candidate order: value hats spread over the interior, then derivative
    // hats; Gram-Schmidt against the basis collected so far.
    std::vector<std::size_t> order;
    for (std::size_t step = nodes.size() / 2; step >= 1; step /= 2) {
        for (std::size_t i = step; i < nodes.size(); i += 2 * step) {
            order.push_back(2 * i);      // value DOF
            order.push_back(2 * i + 1);  // derivative DOF
        }
        if (step == 1) break;
    }
    for (std::size_t j = 0; j < dof; ++j) order.push_back(j);

    std::vector<std::vector<double>> basis;
    for (std::size_t j : order) {
        if (static_cast<int>(basis.size()) >= count) break;
        std::vector<double> e(dof, 0.0);
        e[j] = 1.0;
        std::vector<double> p = project(std::move(e));
        for (const auto& q : basis) {
            const double dot = std::inner_product(q.begin(), q.end(), p.begin(), 0.0);
            for (std::size_t i = 0; i < dof; ++i) p[i] -= dot * q[i];
        }
        const double nrm = std::sqrt(std::inner_product(p.begin(), p.end(), p.begin(), 0.0));
        if (nrm > 1e-8) {
            for (double& x : p) x /= nrm;
            basis.push_back(std::move(p));
        }
    }
    if (basis.empty())
        fail("kernel-search-failed", "no nonzero kernel element among the candidates");

    std::vector<IntervalFunction> out;
    out.reserve(basis.size());
    for (const auto& x : basis) out.push_back(dof_function(nodes, x, h_, grid_.M));
    return out;
}

Prop4Result scenario_prop4(const ScalarField& f, const DelayFunctional& d, double b, int nmax,
                           const GridSpec& grid) {
    if (nmax < 1) fail("invalid-domain", "scenario_prop4 requires nmax >= 1");
    if (!(b > 0)) fail("invalid-domain", "scenario_prop4 requires b > 0");
    const double h = d.horizon();
    const IntervalFunction one = IntervalFunction::constant(1.0, h, grid);
    Prop4Result out;
    out.rows.reserve(static_cast<std::size_t>(nmax));
    for (int n = 1; n <= nmax; ++n) {
        const IntervalFunction cn = IntervalFunction::constant(n, h, grid);
        out.rows.push_back({n, std::abs(DF_apply(f, d, cn, one, /*extended=*/true))});
    }
    out.unbounded_evidence = true;
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i)
        if (!(out.rows[i + 1].value > out.rows[i].value)) out.unbounded_evidence = false;
    return out;
}

Prop5Result scenario_prop5(const ScalarField& f, const IntegralDelay& d, double b, double s,
                           const GridSpec& grid, double c_margin, double rise_margin) {
    const double h = d.horizon();
    if (!(s > -h && s < 0)) fail("invalid-domain", "scenario_prop5 requires s in (-h, 0)");
    if (!(b > 0)) fail("invalid-domain", "scenario_prop5 requires b > 0");
    if (!(rise_margin > 0 && rise_margin < 1))
        fail("invalid-domain", "rise margin must lie in (0, 1)");

    // delta(w) > s for w >= w_s, by monotone inversion of delta.
    const double w_star = solve_increasing(d.delta().value, s, -8.0, 8.0);
    const double w_s = w_star + 0.1;
    // v(c~) > w_s / h for all c~ >= c.
    const double c0 = solve_increasing(d.v().value, w_s / h, 0.0, 1.0);
    const double c = c0 + c_margin;

    const IntervalFunction phi = IntervalFunction::constant(c, h, grid);
    const double beta = rise_margin * b / (2.0 * std::abs(s));
    const IntervalFunction psi = IntervalFunction::fit(
        [c, s, beta](double t) { return t <= s ? c : c + beta * (t - s) * (t - s); },
        [s, beta](double t) { return t <= s ? 0.0 : 2 * beta * (t - s); }, h, grid, {s});

    const double d_psi = d.eval(psi);
    if (!(d_psi > s))
        fail("parameter-search-failed", "constructed psi has delay <= s; increase c margin");

    Prop5Result out{phi,
                    psi,
                    s,
                    w_s,
                    c,
                    d_psi,
                    F_eval(f, d, phi),
                    F_eval(f, d, psi),
                    0.0};
    out.gap = std::abs(out.F_phi - out.F_psi);
    return out;
}

Prop6Result scenario_prop6(const IntegralDelay& d, const SubspaceZ& Z, double b,
                           const GridSpec& grid) {
    if (!(b > 0)) fail("invalid-domain", "scenario_prop6 requires b > 0");
    const double h = d.horizon();
    IntervalFunction phi = Z.kernel_basis(1).front();

    auto signed_max = [&](const IntervalFunction& g) {
        double best = -std::numeric_limits<double>::infinity();
        const int M = g.norm_samples();
        for (int j = 0; j <= M; ++j) best = std::max(best, g.eval(-h + (j * h) / M));
        return best;
    };
    if (signed_max(phi) <= 0) phi = scale(-1.0, phi);
    if (signed_max(phi) <= 0)
        fail("kernel-search-failed", "kernel element has no positive part after sign flip");

    const double md = max_abs_deriv_on(phi, -h, 0.0);
    if (md > 0) phi = scale(0.99 * (b / 2.0) / md, phi);

    for (const LinearFunctional& ell : Z.functionals())
        if (std::abs(ell.apply(phi)) > 1e-8)
            fail("contract-violation", "kernel element left the subspace Z");

    Prop6Result out{phi, d.eval(phi), d.eval(scale(2.0, phi)), d.eval(scale(4.0, phi)), 0.0,
                    0.0};
    out.gap12 = std::abs(out.d1 - out.d2);
    out.gap24 = std::abs(out.d2 - out.d4);
    (void)grid;
    return out;
}

}  // namespace ddechart
