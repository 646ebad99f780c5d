#include "ddechart/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ddechart/error.hpp"

namespace ddechart {

namespace {

std::vector<double> uniform_nodes(double h, int N) {
    std::vector<double> t(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) t[static_cast<std::size_t>(i)] = -h + (i * h) / N;
    t.front() = -h;
    t.back() = 0.0;
    return t;
}

std::vector<double> merge_nodes(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

void GridSpec::validate() const {
    if (N < 8) fail("invalid-domain", "GridSpec.N must be >= 8");
    if (M < 16 * N) fail("invalid-domain", "GridSpec.M must be >= 16*N");
}

IntervalFunction::IntervalFunction(double h, std::vector<double> nodes,
                                   std::vector<double> values, std::vector<double> derivs,
                                   int norm_samples)
    : h_(h),
      series_(std::move(nodes), std::move(values), std::move(derivs)),
      norm_samples_(norm_samples) {
    if (!(h > 0)) fail("invalid-domain", "history length h must be positive");
    const double tol = 1e-12 * h;
    if (std::abs(series_.front_time() + h) > tol)
        fail("invalid-domain", "first node must equal -h");
    if (std::abs(series_.back_time()) > tol) fail("invalid-domain", "last node must equal 0");
    if (norm_samples_ < 16) fail("invalid-domain", "norm sampling resolution too small");
}

IntervalFunction IntervalFunction::constant(double y, double h, const GridSpec& grid) {
    if (!(h > 0)) fail("invalid-domain", "make_constant requires h > 0");
    grid.validate();
    auto t = uniform_nodes(h, grid.N);
    std::vector<double> v(t.size(), y), d(t.size(), 0.0);
    return IntervalFunction(h, std::move(t), std::move(v), std::move(d), grid.M);
}

IntervalFunction IntervalFunction::fit(const std::function<double(double)>& value,
                                       const std::function<double(double)>& deriv, double h,
                                       const GridSpec& grid,
                                       const std::vector<double>& extra_nodes) {
    if (!(h > 0)) fail("invalid-domain", "fit requires h > 0");
    grid.validate();
    auto t = uniform_nodes(h, grid.N);
    if (!extra_nodes.empty()) {
        std::vector<double> extras;
        for (double x : extra_nodes)
            if (x > -h && x < 0) extras.push_back(x);
        std::sort(extras.begin(), extras.end());
        t = merge_nodes(t, extras);
    }
    std::vector<double> v(t.size()), d(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        v[i] = value(t[i]);
        d[i] = deriv(t[i]);
    }
    return IntervalFunction(h, std::move(t), std::move(v), std::move(d), grid.M);
}

double IntervalFunction::eval(double t) const {
    const double slack = 1e-9 * h_;
    if (t < -h_ - slack || t > slack)
        fail("out-of-range", "evaluation point outside [-h, 0]");
    return series_.value(std::clamp(t, -h_, 0.0));
}

double IntervalFunction::eval_deriv(double t) const {
    const double slack = 1e-9 * h_;
    if (t < -h_ - slack || t > slack)
        fail("out-of-range", "evaluation point outside [-h, 0]");
    return series_.deriv(std::clamp(t, -h_, 0.0));
}

double ev_diff(const IntervalFunction& phi, double t, const IntervalFunction& phi_hat,
               double t_hat) {
    if (!(t > -phi.h() && t < 0))
        fail("out-of-range", "ev_diff requires t in the open interval (-h, 0)");
    return phi_hat.eval(t) + phi.eval_deriv(t) * t_hat;
}

namespace {

template <typename F>
double sampled_max(const IntervalFunction& phi, int M, double lo, double hi, F&& f) {
    double best = 0.0;
    const double h = phi.h();
    for (int j = 0; j <= M; ++j) {
        const double t = -h + (j * h) / M;
        if (t < lo || t > hi) continue;
        best = std::max(best, std::abs(f(t)));
    }
    for (double t : phi.nodes()) {
        if (t < lo || t > hi) continue;
        best = std::max(best, std::abs(f(t)));
    }
    best = std::max(best, std::abs(f(lo)));
    best = std::max(best, std::abs(f(hi)));
    return best;
}

}  // namespace

double norm_C(const IntervalFunction& phi, int M_override) {
    const int M = M_override > 0 ? M_override : phi.norm_samples();
    return sampled_max(phi, M, -phi.h(), 0.0, [&](double t) { return phi.eval(t); });
}

double norm_C1(const IntervalFunction& phi, int M_override) {
    const int M = M_override > 0 ? M_override : phi.norm_samples();
    const double nv = sampled_max(phi, M, -phi.h(), 0.0, [&](double t) { return phi.eval(t); });
    const double nd =
        sampled_max(phi, M, -phi.h(), 0.0, [&](double t) { return phi.eval_deriv(t); });
    return nv + nd;
}

double max_abs_on(const IntervalFunction& phi, double lo, double hi) {
    if (!(lo <= hi)) fail("invalid-domain", "max_abs_on requires lo <= hi");
    return sampled_max(phi, phi.norm_samples(), lo, hi, [&](double t) { return phi.eval(t); });
}

double max_abs_deriv_on(const IntervalFunction& phi, double lo, double hi) {
    if (!(lo <= hi)) fail("invalid-domain", "max_abs_deriv_on requires lo <= hi");
    return sampled_max(phi, phi.norm_samples(), lo, hi,
                       [&](double t) { return phi.eval_deriv(t); });
}

IntervalFunction axpy(double a, const IntervalFunction& x, const IntervalFunction& y) {
    if (std::abs(x.h() - y.h()) > 1e-12 * std::max(x.h(), y.h()))
        fail("incompatible-domain", "axpy requires matching history length h");
    auto t = merge_nodes(x.nodes(), y.nodes());
    std::vector<double> v(t.size()), d(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        v[i] = a * x.eval(t[i]) + y.eval(t[i]);
        d[i] = a * x.eval_deriv(t[i]) + y.eval_deriv(t[i]);
    }
    return IntervalFunction(y.h(), std::move(t), std::move(v), std::move(d),
                            std::max(x.norm_samples(), y.norm_samples()));
}

IntervalFunction scale(double a, const IntervalFunction& x) {
    std::vector<double> v = x.values(), d = x.derivs();
    for (auto& q : v) q *= a;
    for (auto& q : d) q *= a;
    return IntervalFunction(x.h(), x.nodes(), std::move(v), std::move(d), x.norm_samples());
}

std::string to_json(const IntervalFunction& phi) {
    nlohmann::ordered_json j;
    j["h"] = phi.h();
    j["nodes"] = phi.nodes();
    j["values"] = phi.values();
    j["derivs"] = phi.derivs();
    return j.dump(2);
}

IntervalFunction interval_function_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail("io-error", std::string("bad IntervalFunction JSON: ") + e.what());
    }
    if (!j.contains("h") || !j.contains("nodes") || !j.contains("values") ||
        !j.contains("derivs"))
        fail("io-error", "IntervalFunction JSON needs fields h, nodes, values, derivs");
    const double h = j["h"].get<double>();
    auto nodes = j["nodes"].get<std::vector<double>>();
    auto values = j["values"].get<std::vector<double>>();
    auto derivs = j["derivs"].get<std::vector<double>>();
    const int M = std::max<int>(2048, 16 * (static_cast<int>(nodes.size()) - 1));
    return IntervalFunction(h, std::move(nodes), std::move(values), std::move(derivs), M);
}

std::string to_csv(const IntervalFunction& phi) {
    std::ostringstream out;
    out.precision(17);
    out << "t,value,deriv\n";
    for (std::size_t i = 0; i < phi.nodes().size(); ++i)
        out << phi.nodes()[i] << ',' << phi.values()[i] << ',' << phi.derivs()[i] << '\n';
    return out.str();
}

}  // namespace ddechart
