#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddechart/chart.hpp"
#include "ddechart/config.hpp"
#include "ddechart/ddeint.hpp"
#include "ddechart/error.hpp"
#include "ddechart/manifold.hpp"
#include "ddechart/sampling.hpp"

namespace fs = std::filesystem;
using namespace ddechart;

namespace {

class Report {
public:
    Report(std::string command, const RunConfig& cfg) : command_(std::move(command)) {
        json_["command"] = command_;
        nlohmann::ordered_json echo;
        for (const auto& [k, v] : cfg.entries()) echo[k] = v;
        json_["config"] = echo;
        json_["seed"] = cfg.get_u64("seed");
        json_["checks"] = nlohmann::ordered_json::array();
        json_["metrics"] = nlohmann::ordered_json::object();
    }

    void check(const std::string& name, bool pass, double value, double threshold) {
        nlohmann::ordered_json c;
        c["name"] = name;
        c["pass"] = pass;
        c["value"] = value;
        c["threshold"] = threshold;
        json_["checks"].push_back(c);
        all_pass_ = all_pass_ && pass;
    }

    template <typename T>
    void metric(const std::string& name, const T& value) {
        json_["metrics"][name] = value;
    }

    bool all_pass() const { return all_pass_; }

    void save(const fs::path& path) {
        json_["pass"] = all_pass_;
        std::ofstream out(path, std::ios::binary);
        if (!out) fail("io-error", "cannot write report: " + path.string());
        out << json_.dump(2) << '\n';
    }

private:
    std::string command_;
    nlohmann::ordered_json json_;
    bool all_pass_ = true;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("io-error", "cannot write file: " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("io-error", "cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.get_string("out"));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail("io-error", "cannot create output directory: " + dir.string());
    return dir;
}

IntervalFunction load_phi(const RunConfig& cfg, const std::string& key) {
    if (!cfg.has(key))
        fail("config-invalid", "missing input file: set " + key + "=<path to phi JSON>");
    return interval_function_from_json(read_text(cfg.get_string(key)));
}

double c1_distance(const IntervalFunction& a, const IntervalFunction& b) {
    return norm_C1(axpy(-1.0, a, b));
}

// ---------------------------------------------------------------- commands

int cmd_find_point(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("find-point", cfg);
    const ScalarField f = cfg.make_f();
    const auto d = cfg.make_delay();
    const double tol = cfg.get_double("tol.residual");
    const FindPointResult res = find_point(f, *d, tol, cfg.grid());

    report.metric("s", res.s);
    report.metric("c", res.c);
    report.metric("oscillation_M", res.oscillation);
    report.metric("residual", res.residual);
    report.metric("norm_C", norm_C(res.phi));
    report.check("residual_within_tol", std::abs(res.residual) <= tol,
                 std::abs(res.residual), tol);
    report.check("norm_C_at_most_1", norm_C(res.phi) <= 1.0 + 1e-12, norm_C(res.phi),
                 1.0 + 1e-12);
    bool halves = true;
    for (std::size_t i = 0; i + 1 < res.bisection.size(); ++i) {
        const double w0 = res.bisection[i].hi - res.bisection[i].lo;
        const double w1 = res.bisection[i + 1].hi - res.bisection[i + 1].lo;
        if (w1 > 0.5 * w0 * (1 + 1e-12)) halves = false;
    }
    report.check("bisection_interval_halves", halves, halves ? 0.0 : 1.0, 0.0);

    write_text(out / "find_point.json", to_json(res.phi));
    std::ostringstream csv;
    csv.precision(17);
    csv << "k,lo,hi,mid,z\n";
    for (std::size_t k = 0; k < res.bisection.size(); ++k)
        csv << k << ',' << res.bisection[k].lo << ',' << res.bisection[k].hi << ','
            << res.bisection[k].mid << ',' << res.bisection[k].f_mid << '\n';
    write_text(out / "find_point_log.csv", csv.str());
    report.save(out / "find_point_report.json");
    return report.all_pass() ? 0 : 1;
}

int cmd_chart(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("chart", cfg);
    const ChartAtlas atlas = cfg.make_atlas();
    const IntervalFunction phi = load_phi(cfg, "chart.input");
    const IntervalFunction image = atlas.chart_forward(phi);

    const double res_phi = residual(atlas.f(), atlas.delay(), phi);
    const double d_phi = atlas.delay().eval(phi);
    report.metric("d_phi", d_phi);
    report.metric("residual_phi", res_phi);
    report.metric("image_deriv_at_0", image.eval_deriv(0.0));
    // Pi(phi)'(0) = phi'(0) - f(phi(d(phi))) = residual(phi) identically.
    report.check("image_deriv_equals_residual",
                 std::abs(image.eval_deriv(0.0) - res_phi) <= 1e-10,
                 std::abs(image.eval_deriv(0.0) - res_phi), 1e-10);
    const double tail = max_abs_on(axpy(-1.0, phi, image), -atlas.h(), d_phi);
    report.check("identity_below_delay", tail == 0.0, tail, 0.0);

    write_text(out / "chart_image.json", to_json(image));
    report.save(out / "chart_report.json");
    return report.all_pass() ? 0 : 1;
}

void write_convergence_csv(const fs::path& path, const std::vector<double>& iterates) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "k,r_k,abs_delta\n";
    for (std::size_t k = 0; k < iterates.size(); ++k) {
        const double delta = k == 0 ? 0.0 : std::abs(iterates[k] - iterates[k - 1]);
        csv << k << ',' << iterates[k] << ',' << delta << '\n';
    }
    write_text(path, csv.str());
}

bool contraction_ok(const std::vector<double>& iterates) {
    for (std::size_t k = 2; k < iterates.size(); ++k) {
        const double prev = std::abs(iterates[k - 1] - iterates[k - 2]);
        const double cur = std::abs(iterates[k] - iterates[k - 1]);
        if (cur > 0.5 * prev * (1 + 1e-6)) return false;
    }
    return true;
}

int cmd_invert_chart(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("invert-chart", cfg);
    const ChartAtlas atlas = cfg.make_atlas();
    const IntervalFunction psi = load_phi(cfg, "invert.input");
    std::optional<double> r0;
    if (cfg.has("invert.r0")) r0 = cfg.get_double("invert.r0");
    const ChartAtlas::InverseResult res = atlas.chart_inverse(psi, r0);

    const double fp_res = std::abs(atlas.delay().eval(res.phi) - res.r);
    report.metric("r", res.r);
    report.metric("iterations", static_cast<int>(res.iterates.size()) - 1);
    report.metric("fixed_point_residual", fp_res);
    report.check("fixed_point_residual", fp_res <= atlas.fixed_point_tol() * 2, fp_res,
                 atlas.fixed_point_tol() * 2);
    report.check("phi_in_Ub", in_Ub(atlas.delay(), res.phi, atlas.b()), 1.0, 1.0);
    report.check("contraction_rate_half", contraction_ok(res.iterates), 0.0, 0.5);

    write_text(out / "invert_phi.json", to_json(res.phi));
    write_convergence_csv(out / "invert_convergence.csv", res.iterates);
    report.save(out / "invert_report.json");
    return report.all_pass() ? 0 : 1;
}

int cmd_roundtrip(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("roundtrip", cfg);
    const ChartAtlas atlas = cfg.make_atlas();
    const double tol = cfg.get_double("tol.roundtrip");
    Rng rng(cfg.get_u64("seed"));

    std::vector<IntervalFunction> inputs;
    if (cfg.has("chart.input")) {
        inputs.push_back(load_phi(cfg, "chart.input"));
    } else {
        const int n = cfg.get_int("roundtrip.samples");
        for (int i = 0; i < n; ++i)
            inputs.push_back(random_c1(rng, atlas.h(), cfg.grid(), atlas.b(), 1.0));
    }

    double worst_c1 = 0.0, worst_r = 0.0;
    bool rates_ok = true;
    std::vector<double> worst_iterates;
    for (const IntervalFunction& phi : inputs) {
        const IntervalFunction psi = atlas.chart_forward(phi);
        const ChartAtlas::InverseResult res = atlas.chart_inverse(psi);
        const double e1 = c1_distance(phi, res.phi);
        const double er = std::abs(res.r - atlas.delay().eval(phi));
        if (e1 > worst_c1) {
            worst_c1 = e1;
            worst_iterates = res.iterates;
        }
        worst_r = std::max(worst_r, er);
        rates_ok = rates_ok && contraction_ok(res.iterates);
    }
    report.metric("samples", static_cast<int>(inputs.size()));
    report.metric("worst_c1_error", worst_c1);
    report.metric("worst_r_error", worst_r);
    report.check("roundtrip_c1_error", worst_c1 <= tol, worst_c1, tol);
    report.check("roundtrip_r_error", worst_r <= 1e-10, worst_r, 1e-10);
    report.check("contraction_rate_half", rates_ok, rates_ok ? 0.0 : 1.0, 0.0);

    if (!worst_iterates.empty())
        write_convergence_csv(out / "roundtrip_convergence.csv", worst_iterates);
    report.save(out / "roundtrip_report.json");
    return report.all_pass() ? 0 : 1;
}

int cmd_verify_transversal(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("verify-transversal", cfg);
    const ChartAtlas atlas = cfg.make_atlas();
    const TransversalFamily& fam = atlas.family();
    const double h = atlas.h();
    const int samples = cfg.get_int("transversal.samples");
    const double vmax = cfg.get_double("transversal.vmax");
    Rng rng(cfg.get_u64("seed"));

    std::ostringstream csv;
    csv.precision(17);
    csv << "v,r,n,d0err,suppmax,normC,Hv,worst_dchi\n";
    double worst_d0 = 0.0, worst_supp = 0.0, worst_norm_ratio = 0.0, worst_dchi_ratio = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double v = rng.uniform(-vmax, vmax);
        const double r = rng.uniform(-0.99 * h, -0.01 * h);
        const IntervalFunction c = fam.chi(v, r);
        const int n = fam.domain_index(v, r);
        const double d0err = std::abs(c.eval_deriv(0.0) - 1.0);
        const double suppmax = max_abs_on(c, -h, r);
        const double nc = norm_C(c);
        const double Hv = fam.H(v);
        double worst_dchi = 0.0;
        for (int k = 0; k < 16; ++k) {
            double vhat, rhat;
            random_direction(rng, vhat, rhat);
            worst_dchi = std::max(worst_dchi, norm_C(fam.dchi(v, r, vhat, rhat)));
        }
        csv << v << ',' << r << ',' << n << ',' << d0err << ',' << suppmax << ',' << nc << ','
            << Hv << ',' << worst_dchi << '\n';
        worst_d0 = std::max(worst_d0, d0err);
        worst_supp = std::max(worst_supp, suppmax);
        worst_norm_ratio = std::max(worst_norm_ratio, nc / Hv);
        worst_dchi_ratio = std::max(worst_dchi_ratio, worst_dchi / Hv);
    }
    report.metric("samples", samples);
    report.metric("worst_d0err", worst_d0);
    report.metric("worst_suppmax", worst_supp);
    report.metric("worst_normC_over_H", worst_norm_ratio);
    report.metric("worst_dchi_over_H", worst_dchi_ratio);
    report.check("deriv_at_0_is_1", worst_d0 <= 1e-10, worst_d0, 1e-10);
    report.check("vanishes_below_r", worst_supp == 0.0, worst_supp, 0.0);
    report.check("normC_below_H", worst_norm_ratio <= 1.0, worst_norm_ratio, 1.0);
    report.check("dchi_below_H", worst_dchi_ratio <= 1.0 + 1e-9, worst_dchi_ratio,
                 1.0 + 1e-9);

    write_text(out / "transversal.csv", csv.str());
    report.save(out / "transversal_report.json");
    return report.all_pass() ? 0 : 1;
}

int cmd_integrate(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("integrate", cfg);
    const ScalarField f = cfg.make_f();
    const auto d = cfg.make_delay();
    const double t_end = cfg.get_double("integrate.t_end");
    const double dt = cfg.get_double("integrate.dt");
    const int K = cfg.get_int("integrate.K");

    IntervalFunction phi0 =
        cfg.get_string("integrate.phi0") == "find-point"
            ? find_point(f, *d, cfg.get_double("tol.residual"), cfg.grid()).phi
            : interval_function_from_json(read_text(cfg.get_string("integrate.phi0")));

    const Trajectory traj = integrate(f, *d, phi0, t_end, dt, K);
    if (std::abs(traj.initial_residual()) > 1e-6)
        std::cerr << "warning: phi0 residual " << traj.initial_residual()
                  << " exceeds 1e-6; the solution is only C^0 at t=0\n";

    const std::vector<double> times = traj.step_times();
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,x,xdot,delay,residual\n";
    double max_res = 0.0;
    for (double t : times) {
        const IntervalFunction seg = traj.segment(t);
        const double delay = d->eval(seg);
        const double res = residual(f, *d, seg);
        max_res = std::max(max_res, std::abs(res));
        csv << t << ',' << traj.eval(t) << ',' << traj.eval_deriv(t) << ',' << delay << ','
            << res << '\n';
    }
    report.metric("steps", static_cast<int>(times.size()) - 1);
    report.metric("initial_residual", traj.initial_residual());
    report.metric("max_node_residual", max_res);

    // C^1 continuity of the stored history across step boundaries.
    double worst_jump = 0.0;
    const auto& nodes = traj.history().nodes();
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const double t = nodes[i];
        const double left = traj.eval_deriv(std::nextafter(t, t - 1));
        const double right = traj.eval_deriv(std::nextafter(t, t + 1));
        worst_jump = std::max(worst_jump, std::abs(left - right));
    }
    report.check("history_c1_jumps", worst_jump <= 1e-10, worst_jump, 1e-10);

    write_text(out / "trajectory.csv", csv.str());
    report.save(out / "integrate_report.json");
    return report.all_pass() ? 0 : 1;
}

int cmd_scenario_prop4(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("scenario-prop4", cfg);
    const ScalarField f = cfg.make_f();
    const auto d = cfg.make_delay();
    const Prop4Result res =
        scenario_prop4(f, *d, cfg.get_double("b"), cfg.get_int("prop4.nmax"), cfg.grid());

    std::ostringstream csv;
    csv.precision(17);
    csv << "n,abs_DeF\n";
    for (const auto& row : res.rows) csv << row.n << ',' << row.value << '\n';
    write_text(out / "prop4_table.csv", csv.str());

    report.metric("hypothesis_7",
                  res.unbounded_evidence ? std::string("satisfied (strictly increasing)")
                                         : std::string("hypothesis (7) not satisfied"));
    if (cfg.get_string("f.preset") == "square") {
        double worst = 0.0;
        for (const auto& row : res.rows)
            worst = std::max(worst, std::abs(row.value - 2.0 * row.n));
        report.check("value_equals_2n", worst <= 1e-8, worst, 1e-8);
        report.check("strictly_increasing", res.unbounded_evidence,
                     res.unbounded_evidence ? 1.0 : 0.0, 1.0);
    }
    report.save(out / "prop4_report.json");
    return report.all_pass() ? 0 : 1;
}

int cmd_scenario_prop5(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("scenario-prop5", cfg);
    const ScalarField f = cfg.make_f("prop5.f");
    const auto d = cfg.make_delay();
    const double b = cfg.get_double("b");
    const double h = cfg.get_double("h");
    const double s = cfg.get_double("prop5.s");
    const double c_margin = cfg.get_double("prop5.c_margin");

    // Table over a spread of separation times plus the configured one.
    std::ostringstream csv;
    csv.precision(17);
    csv << "s,F_gap,d_psi,c,w_s\n";
    for (int i = 1; i <= 9; ++i) {
        const double si = -h * i / 10.0;
        const Prop5Result row = scenario_prop5(f, *d, b, si, cfg.grid(), c_margin);
        csv << si << ',' << row.gap << ',' << row.d_psi << ',' << row.c << ',' << row.w_s
            << '\n';
    }
    const Prop5Result res = scenario_prop5(f, *d, b, s, cfg.grid(), c_margin);
    csv << s << ',' << res.gap << ',' << res.d_psi << ',' << res.c << ',' << res.w_s << '\n';
    write_text(out / "prop5_table.csv", csv.str());

    double agree = 0.0;
    for (std::size_t i = 0; i < res.phi.nodes().size(); ++i) {
        const double t = res.phi.nodes()[i];
        if (t <= s)
            agree = std::max(agree, std::abs(res.phi.values()[i] - res.psi.eval(t)));
    }
    report.metric("F_phi", res.F_phi);
    report.metric("F_psi", res.F_psi);
    report.metric("gap", res.gap);
    report.metric("d_psi", res.d_psi);
    report.metric("plateau_c", res.c);
    report.check("F_gap_positive", res.gap > 1e-3, res.gap, 1e-3);
    report.check("agree_on_left_interval", agree == 0.0, agree, 0.0);
    report.check("delay_above_s", res.d_psi > s, res.d_psi, s);
    report.save(out / "prop5_report.json");
    return report.all_pass() ? 0 : 1;
}

LinearFunctional parse_functional(const std::string& spec) {
    LinearFunctional ell;
    std::stringstream ss(spec);
    std::string term;
    while (std::getline(ss, term, ',')) {
        const auto at = term.find('@');
        if (at == std::string::npos)
            fail("config-invalid",
                 "prop6.kernel term '" + term + "' must look like value@t or deriv@t");
        const std::string kind = term.substr(0, at);
        std::string rest = term.substr(at + 1);
        double coeff = 1.0;
        const auto star = rest.find('*');
        if (star != std::string::npos) {
            coeff = std::stod(rest.substr(star + 1));
            rest = rest.substr(0, star);
        }
        const double t = std::stod(rest);
        if (kind == "value")
            ell.points.push_back({t, coeff, false});
        else if (kind == "deriv")
            ell.points.push_back({t, coeff, true});
        else
            fail("config-invalid", "prop6.kernel kind must be 'value' or 'deriv'");
    }
    if (ell.points.empty()) fail("config-invalid", "empty functional in prop6.kernel");
    return ell;
}

int cmd_scenario_prop6(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("scenario-prop6", cfg);
    const auto d = cfg.make_delay();
    const double h = cfg.get_double("h");

    std::vector<LinearFunctional> functionals;
    std::stringstream ss(cfg.get_string("prop6.kernel"));
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) functionals.push_back(parse_functional(item));
    const SubspaceZ Z(std::move(functionals), h, cfg.grid());

    const Prop6Result res = scenario_prop6(*d, Z, cfg.get_double("b"), cfg.grid());

    std::ostringstream csv;
    csv.precision(17);
    csv << "scale,delay,gap_to_prev\n";
    csv << 1 << ',' << res.d1 << ',' << 0.0 << '\n';
    csv << 2 << ',' << res.d2 << ',' << res.gap12 << '\n';
    csv << 4 << ',' << res.d4 << ',' << res.gap24 << '\n';
    write_text(out / "prop6_table.csv", csv.str());
    write_text(out / "prop6_phi.json", to_json(res.phi));

    report.metric("codimension", static_cast<int>(Z.codimension()));
    report.metric("d_phi", res.d1);
    report.metric("d_2phi", res.d2);
    report.metric("d_4phi", res.d4);
    report.metric("gap_1_2", res.gap12);
    report.metric("gap_2_4", res.gap24);
    report.check("d_not_constant_on_Z", res.gap12 > 1e-12, res.gap12, 1e-12);
    report.check("doubling_again", res.gap24 > 1e-12, res.gap24, 1e-12);
    report.save(out / "prop6_report.json");
    return report.all_pass() ? 0 : 1;
}

int cmd_selftest(const RunConfig& cfg) {
    const fs::path out = ensure_out_dir(cfg);
    Report report("selftest", cfg);
    const int samples = cfg.get_int("selftest.samples");
    const double h = cfg.get_double("h");
    const GridSpec grid = cfg.grid();
    Rng rng(cfg.get_u64("seed"));

    // funcspace: cubic reproduction, C^1 continuity, norm homogeneity.
    {
        const IntervalFunction p = IntervalFunction::fit(
            [](double t) { return ((2 * t - 1) * t + 3) * t - 0.5; },
            [](double t) { return (6 * t - 2) * t + 3; }, h, grid);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double t = rng.uniform(-h, 0.0);
            worst = std::max(worst,
                             std::abs(p.eval(t) - (((2 * t - 1) * t + 3) * t - 0.5)));
        }
        report.check("funcspace_cubic_reproduction", worst <= 1e-12, worst, 1e-12);

        const IntervalFunction s5 = IntervalFunction::fit(
            [](double t) { return std::sin(5 * t); }, [](double t) { return 5 * std::cos(5 * t); },
            h, grid);
        double jump = 0.0;
        for (std::size_t i = 1; i + 1 < s5.nodes().size(); ++i) {
            const double t = s5.nodes()[i];
            jump = std::max(jump, std::abs(s5.eval_deriv(std::nextafter(t, t - 1)) -
                                           s5.eval_deriv(std::nextafter(t, t + 1))));
        }
        report.check("funcspace_c1_continuity", jump <= 1e-12, jump, 1e-12);

        const double n1 = norm_C(scale(-2.5, s5)), n0 = norm_C(s5);
        report.check("funcspace_norm_homogeneity", std::abs(n1 - 2.5 * n0) <= 1e-12,
                     std::abs(n1 - 2.5 * n0), 1e-12);
    }

    // delay: derivative linearity and the finite-difference oracle.
    {
        const auto d = cfg.make_delay();
        const ScalarField f = cfg.make_f();
        double worst_lin = 0.0, worst_fd = 0.0;
        for (int i = 0; i < std::max(10, samples / 10); ++i) {
            const IntervalFunction phi = random_c1(rng, h, grid, 1.0, 1.0);
            const IntervalFunction c1f = random_c1(rng, h, grid, 1.0, 1.0);
            const IntervalFunction c2f = random_c1(rng, h, grid, 1.0, 1.0);
            const double a = rng.uniform(-2.0, 2.0);
            const double lhs = d->ext_deriv_apply(phi, axpy(a, c1f, c2f));
            const double rhs =
                a * d->ext_deriv_apply(phi, c1f) + d->ext_deriv_apply(phi, c2f);
            worst_lin = std::max(worst_lin, std::abs(lhs - rhs));

            const double eps = 1e-5;
            const double fd = (F_eval(f, *d, axpy(eps, c1f, phi)) -
                               F_eval(f, *d, axpy(-eps, c1f, phi))) /
                              (2 * eps);
            const double an = DF_apply(f, *d, phi, c1f, true);
            const double denom = std::max({std::abs(an), std::abs(fd), 1e-3});
            worst_fd = std::max(worst_fd, std::abs(fd - an) / denom);
        }
        report.check("delay_ext_deriv_linearity", worst_lin <= 1e-10, worst_lin, 1e-10);
        report.check("delay_DF_matches_fd", worst_fd <= 1e-5, worst_fd, 1e-5);
    }

    // transversal: the four defining properties on random samples.
    {
        const ChartAtlas atlas = cfg.make_atlas();
        const TransversalFamily& fam = atlas.family();
        double worst_d0 = 0.0, worst_supp = 0.0, worst_norm = 0.0, worst_dchi = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double v = rng.uniform(-10.0, 10.0);
            const double r = rng.uniform(-0.99 * h, -0.01 * h);
            const IntervalFunction c = fam.chi(v, r);
            worst_d0 = std::max(worst_d0, std::abs(c.eval_deriv(0.0) - 1.0));
            worst_supp = std::max(worst_supp, max_abs_on(c, -h, r));
            worst_norm = std::max(worst_norm, norm_C(c) / fam.H(v));
            double vhat, rhat;
            random_direction(rng, vhat, rhat);
            worst_dchi =
                std::max(worst_dchi, norm_C(fam.dchi(v, r, vhat, rhat)) / fam.H(v));
        }
        report.check("transversal_deriv_at_0", worst_d0 <= 1e-10, worst_d0, 1e-10);
        report.check("transversal_support", worst_supp == 0.0, worst_supp, 0.0);
        report.check("transversal_normC_bound", worst_norm <= 1.0, worst_norm, 1.0);
        report.check("transversal_dchi_bound", worst_dchi <= 1.0 + 1e-9, worst_dchi,
                     1.0 + 1e-9);
    }

    // chart: roundtrips, set preservation, contraction.
    {
        const ChartAtlas atlas = cfg.make_atlas();
        double worst_rt = 0.0, worst_d2 = 0.0;
        bool sets_ok = true, rates_ok = true;
        for (int i = 0; i < std::max(10, samples / 4); ++i) {
            const IntervalFunction phi = random_c1(rng, h, grid, atlas.b(), 1.0);
            const double r = random_r(rng, h);
            const StatePair sp{phi, r};
            const StatePair tsp = atlas.T_map(sp);
            const StatePair back = atlas.Y_map(tsp);
            worst_rt = std::max(worst_rt, c1_distance(phi, back.phi));
            sets_ok = sets_ok && in_Ub_times(tsp.phi, r, atlas.b()) &&
                      in_Ub_times(atlas.Y_map(sp).phi, r, atlas.b());
            worst_d2 = std::max(worst_d2, std::abs(atlas.d2dB(phi, r)));

            const IntervalFunction psi = atlas.chart_forward(phi);
            const ChartAtlas::InverseResult inv = atlas.chart_inverse(psi);
            worst_rt = std::max(worst_rt, c1_distance(phi, inv.phi));
            rates_ok = rates_ok && contraction_ok(inv.iterates);
        }
        report.check("chart_roundtrip_c1", worst_rt <= cfg.get_double("tol.roundtrip"),
                     worst_rt, cfg.get_double("tol.roundtrip"));
        report.check("chart_Ubx_preserved", sets_ok, sets_ok ? 1.0 : 0.0, 1.0);
        report.check("chart_d2dB_at_most_half", worst_d2 <= 0.5 + 1e-6, worst_d2, 0.5 + 1e-6);
        report.check("chart_contraction_rates", rates_ok, rates_ok ? 0.0 : 1.0, 0.0);
    }

    // manifold: find_point and the scenario inequalities.
    {
        const ScalarField f = cfg.make_f();
        const auto d = cfg.make_delay();
        const FindPointResult fp = find_point(f, *d, cfg.get_double("tol.residual"), grid);
        report.check("manifold_find_point_residual",
                     std::abs(fp.residual) <= cfg.get_double("tol.residual"),
                     std::abs(fp.residual), cfg.get_double("tol.residual"));

        const Prop4Result p4 = scenario_prop4(fields::square(), *d, cfg.get_double("b"), 10, grid);
        double worst4 = 0.0;
        for (const auto& row : p4.rows)
            worst4 = std::max(worst4, std::abs(row.value - 2.0 * row.n));
        report.check("manifold_prop4_2n", worst4 <= 1e-8, worst4, 1e-8);

        const Prop5Result p5 = scenario_prop5(cfg.make_f("prop5.f"), *d, cfg.get_double("b"),
                                              cfg.get_double("prop5.s"), grid,
                                              cfg.get_double("prop5.c_margin"));
        report.check("manifold_prop5_gap", p5.gap > 1e-3, p5.gap, 1e-3);

        SubspaceZ Z({LinearFunctional{{{-h, 1.0, false}}, std::nullopt}}, h, grid);
        const Prop6Result p6 = scenario_prop6(*d, Z, cfg.get_double("b"), grid);
        report.check("manifold_prop6_gap", p6.gap12 > 1e-12, p6.gap12, 1e-12);
    }

    // ddeint: closed forms.
    {
        const auto d = cfg.make_delay();
        const Trajectory eq = integrate(fields::sine(), *d,
                                        IntervalFunction::constant(0.0, h, grid), 1.0, 0.01);
        double worst_eq = 0.0;
        for (double t : {0.25, 0.5, 1.0}) worst_eq = std::max(worst_eq, std::abs(eq.eval(t)));
        report.check("ddeint_equilibrium", worst_eq <= 1e-10, worst_eq, 1e-10);

        const double gamma = 0.7;
        const ScalarField fg{[gamma](double) { return gamma; }, [](double) { return 0.0; }};
        const IntervalFunction aff = IntervalFunction::fit(
            [gamma](double t) { return 0.3 + gamma * t; }, [gamma](double) { return gamma; },
            h, grid);
        const Trajectory lin = integrate(fg, *d, aff, 1.0, 0.01);
        double worst_aff = 0.0;
        for (double t : {0.3, 0.77, 1.0})
            worst_aff = std::max(worst_aff, std::abs(lin.eval(t) - (0.3 + gamma * t)));
        report.check("ddeint_affine", worst_aff <= 1e-10, worst_aff, 1e-10);
    }

    report.save(out / "selftest_report.json");
    std::cout << (report.all_pass() ? "selftest: all checks passed\n"
                                    : "selftest: CHECK FAILURES (see report)\n");
    return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"charts and integration for the state-dependent delay equation "
                 "x'(t) = f(x(t + d(x_t)))"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--set", overrides, "override a config key (key=value, repeatable)");
    app.add_option("--out", out_dir, "output directory (default from config)");
    app.add_option("--seed", seed, "RNG seed recorded in reports");

    std::string scenario_name;
    CLI::App* selftest = app.add_subcommand("selftest", "run every module invariant check");
    CLI::App* verify = app.add_subcommand("verify-transversal",
                                          "check the transversal family properties");
    CLI::App* chart = app.add_subcommand("chart", "apply the forward chart to a state");
    CLI::App* invert = app.add_subcommand("invert-chart", "invert the chart at a state");
    CLI::App* roundtrip = app.add_subcommand("roundtrip", "forward+inverse chart checks");
    CLI::App* findp = app.add_subcommand("find-point", "locate a solution-manifold point");
    CLI::App* integ = app.add_subcommand("integrate", "method-of-steps integration");
    CLI::App* scenario = app.add_subcommand("scenario", "counterexample scenario tables");
    scenario->add_option("name", scenario_name, "prop4 | prop5 | prop6")->required();

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::from_file(config_path);
        for (const std::string& kv : overrides) cfg.apply_override(kv);
        if (!out_dir.empty()) cfg.set("out", out_dir);
        if (seed) cfg.set("seed", std::to_string(*seed));
        cfg.validate();

        if (selftest->parsed()) return cmd_selftest(cfg);
        if (verify->parsed()) return cmd_verify_transversal(cfg);
        if (chart->parsed()) return cmd_chart(cfg);
        if (invert->parsed()) return cmd_invert_chart(cfg);
        if (roundtrip->parsed()) return cmd_roundtrip(cfg);
        if (findp->parsed()) return cmd_find_point(cfg);
        if (integ->parsed()) return cmd_integrate(cfg);
        if (scenario->parsed()) {
            if (scenario_name == "prop4") return cmd_scenario_prop4(cfg);
            if (scenario_name == "prop5") return cmd_scenario_prop5(cfg);
            if (scenario_name == "prop6") return cmd_scenario_prop6(cfg);
            fail("config-invalid", "scenario name must be prop4, prop5 or prop6");
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (e.code() == "config-invalid") return 2;
        if (e.code() == "io-error") return 3;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
