#include "ddechart/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ddechart/error.hpp"

namespace ddechart {

namespace {

const std::map<std::string, std::string>& default_entries() {
    static const std::map<std::string, std::string> defaults = {
        {"h", "1.0"},
        {"b", "1.0"},
        {"seed", "12345"},
        {"out", "out"},
        {"grid.N", "64"},
        {"grid.M", "2048"},
        {"f.preset", "sin"},
        {"f.coeffs", ""},
        {"delay.preset", "reference"},
        {"delay.Q", "8"},
        {"delay.delta.file", ""},
        {"delay.v.file", ""},
        {"delay.delta.sup_deriv", ""},
        {"delay.v.sup_deriv", ""},
        {"tol.residual", "1e-10"},
        {"tol.roundtrip", "1e-8"},
        {"transversal.samples", "1000"},
        {"transversal.vmax", "10"},
        {"roundtrip.samples", "200"},
        {"chart.input", ""},
        {"invert.input", ""},
        {"invert.r0", ""},
        {"integrate.t_end", "1.0"},
        {"integrate.dt", "0.001"},
        {"integrate.K", "3"},
        {"integrate.phi0", "find-point"},
        {"prop4.nmax", "10"},
        {"prop5.s", "-0.5"},
        {"prop5.f", "identity"},
        {"prop5.c_margin", "1.0"},
        {"prop6.kernel", "value@-1"},
        {"selftest.samples", "200"},
    };
    return defaults;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig::RunConfig() : entries_(default_entries()) {}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("io-error", "cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("config-invalid",
                 path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (default_entries().find(key) == default_entries().end())
        fail("config-invalid", "unknown config key: " + key);
    entries_[key] = value;
}

void RunConfig::apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        fail("config-invalid", "--set expects key=value, got: " + kv);
    set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
}

bool RunConfig::has(const std::string& key) const {
    auto it = entries_.find(key);
    return it != entries_.end() && !it->second.empty();
}

std::string RunConfig::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) fail("config-invalid", "unknown config key: " + key);
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        std::size_t pos = 0;
        const double x = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return x;
    } catch (const std::exception&) {
        fail("config-invalid", "config key '" + key + "' is not a number: '" + s + "'");
    }
}

int RunConfig::get_int(const std::string& key) const {
    const double x = get_double(key);
    if (x != std::floor(x)) fail("config-invalid", "config key '" + key + "' must be integer");
    return static_cast<int>(x);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    const std::string s = get_string(key);
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size())
        fail("config-invalid", "config key '" + key + "' is not a u64: '" + s + "'");
    return x;
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail("config-invalid", "config key '" + key + "' has a bad number: '" + item + "'");
        }
    }
    return out;
}

GridSpec RunConfig::grid() const {
    GridSpec g{get_int("grid.N"), get_int("grid.M")};
    try {
        g.validate();
    } catch (const Error& e) {
        fail("config-invalid", e.what());
    }
    return g;
}

ScalarField RunConfig::make_f(const std::string& preset_key) const {
    const std::string preset = get_string(preset_key);
    if (preset == "sin") return fields::sine();
    if (preset == "square") return fields::square();
    if (preset == "identity") return fields::identity();
    if (preset == "poly") {
        if (!has("f.coeffs"))
            fail("config-invalid", "f.preset=poly requires f.coeffs (comma separated)");
        return fields::polynomial(get_doubles("f.coeffs"));
    }
    fail("config-invalid",
         "unknown " + preset_key + " '" + preset + "' (sin | square | identity | poly)");
}

namespace {

ScalarField load_tabulated(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("io-error", "cannot open tabulated field file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("config-invalid", "bad tabulated field JSON in " + path + ": " + e.what());
    }
    if (!j.contains("xs") || !j.contains("values") || !j.contains("derivs"))
        fail("config-invalid", "tabulated field needs fields xs, values, derivs: " + path);
    return fields::tabulated(j["xs"].get<std::vector<double>>(),
                             j["values"].get<std::vector<double>>(),
                             j["derivs"].get<std::vector<double>>());
}

}  // namespace

std::shared_ptr<IntegralDelay> RunConfig::make_delay() const {
    const double h = get_double("h");
    const int Q = get_int("delay.Q");
    const std::string preset = get_string("delay.preset");
    if (preset == "reference") return IntegralDelay::reference(h, Q);
    if (preset == "custom") {
        if (!has("delay.delta.file") || !has("delay.v.file"))
            fail("config-invalid",
                 "delay.preset=custom requires delay.delta.file and delay.v.file");
        if (!has("delay.delta.sup_deriv") || !has("delay.v.sup_deriv"))
            fail("config-invalid",
                 "delay.preset=custom requires certified bounds delay.delta.sup_deriv and "
                 "delay.v.sup_deriv");
        return std::make_shared<IntegralDelay>(
            h, load_tabulated(get_string("delay.delta.file")),
            load_tabulated(get_string("delay.v.file")), get_double("delay.delta.sup_deriv"),
            get_double("delay.v.sup_deriv"), Q);
    }
    fail("config-invalid", "unknown delay.preset '" + preset + "' (reference | custom)");
}

ChartAtlas RunConfig::make_atlas() const {
    return ChartAtlas(make_f(), make_delay(), get_double("b"), grid());
}

void RunConfig::validate() const {
    if (!(get_double("h") > 0)) fail("config-invalid", "h must be positive");
    if (!(get_double("b") > 0)) fail("config-invalid", "b must be positive");
    (void)grid();
    for (const char* key : {"tol.residual", "tol.roundtrip"})
        if (!(get_double(key) > 0)) fail("config-invalid", std::string(key) + " must be > 0");
    for (const char* key :
         {"transversal.samples", "roundtrip.samples", "prop4.nmax", "selftest.samples",
          "integrate.K"})
        if (get_int(key) < 1) fail("config-invalid", std::string(key) + " must be >= 1");
    if (!(get_double("integrate.dt") > 0)) fail("config-invalid", "integrate.dt must be > 0");
    if (!(get_double("integrate.t_end") > 0))
        fail("config-invalid", "integrate.t_end must be > 0");
    const double s = get_double("prop5.s");
    if (!(s > -get_double("h") && s < 0))
        fail("config-invalid", "prop5.s must lie in (-h, 0)");
    (void)make_f();
    (void)make_f("prop5.f");
}

}  // namespace ddechart
