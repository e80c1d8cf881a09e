#include "flq/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "flq/units.hpp"

namespace flq {

ReadoutConfig RunConfig::readout_config() const {
    ReadoutConfig rc;
    rc.drive = drive;
    rc.rates = engine.rates_angular ? rates.scaled(units::two_pi) : rates;
    rc.epsilon = epsilon;
    rc.t_max_ns = t_max_ns;
    rc.grid = grid;
    rc.target = target;
    rc.prob_model = prob_model;
    rc.m_override = engine.m_override;
    rc.truncation_tol = engine.truncation_tol;
    return rc;
}

void RunConfig::validate() const {
    readout_config().validate();
    if (engine.ode_rel_tol < 1e-12 || engine.ode_rel_tol > 1e-4)
        throw ValidationError("engine.ode_rel_tol must lie in [1e-12, 1e-4]");
    if (engine.threads < 0)
        throw ValidationError("engine.threads must be >= 0");
}

namespace {

bool matrix_equal(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
    return (a - b).cwiseAbs().maxCoeff() == 0.0;
}

} // namespace

bool RunConfig::operator==(const RunConfig& other) const {
    return drive == other.drive && matrix_equal(rates.relax, other.rates.relax) &&
           matrix_equal(rates.deph, other.rates.deph) && epsilon == other.epsilon &&
           t_max_ns == other.t_max_ns && grid == other.grid && target == other.target &&
           prob_model == other.prob_model && engine == other.engine;
}

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.drive.bx_tesla = 0.1;
    cfg.drive.g_ex = 0.24;
    cfg.drive.g_hx = 0.47;
    cfg.drive.omega1p_ghz = 200.0;
    cfg.drive.delta1_ghz = 2000.0;
    cfg.drive.omega2p_ghz = {0.5, 0.0};
    cfg.drive.omega2m_ghz = {0.5, 0.0};
    cfg.drive.delta2_ghz = 0.0;
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& raw) {
    const std::string v = trim(raw);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ParseError("expected a number, got '" + raw + "'");
    return out;
}

long parse_long(const std::string& raw) {
    const std::string v = trim(raw);
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ParseError("expected an integer, got '" + raw + "'");
    return out;
}

bool parse_bool(const std::string& raw) {
    const std::string v = trim(raw);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("expected true/false, got '" + raw + "'");
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Entry {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Entry dbl(const char* sec, const char* key, std::function<double&(RunConfig&)> ref) {
    return {sec, key,
            [ref](RunConfig& c, const std::string& v) { ref(c) = parse_double(v); },
            [ref](const RunConfig& c) { return fmt_double(ref(const_cast<RunConfig&>(c))); }};
}

Entry cplx_part(const char* sec, const char* key,
                std::function<Complex&(RunConfig&)> ref, bool imag) {
    return {sec, key,
            [ref, imag](RunConfig& c, const std::string& v) {
                Complex& z = ref(c);
                z = imag ? Complex(z.real(), parse_double(v)) : Complex(parse_double(v), z.imag());
            },
            [ref, imag](const RunConfig& c) {
                const Complex z = ref(const_cast<RunConfig&>(c));
                return fmt_double(imag ? z.imag() : z.real());
            }};
}

Entry relax_rate(const char* key, int a, int b) {
    return {"rates", key,
            [a, b](RunConfig& c, const std::string& v) { c.rates.relax(a, b) = parse_double(v); },
            [a, b](const RunConfig& c) { return fmt_double(c.rates.relax(a, b)); }};
}

Entry deph_rate(const char* key, int a, int b) {
    return {"rates", key,
            [a, b](RunConfig& c, const std::string& v) {
                const double r = parse_double(v);
                c.rates.deph(a, b) = c.rates.deph(b, a) = r;
            },
            [a, b](const RunConfig& c) { return fmt_double(c.rates.deph(a, b)); }};
}

const std::vector<Entry>& schema() {
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        e.push_back(dbl("drive", "Bx_T", [](RunConfig& c) -> double& { return c.drive.bx_tesla; }));
        e.push_back(dbl("drive", "g_ex", [](RunConfig& c) -> double& { return c.drive.g_ex; }));
        e.push_back(dbl("drive", "g_hx", [](RunConfig& c) -> double& { return c.drive.g_hx; }));
        e.push_back(dbl("drive", "Omega1p_GHz",
                        [](RunConfig& c) -> double& { return c.drive.omega1p_ghz; }));
        e.push_back(dbl("drive", "Delta1_GHz",
                        [](RunConfig& c) -> double& { return c.drive.delta1_ghz; }));
        e.push_back(cplx_part("drive", "Omega2p_re_GHz",
                              [](RunConfig& c) -> Complex& { return c.drive.omega2p_ghz; }, false));
        e.push_back(cplx_part("drive", "Omega2p_im_GHz",
                              [](RunConfig& c) -> Complex& { return c.drive.omega2p_ghz; }, true));
        e.push_back(cplx_part("drive", "Omega2m_re_GHz",
                              [](RunConfig& c) -> Complex& { return c.drive.omega2m_ghz; }, false));
        e.push_back(cplx_part("drive", "Omega2m_im_GHz",
                              [](RunConfig& c) -> Complex& { return c.drive.omega2m_ghz; }, true));
        e.push_back(dbl("drive", "Delta2_GHz",
                        [](RunConfig& c) -> double& { return c.drive.delta2_ghz; }));

        // 1-based state indices in the key names: 1=|e,z+>, 2=|e,z->,
        // 3=|t,z+>, 4=|t,z->.  All rates in 1/ns unless engine.rates_angular.
        const char* gnames[12] = {"Gamma12", "Gamma13", "Gamma14", "Gamma21",
                                  "Gamma23", "Gamma24", "Gamma31", "Gamma32",
                                  "Gamma34", "Gamma41", "Gamma42", "Gamma43"};
        const int gidx[12][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 2}, {1, 3},
                                 {2, 0}, {2, 1}, {2, 3}, {3, 0}, {3, 1}, {3, 2}};
        for (int k = 0; k < 12; ++k) e.push_back(relax_rate(gnames[k], gidx[k][0], gidx[k][1]));
        const char* dnames[6] = {"gamma12", "gamma13", "gamma14",
                                 "gamma23", "gamma24", "gamma34"};
        const int didx[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        for (int k = 0; k < 6; ++k) e.push_back(deph_rate(dnames[k], didx[k][0], didx[k][1]));

        e.push_back(dbl("readout", "epsilon", [](RunConfig& c) -> double& { return c.epsilon; }));
        e.push_back(dbl("readout", "T_max_ns", [](RunConfig& c) -> double& { return c.t_max_ns; }));
        e.push_back({"readout", "grid",
                     [](RunConfig& c, const std::string& v) {
                         c.grid = static_cast<int>(parse_long(v));
                     },
                     [](const RunConfig& c) { return std::to_string(c.grid); }});
        e.push_back({"readout", "target",
                     [](RunConfig& c, const std::string& v) {
                         const std::string t = trim(v);
                         if (t == "zminus") c.target = SpinSign::Minus;
                         else if (t == "zplus") c.target = SpinSign::Plus;
                         else throw ParseError("expected zminus|zplus, got '" + v + "'");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.target == SpinSign::Minus ? "zminus" : "zplus");
                     }});
        e.push_back({"readout", "prob_model",
                     [](RunConfig& c, const std::string& v) {
                         const std::string t = trim(v);
                         if (t == "poisson") c.prob_model = ProbabilityModel::Poisson;
                         else if (t == "capped-linear") c.prob_model = ProbabilityModel::CappedLinear;
                         else throw ParseError("expected poisson|capped-linear, got '" + v + "'");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.prob_model == ProbabilityModel::Poisson
                                                ? "poisson"
                                                : "capped-linear");
                     }});

        e.push_back({"engine", "M",
                     [](RunConfig& c, const std::string& v) {
                         c.engine.m_override = static_cast<int>(parse_long(v));
                     },
                     [](const RunConfig& c) { return std::to_string(c.engine.m_override); }});
        e.push_back(dbl("engine", "truncation_tol",
                        [](RunConfig& c) -> double& { return c.engine.truncation_tol; }));
        e.push_back(dbl("engine", "ode_rel_tol",
                        [](RunConfig& c) -> double& { return c.engine.ode_rel_tol; }));
        e.push_back({"engine", "rates_angular",
                     [](RunConfig& c, const std::string& v) {
                         c.engine.rates_angular = parse_bool(v);
                     },
                     [](const RunConfig& c) {
                         return std::string(c.engine.rates_angular ? "true" : "false");
                     }});
        e.push_back({"engine", "seed",
                     [](RunConfig& c, const std::string& v) {
                         c.engine.seed = static_cast<unsigned long>(parse_long(v));
                     },
                     [](const RunConfig& c) { return std::to_string(c.engine.seed); }});
        e.push_back({"engine", "threads",
                     [](RunConfig& c, const std::string& v) {
                         c.engine.threads = static_cast<int>(parse_long(v));
                     },
                     [](const RunConfig& c) { return std::to_string(c.engine.threads); }});
        return e;
    }();
    return entries;
}

const Entry* find_entry(const std::string& section, const std::string& key) {
    for (const auto& e : schema())
        if (section == e.section && key == e.key) return &e;
    return nullptr;
}

bool known_section(const std::string& s) {
    return s == "drive" || s == "rates" || s == "readout" || s == "engine";
}

} // namespace

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    RunConfig cfg = std::move(base);
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = " (line " + std::to_string(lineno) + ")";
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header" + where);
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section))
                throw ParseError("unknown section [" + section + "]" + where);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value" + where);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ParseError("key '" + key + "' before any [section]" + where);
        const Entry* entry = find_entry(section, key);
        if (!entry)
            throw ParseError("unknown key " + section + "." + key + where);
        try {
            entry->set(cfg, value);
        } catch (const ParseError& err) {
            throw ParseError(section + "." + key + where + ": " + err.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos)
        throw ParseError("override key must look like section.key, got '" + dotted_key + "'");
    const std::string section = dotted_key.substr(0, dot);
    const std::string key = dotted_key.substr(dot + 1);
    const Entry* entry = find_entry(section, key);
    if (!entry)
        throw ParseError("unknown key " + dotted_key);
    try {
        entry->set(cfg, value);
    } catch (const ParseError& err) {
        throw ParseError(dotted_key + ": " + err.what());
    }
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const auto& e : schema()) {
        if (section != e.section) {
            if (!section.empty()) out << "\n";
            section = e.section;
            out << "[" << section << "]\n";
        }
        out << e.key << " = " << e.get(cfg) << "\n";
    }
    return out.str();
}

} // namespace flq
