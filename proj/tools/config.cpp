#include "config.hpp"

#include "grushin/errors.hpp"
#include "grushin/semigroup.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace grushin::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    }
}

template <class T> T get(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

template <class T> void opt(const json& j, const std::string& key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

YTopology topology_of(const json& j) {
    std::string t = "torus";
    opt(j, "y_topology", t);
    if (t == "torus") return YTopology::Torus;
    if (t == "interval") return YTopology::Interval;
    throw ConfigError("y_topology must be 'torus' or 'interval'");
}

Path build_path(const json& j, YTopology topo) {
    if (j.is_number()) return Path::constant(j.get<double>(), topo);
    check_keys(j, {"constant", "samples", "offset", "amplitude", "frequency", "phase"}, "path");
    if (j.contains("constant")) return Path::constant(get<double>(j, "constant", "path"), topo);
    if (j.contains("samples")) return Path(get<std::vector<double>>(j, "samples", "path"), topo);
    double off = get<double>(j, "offset", "path");
    double amp = 0, ph = 0;
    int fr = 1;
    opt(j, "amplitude", amp);
    opt(j, "frequency", fr);
    opt(j, "phase", ph);
    return Path::from_function([=](double y) { return off + amp * std::sin(fr * y + ph); }, topo);
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    c.text = text;
    try {
        c.raw = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    const json& j = c.raw;
    check_keys(j,
               {"profile", "region", "T", "dt", "epsilon", "theta", "nus", "k_list", "M", "n_grid", "modes", "initial",
                "probe_count", "N", "margin", "z0_offset", "degree_factor", "richardson", "betas", "k_max",
                "line_grid", "ny", "frames", "strip"},
               "config");

    if (j.contains("profile")) {
        const json& pj = j.at("profile");
        check_keys(pj, {"kind", "L_minus", "L_plus", "slope", "coefficients", "x", "q", "q_prime_0", "grid"}, "profile");
        std::string kind = get<std::string>(pj, "kind", "profile");
        auto& s = c.profile;
        opt(pj, "L_minus", s.L_minus);
        opt(pj, "L_plus", s.L_plus);
        opt(pj, "grid", s.grid);
        if (kind == "linear") {
            s.kind = ProfileSpec::Kind::Linear;
            double slope = 1.0;
            opt(pj, "slope", slope);
            s.params = {slope};
        } else if (kind == "cubic") {
            s.kind = ProfileSpec::Kind::Cubic;
            s.params = get<std::vector<double>>(pj, "coefficients", "profile");
        } else if (kind == "table") {
            s.kind = ProfileSpec::Kind::Table;
            s.sample_x = get<std::vector<double>>(pj, "x", "profile");
            s.sample_q = get<std::vector<double>>(pj, "q", "profile");
            s.q_prime_0 = get<double>(pj, "q_prime_0", "profile");
        } else {
            throw ConfigError("profile kind must be linear, cubic or table");
        }
    }
    if (j.contains("region")) c.region_json = j.at("region");

    if (j.contains("T")) c.T = get<double>(j, "T", "config");
    if (j.contains("dt")) c.dt = get<double>(j, "dt", "config");
    if (j.contains("epsilon")) c.epsilon = get<double>(j, "epsilon", "config");
    opt(j, "theta", c.theta);
    opt(j, "nus", c.nus);
    opt(j, "k_list", c.k_list);
    opt(j, "M", c.M);
    opt(j, "n_grid", c.n_grid);
    opt(j, "modes", c.modes);
    opt(j, "initial", c.initial);
    opt(j, "probe_count", c.probe_count);
    opt(j, "N", c.N);
    opt(j, "margin", c.margin);
    opt(j, "z0_offset", c.z0_offset);
    opt(j, "degree_factor", c.degree_factor);
    opt(j, "richardson", c.richardson);
    opt(j, "k_max", c.k_max);
    opt(j, "ny", c.ny);
    opt(j, "frames", c.frames);
    if (j.contains("betas")) {
        for (const auto& b : j.at("betas")) {
            if (b.is_number()) c.betas.emplace_back(b.get<double>(), 0.0);
            else if (b.is_array() && b.size() == 2) c.betas.emplace_back(b[0].get<double>(), b[1].get<double>());
            else throw ConfigError("betas entries must be numbers or [re, im]");
        }
    }
    if (j.contains("line_grid")) {
        const json& lg = j.at("line_grid");
        check_keys(lg, {"X", "n"}, "line_grid");
        opt(lg, "X", c.line_X);
        opt(lg, "n", c.line_n);
    }
    if (j.contains("strip")) {
        auto s = get<std::vector<double>>(j, "strip", "config");
        if (s.size() != 2) throw ConfigError("strip must be [x1, x2]");
        c.strip = std::make_pair(s[0], s[1]);
    }
    if (c.initial != "sine" && c.initial != "gaussian" && c.initial != "bump")
        throw ConfigError("initial must be sine, gaussian or bump");
    return c;
}

DegeneracyProfile build_profile(const ExperimentConfig& c) {
    if (!c.raw.contains("profile")) throw ConfigError("missing profile");
    return make_profile(c.profile);
}

ControlRegion build_region(const ExperimentConfig& c, const DegeneracyProfile& p) {
    if (!c.region_json) throw ConfigError("missing region");
    const json& r = *c.region_json;
    check_keys(r, {"kind", "a", "b", "W0", "gamma1", "gamma2", "rects", "y_topology"}, "region");
    std::string kind = get<std::string>(r, "kind", "region");
    YTopology topo = topology_of(r);
    if (kind == "strip") {
        double a = get<double>(r, "a", "region"), b = get<double>(r, "b", "region");
        return ControlRegion::band(Path::constant(a, topo), Path::constant(b, topo), p.L_minus(), p.L_plus());
    }
    if (kind == "band") {
        return ControlRegion::band(build_path(r.at("gamma1"), topo), build_path(r.at("gamma2"), topo), p.L_minus(),
                                   p.L_plus());
    }
    if (kind == "rect_complement") {
        auto W = get<std::vector<double>>(r, "W0", "region");
        if (W.size() != 2) throw ConfigError("W0 must be [lo, hi]");
        return ControlRegion::rect_complement(get<double>(r, "a", "region"), {W[0], W[1]}, p.L_minus(), p.L_plus(),
                                              topo);
    }
    if (kind == "rects") {
        std::vector<ControlRegion::Rect> rs;
        for (const auto& e : get<std::vector<std::vector<double>>>(r, "rects", "region")) {
            if (e.size() != 4) throw ConfigError("rects entries must be [x0, x1, y0, y1]");
            rs.push_back({e[0], e[1], e[2], e[3]});
        }
        return ControlRegion::rects(std::move(rs), p.L_minus(), p.L_plus(), topo);
    }
    throw ConfigError("region kind must be strip, band, rect_complement or rects");
}

std::map<int, std::vector<std::complex<double>>> initial_modes(const ExperimentConfig& c,
                                                               const DegeneracyProfile& p) {
    if (c.modes.empty()) throw ConfigError("modes must list at least one mode index");
    auto x = interior_nodes(p, c.n_grid);
    const double L = p.L_minus() + p.L_plus();
    std::map<int, std::vector<std::complex<double>>> out;
    for (int n : c.modes) {
        std::vector<std::complex<double>> v(x.size());
        const double amp = 1.0 / (1.0 + std::abs(n));
        for (std::size_t i = 0; i < x.size(); ++i) {
            double s = x[i] + p.L_minus();
            double val;
            if (c.initial == "sine") val = std::sin(std::numbers::pi * s / L);
            else if (c.initial == "gaussian") val = std::exp(-0.5 * std::max(1, std::abs(n)) * x[i] * x[i]);
            else val = s * (L - s) * std::exp(0.5 * n * x[i] / L);
            v[i] = amp * val;
        }
        out[n] = std::move(v);
    }
    return out;
}

} // namespace grushin::cli
