#include "rydmed/config.hpp"

#include "rydmed/units.hpp"

#include <fstream>
#include <set>

namespace rydmed {

using nlohmann::json;

namespace {

enum class Dim { length, frequency, dipole, erec, kappa };

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw ConfigError("config: '" + path + "': " + msg);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) fail(path, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto& [k, v] : j.items())
        if (!ok.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double convert(double v, const std::string& unit, Dim dim, const std::string& path)
{
    try {
        switch (dim) {
        case Dim::length: return units::length_to_m(v, unit);
        case Dim::frequency: return units::frequency_to_hz(v, unit);
        case Dim::dipole: return units::dipole_to_au(v, unit);
        case Dim::erec:
            if (unit != "E_rec") throw std::invalid_argument("lattice depth unit must be 'E_rec'");
            return v;
        case Dim::kappa:
            if (unit != "pi/L_at") throw std::invalid_argument("quasimomentum width unit must be 'pi/L_at'");
            return v;
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return v;
}

double quantity(const json& j, const std::string& path, Dim dim)
{
    check_keys(j, path, {"value", "unit"});
    if (!j.contains("value") || !j.contains("unit")) fail(path, "quantity needs both 'value' and 'unit'");
    if (!j.at("value").is_number()) fail(path + ".value", "expected a number");
    if (!j.at("unit").is_string()) fail(path + ".unit", "expected a string");
    return convert(j.at("value").get<double>(), j.at("unit").get<std::string>(), dim, path);
}

std::vector<double> quantity_list(const json& j, const std::string& path, Dim dim)
{
    check_keys(j, path, {"value", "unit"});
    if (!j.contains("value") || !j.contains("unit")) fail(path, "quantity needs both 'value' and 'unit'");
    if (!j.at("value").is_array()) fail(path + ".value", "expected an array");
    std::vector<double> out;
    for (const auto& v : j.at("value")) {
        if (!v.is_number()) fail(path + ".value", "expected numbers");
        out.push_back(convert(v.get<double>(), j.at("unit").get<std::string>(), dim, path));
    }
    return out;
}

template <class T>
T scalar(const json& j, const char* key, const std::string& path, T def)
{
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(join(path, key), "wrong type");
    }
}

template <class T>
T required(const json& j, const char* key, const std::string& path)
{
    if (!j.contains(key)) fail(join(path, key), "required key missing");
    return scalar<T>(j, key, path, T{});
}

const json& block(const json& j, const char* key, const std::string& path)
{
    if (!j.contains(key)) fail(join(path, key), "required block missing");
    return j.at(key);
}

std::string one_of(const json& j, const char* key, const std::string& path, const std::string& def,
                   std::initializer_list<const char*> options)
{
    auto v = scalar<std::string>(j, key, path, def);
    for (auto o : options)
        if (v == o) return v;
    std::string msg = "must be one of";
    for (auto o : options) msg += std::string(" ") + o;
    fail(join(path, key), msg);
}

RotationalState rot_state(const json& j, const std::string& path)
{
    check_keys(j, path, {"J", "mJ"});
    RotationalState s{required<int>(j, "J", path), scalar<int>(j, "mJ", path, 0)};
    if (s.J < 0 || std::abs(s.mJ) > s.J) fail(path, "need J >= 0 and |mJ| <= J");
    return s;
}

void parse_geometry(const json& j, Scenario& sc)
{
    const std::string p = "geometry";
    check_keys(j, p, {"rho", "L_spin", "n_spins", "n_atoms"});
    sc.geometry.rho_m = quantity(block(j, "rho", p), p + ".rho", Dim::length);
    sc.geometry.L_spin_m = quantity(block(j, "L_spin", p), p + ".L_spin", Dim::length);
    sc.geometry.n_spins = required<int>(j, "n_spins", p);
    sc.geometry.n_atoms = scalar<int>(j, "n_atoms", p, sc.geometry.n_spins);
}

void parse_lattice(const json& j, Scenario& sc, RunConfig& cfg)
{
    const std::string p = "lattice";
    check_keys(j, p, {"atom", "period", "V0", "n_cells", "smax", "n_bands", "band_cap"});
    cfg.lattice_atom = scalar<std::string>(j, "atom", p, cfg.lattice_atom);
    sc.geometry.L_at_m = quantity(block(j, "period", p), p + ".period", Dim::length);
    sc.V0_erec = quantity(block(j, "V0", p), p + ".V0", Dim::erec);
    sc.n_cells = required<int>(j, "n_cells", p);
    sc.smax = scalar<int>(j, "smax", p, sc.smax);
    sc.n_bands = scalar<int>(j, "n_bands", p, sc.n_bands);
    sc.band_cap = scalar<int>(j, "band_cap", p, std::min(sc.band_cap, sc.n_bands));
}

void parse_spin(const json& j, Scenario& sc)
{
    const std::string p = "spin";
    auto& s = sc.spin;
    s.kind = one_of(j, "kind", p, "molecular", {"molecular", "dressed"});
    if (s.kind == "molecular") {
        check_keys(j, p, {"kind", "molecule", "up", "down", "E_spin", "d_flip", "d_up", "d_down"});
        s.molecule = required<std::string>(j, "molecule", p);
        if (j.contains("up")) s.up = rot_state(j.at("up"), p + ".up");
        if (j.contains("down")) s.down = rot_state(j.at("down"), p + ".down");
        if (j.contains("E_spin")) s.E_spin_hz = quantity(j.at("E_spin"), p + ".E_spin", Dim::frequency);
        if (j.contains("d_flip")) s.d_flip_au = quantity(j.at("d_flip"), p + ".d_flip", Dim::dipole);
        if (j.contains("d_up")) s.d_up_au = quantity(j.at("d_up"), p + ".d_up", Dim::dipole);
        if (j.contains("d_down")) s.d_down_au = quantity(j.at("d_down"), p + ".d_down", Dim::dipole);
    } else {
        check_keys(j, p, {"kind", "atom", "n", "zeeman", "omega_up", "omega_down", "delta_up", "delta_down"});
        s.atom = scalar<std::string>(j, "atom", p, s.atom);
        s.n = required<int>(j, "n", p);
        s.zeeman_hz = quantity(block(j, "zeeman", p), p + ".zeeman", Dim::frequency);
        s.omega_up_hz = quantity(block(j, "omega_up", p), p + ".omega_up", Dim::frequency);
        s.omega_down_hz = quantity(block(j, "omega_down", p), p + ".omega_down", Dim::frequency);
        if (j.contains("delta_up")) s.delta_up_hz = quantity(j.at("delta_up"), p + ".delta_up", Dim::frequency);
        if (j.contains("delta_down")) s.delta_down_hz = quantity(j.at("delta_down"), p + ".delta_down", Dim::frequency);
    }
}

void parse_mediator(const json& j, Scenario& sc)
{
    const std::string p = "mediator";
    check_keys(j, p, {"atom", "n", "include_p32", "same_parity", "counter_rotating", "zeeman", "omega", "delta"});
    auto& m = sc.mediator;
    m.atom = scalar<std::string>(j, "atom", p, m.atom);
    m.n = required<int>(j, "n", p);
    m.include_p32 = scalar<bool>(j, "include_p32", p, false);
    m.same_parity = scalar<bool>(j, "same_parity", p, false);
    m.counter_rotating = scalar<bool>(j, "counter_rotating", p, false);
    if (j.contains("zeeman")) m.zeeman_hz = quantity(j.at("zeeman"), p + ".zeeman", Dim::frequency);
    if (j.contains("omega")) m.omega_hz = quantity(j.at("omega"), p + ".omega", Dim::frequency);
    if (j.contains("delta")) m.delta_hz = quantity(j.at("delta"), p + ".delta", Dim::frequency);
    if (sc.kind == ScenarioKind::xxz_rydberg && !j.contains("omega"))
        fail(p + ".omega", "dressed mediator needs a Rabi frequency");
}

void parse_prep(const json& j, Scenario& sc)
{
    const std::string p = "prep";
    check_keys(j, p, {"kind", "c_ns", "motional", "kappa0", "kappa0_mode", "weights"});
    auto& m = sc.prep;
    m.kind = one_of(j, "kind", p, "superatom", {"superatom", "dressed"});
    m.c_ns = scalar<double>(j, "c_ns", p, 1.0);
    m.motional = one_of(j, "motional", p, "bec", {"bec", "gaussian", "table"});
    if (j.contains("kappa0")) m.kappa0 = quantity(j.at("kappa0"), p + ".kappa0", Dim::kappa);
    m.kappa0_mode = one_of(j, "kappa0_mode", p, "factorized", {"factorized", "full"});
    if (m.motional == "table") {
        const auto& w = block(j, "weights", p);
        if (!w.is_array()) fail(p + ".weights", "expected an array");
        for (size_t i = 0; i < w.size(); ++i) {
            const std::string q = p + ".weights[" + std::to_string(i) + "]";
            check_keys(w[i], q, {"kappa", "band", "w"});
            m.table.push_back({required<int>(w[i], "kappa", q), scalar<int>(w[i], "band", q, 1),
                               required<double>(w[i], "w", q)});
        }
    } else if (j.contains("weights")) {
        fail(p + ".weights", "only allowed with motional = table");
    }
    if (m.motional == "gaussian" && !j.contains("kappa0")) fail(p + ".kappa0", "gaussian preparation needs kappa0");
}

void parse_engine(const json& j, Scenario& sc)
{
    const std::string p = "engine";
    check_keys(j, p, {"path", "sw_margin", "keep_nonresonant", "rows", "convergence_cap"});
    auto& e = sc.engine;
    e.path = one_of(j, "path", p, e.path, {"generic", "fast"});
    e.sw_margin = scalar<double>(j, "sw_margin", p, e.sw_margin);
    e.keep_nonresonant = scalar<bool>(j, "keep_nonresonant", p, e.keep_nonresonant);
    e.rows = one_of(j, "rows", p, e.rows, {"all", "centre"});
    e.convergence_cap = scalar<int>(j, "convergence_cap", p, e.convergence_cap);
}

void parse_radial(const json& j, Scenario& sc)
{
    const std::string p = "radial";
    check_keys(j, p, {"points", "outer_scale", "outer_offset"});
    sc.radial.points = scalar<int>(j, "points", p, sc.radial.points);
    sc.radial.outer_scale = scalar<double>(j, "outer_scale", p, sc.radial.outer_scale);
    sc.radial.outer_offset = scalar<double>(j, "outer_offset", p, sc.radial.outer_offset);
}

void parse_sweep(const json& j, RunConfig& cfg)
{
    const std::string p = "sweep";
    check_keys(j, p, {"kappa0"});
    const auto& k = block(j, "kappa0", p);
    if (k.contains("from")) {
        check_keys(k, p + ".kappa0", {"from", "to", "steps", "unit"});
        const auto unit = required<std::string>(k, "unit", p + ".kappa0");
        const double a = convert(required<double>(k, "from", p + ".kappa0"), unit, Dim::kappa, p + ".kappa0");
        const double b = convert(required<double>(k, "to", p + ".kappa0"), unit, Dim::kappa, p + ".kappa0");
        const int n = required<int>(k, "steps", p + ".kappa0");
        if (n < 2) fail(p + ".kappa0.steps", "need at least 2 steps");
        for (int i = 0; i < n; ++i) cfg.sweep_kappa0.push_back(a + (b - a) * i / (n - 1));
    } else {
        cfg.sweep_kappa0 = quantity_list(k, p + ".kappa0", Dim::kappa);
    }
    for (double v : cfg.sweep_kappa0)
        if (v < 0.0) fail(p + ".kappa0", "values must be non-negative");
}

void parse_chain(const json& j, RunConfig& cfg)
{
    const std::string p = "chain";
    check_keys(j, p, {"n", "boundary", "prune", "source", "J_perp", "J_zz", "b_z", "E_spin", "correlations"});
    auto& c = cfg.chain;
    c.n = scalar<int>(j, "n", p, c.n);
    c.boundary = one_of(j, "boundary", p, c.boundary, {"open", "periodic"});
    c.prune = scalar<double>(j, "prune", p, c.prune);
    c.source = one_of(j, "source", p, cfg.has_scenario ? "scenario" : "model", {"scenario", "model"});
    c.correlations = scalar<bool>(j, "correlations", p, false);
    if (c.source == "model") {
        c.J_perp_hz = quantity_list(block(j, "J_perp", p), p + ".J_perp", Dim::frequency);
        if (j.contains("J_zz")) c.J_zz_hz = quantity_list(j.at("J_zz"), p + ".J_zz", Dim::frequency);
        if (j.contains("b_z")) c.b_z_hz = quantity(j.at("b_z"), p + ".b_z", Dim::frequency);
        if (j.contains("E_spin")) c.E_spin_hz = quantity(j.at("E_spin"), p + ".E_spin", Dim::frequency);
    } else {
        if (!cfg.has_scenario) fail(p + ".source", "scenario source needs a scenario");
        for (auto k : {"J_perp", "J_zz", "b_z", "E_spin"})
            if (j.contains(k)) fail(join(p, k), "only allowed with source = model");
    }
    if (c.n < 2 || c.n > 14) fail(p + ".n", "chain length must lie in 2..14");
}

json q(double v, const char* unit) { return {{"value", v}, {"unit", unit}}; }

}  // namespace

RunConfig parse_config(const json& doc)
{
    check_keys(doc, "", {"scenario", "description", "constants", "geometry", "lattice", "spin", "mediator", "prep",
                         "engine", "radial", "sweep", "chain", "output"});
    RunConfig cfg;
    cfg.source = doc;
    cfg.constants = scalar<std::string>(doc, "constants", "", "");
    auto& sc = cfg.scenario;
    if (doc.contains("scenario")) {
        cfg.has_scenario = true;
        try {
            sc.kind = scenario_kind_from_string(required<std::string>(doc, "scenario", ""));
        } catch (const std::invalid_argument& e) {
            fail("scenario", e.what());
        }
        if (sc.kind == ScenarioKind::xxz_rydberg) sc.spin.kind = "dressed";
        parse_geometry(block(doc, "geometry", ""), sc);
        parse_spin(block(doc, "spin", ""), sc);
        parse_mediator(block(doc, "mediator", ""), sc);
        cfg.lattice_atom = sc.mediator.atom;
    } else {
        for (auto k : {"geometry", "spin", "mediator", "prep", "engine", "sweep"})
            if (doc.contains(k)) fail(k, "block needs a 'scenario' key");
    }
    if (doc.contains("lattice")) parse_lattice(doc.at("lattice"), sc, cfg);
    else if (cfg.has_scenario) fail("lattice", "required block missing");
    if (cfg.has_scenario && doc.at("lattice").contains("atom") && cfg.lattice_atom != sc.mediator.atom)
        fail("lattice.atom", "must match mediator.atom");
    if (doc.contains("prep")) parse_prep(doc.at("prep"), sc);
    if (doc.contains("engine")) parse_engine(doc.at("engine"), sc);
    if (doc.contains("radial")) parse_radial(doc.at("radial"), sc);
    if (doc.contains("sweep")) parse_sweep(doc.at("sweep"), cfg);
    if (doc.contains("chain")) {
        cfg.has_chain = true;
        parse_chain(doc.at("chain"), cfg);
    }
    if (doc.contains("output")) {
        check_keys(doc.at("output"), "output", {"dir"});
        cfg.output_dir = scalar<std::string>(doc.at("output"), "dir", "output", cfg.output_dir);
    }
    if (cfg.has_scenario) {
        try {
            sc.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return parse_config(doc);
}

json scenario_to_json(const Scenario& sc)
{
    json j;
    j["scenario"] = to_string(sc.kind);
    j["geometry"] = {{"rho", q(sc.geometry.rho_m, "m")},
                     {"L_spin", q(sc.geometry.L_spin_m, "m")},
                     {"n_spins", sc.geometry.n_spins},
                     {"n_atoms", sc.geometry.n_atoms}};
    j["lattice"] = {{"period", q(sc.geometry.L_at_m, "m")}, {"V0", q(sc.V0_erec, "E_rec")},
                    {"n_cells", sc.n_cells}, {"smax", sc.smax}, {"n_bands", sc.n_bands}, {"band_cap", sc.band_cap}};
    const auto& s = sc.spin;
    if (s.kind == "molecular") {
        json sp{{"kind", "molecular"}, {"molecule", s.molecule}, {"up", {{"J", s.up.J}, {"mJ", s.up.mJ}}},
                {"down", {{"J", s.down.J}, {"mJ", s.down.mJ}}}};
        if (s.E_spin_hz) sp["E_spin"] = q(*s.E_spin_hz, "Hz");
        if (s.d_flip_au) sp["d_flip"] = q(*s.d_flip_au, "ea0");
        if (s.d_up_au) sp["d_up"] = q(*s.d_up_au, "ea0");
        if (s.d_down_au) sp["d_down"] = q(*s.d_down_au, "ea0");
        j["spin"] = sp;
    } else {
        j["spin"] = {{"kind", "dressed"}, {"atom", s.atom}, {"n", s.n}, {"zeeman", q(s.zeeman_hz, "Hz")},
                     {"omega_up", q(s.omega_up_hz, "Hz")}, {"omega_down", q(s.omega_down_hz, "Hz")},
                     {"delta_up", q(s.delta_up_hz, "Hz")}, {"delta_down", q(s.delta_down_hz, "Hz")}};
    }
    const auto& m = sc.mediator;
    j["mediator"] = {{"atom", m.atom}, {"n", m.n}, {"include_p32", m.include_p32}, {"same_parity", m.same_parity},
                     {"counter_rotating", m.counter_rotating}, {"zeeman", q(m.zeeman_hz, "Hz")},
                     {"omega", q(m.omega_hz, "Hz")}, {"delta", q(m.delta_hz, "Hz")}};
    json prep{{"kind", sc.prep.kind}, {"c_ns", sc.prep.c_ns}, {"motional", sc.prep.motional},
              {"kappa0", q(sc.prep.kappa0, "pi/L_at")}, {"kappa0_mode", sc.prep.kappa0_mode}};
    if (sc.prep.motional == "table") {
        prep["weights"] = json::array();
        for (const auto& w : sc.prep.table) prep["weights"].push_back({{"kappa", w.kappa}, {"band", w.band}, {"w", w.w}});
    }
    j["prep"] = prep;
    j["engine"] = {{"path", sc.engine.path}, {"sw_margin", sc.engine.sw_margin},
                   {"keep_nonresonant", sc.engine.keep_nonresonant}, {"rows", sc.engine.rows},
                   {"convergence_cap", sc.engine.convergence_cap}};
    j["radial"] = {{"points", sc.radial.points}, {"outer_scale", sc.radial.outer_scale},
                   {"outer_offset", sc.radial.outer_offset}};
    return j;
}

json config_to_json(const RunConfig& cfg)
{
    json j;
    if (cfg.has_scenario) {
        j = scenario_to_json(cfg.scenario);
    } else {
        const auto& sc = cfg.scenario;
        j["lattice"] = {{"atom", cfg.lattice_atom}, {"period", q(sc.geometry.L_at_m, "m")},
                        {"V0", q(sc.V0_erec, "E_rec")}, {"n_cells", sc.n_cells}, {"smax", sc.smax},
                        {"n_bands", sc.n_bands}, {"band_cap", sc.band_cap}};
    }
    if (!cfg.constants.empty()) j["constants"] = cfg.constants;
    if (!cfg.sweep_kappa0.empty()) j["sweep"] = {{"kappa0", {{"value", cfg.sweep_kappa0}, {"unit", "pi/L_at"}}}};
    if (cfg.has_chain) {
        const auto& c = cfg.chain;
        json ch{{"n", c.n}, {"boundary", c.boundary}, {"prune", c.prune}, {"source", c.source},
                {"correlations", c.correlations}};
        if (c.source == "model") {
            ch["J_perp"] = {{"value", c.J_perp_hz}, {"unit", "Hz"}};
            ch["J_zz"] = {{"value", c.J_zz_hz}, {"unit", "Hz"}};
            ch["b_z"] = q(c.b_z_hz, "Hz");
            ch["E_spin"] = q(c.E_spin_hz, "Hz");
        }
        j["chain"] = ch;
    }
    j["output"] = {{"dir", cfg.output_dir}};
    return j;
}

}  // namespace rydmed
