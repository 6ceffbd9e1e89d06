#include "rydmed/chain.hpp"
#include "rydmed/config.hpp"
#include "rydmed/output.hpp"
#include "rydmed/scenario.hpp"
#include "rydmed/units.hpp"

#include "CLI11.hpp"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace rydmed;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out;
    bool deterministic = false;
    int bands = 0;
    int smax = 0;
    bool no_cache = false;
    std::string defects;
    bool all_rows = false;
    std::string table;
    std::string log_level = "info";
    std::string cache_action;
};

SpeciesRegistry registry(const Options& o, const RunConfig& cfg)
{
    if (!o.defects.empty()) return SpeciesRegistry::load(o.defects);
    if (!cfg.constants.empty()) return SpeciesRegistry::load(cfg.constants);
    return SpeciesRegistry::load_default();
}

RunConfig config(const Options& o)
{
    if (o.config.empty()) throw ConfigError("--config is required");
    auto cfg = load_config(o.config);
    if (o.bands > 0) {
        cfg.scenario.n_bands = o.bands;
        cfg.scenario.band_cap = std::min(cfg.scenario.band_cap, o.bands);
    }
    if (o.smax > 0) cfg.scenario.smax = o.smax;
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.all_rows) cfg.scenario.engine.rows = "all";
    if (cfg.has_scenario) cfg.scenario.validate();
    return cfg;
}

std::unique_ptr<RadialIntegralCache> cache(const Options& o)
{
    if (o.no_cache) return nullptr;
    return std::make_unique<RadialIntegralCache>(RadialIntegralCache::default_path());
}

std::string out_path(const RunConfig& cfg, const std::string& name)
{
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

template <class F>
std::string to_text(F&& f)
{
    std::ostringstream os;
    f(os);
    return os.str();
}

nlohmann::json provenance(const Options& o, const std::string& cmd, const RunConfig& cfg, const SpeciesRegistry& reg,
                          nlohmann::json results)
{
    auto j = config_to_json(cfg);
    j["constants"] = reg.path();
    results["constants_version"] = reg.version();
    return make_provenance(cmd, j, results, o.deterministic);
}

int cmd_bands(const Options& o)
{
    auto cfg = config(o);
    auto reg = registry(o, cfg);
    const auto& sc = cfg.scenario;
    LatticeSpec lat;
    lat.period_m = sc.geometry.L_at_m;
    lat.V0_erec = sc.V0_erec;
    lat.n_cells = sc.n_cells;
    lat.mass_kg = reg.atom(cfg.lattice_atom).mass_kg;
    auto bands = solve_bands(lat, sc.smax, sc.n_bands);
    auto ref = solve_bands(lat, sc.smax + 4, sc.n_bands);
    double worst = 0.0;
    for (size_t k = 0; k < bands.states().size(); ++k)
        worst = std::max(worst, std::abs(bands.states()[k].energy - ref.states()[k].energy));
    spdlog::info("bands: N={}, S_max={}, {} bands, E_rec = {:.6f} Hz; |E(S_max) - E(S_max+4)| max {:.3e} E_rec",
                 sc.n_cells, sc.smax, sc.n_bands, lat.recoil_hz(), worst);
    const auto csv = out_path(cfg, "bands.csv");
    write_text_file(csv, to_text([&](std::ostream& os) { write_bands_csv(os, bands); }));
    nlohmann::json res{{"recoil_hz", lat.recoil_hz()}, {"convergence_smax_plus_4", worst}, {"files", {"bands.csv"}}};
    write_json_file(out_path(cfg, "bands.provenance.json"), provenance(o, "bands", cfg, reg, res));
    std::cout << "bands written to " << csv << "\n";
    std::cout << "convergence: max |E(S_max) - E(S_max+4)| = " << worst << " E_rec\n";
    return 0;
}

int cmd_couplings(const Options& o)
{
    auto cfg = config(o);
    if (!cfg.has_scenario) throw ConfigError("config: 'scenario': required for couplings");
    auto reg = registry(o, cfg);
    auto c = cache(o);
    auto t = compute_couplings(cfg.scenario, reg, c.get());
    const bool all = cfg.scenario.engine.rows == "all" && o.all_rows;
    write_text_file(out_path(cfg, "couplings.csv"), to_text([&](std::ostream& os) { write_couplings_csv(os, t, all); }));
    write_text_file(out_path(cfg, "b_field.csv"), to_text([&](std::ostream& os) { write_bfield_csv(os, t); }));
    auto p = extract_j1j2(t);
    nlohmann::json res = t.provenance;
    res["E_spin_hz"] = t.E_spin_hz;
    res["j1j2"] = {{"J1", p.J1}, {"J2", p.J2}, {"Delta1", p.Delta1}, {"Delta2", p.Delta2}, {"residual", p.residual}};
    res["files"] = {"couplings.csv", "b_field.csv"};
    write_json_file(out_path(cfg, "couplings.provenance.json"), provenance(o, "couplings", cfg, reg, res));
    const int m = t.centre;
    std::cout << "centre spin m=0 (index " << m << "), E_spin = " << fmt_double(t.E_spin_hz) << " Hz\n";
    std::cout << "p,J_perp_Hz,J_zz_Hz\n";
    for (int d = 1; d <= 6 && m + d < t.n; ++d)
        std::cout << d << ',' << fmt_double(t.J_perp(m, m + d)) << ',' << fmt_double(t.J_zz(m, m + d)) << '\n';
    std::cout << "b_z(0) = " << fmt_double(t.b_z(m)) << " Hz\n";
    for (auto key : {"forster_defect_hz", "forster_defect_np3/2_hz"})
        if (t.provenance.contains(key)) std::cout << key << " = " << t.provenance[key].get<double>() / 1e6 << " MHz\n";
    std::cout << "J1 = " << p.J1 << " Hz, J2 = " << p.J2 << " Hz, Delta1 = " << p.Delta1 << ", Delta2 = " << p.Delta2
              << ", residual = " << p.residual << "\n";
    return 0;
}

int cmd_sweep(const Options& o)
{
    auto cfg = config(o);
    if (!cfg.has_scenario) throw ConfigError("config: 'scenario': required for sweep-kappa0");
    if (cfg.sweep_kappa0.empty()) throw ConfigError("config: 'sweep.kappa0': required for sweep-kappa0");
    auto reg = registry(o, cfg);
    auto c = cache(o);
    auto rows = kappa0_sweep(cfg.scenario, reg, cfg.sweep_kappa0, c.get());
    write_text_file(out_path(cfg, "sweep_kappa0.csv"), to_text([&](std::ostream& os) { write_sweep_csv(os, rows); }));
    nlohmann::json res{{"files", {"sweep_kappa0.csv"}}, {"points", rows.size()}};
    write_json_file(out_path(cfg, "sweep_kappa0.provenance.json"), provenance(o, "sweep-kappa0", cfg, reg, res));
    write_sweep_csv(std::cout, rows);
    return 0;
}

// centre row of a couplings CSV plus the neighbouring b_field.csv and provenance, if present
ChainCouplings chain_from_files(const std::string& path, int n)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open coupling table " + path);
    std::string line;
    std::getline(in, line);
    if (line != "i,m,J_perp_Hz,J_zz_Hz") throw std::runtime_error(path + ": unexpected header '" + line + "'");
    std::map<int, std::pair<double, double>> row;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f[4];
        for (auto& s : f) std::getline(ls, s, ',');
        if (std::stoi(f[0]) == 0) row[std::stoi(f[1])] = {std::stod(f[2]), std::stod(f[3])};
    }
    std::vector<double> jp, jz;
    for (int p = 1; p < n; ++p) {
        if (!row.count(p)) throw std::runtime_error(path + ": centre row lacks distance " + std::to_string(p));
        jp.push_back(row[p].first);
        jz.push_back(row[p].second);
    }
    double b = 0.0, E = 0.0;
    const auto dir = fs::path(path).parent_path();
    std::ifstream bf(dir / "b_field.csv");
    if (bf) {
        std::getline(bf, line);
        while (std::getline(bf, line))
            if (line.rfind("0,", 0) == 0) b = std::stod(line.substr(2));
    }
    std::ifstream pf(dir / "couplings.provenance.json");
    if (pf) E = nlohmann::json::parse(pf).at("results").value("E_spin_hz", 0.0);
    return chain_from_model(n, jp, jz, b, E, "open");
}

int cmd_chain(const Options& o)
{
    RunConfig cfg;
    bool have_cfg = !o.config.empty();
    if (have_cfg) cfg = config(o);
    else if (!o.out.empty()) cfg.output_dir = o.out;
    if (have_cfg && !cfg.has_chain && o.table.empty()) throw ConfigError("config: 'chain': required for chain");
    const auto& ch = cfg.chain;
    ChainCouplings cc;
    nlohmann::json res;
    std::unique_ptr<SpeciesRegistry> reg;
    if (!o.table.empty()) {
        cc = chain_from_files(o.table, ch.n);
        res["table"] = o.table;
    } else if (ch.source == "model") {
        cc = chain_from_model(ch.n, ch.J_perp_hz, ch.J_zz_hz, ch.b_z_hz, ch.E_spin_hz, ch.boundary);
    } else {
        reg = std::make_unique<SpeciesRegistry>(registry(o, cfg));
        auto c = cache(o);
        Scenario sc = cfg.scenario;
        auto t = compute_couplings(sc, *reg, c.get());
        if (ch.boundary != "open") throw ConfigError("config: 'chain.boundary': scenario tables only support open chains");
        cc = chain_from_table(t, ch.n);
        auto p = extract_j1j2(t);
        res["j1j2"] = {{"J1", p.J1}, {"J2", p.J2}, {"Delta1", p.Delta1}, {"Delta2", p.Delta2}, {"residual", p.residual}};
        std::cout << "J1 = " << p.J1 << " Hz, J2 = " << p.J2 << " Hz, Delta1 = " << p.Delta1
                  << ", Delta2 = " << p.Delta2 << ", residual = " << p.residual << "\n";
    }
    auto h = build_hamiltonian(cc, ch.prune);
    auto sectors = diagonalize_sectors(h, ch.correlations);
    const double comm = sz_commutator_norm(h);
    double e0 = INFINITY;
    for (const auto& s : sectors) e0 = std::min(e0, s.energies(0));
    spdlog::info("chain: hermiticity error {:.3e}, ||[H, Sz]|| {:.3e}, ground energy {:.12g} Hz", h.hermiticity_error,
                 comm, e0);
    write_text_file(out_path(cfg, "spectrum.csv"), to_text([&](std::ostream& os) { write_spectrum_csv(os, sectors); }));
    res["files"] = {"spectrum.csv"};
    if (ch.correlations) {
        write_text_file(out_path(cfg, "correlations.csv"),
                        to_text([&](std::ostream& os) { write_correlations_csv(os, h, sectors); }));
        res["files"].push_back("correlations.csv");
    }
    res["n"] = cc.n;
    res["pruned"] = h.pruned;
    res["ground_energy_hz"] = e0;
    res["sz_commutator_norm"] = comm;
    res["hermiticity_error"] = h.hermiticity_error;
    write_json_file(out_path(cfg, "chain_report.json"), res);
    nlohmann::json conf = have_cfg ? config_to_json(cfg) : nlohmann::json{{"chain", {{"n", ch.n}}}};
    write_json_file(out_path(cfg, "chain.provenance.json"), make_provenance("chain", conf, res, o.deterministic));
    std::cout << "ground energy " << fmt_double(e0) << " Hz over " << sectors.size() << " S^z sectors\n";
    return 0;
}

int cmd_cache(const Options& o)
{
    RadialIntegralCache c(RadialIntegralCache::default_path());
    if (o.cache_action == "clear") {
        c.clear();
        std::cout << "cleared " << c.path() << "\n";
    } else {
        std::cout << c.path() << ": " << c.size() << " records\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rydmed: mediator-induced spin-spin couplings in Rydberg/molecule bilayers"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* s) {
        s->add_option("--config", o.config, "run configuration (JSON)");
        s->add_option("--out", o.out, "output directory (overrides output.dir)");
        s->add_flag("--deterministic", o.deterministic, "omit timestamps from provenance records");
        s->add_option("--bands", o.bands, "number of Bloch bands to solve");
        s->add_option("--smax", o.smax, "plane-wave cutoff S_max");
        s->add_flag("--no-cache", o.no_cache, "do not read or write the radial integral cache");
        s->add_option("--defects", o.defects, "constants file with quantum defects and molecules");
        s->add_option("--log-level", o.log_level, "trace|debug|info|warn|error");
    };
    auto* bands = app.add_subcommand("bands", "Bloch band structure of the mediator lattice");
    common(bands);
    auto* coup = app.add_subcommand("couplings", "coupling table J_perp, J_zz, b_z");
    common(coup);
    coup->add_flag("--all-rows", o.all_rows, "write every computed row, not only the centre spin");
    auto* sweep = app.add_subcommand("sweep-kappa0", "ratio curves J(p)/|J(1)| versus the packet width kappa0");
    common(sweep);
    auto* chain = app.add_subcommand("chain", "exact diagonalisation of the effective chain");
    common(chain);
    chain->add_option("--table", o.table, "couplings.csv written by the couplings command");
    auto* cache_cmd = app.add_subcommand("cache", "radial integral cache");
    cache_cmd->add_option("action", o.cache_action, "clear|stat")->required()->check(CLI::IsMember({"clear", "stat"}));

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(o.log_level));
    spdlog::set_pattern(o.deterministic ? "[%l] %v" : "[%H:%M:%S] [%l] %v");

    try {
        if (*bands) return cmd_bands(o);
        if (*coup) return cmd_couplings(o);
        if (*sweep) return cmd_sweep(o);
        if (*chain) return cmd_chain(o);
        if (*cache_cmd) return cmd_cache(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchriefferWolffError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
