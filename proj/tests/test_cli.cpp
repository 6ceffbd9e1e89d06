#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "common.hpp"
#include "rydmed/chain.hpp"

#include "json.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

std::string cli()
{
    const char* p = std::getenv("RYDMED_CLI");
    REQUIRE_MESSAGE(p != nullptr, "RYDMED_CLI is not set");
    return p;
}

fs::path scratch()
{
    static fs::path d = [] {
        auto p = fs::temp_directory_path() / ("rydmed_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        ::setenv("RYDMED_CACHE", (p / "radial.cache").c_str(), 1);
        return p;
    }();
    return d;
}

Run run(const std::string& args)
{
    scratch();
    Run r;
    const std::string cmd = cli() + " " + args + " 2>&1";
    FILE* f = ::popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    std::array<char, 4096> buf;
    size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
    const int st = ::pclose(f);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string write_config(const std::string& name, const json& j)
{
    const auto p = scratch() / name;
    std::ofstream(p) << j.dump(2);
    return p.string();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json small_xx(const std::string& outdir)
{
    std::ifstream in(testing_support::config_path("fig3_xx_lics.json"));
    auto j = json::parse(in);
    j["geometry"]["n_spins"] = 16;
    j["geometry"]["n_atoms"] = 16;
    j["lattice"]["n_cells"] = 16;
    j["engine"]["convergence_cap"] = 0;
    j["output"]["dir"] = outdir;
    return j;
}

}  // namespace

TEST_CASE("malformed config exits with status 2 and names the key")
{
    auto j = small_xx((scratch() / "bad").string());
    j["mediator"]["principal"] = 65;
    const auto r = run("couplings --config " + write_config("bad.json", j));
    CHECK(r.status == 2);
    CHECK(r.out.find("mediator.principal") != std::string::npos);

    const auto m = run("couplings --config " + (scratch() / "missing.json").string());
    CHECK(m.status == 2);

    std::ofstream(scratch() / "broken.json") << "{\"scenario\": ";
    CHECK(run("couplings --config " + (scratch() / "broken.json").string()).status == 2);
    CHECK(run("frobnicate").status != 0);
}

TEST_CASE("bands command: free particle")
{
    const auto out = scratch() / "bands";
    json j = {{"lattice", {{"atom", "Rb"}, {"period", {{"value", 500}, {"unit", "nm"}}}, {"V0", {{"value", 0}, {"unit", "E_rec"}}},
                           {"n_cells", 10}, {"smax", 6}, {"n_bands", 3}, {"band_cap", 3}}},
              {"output", {{"dir", out.string()}}}};
    const auto r = run("bands --deterministic --config " + write_config("bands.json", j));
    REQUIRE(r.status == 0);
    std::istringstream csv(slurp(out / "bands.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "kappa,k_over_Kat,band,energy_over_Erec");
    int rows = 0;
    double worst = 0.0;
    while (std::getline(csv, line)) {
        std::istringstream ls(line);
        std::string f[4];
        for (auto& s : f) std::getline(ls, s, ',');
        const int k = std::stoi(f[0]), b = std::stoi(f[2]);
        std::vector<double> e;
        for (int s = -6; s <= 6; ++s) e.push_back(4.0 * std::pow(k / 10.0 + s, 2));
        std::sort(e.begin(), e.end());
        worst = std::max(worst, std::abs(std::stod(f[3]) - e[b - 1]));
        ++rows;
    }
    CHECK(rows == 30);
    CHECK(worst < 1e-12);
    const auto prov = json::parse(slurp(out / "bands.provenance.json"));
    CHECK(prov["command"] == "bands");
    CHECK_FALSE(prov.contains("generated"));
    CHECK(prov["results"]["recoil_hz"].get<double>() == doctest::Approx(2295.68).epsilon(1e-4));
}

TEST_CASE("deterministic runs are byte-identical")
{
    const auto a = scratch() / "det_a", b = scratch() / "det_b";
    const auto cfg = write_config("det.json", small_xx((scratch() / "det").string()));
    REQUIRE(run("couplings --deterministic --all-rows --config " + cfg + " --out " + a.string()).status == 0);
    REQUIRE(run("couplings --deterministic --all-rows --config " + cfg + " --out " + b.string()).status == 0);
    for (auto f : {"couplings.csv", "b_field.csv"}) {
        const auto x = slurp(a / f);
        CHECK(!x.empty());
        CHECK(x == slurp(b / f));
    }
    // sidecars only differ in the output directory
    auto pa = json::parse(slurp(a / "couplings.provenance.json"));
    auto pb = json::parse(slurp(b / "couplings.provenance.json"));
    CHECK(pa["results"] == pb["results"]);
}

TEST_CASE("provenance sidecar reproduces the run")
{
    const auto a = scratch() / "side_a";
    const auto cfg = write_config("side.json", small_xx(a.string()));
    REQUIRE(run("couplings --deterministic --config " + cfg).status == 0);
    auto prov = json::parse(slurp(a / "couplings.provenance.json"));
    REQUIRE(prov.contains("config"));
    auto conf = prov["config"];
    const auto b = scratch() / "side_b";
    conf["output"]["dir"] = b.string();
    REQUIRE(run("couplings --deterministic --config " + write_config("side_rerun.json", conf)).status == 0);
    CHECK(slurp(a / "couplings.csv") == slurp(b / "couplings.csv"));
    CHECK(slurp(a / "b_field.csv") == slurp(b / "b_field.csv"));
}

TEST_CASE("chain command from a model")
{
    const auto out = scratch() / "chain2";
    json j = {{"chain", {{"n", 2}, {"source", "model"}, {"prune", 0.0}, {"J_perp", {{"value", {2000.0}}, {"unit", "Hz"}}}}},
              {"output", {{"dir", out.string()}}}};
    const auto r = run("chain --deterministic --config " + write_config("chain2.json", j));
    REQUIRE(r.status == 0);
    const auto rep = json::parse(slurp(out / "chain_report.json"));
    CHECK(rep["ground_energy_hz"].get<double>() == doctest::Approx(-1000.0));

    const auto out8 = scratch() / "chain8";
    j["chain"]["n"] = 8;
    j["chain"]["correlations"] = true;
    j["output"]["dir"] = out8.string();
    REQUIRE(run("chain --deterministic --config " + write_config("chain8.json", j)).status == 0);
    const auto rep8 = json::parse(slurp(out8 / "chain_report.json"));
    const double ref = rydmed::free_fermion_ground_energy(2000.0, 8);
    CHECK(std::abs(rep8["ground_energy_hz"].get<double>() - ref) <= 1e-10 * std::abs(ref));
    CHECK(rep8["sz_commutator_norm"].get<double>() < 1e-10);
    CHECK(fs::exists(out8 / "correlations.csv"));
    CHECK(fs::exists(out8 / "spectrum.csv"));

    j["chain"]["n"] = 20;
    CHECK(run("chain --config " + write_config("chain20.json", j)).status == 2);
}

TEST_CASE("chain command from a couplings table")
{
    const auto a = scratch() / "tab";
    const auto cfg = write_config("tab.json", small_xx(a.string()));
    REQUIRE(run("couplings --deterministic --config " + cfg).status == 0);
    const auto out = scratch() / "tab_chain";
    const auto r = run("chain --deterministic --table " + (a / "couplings.csv").string() + " --out " + out.string());
    CHECK(r.status == 0);
    CHECK(fs::exists(out / "spectrum.csv"));
}

TEST_CASE("cache subcommand")
{
    CHECK(run("cache stat").status == 0);
    CHECK(run("cache clear").status == 0);
    CHECK(run("cache nonsense").status != 0);
}
