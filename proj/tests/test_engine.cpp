#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "common.hpp"
#include "rydmed/config.hpp"
#include "rydmed/engine.hpp"
#include "rydmed/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

using namespace rydmed;
using testing_support::registry;
using testing_support::small_scenario;

namespace {

struct Draw {
    std::vector<Intermediate> inter;
    std::vector<Amp4> vi, vm;
    double E = 0.0;
};

cplx rnd_c(std::mt19937& g, double scale)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return scale * cplx(u(g), u(g));
}

// XX regime: only up->down amplitudes, p-type intermediates away from resonance
Draw xx_draw(std::mt19937& g)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Draw d;
    d.E = 1e6 + 1e7 * u(g);
    const int M = 5 + static_cast<int>(20 * u(g));
    for (int n = 0; n < M; ++n) {
        Intermediate it;
        it.denom_hz = d.E + (u(g) < 0.5 ? -1.0 : 1.0) * (1e5 + 2e7 * u(g));
        it.sign = -1;
        d.inter.push_back(it);
        Amp4 a{}, b{};
        a[tidx(UP, DOWN)] = rnd_c(g, 1e4);
        b[tidx(UP, DOWN)] = rnd_c(g, 1e4);
        d.vi.push_back(a);
        d.vm.push_back(b);
    }
    return d;
}

// XXZ regime: both flip directions, diagonal amplitudes with V_dd = -V_uu
Draw xxz_draw(std::mt19937& g)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Draw d;
    d.E = 1e8 + 1e8 * u(g);
    const int M = 5 + static_cast<int>(20 * u(g));
    for (int n = 0; n < M; ++n) {
        Intermediate it;
        it.denom_hz = (u(g) < 0.5 ? -1.0 : 1.0) * (1e6 + 3e8 * u(g));
        if (std::abs(std::abs(it.denom_hz) - d.E) < 1e5) it.denom_hz += 3e5;
        it.sign = -1;
        d.inter.push_back(it);
        Amp4 a{}, b{};
        for (auto* v : {&a, &b}) {
            (*v)[tidx(UP, DOWN)] = rnd_c(g, 1e4);
            (*v)[tidx(DOWN, UP)] = rnd_c(g, 1e4);
            (*v)[tidx(UP, UP)] = rnd_c(g, 1e4);
            (*v)[tidx(DOWN, DOWN)] = -(*v)[tidx(UP, UP)];
        }
        d.vi.push_back(a);
        d.vm.push_back(b);
    }
    return d;
}

// W_ac for a single intermediate built from the transition amplitudes of both spins
std::array<std::array<cplx, 4>, 4> coupling_block(const Amp4& vi, const Amp4& vm)
{
    std::array<std::array<cplx, 4>, 4> W{};
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) {
            const int ai = a / 2, am = a % 2, ci = c / 2, cm = c % 2;
            if (am == cm) W[a][c] += vi[tidx(ai, ci)];
            if (ai == ci) W[a][c] += vm[tidx(am, cm)];
        }
    return W;
}

}  // namespace

TEST_CASE("zero amplitudes give a zero K tensor")
{
    std::vector<Intermediate> inter(3);
    for (auto& it : inter) it.denom_hz = 1e7;
    std::vector<Amp4> z(3, Amp4{});
    const auto pc = generic_pair(inter, z, z, 1e6);
    for (const auto& row : pc.K)
        for (auto v : row) CHECK(v == 0.0);
    CHECK(pc.J_perp == 0.0);
    CHECK(pc.b_z == 0.0);
}

TEST_CASE("generic engine equals the XX fast path")
{
    std::mt19937 g(20240611);
    for (int k = 0; k < 50; ++k) {
        const auto d = xx_draw(g);
        const auto pc = generic_pair(d.inter, d.vi, d.vm, d.E);
        const auto f = xx_fast(d.inter, d.vi, d.vm, d.E);
        const double scale = std::max({std::abs(pc.J_perp), std::abs(pc.b_z), std::abs(f.J_perp)});
        CHECK(std::abs(pc.J_perp - f.J_perp.real()) <= 1e-12 * scale);
        CHECK(std::abs(2.0 * pc.J_pm - f.J_perp) <= 1e-12 * scale);
        CHECK(std::abs(pc.J_zz) <= 1e-12 * scale);
        CHECK(std::abs(pc.b_z - f.b_im) <= 1e-12 * scale);
        CHECK(pc.closure_error <= 1e-12 * scale);
    }
}

TEST_CASE("generic engine equals the XXZ fast path")
{
    std::mt19937 g(7);
    for (int k = 0; k < 50; ++k) {
        const auto d = xxz_draw(g);
        const auto pc = generic_pair(d.inter, d.vi, d.vm, d.E);
        const auto f = xxz_fast(d.inter, d.vi, d.vm, d.E);
        const double scale = std::max({std::abs(pc.J_perp), std::abs(pc.J_zz), std::abs(pc.b_z)});
        CHECK(std::abs(pc.J_perp - f.J_perp.real()) <= 1e-12 * scale);
        CHECK(std::abs(pc.J_zz - f.J_zz.real()) <= 1e-12 * scale);
        CHECK(std::abs(pc.b_z - f.b_im) <= 1e-12 * scale);
    }
}

TEST_CASE("XX regime has no Ising part and flips sign across the resonance")
{
    std::mt19937 g(3);
    auto d = xx_draw(g);
    const auto a = generic_pair(d.inter, d.vi, d.vm, d.E);
    for (auto& it : d.inter) it.denom_hz = 2.0 * d.E - it.denom_hz;
    const auto b = generic_pair(d.inter, d.vi, d.vm, d.E);
    CHECK(b.J_perp == doctest::Approx(-a.J_perp).epsilon(1e-12));
    CHECK(b.b_z == doctest::Approx(-a.b_z).epsilon(1e-12));
    CHECK(std::abs(a.J_zz) < 1e-12 * std::abs(a.J_perp));
}

TEST_CASE("pure diagonal amplitudes give an Ising coupling only")
{
    std::vector<Intermediate> inter(1);
    inter[0].denom_hz = 2e7;
    Amp4 a{}, b{};
    a[tidx(UP, UP)] = 3e3;
    a[tidx(DOWN, DOWN)] = -3e3;
    b[tidx(UP, UP)] = 2e3;
    b[tidx(DOWN, DOWN)] = -2e3;
    const auto pc = generic_pair(inter, {a}, {b}, 1e6);
    CHECK(pc.J_perp == 0.0);
    CHECK(pc.J_zz == doctest::Approx(-2.0 * 6e3 * 4e3 / 2e7));
}

TEST_CASE("second-order couplings against exact diagonalisation")
{
    // two spins and one mediator intermediate; weak coupling so fourth order is negligible
    std::mt19937 g(11);
    const double E = 1.0, D = 10.0, w = 1e-3;
    std::vector<Intermediate> inter(1);
    inter[0].denom_hz = D;
    inter[0].sign = -1;
    Amp4 vi, vm;
    for (int t = 0; t < 4; ++t) {
        vi[t] = rnd_c(g, w);
        vm[t] = rnd_c(g, w);
    }
    const auto pc = generic_pair(inter, {vi}, {vm}, E);
    const auto W = coupling_block(vi, vm);

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(8, 8);
    auto n_up = [](int a) { return (a / 2 == UP) + (a % 2 == UP); };
    for (int a = 0; a < 4; ++a) {
        H(a, a) = E * n_up(a);
        H(4 + a, 4 + a) = D + E * n_up(a);
        for (int c = 0; c < 4; ++c) {
            H(a, 4 + c) = W[a][c];
            H(4 + c, a) = std::conj(W[a][c]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(H);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    for (int a = 0; a < 4; ++a) {
        h(a, a) += E * n_up(a);
        for (int b = 0; b < 4; ++b) h(a, b) += pc.K[a][b];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eff(h);
    double kmax = 0.0;
    for (const auto& row : pc.K)
        for (auto v : row) kmax = std::max(kmax, std::abs(v));
    for (int k = 0; k < 4; ++k) CHECK(std::abs(full.eigenvalues()(k) - eff.eigenvalues()(k)) < 1e-4 * kmax);
}

TEST_CASE("Schrieffer-Wolff validity guard")
{
    MatrixElementSet set;
    Intermediate it;
    it.denom_hz = 1e6 + 10.0;
    set.inter = {it};
    set.max_abs_hz = 100.0;
    std::vector<Channel> ch(1);
    ch[0].label = "p";
    ch[0].terms[tidx(UP, DOWN)] = {true, KernelKind::dd_flip, 1.0};
    const auto ok = check_validity(set, ch, 1e6, 0.05);
    CHECK(ok.min_denominator_hz == doctest::Approx(10.0));
    CHECK(ok.ratio == doctest::Approx(0.1));
    CHECK_THROWS_AS(check_validity(set, ch, 1e6, 1.0), SchriefferWolffError);
}

TEST_CASE("small XX scenario: symmetry, reality and uniform field")
{
    auto sc = small_scenario("fig3_xx_lics.json", 30);
    const auto t = compute_couplings(sc, registry());
    CHECK((t.J_perp - t.J_perp.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.max_imag_rel < 1e-8);
    CHECK(t.max_asym_rel < 1e-8);
    CHECK(t.J_perp_at(1) < 0.0);
    CHECK(t.J_perp_at(2) > 0.0);
    CHECK(std::abs(t.J_zz_at(1)) < 1e-6 * std::abs(t.J_perp_at(1)));
    const int lo = t.n / 3, hi = 2 * t.n / 3;
    const double b0 = t.b_z(t.centre);
    for (int i = lo; i < hi; ++i) CHECK(std::abs(t.b_z(i) - b0) < 0.01 * std::abs(b0));
    // translational invariance on the ring
    CHECK(t.J_perp(lo, lo + 1) == doctest::Approx(t.J_perp_at(1)).epsilon(1e-8));
}

TEST_CASE("fast path reproduces the generic XX scenario")
{
    auto sc = small_scenario("fig3_xx_lics.json", 20);
    sc.engine.rows = "centre";
    const auto a = compute_couplings(sc, registry());
    sc.engine.path = "fast";
    const auto b = compute_couplings(sc, registry());
    for (int p = 1; p < 8; ++p) CHECK(b.J_perp_at(p) == doctest::Approx(a.J_perp_at(p)).epsilon(1e-10));
    CHECK(b.b_z(b.centre) == doctest::Approx(a.b_z(a.centre)).epsilon(1e-10));
}

TEST_CASE("Gaussian motional states")
{
    SUBCASE("narrow Gaussian reduces to the condensate")
    {
        auto sc = small_scenario("fig3_xx_lics.json", 20);
        sc.engine.rows = "centre";
        const auto bec = compute_couplings(sc, registry());
        sc.prep.motional = "gaussian";
        sc.prep.kappa0 = 1e-4;
        sc.prep.kappa0_mode = "full";
        const auto full = compute_couplings(sc, registry());
        sc.prep.kappa0_mode = "factorized";
        const auto fac = compute_couplings(sc, registry());
        for (int p = 1; p < 6; ++p) {
            CHECK(full.J_perp_at(p) == doctest::Approx(bec.J_perp_at(p)).epsilon(1e-12));
            CHECK(fac.J_perp_at(p) == doctest::Approx(bec.J_perp_at(p)).epsilon(1e-6));
        }
    }
    SUBCASE("phase factor of a broad Gaussian")
    {
        // continuum Gaussian restricted to the zone |k| < pi/L_at
        using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
        for (double k0 : {0.2, 0.3, 0.5})
            for (int d = 1; d <= 5; ++d) {
                auto w = [&](double x) { return std::exp(-(x / k0) * (x / k0)); };
                const double num = GK::integrate([&](double x) { return w(x) * std::cos(M_PI * x * d); }, -1.0, 1.0, 15, 1e-13);
                const double den = GK::integrate(w, -1.0, 1.0, 15, 1e-13);
                CHECK(std::abs(gaussian_phase_factor(k0, 100, d) - num / den) < 1e-4);
            }
        // narrow enough that the zone edge does not matter
        for (int d = 1; d <= 5; ++d)
            CHECK(std::abs(gaussian_phase_factor(0.2, 100, d) - std::exp(-std::pow(M_PI * d * 0.2, 2) / 4.0)) < 1e-9);
        CHECK(gaussian_phase_factor(0.0, 100, 3) == 1.0);
    }
    SUBCASE("motional weights are normalised")
    {
        MediatorPrep p;
        p.motional = "gaussian";
        p.kappa0 = 0.4;
        double s = 0.0;
        for (const auto& w : p.weights(50)) s += w.w;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
        p.motional = "table";
        p.table = {{0, 1, 2.0}, {1, 1, 2.0}};
        CHECK(p.weights(50)[1].w == doctest::Approx(0.5));
        p.table = {{0, 1, -1.0}};
        CHECK_THROWS(p.weights(50));
    }
}

TEST_CASE("kappa0 sweep at zero width matches the condensate")
{
    auto sc = small_scenario("fig3_xx_lics.json", 20);
    sc.engine.rows = "centre";
    const auto t = compute_couplings(sc, registry());
    const auto rows = kappa0_sweep(sc, registry(), {0.0, 0.5});
    REQUIRE(rows.size() == 2);
    for (int p = 2; p <= 5; ++p)
        CHECK(rows[0].ratio[p - 2] == doctest::Approx(t.J_perp_at(p) / std::abs(t.J_perp_at(1))).epsilon(1e-12));
    CHECK(std::abs(rows[1].ratio[1]) < std::abs(rows[0].ratio[1]));
}

TEST_CASE("Rydberg dressing")
{
    SUBCASE("amplitudes")
    {
        const auto r = dressed_amplitudes(2e6, 0.0);
        CHECK(r.a == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(r.b == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(r.W == doctest::Approx(2e6));
        const auto o = dressed_amplitudes(1e6, 3e6);
        CHECK(o.a * o.a + o.b * o.b == doctest::Approx(1.0));
        CHECK(o.a > o.b);
        const auto far = dressed_amplitudes(0.0, 5e6);
        CHECK(far.b == 0.0);
        CHECK_THROWS(dressed_amplitudes(0.0, 0.0));
    }
    SUBCASE("resonant dressing gives opposite diagonal amplitudes")
    {
        auto sc = small_scenario("fig6_xxz_rydberg.json", 10);
        const auto setup = resolve(sc, registry());
        REQUIRE(setup.channels.size() == 2);
        for (const auto& ch : setup.channels) {
            const double uu = ch.terms[tidx(UP, UP)].pref, dd = ch.terms[tidx(DOWN, DOWN)].pref;
            const double ud = ch.terms[tidx(UP, DOWN)].pref;
            CHECK(uu == doctest::Approx(-dd).epsilon(1e-14));
            CHECK(uu / ud == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        }
        // E_spin = Zeeman + (W_up - W_down) on resonance
        CHECK(setup.E_spin_hz == doctest::Approx(148.5e6 + 2.5e6 - 1.0e6));
        CHECK(setup.prefactor == 1.0);
        sc.prep.kind = "dressed";
        sc.prep.c_ns = 0.1;
        CHECK(resolve(sc, registry()).prefactor == doctest::Approx(0.01 * 10));
    }
    SUBCASE("undressed spins do not couple")
    {
        auto sc = small_scenario("fig6_xxz_rydberg.json", 10);
        sc.spin.omega_up_hz = sc.spin.omega_down_hz = 0.0;
        sc.spin.delta_up_hz = sc.spin.delta_down_hz = 4e6;
        const auto setup = resolve(sc, registry());
        for (const auto& ch : setup.channels)
            for (const auto& t : ch.terms) CHECK_FALSE(t.active);
    }
}

TEST_CASE("scenario validation and config strictness")
{
    auto sc = small_scenario("fig3_xx_lics.json", 10);
    sc.engine.sw_margin = 1e12;
    CHECK_THROWS_AS(compute_couplings(sc, registry()), SchriefferWolffError);
    sc = small_scenario("fig3_xx_lics.json", 10);
    sc.band_cap = 9;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

    std::ifstream in(testing_support::config_path("fig3_xx_lics.json"));
    auto doc = nlohmann::json::parse(in);
    doc["lattice"]["depth"] = 3;
    try {
        parse_config(doc);
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lattice.depth") != std::string::npos);
    }
    doc["lattice"].erase("depth");
    doc["geometry"]["rho"] = 500;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc["geometry"]["rho"] = {{"value", 500}, {"unit", "furlong"}};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc["geometry"]["rho"] = {{"value", 500}, {"unit", "nm"}};
    const auto cfg = parse_config(doc);
    CHECK(cfg.scenario.geometry.rho_m == doctest::Approx(500e-9));
    // the scenario written back parses to the same physics
    const auto again = parse_config(nlohmann::json::parse(config_to_json(cfg).dump()));
    CHECK(again.scenario.geometry.rho_m == doctest::Approx(cfg.scenario.geometry.rho_m).epsilon(1e-15));
    CHECK(again.scenario.mediator.n == cfg.scenario.mediator.n);
    CHECK(again.scenario.V0_erec == cfg.scenario.V0_erec);
}
