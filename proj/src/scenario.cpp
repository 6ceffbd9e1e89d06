#include "rydmed/scenario.hpp"

#include "rydmed/units.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rydmed {

std::string to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::xx_molecule: return "xx_molecule";
    case ScenarioKind::xxz_rydberg: return "xxz_rydberg";
    case ScenarioKind::ising: return "ising";
    case ScenarioKind::custom: return "custom";
    }
    return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s)
{
    for (auto k : {ScenarioKind::xx_molecule, ScenarioKind::xxz_rydberg, ScenarioKind::ising, ScenarioKind::custom})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown scenario '" + s + "'");
}

DressedAmplitudes dressed_amplitudes(double omega_hz, double delta_hz)
{
    DressedAmplitudes d;
    d.W = std::sqrt(0.25 * delta_hz * delta_hz + omega_hz * omega_hz);
    if (d.W == 0.0) throw std::invalid_argument("dressing needs a nonzero Rabi frequency or detuning");
    d.a = std::sqrt((d.W + 0.5 * delta_hz) / (2.0 * d.W));
    d.b = std::sqrt(std::max(0.0, d.W - 0.5 * delta_hz) / (2.0 * d.W));
    return d;
}

std::vector<MediatorPrep::Weight> MediatorPrep::weights(int n_cells) const
{
    std::vector<Weight> w;
    if (motional == "bec" || (motional == "gaussian" && kappa0 == 0.0)) {
        w.push_back({0, 1, 1.0});
    } else if (motional == "gaussian") {
        for (int k = -n_cells / 2; k < n_cells / 2; ++k) {
            const double x = 2.0 * k / n_cells / kappa0;
            w.push_back({k, 1, std::exp(-x * x)});
        }
    } else if (motional == "table") {
        w = table;
    } else {
        throw std::invalid_argument("unknown motional preparation '" + motional + "'");
    }
    double sum = 0.0;
    for (const auto& x : w) {
        if (x.w < 0.0) throw std::invalid_argument("motional weights must be non-negative");
        sum += x.w;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("motional weights sum to zero");
    for (auto& x : w) x.w /= sum;
    return w;
}

void Scenario::validate() const
{
    geometry.validate();
    if (n_cells < 2 || n_cells % 2) throw std::invalid_argument("lattice n_cells must be even and >= 2");
    if (band_cap < 1 || band_cap > n_bands) throw std::invalid_argument("band_cap must lie in 1..n_bands");
    if (smax < n_bands + 2) throw std::invalid_argument("smax must be at least n_bands + 2");
    if (engine.path != "generic" && engine.path != "fast") throw std::invalid_argument("engine.path: generic|fast");
    if (engine.rows != "all" && engine.rows != "centre") throw std::invalid_argument("engine.rows: all|centre");
    if (!(engine.sw_margin > 0.0)) throw std::invalid_argument("engine.sw_margin must be positive");
    if (prep.kind != "superatom" && prep.kind != "dressed") throw std::invalid_argument("prep.kind: superatom|dressed");
    if (prep.kappa0_mode != "factorized" && prep.kappa0_mode != "full")
        throw std::invalid_argument("prep.kappa0_mode: factorized|full");
    if (prep.kappa0 < 0.0) throw std::invalid_argument("prep.kappa0 must be non-negative");
    if (kind == ScenarioKind::xxz_rydberg && spin.kind != "dressed")
        throw std::invalid_argument("xxz_rydberg needs a dressed spin encoding");
    if (kind != ScenarioKind::xxz_rydberg && spin.kind != "molecular")
        throw std::invalid_argument(to_string(kind) + " needs a molecular spin encoding");
}

namespace {

std::shared_ptr<RadialPair> make_pair_radial(const AtomSpec& atom, const RydbergLevel& a, const RydbergLevel& b,
                                             const RadialOptions& opts)
{
    return std::make_shared<RadialPair>(radial_wavefunction(a, atom.defects, opts),
                                        radial_wavefunction(b, atom.defects, opts));
}

double level_gap_hz(const AtomSpec& atom, const RydbergLevel& up, const RydbergLevel& lo)
{
    return units::au_to_hz(rydberg_energy(up, atom.defects) - rydberg_energy(lo, atom.defects));
}

void set_term(Channel& ch, int al, int be, KernelKind kind, double pref, bool active)
{
    auto& t = ch.terms[tidx(al, be)];
    t.kind = kind;
    t.pref = pref;
    t.active = active && pref != 0.0;
}

void molecular_channels(const Scenario& sc, const SpeciesRegistry& reg, ResolvedSetup& out)
{
    const auto& mol = reg.molecule(sc.spin.molecule);
    const auto& atom = reg.atom(sc.mediator.atom);
    const auto& sp = sc.spin;
    out.E_spin_hz = sp.E_spin_hz ? *sp.E_spin_hz : rotational_energy(mol, sp.up.J) - rotational_energy(mol, sp.down.J);

    const int q = sp.up.mJ - sp.down.mJ;
    double d_flip = 0.0;
    if (sp.d_flip_au) d_flip = *sp.d_flip_au;
    else if (sc.kind != ScenarioKind::ising && std::abs(q) <= 1) d_flip = rotational_dipole_element(mol, sp.down, sp.up, q);
    // rotational eigenstates carry no lab-frame dipole; induced dipoles come from the config
    const double d_up = sp.d_up_au.value_or(0.0), d_down = sp.d_down_au.value_or(0.0);
    if (sc.kind == ScenarioKind::ising && d_up == 0.0 && d_down == 0.0)
        throw std::invalid_argument("ising scenario needs spin.d_up and/or spin.d_down");
    const bool reverse = sc.mediator.counter_rotating;

    const int n = sc.mediator.n;
    const RydbergLevel s{n, 0, 0.5, 0.5}, p12{n, 1, 0.5, 0.5}, p32{n, 1, 1.5, 0.5};
    const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);

    auto fill = [&](Channel& ch, KernelKind kind, double f) {
        set_term(ch, UP, DOWN, kind, f * d_flip, true);
        set_term(ch, DOWN, UP, kind, f * d_flip, reverse);
        set_term(ch, UP, UP, kind, f * d_up, true);
        set_term(ch, DOWN, DOWN, kind, f * d_down, true);
    };

    auto rp12 = make_pair_radial(atom, s, p12, sc.radial);
    const double off12 = level_gap_hz(atom, p12, s);
    {
        Channel ch;
        ch.label = "np1/2,+1/2";
        ch.offset_hz = off12;
        ch.radial = rp12;
        fill(ch, KernelKind::cd_dm0, 1.0 / 3.0);
        out.channels.push_back(ch);
        ch.label = "np1/2,-1/2";
        ch.terms = {};
        fill(ch, KernelKind::cd_dm1, -std::sqrt(2.0 / 3.0));
        out.channels.push_back(ch);
    }
    out.report["radial_dipole_np1/2_au"] = rp12->dipole();
    out.report["offset_np1/2_hz"] = off12;
    out.report["forster_defect_hz"] = off12 - out.E_spin_hz;
    if (atom.defects.has(1, 1.5)) out.report["forster_defect_np3/2_hz"] = level_gap_hz(atom, p32, s) - out.E_spin_hz;
    out.report["d_flip_au"] = d_flip;
    out.report["d_up_au"] = d_up;
    out.report["d_down_au"] = d_down;

    if (sc.mediator.include_p32) {
        auto rp32 = make_pair_radial(atom, s, p32, sc.radial);
        const double off32 = level_gap_hz(atom, p32, s);
        const std::array<std::pair<const char*, std::pair<KernelKind, double>>, 3> defs{{
            {"np3/2,+3/2", {KernelKind::cd_dm1, -1.0}},
            {"np3/2,+1/2", {KernelKind::cd_dm0, -s2 / 3.0}},
            {"np3/2,-1/2", {KernelKind::cd_dm1, 1.0 / s3}},
        }};
        for (const auto& [label, kf] : defs) {
            Channel ch;
            ch.label = label;
            ch.offset_hz = off32;
            ch.radial = rp32;
            fill(ch, kf.first, kf.second);
            out.channels.push_back(ch);
        }
        out.report["radial_dipole_np3/2_au"] = rp32->dipole();
        out.report["offset_np3/2_hz"] = off32;
    }
    if (sc.mediator.same_parity) {
        Channel ch;
        ch.label = "ns";
        ch.parity_l = 0;
        ch.offset_hz = 0.0;
        ch.same_state = true;
        ch.radial = make_pair_radial(atom, s, s, sc.radial);
        fill(ch, KernelKind::same_parity, 1.0);
        out.channels.push_back(ch);
    }
}

void dressed_channels(const Scenario& sc, const SpeciesRegistry& reg, ResolvedSetup& out)
{
    const auto& sp = sc.spin;
    const auto& med = sc.mediator;
    const auto& spin_atom = reg.atom(sp.atom);
    const auto& med_atom = reg.atom(med.atom);

    const auto up = dressed_amplitudes(sp.omega_up_hz, sp.delta_up_hz);
    const auto dn = dressed_amplitudes(sp.omega_down_hz, sp.delta_down_hz);
    const auto md = dressed_amplitudes(med.omega_hz, med.delta_hz);
    out.E_spin_hz = sp.zeeman_hz + (0.5 * sp.delta_up_hz + up.W) - (0.5 * sp.delta_down_hz + dn.W);

    const double d_spin = RadialPair(radial_wavefunction({sp.n, 0, 0.5, 0.5}, spin_atom.defects, sc.radial),
                                     radial_wavefunction({sp.n, 1, 0.5, 0.5}, spin_atom.defects, sc.radial))
                              .dipole();
    const double d_med = RadialPair(radial_wavefunction({med.n, 0, 0.5, 0.5}, med_atom.defects, sc.radial),
                                    radial_wavefunction({med.n, 1, 0.5, 0.5}, med_atom.defects, sc.radial))
                             .dipole();

    const double flip = (up.a * dn.b + up.b * dn.a) / 3.0;
    const double diag_up = 2.0 * up.a * up.b / 9.0;
    const double diag_dn = -2.0 * dn.a * dn.b / 9.0;
    const std::array<std::pair<const char*, std::pair<double, double>>, 2> meds{{
        {"med+", {md.a, med.zeeman_hz + 0.5 * med.delta_hz + md.W}},
        {"med-", {-md.b, med.zeeman_hz + 0.5 * med.delta_hz - md.W}},
    }};
    for (const auto& [label, amp] : meds) {
        Channel ch;
        ch.label = label;
        ch.offset_hz = amp.second;
        const double base = d_med * d_spin * amp.first;
        set_term(ch, UP, DOWN, KernelKind::dd_flip, flip * base, true);
        set_term(ch, DOWN, UP, KernelKind::dd_flip, flip * base, true);
        set_term(ch, UP, UP, KernelKind::dd_diag, diag_up * base, true);
        set_term(ch, DOWN, DOWN, KernelKind::dd_diag, diag_dn * base, true);
        out.channels.push_back(ch);
        out.report[std::string("offset_") + label + "_hz"] = amp.second;
    }
    out.report["radial_dipole_spin_au"] = d_spin;
    out.report["radial_dipole_mediator_au"] = d_med;
    out.report["amplitudes"] = {{"a_up", up.a}, {"b_up", up.b}, {"a_down", dn.a}, {"b_down", dn.b},
                                {"d_plus", md.a}, {"d_minus", -md.b}};
}

double matrix_norm_max(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

ResolvedSetup resolve(const Scenario& sc, const SpeciesRegistry& reg, RadialIntegralCache* cache)
{
    sc.validate();
    ResolvedSetup out;
    LatticeSpec lat;
    lat.period_m = sc.geometry.L_at_m;
    lat.V0_erec = sc.V0_erec;
    lat.n_cells = sc.n_cells;
    lat.mass_kg = reg.atom(sc.mediator.atom).mass_kg;
    out.bands = std::make_shared<BandStructure>(solve_bands(lat, sc.smax, sc.n_bands));

    if (sc.spin.kind == "dressed") dressed_channels(sc, reg, out);
    else molecular_channels(sc, reg, out);

    // the cache keeps the reported dipoles reproducible across runs
    if (cache && sc.spin.kind == "molecular") {
        const auto& atom = reg.atom(sc.mediator.atom);
        const auto a = radial_wavefunction({sc.mediator.n, 0, 0.5, 0.5}, atom.defects, sc.radial);
        const auto b = radial_wavefunction({sc.mediator.n, 1, 0.5, 0.5}, atom.defects, sc.radial);
        out.report["radial_dipole_cached_au"] = radial_moment_integral(a, b, 3, INFINITY, cache);
        out.report["containment_at_L_at"] = containment_fraction(a, units::m_to_au(sc.geometry.L_at_m));
    }

    out.prefactor = 1.0;
    if (sc.prep.kind == "dressed") out.prefactor = sc.prep.c_ns * sc.prep.c_ns * sc.geometry.n_atoms;
    out.report["E_spin_hz"] = out.E_spin_hz;
    out.report["recoil_hz"] = lat.recoil_hz();
    out.report["prefactor"] = out.prefactor;
    nlohmann::json chans = nlohmann::json::array();
    for (const auto& ch : out.channels) {
        nlohmann::json c{{"label", ch.label}, {"offset_hz", ch.offset_hz}, {"l", ch.parity_l}};
        for (int t = 0; t < 4; ++t)
            if (ch.terms[t].active)
                c["terms"].push_back({{"transition", t}, {"kernel", to_string(ch.terms[t].kind)}, {"pref_au", ch.terms[t].pref}});
        chans.push_back(c);
    }
    out.report["channels"] = chans;
    out.engine = std::make_shared<MatrixElementEngine>(out.bands, sc.geometry.rho_m, out.channels, sc.band_cap);
    return out;
}

namespace {

bool xx_fast_applicable(const std::vector<Channel>& chans)
{
    for (const auto& ch : chans) {
        if (ch.same_state) return false;
        for (int t = 0; t < 4; ++t)
            if (ch.terms[t].active && t != tidx(UP, DOWN)) return false;
    }
    return true;
}

}  // namespace

CouplingTable couplings_for_state(const Scenario& sc, const ResolvedSetup& setup, int kappa0, int band0)
{
    const int N = sc.geometry.n_spins;
    CouplingTable tab;
    tab.n = N;
    tab.centre = sc.geometry.centre();
    tab.E_spin_hz = setup.E_spin_hz;
    tab.x_m.resize(N);
    for (int i = 0; i < N; ++i) tab.x_m[i] = sc.geometry.spin_position_m(i);
    tab.J_perp = Eigen::MatrixXd::Zero(N, N);
    tab.J_zz = Eigen::MatrixXd::Zero(N, N);
    tab.b_pair = Eigen::MatrixXd::Zero(N, N);
    tab.b0 = Eigen::MatrixXd::Zero(N, N);
    tab.b_z = Eigen::VectorXd::Zero(N);
    tab.row_done.assign(N, 0);

    auto set = setup.engine->compute(kappa0, band0, tab.x_m);
    tab.validity = check_validity(set, setup.channels, setup.E_spin_hz, sc.engine.sw_margin);
    spdlog::info("SW validity (kappa0={}, band0={}): min denominator {:.6g} Hz, max element {:.6g} Hz, ratio {:.4g} "
                 "(margin {}), tightest: {}",
                 kappa0, band0, tab.validity.min_denominator_hz, tab.validity.max_element_hz, tab.validity.ratio,
                 sc.engine.sw_margin, tab.validity.worst);

    const bool fast = sc.engine.path == "fast";
    const bool xxz = sc.kind == ScenarioKind::xxz_rydberg;
    if (fast && !xxz && !xx_fast_applicable(setup.channels))
        throw std::invalid_argument("fast path needs up->down transition channels only; use engine.path = generic");
    if (fast && xxz)
        for (const auto& ch : setup.channels)
            if (ch.same_state) throw std::invalid_argument("fast XXZ path does not cover same-state channels");

    const bool all = sc.engine.rows == "all";
    const int c = tab.centre;
    double jmax = 0.0;
    std::vector<std::pair<double, double>> imag;  // (|Im|, |J|)
    for (int i = 0; i < N; ++i)
        for (int m = i + 1; m < N; ++m) {
            if (!all && i != c && m != c) continue;
            const auto& vi = set.v[i];
            const auto& vm = set.v[m];
            if (fast) {
                auto f = xxz ? xxz_fast(set.inter, vi, vm, setup.E_spin_hz) : xx_fast(set.inter, vi, vm, setup.E_spin_hz);
                auto g = xxz ? xxz_fast(set.inter, vm, vi, setup.E_spin_hz) : xx_fast(set.inter, vm, vi, setup.E_spin_hz);
                tab.J_perp(i, m) = tab.J_perp(m, i) = f.J_perp.real();
                tab.J_zz(i, m) = tab.J_zz(m, i) = f.J_zz.real();
                tab.b_pair(i, m) = f.b_im;
                tab.b_pair(m, i) = g.b_im;
                imag.emplace_back(std::abs(f.J_perp.imag()), std::abs(f.J_perp));
                tab.max_asym_rel = std::max(tab.max_asym_rel, std::abs(f.J_perp - g.J_perp) / std::max(std::abs(f.J_perp), 1e-300));
            } else {
                auto pc = generic_pair(set.inter, vi, vm, setup.E_spin_hz);
                const auto& K = pc.K;
                tab.J_perp(i, m) = tab.J_perp(m, i) = pc.J_perp;
                tab.J_zz(i, m) = tab.J_zz(m, i) = pc.J_zz;
                tab.b_pair(i, m) = pc.b_z;
                tab.b_pair(m, i) = (K[0][0] - K[3][3] + K[2][2] - K[1][1]).real();
                tab.b0(i, m) = tab.b0(m, i) = pc.b0;
                tab.closure_error = std::max(tab.closure_error, pc.closure_error);
                imag.emplace_back(std::abs(pc.J_pm.imag()), std::abs(pc.J_pm));
                if (sc.engine.keep_nonresonant)
                    tab.nonresonant_max_hz = std::max({tab.nonresonant_max_hz, std::abs(pc.J_pp), std::abs(pc.J_zp),
                                                       std::abs(pc.b_plus)});
                if (i == c || m == c) {
                    // the reversed call checks the (i, m) <-> (m, i) symmetry on the centre row
                    auto rc = generic_pair(set.inter, vm, vi, setup.E_spin_hz);
                    const double s = std::max(std::abs(pc.J_perp), std::abs(pc.J_zz));
                    if (s > 0.0)
                        tab.max_asym_rel = std::max(tab.max_asym_rel, std::max(std::abs(rc.J_perp - pc.J_perp),
                                                                               std::abs(rc.J_zz - pc.J_zz)) / s);
                }
            }
            jmax = std::max({jmax, std::abs(tab.J_perp(i, m)), std::abs(tab.J_zz(i, m))});
        }
    for (auto [im, ab] : imag)
        if (ab > 1e-9 * jmax && ab > 0.0) tab.max_imag_rel = std::max(tab.max_imag_rel, im / ab);
    for (int i = 0; i < N; ++i) {
        if (!all && i != c) continue;
        tab.row_done[i] = 1;
        double s = 0.0;
        for (int m = 0; m < N; ++m)
            if (m != i) s += tab.b_pair(i, m);
        tab.b_z(i) = s;
    }
    return tab;
}

double gaussian_phase_factor(double kappa0_pi_over_L, int n_cells, double d_cells)
{
    if (kappa0_pi_over_L == 0.0) return 1.0;
    double num = 0.0, den = 0.0;
    for (int k = -n_cells / 2; k < n_cells / 2; ++k) {
        const double x = 2.0 * k / n_cells;
        const double w = std::exp(-(x / kappa0_pi_over_L) * (x / kappa0_pi_over_L));
        num += w * std::cos(units::pi * x * d_cells);
        den += w;
    }
    return num / den;
}

namespace {

void accumulate(CouplingTable& acc, const CouplingTable& t, double w)
{
    acc.J_perp += w * t.J_perp;
    acc.J_zz += w * t.J_zz;
    acc.b_pair += w * t.b_pair;
    acc.b0 += w * t.b0;
    acc.b_z += w * t.b_z;
    acc.max_imag_rel = std::max(acc.max_imag_rel, t.max_imag_rel);
    acc.max_asym_rel = std::max(acc.max_asym_rel, t.max_asym_rel);
    acc.closure_error = std::max(acc.closure_error, t.closure_error);
    acc.nonresonant_max_hz = std::max(acc.nonresonant_max_hz, w * t.nonresonant_max_hz);
    if (t.validity.ratio < acc.validity.ratio || acc.validity.worst.empty()) acc.validity = t.validity;
}

void scale(CouplingTable& t, double f)
{
    t.J_perp *= f;
    t.J_zz *= f;
    t.b_pair *= f;
    t.b0 *= f;
    t.b_z *= f;
    t.nonresonant_max_hz *= f;
}

// J(i,m) -> g(X_i - X_m) J(i,m); b untouched
void apply_gaussian(CouplingTable& t, const Scenario& sc)
{
    const double ratio = sc.geometry.L_spin_m / sc.geometry.L_at_m;
    for (int i = 0; i < t.n; ++i)
        for (int m = 0; m < t.n; ++m) {
            if (i == m) continue;
            const double g = gaussian_phase_factor(sc.prep.kappa0, sc.n_cells, (m - i) * ratio);
            t.J_perp(i, m) *= g;
            t.J_zz(i, m) *= g;
        }
}

}  // namespace

CouplingTable compute_couplings(const Scenario& sc, const SpeciesRegistry& reg, RadialIntegralCache* cache)
{
    auto setup = resolve(sc, reg, cache);
    const auto weights = sc.prep.weights(sc.n_cells);
    const bool factorized = sc.prep.motional == "gaussian" && sc.prep.kappa0_mode == "factorized";

    CouplingTable tab;
    if (weights.size() == 1 || factorized) {
        const auto& w0 = factorized ? MediatorPrep::Weight{0, 1, 1.0} : weights.front();
        tab = couplings_for_state(sc, setup, w0.kappa, w0.band);
        if (factorized) apply_gaussian(tab, sc);
    } else {
        for (size_t k = 0; k < weights.size(); ++k) {
            const auto& w = weights[k];
            if (w.w < 1e-14) continue;
            auto t = couplings_for_state(sc, setup, w.kappa, w.band);
            if (tab.n == 0) {
                tab = t;
                scale(tab, w.w);
            } else {
                accumulate(tab, t, w.w);
            }
        }
    }
    // superatom: (1/N_a) sum over q of identical delocalised contributions; dressed adds |c_ns|^2 N_a
    scale(tab, setup.prefactor);

    const double sym = std::max((tab.J_perp - tab.J_perp.transpose()).cwiseAbs().maxCoeff(),
                                (tab.J_zz - tab.J_zz.transpose()).cwiseAbs().maxCoeff());
    spdlog::info("couplings: |J| max {:.6g} Hz, max Im/|J| {:.3g}, centre-row asymmetry {:.3g}, closure error {:.3g} Hz, "
                 "matrix symmetry {:.3g} Hz, short-range kernel residual {:.3g}",
                 std::max(matrix_norm_max(tab.J_perp), matrix_norm_max(tab.J_zz)), tab.max_imag_rel, tab.max_asym_rel,
                 tab.closure_error, sym, setup.engine->residual_report());
    if (sc.engine.keep_nonresonant)
        spdlog::info("non-resonant terms (J++, Jz+, b+) kept for reporting: max {:.6g} Hz", tab.nonresonant_max_hz);

    tab.provenance = setup.report;
    tab.provenance["validity"] = {{"min_denominator_hz", tab.validity.min_denominator_hz},
                                  {"max_element_hz", tab.validity.max_element_hz},
                                  {"ratio", tab.validity.ratio},
                                  {"margin", sc.engine.sw_margin},
                                  {"tightest", tab.validity.worst}};
    tab.provenance["diagnostics"] = {{"max_imag_rel", tab.max_imag_rel},
                                     {"max_asym_rel", tab.max_asym_rel},
                                     {"closure_error_hz", tab.closure_error},
                                     {"kernel_residual_peak", setup.engine->residual_report()},
                                     {"nonresonant_max_hz", tab.nonresonant_max_hz}};
    tab.provenance["weights"] = weights.size();

    if (sc.engine.convergence_cap > sc.band_cap && sc.engine.convergence_cap <= sc.n_bands) {
        Scenario alt = sc;
        alt.band_cap = sc.engine.convergence_cap;
        alt.engine.rows = "centre";
        alt.engine.convergence_cap = 0;
        alt.prep.motional = "bec";
        auto base = sc;
        base.engine.rows = "centre";
        base.prep.motional = "bec";
        base.engine.convergence_cap = 0;
        auto a = couplings_for_state(alt, resolve(alt, reg, nullptr), 0, 1);
        auto b = couplings_for_state(base, setup, 0, 1);
        double worst = 0.0;
        const int c = b.centre;
        const double j1 = std::max(std::abs(b.J_perp(c, c + 1 < b.n ? c + 1 : c - 1)), std::abs(b.J_zz(c, c + 1 < b.n ? c + 1 : c - 1)));
        for (int p = 1; p <= 5 && c + p < b.n; ++p)
            worst = std::max({worst, std::abs(a.J_perp(c, c + p) - b.J_perp(c, c + p)),
                              std::abs(a.J_zz(c, c + p) - b.J_zz(c, c + p))});
        const double rel = j1 > 0 ? worst / j1 : 0.0;
        spdlog::info("band truncation: nu <= {} vs nu <= {} changes the centre row (p <= 5) by {:.3g} of |J(1)|",
                     sc.band_cap, alt.band_cap, rel);
        tab.provenance["band_convergence"] = {{"cap", sc.band_cap}, {"reference_cap", alt.band_cap}, {"max_rel_change", rel}};
    }
    return tab;
}

std::vector<SweepRow> kappa0_sweep(const Scenario& sc, const SpeciesRegistry& reg, const std::vector<double>& grid,
                                   RadialIntegralCache* cache)
{
    std::vector<SweepRow> rows;
    Scenario base = sc;
    base.engine.rows = "centre";
    base.engine.convergence_cap = 0;
    base.prep.motional = "gaussian";
    auto ratios = [&](const CouplingTable& t, double k0, bool factor) {
        SweepRow r;
        r.kappa0 = k0;
        const int c = t.centre;
        const double ls = sc.geometry.L_spin_m / sc.geometry.L_at_m;
        auto J = [&](int p) {
            const double v = t.J_perp(c, c + p) != 0.0 ? t.J_perp(c, c + p) : t.J_zz(c, c + p);
            return factor ? v * gaussian_phase_factor(k0, sc.n_cells, p * ls) : v;
        };
        const double j1 = std::abs(J(1));
        for (int p = 2; p <= 5; ++p) r.ratio.push_back(c + p < t.n && j1 > 0 ? J(p) / j1 : 0.0);
        return r;
    };
    if (sc.prep.kappa0_mode == "factorized") {
        base.prep.motional = "bec";
        auto setup = resolve(base, reg, cache);
        auto t = couplings_for_state(base, setup, 0, 1);
        scale(t, setup.prefactor);
        for (double k0 : grid) rows.push_back(ratios(t, k0, true));
    } else {
        for (double k0 : grid) {
            base.prep.kappa0 = k0;
            rows.push_back(ratios(compute_couplings(base, reg, cache), k0, false));
        }
    }
    return rows;
}

}  // namespace rydmed
