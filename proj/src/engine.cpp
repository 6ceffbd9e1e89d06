#include "rydmed/engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rydmed {

namespace {

inline int spin_of(int config, int which) { return which == 0 ? config / 2 : config % 2; }
inline int n_up(int config) { return (spin_of(config, 0) == UP) + (spin_of(config, 1) == UP); }

// <a| V |c> restricted to one intermediate: spin i goes alpha->gamma or spin m goes beta->delta
inline cplx w_elem(const Amp4& vi, const Amp4& vm, int a, int c)
{
    const int al = spin_of(a, 0), be = spin_of(a, 1), ga = spin_of(c, 0), de = spin_of(c, 1);
    cplx w = 0.0;
    if (be == de) w += vi[tidx(al, ga)];
    if (al == ga) w += vm[tidx(be, de)];
    return w;
}

}  // namespace

void coefficients_from_k(PairCoefficients& pc)
{
    auto& K = pc.K;
    pc.J_zz = (K[0][0] + K[3][3] - K[2][2] - K[1][1]).real();
    pc.J_pm = K[1][2];
    pc.J_perp = 2.0 * pc.J_pm.real();
    pc.J_zp = K[0][1] - K[2][3];
    pc.J_pp = K[0][3];
    pc.b_z = (K[0][0] - K[3][3] + K[1][1] - K[2][2]).real();
    pc.b_plus = K[0][2] + K[1][3];
    pc.b0 = 0.25 * (K[0][0] + K[1][1] + K[2][2] + K[3][3]).real();
}

PairCoefficients generic_pair(const std::vector<Intermediate>& inter, const std::vector<Amp4>& vi,
                              const std::vector<Amp4>& vm, double E_spin_hz)
{
    PairCoefficients pc;
    std::array<double, 4> E;
    for (int a = 0; a < 4; ++a) E[a] = E_spin_hz * n_up(a);

    KTensor K{};
    for (size_t n = 0; n < inter.size(); ++n) {
        const auto& it = inter[n];
        std::array<std::array<cplx, 4>, 4> W;
        bool any = false;
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                W[a][c] = w_elem(vi[n], vm[n], a, c);
                any = any || W[a][c] != 0.0;
            }
        if (!any) continue;
        const double D = it.denom_hz;
        const double s = 0.5 * it.sign;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                cplx acc = 0.0;
                for (int c = 0; c < 4; ++c) {
                    const cplx ww = W[a][c] * std::conj(W[b][c]);
                    if (ww == 0.0) continue;
                    const double da = D + E[c] - E[a], db = D + E[c] - E[b];
                    if (it.initial && (da == 0.0 || db == 0.0)) continue;
                    acc += ww * (1.0 / da + 1.0 / db);
                }
                K[a][b] += s * acc;
                // the initial state itself couples the low-energy configurations at first order
                if (it.initial && a != b && E[a] != E[b]) K[a][b] += W[a][b] * (W[a][a] - W[b][b]) / (E[a] - E[b]);
            }
    }
    double cl = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) cl = std::max(cl, std::abs(K[a][b] - std::conj(K[b][a])));
    pc.closure_error = cl;
    // enforce the conjugation identity: keep the upper triangle, mirror it
    for (int a = 0; a < 4; ++a) {
        K[a][a] = K[a][a].real();
        for (int b = a + 1; b < 4; ++b) K[b][a] = std::conj(K[a][b]);
    }
    pc.K = K;
    coefficients_from_k(pc);
    return pc;
}

FastCoefficients xx_fast(const std::vector<Intermediate>& inter, const std::vector<Amp4>& vi,
                         const std::vector<Amp4>& vm, double E_spin_hz)
{
    FastCoefficients f;
    const int t = tidx(UP, DOWN);
    for (size_t n = 0; n < inter.size(); ++n) {
        const double den = inter[n].denom_hz - E_spin_hz;
        f.J_perp += -2.0 * vi[n][t] * std::conj(vm[n][t]) / den;
        f.b_im += -2.0 * std::norm(vi[n][t]) / den;
    }
    return f;
}

FastCoefficients xxz_fast(const std::vector<Intermediate>& inter, const std::vector<Amp4>& vi,
                          const std::vector<Amp4>& vm, double E_spin_hz)
{
    FastCoefficients f;
    const int uu = tidx(UP, UP), dd = tidx(DOWN, DOWN), ud = tidx(UP, DOWN), du = tidx(DOWN, UP);
    for (size_t n = 0; n < inter.size(); ++n) {
        const double D = inter[n].denom_hz;
        const auto& a = vi[n];
        const auto& b = vm[n];
        f.J_perp += -2.0 * (a[ud] * std::conj(b[ud]) / (D - E_spin_hz) + b[du] * std::conj(a[du]) / (D + E_spin_hz));
        const cplx zz = (a[uu] - a[dd]) * std::conj(b[uu] - b[dd]) / D;
        f.J_zz += -(zz + std::conj(zz));
        const cplx cross = (b[uu] * std::conj(a[dd]) - b[dd] * std::conj(a[uu])) / D;
        f.b_im += 2.0 * (std::norm(a[dd]) - std::norm(a[uu])) / D - 2.0 * std::norm(a[ud]) / (D - E_spin_hz) +
                  2.0 * std::norm(a[du]) / (D + E_spin_hz) + 2.0 * cross.real();
    }
    return f;
}

ValidityReport check_validity(const MatrixElementSet& set, const std::vector<Channel>& channels, double E_spin_hz,
                              double margin)
{
    ValidityReport r;
    r.min_denominator_hz = std::numeric_limits<double>::infinity();
    r.max_element_hz = set.max_abs_hz;
    for (const auto& it : set.inter) {
        const auto& ch = channels[it.channel];
        for (int al = 0; al < 2; ++al)
            for (int be = 0; be < 2; ++be) {
                const auto& t = ch.terms[tidx(al, be)];
                if (!t.active || t.pref == 0.0) continue;
                // flipping up->down releases E_spin, down->up costs it
                const double shift = (al == be) ? 0.0 : (al == UP ? -E_spin_hz : E_spin_hz);
                const double den = std::abs(it.denom_hz + shift);
                if (it.initial && al == be) continue;
                if (den < r.min_denominator_hz) {
                    r.min_denominator_hz = den;
                    std::ostringstream os;
                    os << ch.label << " " << (al == UP ? "up" : "down") << "->" << (be == UP ? "up" : "down")
                       << " kappa=" << it.kappa << " band=" << it.band;
                    r.worst = os.str();
                }
            }
    }
    r.ratio = r.max_element_hz > 0 ? r.min_denominator_hz / r.max_element_hz : std::numeric_limits<double>::infinity();
    if (r.ratio < margin) {
        std::ostringstream os;
        os << "Schrieffer-Wolff validity violated: |denominator| " << r.min_denominator_hz << " Hz at " << r.worst
           << " vs largest element " << r.max_element_hz << " Hz (ratio " << r.ratio << " < margin " << margin << ")";
        throw SchriefferWolffError(os.str());
    }
    return r;
}

}  // namespace rydmed
