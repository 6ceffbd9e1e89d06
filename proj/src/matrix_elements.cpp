#include "rydmed/matrix_elements.hpp"

#include "rydmed/units.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

namespace rydmed {

MatrixElementEngine::MatrixElementEngine(std::shared_ptr<const BandStructure> bands, double rho_m,
                                         std::vector<Channel> channels, int max_band)
    : bands_(std::move(bands)), channels_(std::move(channels)), max_band_(max_band)
{
    if (!bands_) throw std::invalid_argument("matrix elements need a band structure");
    if (max_band_ < 1 || max_band_ > bands_->n_bands())
        throw std::invalid_argument("band cap exceeds the solved band count");
    rho_ = units::m_to_au(rho_m);
    Lat_ = units::m_to_au(bands_->spec().period_m);
    N_ = bands_->spec().n_cells;
    ring_ = Lat_ * N_;
    for (const auto& ch : channels_)
        for (const auto& t : ch.terms)
            if (t.active) {
                if (needs_radial(t.kind) && !ch.radial)
                    throw std::invalid_argument("channel " + ch.label + " needs radial data");
                transform(t.kind, ch.radial);
            }
}

KernelTransform& MatrixElementEngine::transform(KernelKind kind, const std::shared_ptr<const RadialPair>& pair)
{
    const RadialPair* key = needs_radial(kind) ? pair.get() : nullptr;
    auto id = std::make_pair(static_cast<int>(kind), key);
    auto it = transforms_.find(id);
    if (it == transforms_.end())
        it = transforms_
                 .emplace(id, std::make_unique<KernelTransform>(kind, rho_, ring_,
                                                                needs_radial(kind) ? pair : nullptr))
                 .first;
    return *it->second;
}

double MatrixElementEngine::residual_report() const
{
    double r = 0.0;
    for (const auto& [k, t] : transforms_) r = std::max(r, t->residual_peak());
    return r;
}

std::vector<Intermediate> MatrixElementEngine::intermediates(int kappa0, int band0) const
{
    const double e0 = bands_->energy(kappa0, band0);
    const double erec = bands_->spec().recoil_hz();
    std::vector<Intermediate> out;
    for (size_t c = 0; c < channels_.size(); ++c) {
        const auto& ch = channels_[c];
        for (int kappa = -N_ / 2; kappa < N_ / 2; ++kappa)
            for (int nu = 1; nu <= max_band_; ++nu) {
                Intermediate it;
                it.channel = static_cast<int>(c);
                it.kappa = kappa;
                it.band = nu;
                it.denom_hz = ch.offset_hz + (bands_->energy(kappa, nu) - e0) * erec;
                it.sign = (ch.parity_l % 2 == 0) ? 1 : -1;
                it.initial = ch.same_state && kappa == kappa0 && nu == band0;
                out.push_back(it);
            }
    }
    return out;
}

cplx MatrixElementEngine::sandwich(int channel, int term, int kappa0, int band0, int kappa, int band, double x_m_au)
{
    const auto& ch = channels_.at(channel);
    const auto& t = ch.terms.at(term);
    auto& kt = transform(t.kind, ch.radial);
    const auto& s0 = bands_->at(kappa0, band0);
    const auto& s1 = bands_->at(kappa, band);
    const int S = bands_->smax();
    cplx acc = 0.0;
    for (int d = -2 * S; d <= 2 * S; ++d) {
        double bd = 0.0;
        for (int s = std::max(-S, d - S); s <= std::min(S, d + S); ++s) bd += s0.coeff(s - d) * s1.coeff(s);
        if (bd == 0.0) continue;
        const int n = kappa - kappa0 + N_ * d;
        acc += bd * kt.at(n) * std::polar(1.0, kt.Q(n) * x_m_au);
    }
    return acc / ring_;
}

MatrixElementSet MatrixElementEngine::compute(int kappa0, int band0, const std::vector<double>& spin_x_m)
{
    MatrixElementSet set;
    set.kappa0 = kappa0;
    set.band0 = band0;
    set.inter = intermediates(kappa0, band0);
    const size_t M = set.inter.size();
    const size_t NS = spin_x_m.size();
    const int S = bands_->smax();
    const int D = 2 * S;
    const auto& s0 = bands_->at(kappa0, band0);

    // spin phases: exp(i 2 pi (kappa - kappa0) x / ring) * exp(i 2 pi d x / L)
    std::vector<double> xs(NS);
    for (size_t m = 0; m < NS; ++m) xs[m] = units::m_to_au(spin_x_m[m]);
    std::vector<std::vector<cplx>> dphase(NS, std::vector<cplx>(2 * D + 1));
    for (size_t m = 0; m < NS; ++m)
        for (int d = -D; d <= D; ++d) dphase[m][d + D] = std::polar(1.0, 2.0 * units::pi * d * xs[m] / Lat_);

    set.v.assign(NS, std::vector<Amp4>(M, Amp4{}));
    std::vector<double> coef(2 * D + 1);
    std::vector<cplx> B(2 * D + 1);
    for (size_t a = 0; a < M; ++a) {
        const auto& it = set.inter[a];
        const auto& ch = channels_[it.channel];
        const auto& s1 = bands_->at(it.kappa, it.band);
        for (int d = -D; d <= D; ++d) {
            double b = 0.0;
            for (int s = std::max(-S, d - S); s <= std::min(S, d + S); ++s) b += s0.coeff(s - d) * s1.coeff(s);
            coef[d + D] = b;
        }
        const int dk = it.kappa - kappa0;
        // group terms by kernel kind so every transform is evaluated once
        std::map<int, std::vector<int>> by_kind;
        for (int t = 0; t < 4; ++t)
            if (ch.terms[t].active && ch.terms[t].pref != 0.0) by_kind[static_cast<int>(ch.terms[t].kind)].push_back(t);
        for (auto& [kind, tlist] : by_kind) {
            auto& kt = transform(static_cast<KernelKind>(kind), ch.radial);
            for (int d = -D; d <= D; ++d) B[d + D] = coef[d + D] == 0.0 ? cplx(0.0) : coef[d + D] * kt.at(dk + N_ * d);
            for (size_t m = 0; m < NS; ++m) {
                cplx acc = 0.0;
                for (int d = -D; d <= D; ++d)
                    if (B[d + D] != 0.0) acc += B[d + D] * dphase[m][d + D];
                acc *= std::polar(1.0, 2.0 * units::pi * dk * xs[m] / ring_) / ring_;
                for (int t : tlist) {
                    const cplx v = units::au_to_hz(1.0) * ch.terms[t].pref * acc;
                    set.v[m][a][t] = v;
                    set.max_abs_hz = std::max(set.max_abs_hz, std::abs(v));
                }
            }
        }
    }
    return set;
}

DirectResult matrix_element_direct(const BlochState& in, const BlochState& out, const LatticeSpec& spec,
                                   KernelKind kind, const RadialPair* pair, double rho_au, double x_m_au,
                                   double rel_tol)
{
    const double L = units::m_to_au(spec.period_m);
    const double ring = L * spec.n_cells;
    const double K = units::pi / L;
    const double k0 = 2.0 * units::pi * in.kappa / ring;
    const double k1 = 2.0 * units::pi * out.kappa / ring;

    // phi0*(X) phi(X) / ring from the two plane-wave expansions
    auto bloch_sum = [&](const BlochState& st, double k, double X) {
        cplx acc = 0.0;
        for (int s = -st.smax; s <= st.smax; ++s) {
            const double c = st.coeff(s);
            if (c != 0.0) acc += c * std::polar(1.0, (k + 2.0 * s * K) * X);
        }
        return acc;
    };
    auto density = [&](double X) { return std::conj(bloch_sum(in, k0, X)) * bloch_sum(out, k1, X) / ring; };
    // fixed Gauss-Legendre panels; 16 panels per cell resolve the shortest plane wave comfortably
    using GL = boost::math::quadrature::gauss<double, 20>;
    const int panels = 16;
    DirectResult res;
    auto cell = [&](double a, double b) {
        const double h = (b - a) / panels;
        cplx acc = 0.0;
        for (int k = 0; k < panels; ++k) {
            const double lo = a + k * h, mid = lo + 0.5 * h;
            const auto& xs = GL::abscissa();
            const auto& ws = GL::weights();
            for (size_t i = 0; i < xs.size(); ++i)
                for (double sgn : {-1.0, 1.0}) {
                    if (xs[i] == 0.0 && sgn < 0) continue;
                    const double X = mid + sgn * 0.5 * h * xs[i];
                    acc += 0.5 * h * ws[i] * density(X) * kernel_value(kind, X - x_m_au, rho_au, pair);
                }
        }
        return acc;
    };
    cplx total = cell(x_m_au - 0.5 * L, x_m_au + 0.5 * L);
    res.cells = 1;
    int quiet = 0;
    for (int j = 1; j < 10000000; ++j) {
        const double a = x_m_au + (j - 0.5) * L, b = a + L;
        const cplx c = cell(a, b) + cell(-b + 2 * x_m_au, -a + 2 * x_m_au);
        total += c;
        res.cells += 2;
        res.error_estimate = std::abs(c);
        // several consecutive quiet cells so an oscillation node does not stop the sum early
        if (std::abs(c) < rel_tol * std::abs(total)) {
            if (++quiet >= 8) break;
        } else {
            quiet = 0;
        }
    }
    res.value = total;
    return res;
}

}  // namespace rydmed
