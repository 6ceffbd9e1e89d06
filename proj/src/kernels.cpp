#include "rydmed/kernels.hpp"

#include "rydmed/units.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rydmed {

using cplx = std::complex<double>;

void BilayerGeometry::validate() const
{
    if (!(rho_m > 0.0)) throw std::invalid_argument("interlayer distance must be positive");
    if (!(L_spin_m > 0.0) || !(L_at_m > 0.0)) throw std::invalid_argument("lattice periods must be positive");
    if (n_spins < 1 || n_atoms < 1) throw std::invalid_argument("need at least one spin and one mediator");
}

double BilayerGeometry::spin_position_m(int index) const { return (index - n_spins / 2) * L_spin_m; }

std::string to_string(KernelKind k)
{
    switch (k) {
    case KernelKind::cd_dm0: return "cd_dm0";
    case KernelKind::cd_dm1: return "cd_dm1";
    case KernelKind::same_parity: return "same_parity";
    case KernelKind::dd_flip: return "dd_flip";
    case KernelKind::dd_diag: return "dd_diag";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string& s)
{
    for (auto k : {KernelKind::cd_dm0, KernelKind::cd_dm1, KernelKind::same_parity, KernelKind::dd_flip,
                   KernelKind::dd_diag})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown kernel kind '" + s + "'");
}

bool needs_radial(KernelKind k)
{
    return k == KernelKind::cd_dm0 || k == KernelKind::cd_dm1 || k == KernelKind::same_parity;
}

double kernel_dd_flip(double x, double rho)
{
    const double R2 = x * x + rho * rho;
    return x * rho / (R2 * R2 * std::sqrt(R2));
}

double kernel_dd_diag(double x, double rho)
{
    const double R2 = x * x + rho * rho;
    return (x * x - 2.0 * rho * rho) / (R2 * R2 * std::sqrt(R2));
}

double kernel_cd_dm0(double x, double rho, const RadialPair& pair)
{
    const double R = std::hypot(x, rho);
    return kernel_dd_diag(x, rho) * pair.partial3(R) + pair.tail0(R);
}

double kernel_cd_dm1(double x, double rho, const RadialPair& pair)
{
    const double R = std::hypot(x, rho);
    return std::sqrt(1.5) * kernel_dd_flip(x, rho) * pair.partial3(R);
}

double kernel_same_parity(double x, double rho, const RadialPair& pair)
{
    const double R = std::hypot(x, rho);
    const double inside = pair.moment(2, R);
    return rho / (R * R * R) * (1.0 - inside);
}

double kernel_value(KernelKind kind, double x, double rho, const RadialPair* pair)
{
    if (needs_radial(kind) && !pair) throw std::invalid_argument("kernel needs radial data");
    switch (kind) {
    case KernelKind::cd_dm0: return kernel_cd_dm0(x, rho, *pair);
    case KernelKind::cd_dm1: return kernel_cd_dm1(x, rho, *pair);
    case KernelKind::same_parity: return kernel_same_parity(x, rho, *pair);
    case KernelKind::dd_flip: return kernel_dd_flip(x, rho);
    case KernelKind::dd_diag: return kernel_dd_diag(x, rho);
    }
    return 0.0;
}

double dipole_strength(KernelKind kind, const RadialPair* pair)
{
    switch (kind) {
    case KernelKind::cd_dm0: return pair->dipole();
    case KernelKind::cd_dm1: return std::sqrt(1.5) * pair->dipole();
    case KernelKind::same_parity: return 0.0;  // no long-range part
    default: return 1.0;
    }
}

double dipole_shape(KernelKind kind, double x, double rho)
{
    switch (kind) {
    case KernelKind::cd_dm0:
    case KernelKind::dd_diag: return kernel_dd_diag(x, rho);
    case KernelKind::cd_dm1:
    case KernelKind::dd_flip: return kernel_dd_flip(x, rho);
    case KernelKind::same_parity: return 0.0;
    }
    return 0.0;
}

cplx dipole_shape_ft(KernelKind kind, double Q, double rho)
{
    const double q = std::abs(Q);
    switch (kind) {
    case KernelKind::cd_dm0:
    case KernelKind::dd_diag: {
        if (q * rho < 1e-8) return -2.0 / (rho * rho);
        const double z = q * rho;
        if (z > 700.0) return 0.0;
        return 2.0 * q * std::cyl_bessel_k(1.0, z) / rho - 2.0 * q * q * std::cyl_bessel_k(2.0, z);
    }
    case KernelKind::cd_dm1:
    case KernelKind::dd_flip: {
        if (q == 0.0) return 0.0;
        const double z = q * rho;
        if (z > 700.0) return 0.0;
        return cplx(0.0, (2.0 / 3.0) * Q * q * std::cyl_bessel_k(1.0, z));
    }
    case KernelKind::same_parity: return 0.0;
    }
    return 0.0;
}

KernelTransform::KernelTransform(KernelKind kind, double rho, double ring_length,
                                 std::shared_ptr<const RadialPair> pair)
    : kind_(kind), rho_(rho), ring_(ring_length), pair_(std::move(pair))
{
    if (needs_radial(kind_) && !pair_) throw std::invalid_argument("kernel transform needs radial data");
    if (!needs_radial(kind_)) return;
    strength_ = dipole_strength(kind_, pair_.get());

    // residual lives where R < r_max of the radial grid
    const double rmax = pair_->r_max();
    if (rmax <= rho_) return;
    xres_ = std::sqrt(rmax * rmax - rho_ * rho_);

    using GL = boost::math::quadrature::gauss<double, 20>;
    const int panels = 256;
    const double w = 2.0 * xres_ / panels;
    double kmax = 0.0, rmax_abs = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = -xres_ + (p + 0.5) * w;
        for (size_t a = 0; a < GL::abscissa().size(); ++a) {
            const double t = GL::abscissa()[a];
            const double wt = GL::weights()[a] * 0.5 * w;
            for (int sgn : {-1, 1}) {
                if (t == 0.0 && sgn < 0) continue;
                const double x = c + sgn * t * 0.5 * w;
                const double full = kernel_value(kind_, x, rho_, pair_.get());
                const double res = full - strength_ * dipole_shape(kind_, x, rho_);
                xs_.push_back(x);
                ws_.push_back(wt);
                rs_.push_back(res);
                kmax = std::max(kmax, std::abs(full));
                rmax_abs = std::max(rmax_abs, std::abs(res));
            }
        }
    }
    res_peak_ = kmax > 0 ? rmax_abs / kmax : 0.0;
    // drop a residual that cannot matter at double precision
    if (rmax_abs == 0.0 || res_peak_ < 1e-15) {
        xs_.clear();
        ws_.clear();
        rs_.clear();
    }
}

double KernelTransform::Q(int n) const { return 2.0 * units::pi * n / ring_; }

cplx KernelTransform::at(int n)
{
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    const double q = Q(n);
    cplx v = strength_ * dipole_shape_ft(kind_, q, rho_);
    if (!xs_.empty()) {
        double re = 0.0, im = 0.0;
        for (size_t a = 0; a < xs_.size(); ++a) {
            const double f = ws_[a] * rs_[a];
            re += f * std::cos(q * xs_[a]);
            im += f * std::sin(q * xs_[a]);
        }
        v += cplx(re, im);
    }
    cache_.emplace(n, v);
    return v;
}

DirectDDTerms direct_dd_terms(double theta, double R, double dpm_product, double dz_product, double dpz_product,
                              double dpp_product)
{
    if (theta < 0.0 || theta > units::pi) throw std::invalid_argument("theta must lie in [0, pi]");
    const double c = std::cos(theta), s = std::sin(theta);
    const double R3 = 2.0 * R * R * R;
    DirectDDTerms t;
    const double ang = 1.0 - 3.0 * c * c;
    t.resonant = ang / R3 * (2.0 * dpm_product + 2.0 * dz_product);
    t.cross = 3.0 / std::sqrt(2.0) * s * c / R3 * dpz_product;
    t.double_flip = -1.5 * s * s / R3 * dpp_product;
    return t;
}

cplx plane_wave_bz_sum(int p, int N)
{
    cplx acc = 0.0;
    for (int kappa = -N / 2; kappa <= N / 2; ++kappa) acc += std::polar(1.0, 2.0 * units::pi * kappa * p / N);
    return acc;
}

double plane_wave_bz_closed(int p, int N)
{
    if (p % N == 0) return N + 1;
    const double a = units::pi * p / N;
    return std::sin(a * (N + 1)) / std::sin(a);
}

double plane_wave_coupling(int p, double rho, double L)
{
    const double R2 = rho * rho + 0.25 * p * p * L * L;
    return ((p % 2) ? -1.0 : 1.0) / (R2 * R2 * R2);
}

}  // namespace rydmed
