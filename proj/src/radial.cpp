#include "rydmed/radial.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rydmed {

double RadialSolution::r(size_t i) const { return std::exp(x0 + h * static_cast<double>(i)); }
double RadialSolution::r_core() const { return std::exp(x0); }
double RadialSolution::r_max() const { return r(y.size() - 1); }

double RadialSolution::R(double rr) const
{
    if (!(rr > 0.0)) return 0.0;
    const double t = (std::log(rr) - x0) / h;
    if (t < 0.0 || t > static_cast<double>(y.size() - 1)) return 0.0;
    // 4-point Lagrange in x = ln r
    const size_t M = y.size();
    size_t i = std::min(static_cast<size_t>(t), M - 2);
    size_t b = (i == 0) ? 0 : std::min(i - 1, M - 4);
    const double u = t - static_cast<double>(b);
    const double l0 = -(u - 1) * (u - 2) * (u - 3) / 6.0;
    const double l1 = u * (u - 2) * (u - 3) / 2.0;
    const double l2 = -u * (u - 1) * (u - 3) / 2.0;
    const double l3 = u * (u - 1) * (u - 2) / 6.0;
    return (l0 * y[b] + l1 * y[b + 1] + l2 * y[b + 2] + l3 * y[b + 3]) / std::sqrt(rr);
}

double RadialSolution::containment(double rmax) const { return containment_fraction(*this, rmax); }

double RadialSolution::half_containment_radius() const
{
    double acc = 0.0, prev = 0.0;
    double total = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double rr = r(i);
        const double f = rr * rr * y[i] * y[i];
        if (i > 0) total += 0.5 * h * (f + prev);
        prev = f;
    }
    prev = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double rr = r(i);
        const double f = rr * rr * y[i] * y[i];
        if (i > 0) {
            const double step = 0.5 * h * (f + prev);
            if (acc + step >= 0.5 * total) {
                const double frac = (0.5 * total - acc) / step;
                return std::exp(x0 + h * (static_cast<double>(i) - 1.0 + frac));
            }
            acc += step;
        }
        prev = f;
    }
    return r_max();
}

int RadialSolution::nodes() const
{
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    const double floor = 1e-8 * ymax;
    int count = 0;
    int last = 0;
    for (double v : y) {
        if (std::abs(v) < floor) continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

double RadialSolution::outer_turning_point() const
{
    const double ll = static_cast<double>(l) * (l + 1);
    return (1.0 + std::sqrt(std::max(0.0, 1.0 + 2.0 * energy * ll))) / (-2.0 * energy);
}

std::string RadialSolution::key() const
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s|n=%d|l=%d|2j=%d|mu=%a|pts=%d|outer=%a,%a|hcore=%a", species.c_str(), n, l,
                  static_cast<int>(std::lround(2 * j)), mu, opts.points, opts.outer_scale, opts.outer_offset,
                  opts.hydrogen_core);
    return buf;
}

RadialSolution radial_wavefunction(const RydbergLevel& level, const QuantumDefectTable& defects,
                                   const RadialOptions& opts)
{
    level.validate();
    if (opts.points < 100) throw std::invalid_argument("radial grid needs at least 100 points");

    RadialSolution s;
    s.species = defects.species();
    s.n = level.n;
    s.l = level.l;
    s.j = level.j;
    s.mu = defects.mu(level.l, level.j);
    s.nstar = effective_n(level, defects);
    s.energy = -0.5 / (s.nstar * s.nstar);
    s.opts = opts;

    const double rmax = opts.outer_scale * s.nstar * (s.nstar + opts.outer_offset);
    const double rcore = s.mu > 0.0 ? std::pow(s.nstar, 2.0 / 3.0) : opts.hydrogen_core;
    if (rcore >= rmax) throw std::runtime_error("radial grid exhausted: r_core >= r_max");
    const int M = opts.points;
    s.x0 = std::log(rcore);
    s.h = (std::log(rmax) - s.x0) / (M - 1);
    s.y.assign(M, 0.0);

    const double lh = (s.l + 0.5) * (s.l + 0.5);
    const double h2 = s.h * s.h / 12.0;
    auto g = [&](int i) {
        const double rr = std::exp(s.x0 + s.h * i);
        return lh - 2.0 * rr - 2.0 * s.energy * rr * rr;
    };

    // inward Numerov for y'' = g y
    s.y[M - 1] = 0.0;
    s.y[M - 2] = 1e-12;
    double gp = g(M - 1), gi = g(M - 2);
    for (int i = M - 2; i >= 1; --i) {
        const double gm = g(i - 1);
        s.y[i - 1] = (2.0 * (1.0 + 5.0 * h2 * gi) * s.y[i] - (1.0 - h2 * gp) * s.y[i + 1]) / (1.0 - h2 * gm);
        gp = gi;
        gi = gm;
        if (std::abs(s.y[i - 1]) > 1e250) {
            for (int k = i - 1; k < M; ++k) s.y[k] *= 1e-250;
        }
    }

    double norm = 0.0, prev = 0.0;
    for (int i = 0; i < M; ++i) {
        const double rr = s.r(i);
        const double f = rr * rr * s.y[i] * s.y[i];
        if (i > 0) norm += 0.5 * s.h * (f + prev);
        prev = f;
    }
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::runtime_error("radial normalisation did not converge");
    double scale = 1.0 / std::sqrt(norm);
    if (s.y[M - 2] < 0) scale = -scale;
    for (double& v : s.y) v *= scale;

    spdlog::debug("radial {} n={} l={} j={}: n*={:.6f} r=[{:.3g},{:.4g}] nodes={}", s.species, s.n, s.l, s.j, s.nstar,
                  rcore, rmax, s.nodes());
    return s;
}

RadialPair::RadialPair(const RadialSolution& a, const RadialSolution& b)
{
    // reference grid: larger r_max, ties broken on the key so (a,b) and (b,a) coincide
    bool a_ref = a.r_max() > b.r_max() || (a.r_max() == b.r_max() && a.key() <= b.key());
    const RadialSolution& ref = a_ref ? a : b;
    const RadialSolution& oth = a_ref ? b : a;
    x0_ = ref.x0;
    h_ = ref.h;
    const size_t M = ref.size();

    std::vector<double> yo(M, 0.0);
    const bool same = oth.x0 == ref.x0 && oth.h == ref.h && oth.size() == M;
    if (same) {
        yo = oth.y;
    } else {
        boost::math::interpolators::cardinal_cubic_b_spline<double> sp(oth.y.begin(), oth.y.end(), oth.x0, oth.h);
        const double xlo = oth.x0, xhi = oth.x0 + oth.h * (oth.size() - 1);
        for (size_t i = 0; i < M; ++i) {
            const double x = x0_ + h_ * i;
            if (x >= xlo && x <= xhi) yo[i] = sp(x);
        }
    }
    fab_.resize(M);
    for (size_t i = 0; i < M; ++i) fab_[i] = ref.y[i] * yo[i];

    for (int p = 0; p < 4; ++p) {
        auto& c = cum_[p];
        c.assign(M, 0.0);
        double prev = std::exp(p * x0_) * fab_[0];
        for (size_t i = 1; i < M; ++i) {
            const double f = std::exp(p * (x0_ + h_ * i)) * fab_[i];
            c[i] = c[i - 1] + 0.5 * h_ * (f + prev);
            prev = f;
        }
        total_[p] = c[M - 1];
    }
}

double RadialPair::partial(int p, double x) const
{
    const size_t M = fab_.size();
    const double t = (x - x0_) / h_;
    if (t <= 0.0) return 0.0;
    if (t >= static_cast<double>(M - 1)) return total_[p];
    const size_t i = static_cast<size_t>(t);
    const double f = t - static_cast<double>(i);
    const double fi = std::exp(p * (x0_ + h_ * i)) * fab_[i];
    const double fj = std::exp(p * (x0_ + h_ * (i + 1))) * fab_[i + 1];
    const double fx = fi + f * (fj - fi);
    return cum_[p][i] + 0.5 * f * h_ * (fi + fx);
}

double RadialPair::moment(int power, double rmax) const
{
    if (power < 0 || power > 3) throw std::invalid_argument("moment power must be 0..3");
    if (std::isinf(rmax)) return total_[power];
    if (!(rmax > 0.0)) return 0.0;
    return partial(power, std::log(rmax));
}

double RadialPair::tail0(double R) const
{
    if (!(R > 0.0)) return total_[0];
    return total_[0] - partial(0, std::log(R));
}

double radial_moment_integral(const RadialSolution& a, const RadialSolution& b, int power, double rmax,
                              RadialIntegralCache* cache)
{
    std::string key;
    if (cache) {
        const std::string ka = a.key(), kb = b.key();
        char buf[64];
        std::snprintf(buf, sizeof buf, "|p=%d|rmax=%a", power, rmax);
        key = (ka <= kb ? ka + "&" + kb : kb + "&" + ka) + buf;
        if (auto hit = cache->get(key)) return *hit;
    }
    const double v = RadialPair(a, b).moment(power, rmax);
    if (cache) cache->put(key, v);
    return v;
}

double containment_fraction(const RadialSolution& s, double rmax)
{
    if (std::isinf(rmax)) rmax = s.r_max();
    if (rmax <= s.r_core()) return 0.0;
    const size_t M = s.size();
    double acc = 0.0;
    double prev = s.r(0) * s.r(0) * s.y[0] * s.y[0];
    const double xt = std::log(rmax);
    for (size_t i = 1; i < M; ++i) {
        const double xi = s.x0 + s.h * i;
        const double rr = s.r(i);
        const double f = rr * rr * s.y[i] * s.y[i];
        if (xi >= xt) {
            const double frac = (xt - (xi - s.h)) / s.h;
            const double fx = prev + frac * (f - prev);
            return acc + 0.5 * frac * s.h * (prev + fx);
        }
        acc += 0.5 * s.h * (f + prev);
        prev = f;
    }
    return acc;
}

}  // namespace rydmed
