#include "rydmed/chain.hpp"

#include "rydmed/output.hpp"

#include <spdlog/spdlog.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace rydmed {

ChainCouplings chain_from_table(const CouplingTable& t, int n)
{
    if (n < 2 || n > max_chain_length) throw std::invalid_argument("chain length must lie in 2.." + std::to_string(max_chain_length));
    if (n > t.n) throw std::invalid_argument("coupling table has fewer spins than the requested chain");
    ChainCouplings c;
    c.n = n;
    c.J_perp = Eigen::MatrixXd::Zero(n, n);
    c.J_zz = Eigen::MatrixXd::Zero(n, n);
    c.field = Eigen::VectorXd::Zero(n);
    const int s0 = t.centre - n / 2;
    auto done = [&](int i) { return t.row_done.empty() || t.row_done[i]; };
    for (int a = 0; a < n; ++a) {
        const int i = s0 + a;
        c.field(a) = t.E_spin_hz + (done(i) ? t.b_z(i) : t.b_z(t.centre));
        for (int b = a + 1; b < n; ++b) {
            const int m = s0 + b;
            const bool direct = done(i) || done(m);
            const int p = m - i;
            if (!direct && t.centre + p >= t.n) throw std::invalid_argument("centre row too short for the chain");
            c.J_perp(a, b) = c.J_perp(b, a) = direct ? t.J_perp(i, m) : t.J_perp(t.centre, t.centre + p);
            c.J_zz(a, b) = c.J_zz(b, a) = direct ? t.J_zz(i, m) : t.J_zz(t.centre, t.centre + p);
        }
    }
    return c;
}

ChainCouplings chain_from_model(int n, const std::vector<double>& J_perp, const std::vector<double>& J_zz, double b_z,
                                double E_spin, const std::string& boundary)
{
    if (n < 2 || n > max_chain_length) throw std::invalid_argument("chain length must lie in 2.." + std::to_string(max_chain_length));
    if (boundary != "open" && boundary != "periodic") throw std::invalid_argument("boundary must be open or periodic");
    ChainCouplings c;
    c.n = n;
    c.boundary = boundary;
    c.J_perp = Eigen::MatrixXd::Zero(n, n);
    c.J_zz = Eigen::MatrixXd::Zero(n, n);
    c.field = Eigen::VectorXd::Constant(n, E_spin + b_z);
    auto pick = [](const std::vector<double>& v, int p) { return p >= 1 && p <= static_cast<int>(v.size()) ? v[p - 1] : 0.0; };
    for (int i = 0; i < n; ++i)
        for (int m = i + 1; m < n; ++m) {
            int p = m - i;
            if (boundary == "periodic") p = std::min(p, n - p);
            c.J_perp(i, m) = c.J_perp(m, i) = pick(J_perp, p);
            c.J_zz(i, m) = c.J_zz(m, i) = pick(J_zz, p);
        }
    return c;
}

ChainHamiltonian build_hamiltonian(const ChainCouplings& c, double prune_rel)
{
    const int n = c.n;
    if (n < 2 || n > max_chain_length) throw std::invalid_argument("chain length must lie in 2.." + std::to_string(max_chain_length));
    ChainHamiltonian h;
    h.n = n;
    for (int i = 0; i + 1 < n; ++i) h.J1 = std::max({h.J1, std::abs(c.J_perp(i, i + 1)), std::abs(c.J_zz(i, i + 1))});
    const double cut = prune_rel * h.J1;

    Eigen::MatrixXd jp = c.J_perp, jz = c.J_zz;
    for (int i = 0; i < n; ++i)
        for (int m = i + 1; m < n; ++m) {
            if (jp(i, m) != 0.0 && std::abs(jp(i, m)) < cut) {
                jp(i, m) = 0.0;
                ++h.pruned;
            }
            if (jz(i, m) != 0.0 && std::abs(jz(i, m)) < cut) {
                jz(i, m) = 0.0;
                ++h.pruned;
            }
        }
    spdlog::info("chain: N={}, {} boundary, {} couplings below {:.1e} |J1| pruned", n, c.boundary, h.pruned, prune_rel);

    const std::uint32_t dim = 1u << n;
    std::vector<Eigen::Triplet<double>> trip;
    for (std::uint32_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (int i = 0; i < n; ++i) {
            const double zi = (s >> i & 1u) ? 0.5 : -0.5;
            diag += c.field(i) * zi;
            for (int m = i + 1; m < n; ++m) {
                const double zm = (s >> m & 1u) ? 0.5 : -0.5;
                diag += jz(i, m) * zi * zm;
                // S+_i S-_m + S-_i S+_m acts on anti-aligned pairs
                if (jp(i, m) != 0.0 && ((s >> i) & 1u) != ((s >> m) & 1u))
                    trip.emplace_back(s ^ ((1u << i) | (1u << m)), s, 0.5 * jp(i, m));
            }
        }
        trip.emplace_back(s, s, diag);
    }
    h.H.resize(dim, dim);
    h.H.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> ht = h.H.transpose();
    h.hermiticity_error = (h.H - ht).norm();
    return h;
}

std::vector<SectorSpectrum> diagonalize_sectors(const ChainHamiltonian& h, bool vectors)
{
    const int n = h.n;
    const std::uint32_t dim = 1u << n;
    std::vector<std::vector<std::uint32_t>> basis(n + 1);
    for (std::uint32_t s = 0; s < dim; ++s) basis[std::popcount(s)].push_back(s);
    std::vector<SectorSpectrum> out;
    for (int up = 0; up <= n; ++up) {
        const auto& b = basis[up];
        std::map<std::uint32_t, int> index;
        for (size_t k = 0; k < b.size(); ++k) index[b[k]] = static_cast<int>(k);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(b.size(), b.size());
        for (size_t k = 0; k < b.size(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(h.H, b[k]); it; ++it) {
                auto f = index.find(static_cast<std::uint32_t>(it.row()));
                if (f == index.end()) throw std::logic_error("Hamiltonian mixes S^z sectors");
                M(f->second, k) = it.value();
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("sector eigensolver failed");
        SectorSpectrum sec;
        sec.sz = up - 0.5 * n;
        sec.basis = b;
        sec.energies = es.eigenvalues();
        if (vectors) sec.vectors = es.eigenvectors();
        out.push_back(std::move(sec));
    }
    return out;
}

Eigen::VectorXd diagonalize_full(const ChainHamiltonian& h)
{
    Eigen::MatrixXd M(h.H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    return es.eigenvalues();
}

double sz_commutator_norm(const ChainHamiltonian& h)
{
    // [H, Sz]_{ab} = H_ab (Sz_b - Sz_a)
    double acc = 0.0;
    for (int k = 0; k < h.H.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(h.H, k); it; ++it) {
            const double d = std::popcount(static_cast<std::uint32_t>(it.col())) -
                             std::popcount(static_cast<std::uint32_t>(it.row()));
            acc += it.value() * it.value() * d * d;
        }
    return std::sqrt(acc);
}

J1J2Params extract_j1j2(const CouplingTable& t)
{
    J1J2Params p;
    const int c = t.centre;
    auto jp = [&](int d) { return c + d < t.n ? t.J_perp(c, c + d) : 0.0; };
    auto jz = [&](int d) { return c + d < t.n ? t.J_zz(c, c + d) : 0.0; };
    p.J1 = jp(1);
    p.J2 = jp(2);
    p.Delta1 = p.J1 != 0.0 ? jz(1) / p.J1 : 0.0;
    p.Delta2 = p.J2 != 0.0 ? jz(2) / p.J2 : 0.0;
    const double j1 = std::max(std::abs(p.J1), std::abs(jz(1)));
    for (int d = 3; d <= 5; ++d)
        if (j1 > 0.0) p.residual = std::max(p.residual, std::max(std::abs(jp(d)), std::abs(jz(d))) / j1);
    return p;
}

double free_fermion_ground_energy(double J, int n)
{
    double e = 0.0;
    for (int q = 1; q <= n; ++q) {
        const double eps = J * std::cos(M_PI * q / (n + 1));
        if (eps < 0.0) e += eps;
    }
    return e;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SectorSpectrum>& sectors)
{
    os << "sector_Sz,index,energy_Hz\n";
    for (const auto& s : sectors)
        for (int k = 0; k < s.energies.size(); ++k) os << fmt_double(s.sz) << ',' << k << ',' << fmt_double(s.energies(k)) << '\n';
}

void write_correlations_csv(std::ostream& os, const ChainHamiltonian& h, const std::vector<SectorSpectrum>& sectors)
{
    const SectorSpectrum* g = nullptr;
    for (const auto& s : sectors)
        if (s.vectors.size() && (!g || s.energies(0) < g->energies(0))) g = &s;
    if (!g) throw std::invalid_argument("correlations need sector eigenvectors");
    const Eigen::VectorXd psi = g->vectors.col(0);
    std::map<std::uint32_t, int> index;
    for (size_t k = 0; k < g->basis.size(); ++k) index[g->basis[k]] = static_cast<int>(k);
    os << "i,m,SzSz,SpSm\n";
    for (int i = 0; i < h.n; ++i)
        for (int m = 0; m < h.n; ++m) {
            if (i == m) continue;
            double zz = 0.0, pm = 0.0;
            for (size_t k = 0; k < g->basis.size(); ++k) {
                const auto s = g->basis[k];
                const double zi = (s >> i & 1u) ? 0.5 : -0.5, zm = (s >> m & 1u) ? 0.5 : -0.5;
                zz += psi(k) * psi(k) * zi * zm;
                // S+_i S-_m: m up, i down
                if ((s >> m & 1u) && !(s >> i & 1u)) pm += psi(index.at(s ^ ((1u << i) | (1u << m)))) * psi(k);
            }
            os << i << ',' << m << ',' << fmt_double(zz) << ',' << fmt_double(pm) << '\n';
        }
}

}  // namespace rydmed
