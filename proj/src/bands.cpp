#include "rydmed/bands.hpp"

#include "rydmed/units.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rydmed {

void LatticeSpec::validate() const
{
    if (!(period_m > 0.0)) throw std::invalid_argument("lattice period must be positive");
    if (n_cells < 2 || n_cells % 2 != 0) throw std::invalid_argument("lattice cell count must be even and >= 2");
    if (!(mass_kg > 0.0)) throw std::invalid_argument("mediator mass must be positive");
    if (!std::isfinite(V0_erec)) throw std::invalid_argument("lattice depth must be finite");
}

double LatticeSpec::recoil_hz() const { return units::recoil_hz(period_m, mass_kg); }
double LatticeSpec::K() const { return units::pi / period_m; }

double BlochState::k(const LatticeSpec& spec) const
{
    return 2.0 * units::pi * kappa / (spec.period_m * spec.n_cells);
}

BandStructure::BandStructure(LatticeSpec spec, int smax, int n_bands, std::vector<BlochState> states)
    : spec_(spec), smax_(smax), n_bands_(n_bands), states_(std::move(states))
{
}

const BlochState& BandStructure::at(int kappa, int band) const
{
    const int N = spec_.n_cells;
    // wrap into the stored zone
    int kk = ((kappa + N / 2) % N + N) % N - N / 2;
    if (band < 1 || band > n_bands_) throw std::out_of_range("band index out of range");
    return states_[static_cast<size_t>(kk + N / 2) * n_bands_ + (band - 1)];
}

BandStructure solve_bands(const LatticeSpec& spec, int smax, int n_bands)
{
    spec.validate();
    if (n_bands < 1) throw std::invalid_argument("need at least one band");
    if (smax < n_bands + 2) throw std::invalid_argument("S_max must be >= n_bands + 2");

    const int N = spec.n_cells;
    const int dim = 2 * smax + 1;
    std::vector<BlochState> out;
    out.reserve(static_cast<size_t>(N) * n_bands);

    Eigen::MatrixXd H(dim, dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (int kappa = -N / 2; kappa < N / 2; ++kappa) {
        H.setZero();
        for (int i = 0; i < dim; ++i) {
            const double q = static_cast<double>(kappa) / N + (i - smax);
            H(i, i) = 4.0 * q * q + 0.5 * spec.V0_erec;
            if (i + 1 < dim) H(i, i + 1) = H(i + 1, i) = 0.25 * spec.V0_erec;
        }
        es.compute(H);
        if (es.info() != Eigen::Success) throw std::runtime_error("band eigensolver failed");
        for (int b = 0; b < n_bands; ++b) {
            BlochState st;
            st.band = b + 1;
            st.kappa = kappa;
            st.smax = smax;
            st.energy = es.eigenvalues()(b);
            Eigen::VectorXd v = es.eigenvectors().col(b);
            Eigen::Index imax = 0;
            v.cwiseAbs().maxCoeff(&imax);
            if (v(imax) < 0) v = -v;
            v /= v.norm();
            st.c.assign(v.data(), v.data() + dim);
            out.push_back(std::move(st));
        }
    }
    return BandStructure(spec, smax, n_bands, std::move(out));
}

std::complex<double> bloch_periodic(const BlochState& st, const LatticeSpec& spec, double x)
{
    const double K = spec.K();
    std::complex<double> u = 0.0;
    for (int s = -st.smax; s <= st.smax; ++s) u += st.coeff(s) * std::polar(1.0, 2.0 * s * K * x);
    return u / std::sqrt(spec.n_cells * spec.period_m);
}

std::complex<double> bloch_value(const BlochState& st, const LatticeSpec& spec, double x)
{
    return bloch_periodic(st, spec, x) * std::polar(1.0, st.k(spec) * x);
}

void write_bands_csv(std::ostream& os, const BandStructure& bands)
{
    const int N = bands.spec().n_cells;
    os << "kappa,k_over_Kat,band,energy_over_Erec\n";
    os.precision(17);
    for (const auto& st : bands.states())
        os << st.kappa << ',' << 2.0 * st.kappa / N << ',' << st.band << ',' << st.energy << '\n';
}

}  // namespace rydmed
