#pragma once

#include "rydmed/bands.hpp"
#include "rydmed/kernels.hpp"

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rydmed {

using cplx = std::complex<double>;

// spin labels and transition index alpha -> beta
constexpr int UP = 0;
constexpr int DOWN = 1;
inline constexpr int tidx(int alpha, int beta) { return 2 * alpha + beta; }

using Amp4 = std::array<cplx, 4>;  // amplitudes indexed by tidx

struct ChannelTerm {
    bool active = false;
    KernelKind kind = KernelKind::dd_diag;
    double pref = 0.0;  // dipole/angular prefactor, a.u.
};

// One internal intermediate level of the mediator together with the spin transitions that reach it.
struct Channel {
    std::string label;
    int parity_l = 1;          // enters as (-1)^l
    double offset_hz = 0.0;    // internal energy above the initial mediator level
    bool same_state = false;   // intermediate manifold contains the initial Bloch state
    std::shared_ptr<const RadialPair> radial;
    std::array<ChannelTerm, 4> terms{};
};

struct Intermediate {
    int channel = 0;
    int kappa = 0;
    int band = 1;
    double denom_hz = 0.0;  // offset + motional energy difference
    int sign = -1;          // (-1)^l
    bool initial = false;   // identical to the initial mediator state
};

// All V^m for one initial Bloch state: v[spin][intermediate], Hz
struct MatrixElementSet {
    int kappa0 = 0;
    int band0 = 1;
    std::vector<Intermediate> inter;
    std::vector<std::vector<Amp4>> v;
    double max_abs_hz = 0.0;
};

class MatrixElementEngine {
public:
    MatrixElementEngine(std::shared_ptr<const BandStructure> bands, double rho_m, std::vector<Channel> channels,
                        int max_band);

    const std::vector<Channel>& channels() const { return channels_; }
    const BandStructure& bands() const { return *bands_; }
    double ring_length_au() const { return ring_; }
    double rho_au() const { return rho_; }

    std::vector<Intermediate> intermediates(int kappa0, int band0) const;

    // Fourier route, spin positions in metres
    MatrixElementSet compute(int kappa0, int band0, const std::vector<double>& spin_x_m);

    // single element of one channel term in a.u. without prefactor (ring kernel sandwich)
    cplx sandwich(int channel, int term, int kappa0, int band0, int kappa, int band, double x_m_au);

    // largest |residual| / |kernel| seen over the channel kernels (short-range correction size)
    double residual_report() const;

private:
    KernelTransform& transform(KernelKind kind, const std::shared_ptr<const RadialPair>& pair);

    std::shared_ptr<const BandStructure> bands_;
    double rho_ = 0.0;
    double ring_ = 0.0;
    double Lat_ = 0.0;
    int N_ = 0;
    std::vector<Channel> channels_;
    int max_band_ = 1;
    std::map<std::pair<int, const RadialPair*>, std::unique_ptr<KernelTransform>> transforms_;
};

// Quadrature oracle: integral of phi0*(X) K(X - X_m) phi(X) over the whole line with
// Gauss-Legendre panels cell by cell, until cell contributions drop below rel_tol of the running total.
struct DirectResult {
    cplx value;
    int cells = 0;
    double error_estimate = 0.0;  // size of the last cell pair added
};
DirectResult matrix_element_direct(const BlochState& in, const BlochState& out, const LatticeSpec& spec,
                                   KernelKind kind, const RadialPair* pair, double rho_au, double x_m_au,
                                   double rel_tol = 1e-10);

}  // namespace rydmed
