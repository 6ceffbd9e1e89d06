#pragma once

#include "rydmed/matrix_elements.hpp"

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydmed {

// two-spin configurations (alpha_i, beta_m): 0 = up up, 1 = up down, 2 = down up, 3 = down down
using KTensor = std::array<std::array<cplx, 4>, 4>;

struct PairCoefficients {
    KTensor K{};
    double J_zz = 0.0;
    cplx J_pm = 0.0;  // coefficient of S_i^+ S_m^-
    double J_perp = 0.0;  // 2 Re J_pm
    cplx J_zp = 0.0;
    cplx J_pp = 0.0;
    double b_z = 0.0;
    cplx b_plus = 0.0;
    double b0 = 0.0;
    double closure_error = 0.0;  // max |K_ab - conj(K_ba)| before symmetrisation
};

struct SchriefferWolffError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generic second-order couplings of the pair (i, m) from the amplitudes of both spins.
PairCoefficients generic_pair(const std::vector<Intermediate>& inter, const std::vector<Amp4>& vi,
                              const std::vector<Amp4>& vm, double E_spin_hz);

// Reduce a K tensor to spin-operator coefficients.
void coefficients_from_k(PairCoefficients& pc);

// Fast paths as printed. XX: only up->down amplitudes enter.
struct FastCoefficients {
    cplx J_perp = 0.0;  // complex before the reality check
    cplx J_zz = 0.0;
    double b_im = 0.0;  // contribution of partner m to b_i
};
FastCoefficients xx_fast(const std::vector<Intermediate>& inter, const std::vector<Amp4>& vi,
                         const std::vector<Amp4>& vm, double E_spin_hz);
FastCoefficients xxz_fast(const std::vector<Intermediate>& inter, const std::vector<Amp4>& vi,
                          const std::vector<Amp4>& vm, double E_spin_hz);

struct ValidityReport {
    double min_denominator_hz = 0.0;
    double max_element_hz = 0.0;
    double ratio = 0.0;
    std::string worst;  // description of the tightest term
};

// Smallest denominator actually used against the largest amplitude; throws when ratio < margin.
ValidityReport check_validity(const MatrixElementSet& set, const std::vector<Channel>& channels, double E_spin_hz,
                              double margin);

}  // namespace rydmed
