#pragma once

#include "rydmed/scenario.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rydmed {

constexpr int max_chain_length = 14;

// Couplings of an N-spin chain; field(i) multiplies S^z_i and already includes E_spin.
struct ChainCouplings {
    int n = 0;
    std::string boundary = "open";
    Eigen::MatrixXd J_perp, J_zz;
    Eigen::VectorXd field;
};

// central n spins of a table (open chain); rows that were not computed reuse the centre row by translation
ChainCouplings chain_from_table(const CouplingTable& t, int n);
// uniform couplings by distance p = 1.. (J[p-1]); periodic uses the minimum image distance
ChainCouplings chain_from_model(int n, const std::vector<double>& J_perp, const std::vector<double>& J_zz, double b_z,
                                double E_spin, const std::string& boundary);

struct ChainHamiltonian {
    int n = 0;
    Eigen::SparseMatrix<double> H;  // basis bit i set = spin i up
    int pruned = 0;
    double J1 = 0.0;
    double hermiticity_error = 0.0;
};

// H = sum_{i<m} [Jzz Sz Sz + (J_perp/2)(S+ S- + S- S+)] + sum_i field_i Sz_i
ChainHamiltonian build_hamiltonian(const ChainCouplings& c, double prune_rel = 1e-4);

struct SectorSpectrum {
    double sz = 0.0;
    std::vector<std::uint32_t> basis;
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;  // columns, only when requested
};

std::vector<SectorSpectrum> diagonalize_sectors(const ChainHamiltonian& h, bool vectors = false);
Eigen::VectorXd diagonalize_full(const ChainHamiltonian& h);
// Frobenius norm of [H, S^z_total], an upper bound on the operator norm
double sz_commutator_norm(const ChainHamiltonian& h);

struct J1J2Params {
    double J1 = 0.0, J2 = 0.0;
    double Delta1 = 0.0, Delta2 = 0.0;
    double residual = 0.0;  // max_{3<=p<=5} max(|J_perp(p)|, |J_zz(p)|) / |J1|
};
J1J2Params extract_j1j2(const CouplingTable& t);

// open XX chain with uniform NN coupling J: sum of negative J cos(pi q/(n+1))
double free_fermion_ground_energy(double J, int n);

void write_spectrum_csv(std::ostream& os, const std::vector<SectorSpectrum>& sectors);
// ground state of the lowest sector: i,m,SzSz,SpSm
void write_correlations_csv(std::ostream& os, const ChainHamiltonian& h, const std::vector<SectorSpectrum>& sectors);

}  // namespace rydmed
