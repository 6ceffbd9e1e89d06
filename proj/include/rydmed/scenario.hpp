#pragma once

#include "rydmed/bands.hpp"
#include "rydmed/engine.hpp"
#include "rydmed/kernels.hpp"
#include "rydmed/radial.hpp"
#include "rydmed/species.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rydmed {

enum class ScenarioKind { xx_molecule, xxz_rydberg, ising, custom };
std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

// |+> = a|p> + b|s>, |-> = b|p> - a|s> for a two-level MW dressing
struct DressedAmplitudes {
    double a = 0, b = 0;
    double W = 0;  // sqrt(Delta^2/4 + Omega^2), Hz
};
DressedAmplitudes dressed_amplitudes(double omega_hz, double delta_hz);

struct SpinEncoding {
    std::string kind = "molecular";  // molecular | dressed
    // molecular
    std::string molecule = "LiCs";
    RotationalState up{1, 0}, down{0, 0};
    std::optional<double> E_spin_hz;  // overrides the rotational splitting
    std::optional<double> d_flip_au, d_up_au, d_down_au;  // override derived z dipoles
    // dressed Rydberg spin
    std::string atom = "Rb";
    int n = 50;
    double zeeman_hz = 0, omega_up_hz = 0, omega_down_hz = 0, delta_up_hz = 0, delta_down_hz = 0;
};

struct MediatorSpec {
    std::string atom = "Rb";
    int n = 65;
    bool include_p32 = false;
    bool same_parity = false;
    bool counter_rotating = false;
    // dressed mediator (XXZ)
    double zeeman_hz = 0, omega_hz = 0, delta_hz = 0;
};

struct MediatorPrep {
    std::string kind = "superatom";  // superatom | dressed
    double c_ns = 1.0;
    std::string motional = "bec";  // bec | gaussian | table
    double kappa0 = 0.0;           // units of pi/L_at
    std::string kappa0_mode = "factorized";  // factorized | full
    struct Weight { int kappa; int band; double w; };
    std::vector<Weight> table;

    // normalised motional weights over (kappa0, band0)
    std::vector<Weight> weights(int n_cells) const;
};

struct EngineOptions {
    std::string path = "generic";  // generic | fast
    double sw_margin = 100.0;
    bool keep_nonresonant = false;
    std::string rows = "all";  // all | centre
    int convergence_cap = 8;   // band cap of the convergence comparison, 0 disables
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::xx_molecule;
    BilayerGeometry geometry;
    double V0_erec = -1.0;
    int n_cells = 100;
    int smax = 10;
    int n_bands = 8;    // solved
    int band_cap = 5;   // summed
    SpinEncoding spin;
    MediatorSpec mediator;
    MediatorPrep prep;
    EngineOptions engine;
    RadialOptions radial;

    void validate() const;
};

struct CouplingTable {
    int n = 0;
    int centre = 0;
    std::vector<double> x_m;
    Eigen::MatrixXd J_perp, J_zz, b_pair, b0;  // Hz; b_pair(i,m) = b_im
    Eigen::VectorXd b_z;                       // sum over m != i of b_im
    double E_spin_hz = 0.0;
    double max_imag_rel = 0.0;   // |Im J+-| / |J+-| worst case
    double max_asym_rel = 0.0;   // J(i,m) vs J(m,i)
    double closure_error = 0.0;
    double nonresonant_max_hz = 0.0;  // max |J++|, |Jz+|, |b+| when kept
    ValidityReport validity;
    nlohmann::json provenance;
    std::vector<char> row_done;  // pairs involving spin i computed

    double J_perp_at(int p) const { return J_perp(centre + p, centre); }
    double J_zz_at(int p) const { return J_zz(centre + p, centre); }
};

// Resolved physical setup: bands, channels, spin energy and per-channel report.
struct ResolvedSetup {
    std::shared_ptr<const BandStructure> bands;
    std::shared_ptr<MatrixElementEngine> engine;
    std::vector<Channel> channels;
    double E_spin_hz = 0.0;
    double prefactor = 1.0;  // averaging prefactor from the preparation kind
    nlohmann::json report;
};

ResolvedSetup resolve(const Scenario& sc, const SpeciesRegistry& reg, RadialIntegralCache* cache = nullptr);

// Couplings for a single initial Bloch state.
CouplingTable couplings_for_state(const Scenario& sc, const ResolvedSetup& setup, int kappa0, int band0);

// Full pipeline including averaging over the mediator preparation.
CouplingTable compute_couplings(const Scenario& sc, const SpeciesRegistry& reg, RadialIntegralCache* cache = nullptr);

// Gaussian factor sum_k0 w cos(k0 d)/sum w over the lowest band, d in units of L_at
double gaussian_phase_factor(double kappa0_pi_over_L, int n_cells, double d_cells);

struct SweepRow {
    double kappa0 = 0.0;
    std::vector<double> ratio;  // J(p)/|J(1)| for p = 2..5
};
std::vector<SweepRow> kappa0_sweep(const Scenario& sc, const SpeciesRegistry& reg, const std::vector<double>& grid,
                                   RadialIntegralCache* cache = nullptr);

}  // namespace rydmed
