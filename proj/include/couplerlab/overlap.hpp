#pragma once

#include <map>
#include <vector>

#include "couplerlab/system.hpp"

namespace couplerlab {

struct Assignment {
    int eig = -1;          // index into the ascending eigenvalue order
    double overlap2 = 0.0; // winning |<phi|psi>|^2
    double pr = 1.0;       // participation ratio of the assigned eigenvector
    bool valid = false;    // overlap2 > epsilon and assignment injective
};

// Full eigendecomposition with a bare-label assignment map. Hamiltonians here
// are real symmetric, so eigenvectors are stored real.
struct LabeledSpectrum {
    Layout layout;
    Eigen::VectorXd energies;   // ascending, GHz
    Eigen::MatrixXd vectors;    // column k pairs with energies[k]
    std::vector<BasisLabel> requested;
    std::map<BasisLabel, Assignment> assignment;
    double epsilon = 0.5 + 1e-9;
};

struct EffectiveHamiltonian {
    std::vector<BasisLabel> subspace;
    Eigen::MatrixXcd U_r;    // U_r(i,j) = <phi_j|psi_i>
    Eigen::MatrixXcd U;      // nearest unitary to U_r
    Eigen::MatrixXcd H_eff;  // U diag(E) U^+, GHz
    bool rank_warning = false;
};

LabeledSpectrum assign_states(const Eigen::MatrixXd& H, const Layout& layout,
                              const std::vector<BasisLabel>& labels, double epsilon);
LabeledSpectrum assign_states(const OperatorMatrix& H, const Layout& layout,
                              const std::vector<BasisLabel>& labels, double epsilon);

double participation_ratio(const Eigen::VectorXd& vec);

// Orthogonal Procrustes: U = W V^+ from the SVD of U_r. A singular value
// below 1e-8 sets *rank_warning instead of failing.
Eigen::MatrixXcd nearest_unitary(const Eigen::MatrixXcd& U_r, bool* rank_warning = nullptr);

// H_eff = U diag(E) U^+ over the requested subspace; throws if a subspace
// label has no valid assignment. The manual overload takes eigenvector
// indices directly (the resonant-assignment path).
EffectiveHamiltonian effective_hamiltonian(const LabeledSpectrum& s,
                                           const std::vector<BasisLabel>& subspace);
EffectiveHamiltonian effective_hamiltonian_manual(const LabeledSpectrum& s,
                                                  const std::vector<BasisLabel>& subspace,
                                                  const std::vector<int>& eig_indices);

// Two-parameter restricted fit (phase x y-rotation) of U to U_r;
// J = -(E1 - E2) sin(theta*), returned in MHz. Valid off resonance only;
// throws if either assignment is invalid (use effective_hamiltonian then).
double j_perturbative(const LabeledSpectrum& s, const BasisLabel& lab1,
                      const BasisLabel& lab2);

struct ZZResult {
    double zz_khz = 0.0;
    bool valid = false;
};

// zeta = E(1001) + E(0000) - E(1000) - E(0001) over the computational labels
// |m 0 0 n>. The one-excitation contribution enters as a pair sum so exact
// qubit-qubit resonance stays well defined.
ZZResult zz_shift(const LabeledSpectrum& s);

std::vector<EffectiveHamiltonian> blockwise_effective(
    const Eigen::MatrixXd& H, const Layout& layout,
    const std::vector<std::vector<BasisLabel>>& regions, double epsilon);

// One-point summary used by sweeps: J00 couples |1000>/|0001>, J01 couples
// |1001>/|0002>, J10 couples |2000>/|1001>.
struct PairCoupling {
    double j_proc_mhz = 0.0;  // Procrustes extraction
    double j_pert_mhz = 0.0;  // restricted-fit extraction
    bool valid = false;
};

struct CouplingReport {
    PairCoupling j00, j01, j10;
    double zz_khz = 0.0;
    bool zz_valid = false;
    double ratio = 0.0;  // 2|J00| / (|J01| + |J10|), +inf sentinel when denominator is 0
};

// Shared pair machinery (exposed for tests): extraction with the resonant
// tie-break path (top-2 subspace weight, bare-energy ordering, valid=false).
PairCoupling extract_pair(const LabeledSpectrum& s, const BasisLabel& lab1,
                          const BasisLabel& lab2);

CouplingReport coupling_report(const SystemSpec& spec);
CouplingReport coupling_report(const LabeledSpectrum& s);

}  // namespace couplerlab
