#pragma once

#include <optional>
#include <string>
#include <vector>

#include "couplerlab/fock.hpp"

namespace couplerlab {

enum class CouplingForm { full, rwa };

// g is in MHz; form=full means g * [-(A - A^+)(B - B^+)], whose rotating part
// is +g (A^+ B + A B^+).
struct CouplingSpec {
    std::string a;
    std::string b;
    double g_mhz = 0.0;
    CouplingForm form = CouplingForm::full;
};

struct SystemOptions {
    double epsilon = 0.5 + 1e-9;  // overlap-squared acceptance threshold, in (0.5, 1)
    bool rwa_all = false;         // overrides every coupling's form to rwa
};

struct SystemSpec {
    Layout modes;
    std::vector<CouplingSpec> couplings;
    SystemOptions options;

    int mode_index(const std::string& label) const;
};

void validate(const SystemSpec& spec);

// H (GHz) = sum_modes [f n + (delta/2)(n-1)n] + sum_couplings g X_ab.
// Always real symmetric in this gauge.
Eigen::MatrixXd build_hamiltonian_real(const SystemSpec& spec);
OperatorMatrix build_hamiltonian(const SystemSpec& spec);

// Per-group Hamiltonians from intra-group terms only; couplings that straddle
// groups are dropped. partition must cover the mode set disjointly.
std::vector<OperatorMatrix> build_blocks(const SystemSpec& spec,
                                         const std::vector<std::vector<std::string>>& partition);

// Max |<i|H|j>| over basis-label pairs whose excitation support spans
// different groups; 0 certifies localized decoupling.
double verify_block_decoupling(const OperatorMatrix& H, const Layout& layout,
                               const std::vector<std::vector<std::string>>& partition);

}  // namespace couplerlab
