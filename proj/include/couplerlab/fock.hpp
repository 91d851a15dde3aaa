#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace couplerlab {

enum class ModeKind { transmon, linear };

// One register slot. Energies are linear frequencies (f = omega/2pi) in GHz;
// anharm is the Duffing delta/2pi (negative for transmons, 0 for linear modes).
struct ModeSpec {
    std::string label;
    ModeKind kind = ModeKind::transmon;
    double freq_ghz = 0.0;
    double anharm_ghz = 0.0;
    int levels = 2;
};

using Layout = std::vector<ModeSpec>;

// Occupation per mode, in registration order.
using BasisLabel = std::vector<int>;

// Dense complex matrix over the composite Fock basis. Hamiltonians built in
// this lab are real symmetric; the complex carrier also holds unitaries.
struct OperatorMatrix {
    Eigen::MatrixXcd m;
    std::vector<BasisLabel> basis;

    int dim() const { return static_cast<int>(m.rows()); }
};

int total_dim(const Layout& layout);

// Row-major bijection between occupation labels and flat indices.
int index_of(const BasisLabel& label, const Layout& layout);
BasisLabel label_of(int index, const Layout& layout);
std::vector<BasisLabel> enumerate_basis(const Layout& layout);

// Single-mode annihilation operator, <n-1|a|n> = sqrt(n).
OperatorMatrix ladder(const ModeSpec& mode);

// I x ... x op x ... x I with op on the given slot.
OperatorMatrix lift(const OperatorMatrix& op, int slot, const Layout& layout);

// Real fast path used by the Hamiltonian assembler: same embedding without
// the complex carrier.
Eigen::MatrixXd lift_real(const Eigen::MatrixXd& op, int slot, const Layout& layout);
Eigen::MatrixXd ladder_real(int levels);

}  // namespace couplerlab
