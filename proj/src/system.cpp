#include "couplerlab/system.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace couplerlab {

int SystemSpec::mode_index(const std::string& label) const {
    for (size_t k = 0; k < modes.size(); ++k)
        if (modes[k].label == label) return static_cast<int>(k);
    throw std::invalid_argument("unknown mode label '" + label + "'");
}

void validate(const SystemSpec& spec) {
    std::set<std::string> seen;
    for (const auto& m : spec.modes) {
        if (m.levels < 2) throw std::invalid_argument("mode '" + m.label + "': levels must be >= 2");
        if (!seen.insert(m.label).second)
            throw std::invalid_argument("duplicate mode label '" + m.label + "'");
        if (!std::isfinite(m.freq_ghz) || !std::isfinite(m.anharm_ghz))
            throw std::invalid_argument("mode '" + m.label + "': non-finite parameters");
        if (m.kind == ModeKind::linear && m.anharm_ghz != 0.0)
            throw std::invalid_argument("linear mode '" + m.label + "' must have zero anharmonicity");
    }
    for (const auto& c : spec.couplings) {
        if (c.a == c.b) throw std::invalid_argument("coupling endpoints must differ");
        spec.mode_index(c.a);
        spec.mode_index(c.b);
        if (!std::isfinite(c.g_mhz)) throw std::invalid_argument("non-finite coupling");
    }
    const double eps = spec.options.epsilon;
    if (!(eps > 0.5 && eps < 1.0))
        throw std::invalid_argument("epsilon must lie in (0.5, 1)");
}

namespace {

std::vector<int> slot_stride(const Layout& layout) {
    std::vector<int> stride(layout.size(), 1);
    for (size_t k = layout.size() - 1; k-- > 0;)
        stride[k] = stride[k + 1] * layout[k + 1].levels;
    return stride;
}

// H += g * (MA on slot ia) * (MB on slot ib), distinct slots.
void add_two_site(Eigen::MatrixXd& H, double g, const Eigen::MatrixXd& MA, int ia,
                  const Eigen::MatrixXd& MB, int ib, const Layout& layout,
                  const std::vector<BasisLabel>& basis, const std::vector<int>& stride) {
    const int la = layout[ia].levels, lb = layout[ib].levels;
    const int dim = static_cast<int>(basis.size());
    for (int col = 0; col < dim; ++col) {
        const int na = basis[col][ia], nb = basis[col][ib];
        for (int ra = 0; ra < la; ++ra) {
            const double va = MA(ra, na);
            if (va == 0.0) continue;
            for (int rb = 0; rb < lb; ++rb) {
                const double vb = MB(rb, nb);
                if (vb == 0.0) continue;
                const int row = col + (ra - na) * stride[ia] + (rb - nb) * stride[ib];
                H(row, col) += g * va * vb;
            }
        }
    }
}

}  // namespace

Eigen::MatrixXd build_hamiltonian_real(const SystemSpec& spec) {
    validate(spec);
    const Layout& layout = spec.modes;
    const int dim = total_dim(layout);
    const auto basis = enumerate_basis(layout);
    const auto stride = slot_stride(layout);

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        double e = 0.0;
        for (size_t k = 0; k < layout.size(); ++k) {
            const double n = basis[i][k];
            e += layout[k].freq_ghz * n + 0.5 * layout[k].anharm_ghz * (n - 1.0) * n;
        }
        H(i, i) = e;
    }

    for (const auto& c : spec.couplings) {
        const int ia = spec.mode_index(c.a), ib = spec.mode_index(c.b);
        const double g = c.g_mhz * 1e-3;  // MHz -> GHz
        const Eigen::MatrixXd a = ladder_real(layout[ia].levels);
        const Eigen::MatrixXd b = ladder_real(layout[ib].levels);
        const CouplingForm form = spec.options.rwa_all ? CouplingForm::rwa : c.form;
        if (form == CouplingForm::full) {
            // -(A - A^+)(B - B^+) expands to +g on the rotating part
            add_two_site(H, -g, a - a.transpose(), ia, b - b.transpose(), ib,
                         layout, basis, stride);
        } else {
            add_two_site(H, g, a.transpose(), ia, b, ib, layout, basis, stride);
            add_two_site(H, g, a, ia, b.transpose(), ib, layout, basis, stride);
        }
    }

    const double herm = (H - H.transpose()).cwiseAbs().maxCoeff();
    if (herm >= 1e-12) throw std::logic_error("assembled Hamiltonian is not symmetric");
    return H;
}

OperatorMatrix build_hamiltonian(const SystemSpec& spec) {
    OperatorMatrix op;
    op.m = build_hamiltonian_real(spec).cast<std::complex<double>>();
    op.basis = enumerate_basis(spec.modes);
    return op;
}

namespace {

std::vector<int> group_of_modes(const SystemSpec& spec,
                                const std::vector<std::vector<std::string>>& partition) {
    std::vector<int> group(spec.modes.size(), -1);
    for (size_t g = 0; g < partition.size(); ++g)
        for (const auto& label : partition[g]) {
            const int k = spec.mode_index(label);
            if (group[k] != -1) throw std::invalid_argument("partition groups are not disjoint");
            group[k] = static_cast<int>(g);
        }
    for (size_t k = 0; k < group.size(); ++k)
        if (group[k] == -1)
            throw std::invalid_argument("partition does not cover mode '" + spec.modes[k].label + "'");
    return group;
}

}  // namespace

std::vector<OperatorMatrix> build_blocks(const SystemSpec& spec,
                                         const std::vector<std::vector<std::string>>& partition) {
    const auto group = group_of_modes(spec, partition);
    std::vector<OperatorMatrix> blocks;
    for (size_t g = 0; g < partition.size(); ++g) {
        SystemSpec sub;
        sub.options = spec.options;
        for (size_t k = 0; k < spec.modes.size(); ++k)
            if (group[k] == static_cast<int>(g)) sub.modes.push_back(spec.modes[k]);
        for (const auto& c : spec.couplings) {
            const int ga = group[spec.mode_index(c.a)], gb = group[spec.mode_index(c.b)];
            if (ga == static_cast<int>(g) && gb == static_cast<int>(g)) sub.couplings.push_back(c);
        }
        blocks.push_back(build_hamiltonian(sub));
    }
    return blocks;
}

double verify_block_decoupling(const OperatorMatrix& H, const Layout& layout,
                               const std::vector<std::vector<std::string>>& partition) {
    SystemSpec probe;
    probe.modes = layout;
    const auto group = group_of_modes(probe, partition);
    const auto basis = H.basis.empty() ? enumerate_basis(layout) : H.basis;
    const int dim = H.dim();
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            const double mag = std::abs(H.m(i, j));
            if (mag <= worst) continue;
            // element is cross-block when the slots where the labels differ
            // are not confined to a single group
            int first_group = -1;
            bool cross = false;
            for (size_t k = 0; k < layout.size(); ++k) {
                if (basis[i][k] == basis[j][k]) continue;
                if (first_group == -1) first_group = group[k];
                else if (group[k] != first_group) { cross = true; break; }
            }
            if (cross) worst = mag;
        }
    return worst;
}

}  // namespace couplerlab
