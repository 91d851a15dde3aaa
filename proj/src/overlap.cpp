#include "couplerlab/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace couplerlab {

namespace {

// bare energy of a label: couplings never touch the diagonal in this gauge
double bare_energy(const BasisLabel& label, const Layout& layout) {
    double e = 0.0;
    for (size_t k = 0; k < layout.size(); ++k) {
        const double n = label[k];
        e += layout[k].freq_ghz * n + 0.5 * layout[k].anharm_ghz * (n - 1.0) * n;
    }
    return e;
}

// largest-magnitude component made real-positive; ties resolve to the lowest
// index via strict comparison
void gauge_fix(Eigen::VectorXd& v) {
    int k = 0;
    double best = std::abs(v[0]);
    for (int i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > best) { best = std::abs(v[i]); k = i; }
    if (v[k] < 0.0) v = -v;
}

struct PairContext {
    int k1, k2;       // eigenvector indices, lab1's first
    double e1, e2;    // energies, GHz
    Eigen::Matrix2d Ur;
    bool valid;
};

PairContext pair_context(const LabeledSpectrum& s, const BasisLabel& lab1,
                         const BasisLabel& lab2) {
    const int i1 = index_of(lab1, s.layout), i2 = index_of(lab2, s.layout);
    const int dim = static_cast<int>(s.energies.size());

    auto row_argmax = [&](int row) {
        int k = 0;
        double best = -1.0;
        for (int c = 0; c < dim; ++c) {
            const double o = s.vectors(row, c) * s.vectors(row, c);
            if (o > best) { best = o; k = c; }
        }
        return std::pair<int, double>(k, best);
    };

    auto [k1, o1] = row_argmax(i1);
    auto [k2, o2] = row_argmax(i2);
    PairContext ctx;
    ctx.valid = o1 > s.epsilon && o2 > s.epsilon && k1 != k2;
    if (!ctx.valid) {
        // resonant tie-break: the two eigenvectors with most weight on
        // span{lab1, lab2}, paired to labels by bare-energy order
        std::vector<std::pair<double, int>> w(dim);
        for (int c = 0; c < dim; ++c)
            w[c] = {s.vectors(i1, c) * s.vectors(i1, c) + s.vectors(i2, c) * s.vectors(i2, c), c};
        std::partial_sort(w.begin(), w.begin() + 2, w.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        int lo = std::min(w[0].second, w[1].second);
        int hi = std::max(w[0].second, w[1].second);
        if (bare_energy(lab1, s.layout) <= bare_energy(lab2, s.layout)) {
            k1 = lo; k2 = hi;
        } else {
            k1 = hi; k2 = lo;
        }
    }
    ctx.k1 = k1; ctx.k2 = k2;
    ctx.e1 = s.energies[k1]; ctx.e2 = s.energies[k2];
    Eigen::VectorXd v1 = s.vectors.col(k1), v2 = s.vectors.col(k2);
    gauge_fix(v1);
    gauge_fix(v2);
    ctx.Ur << v1[i1], v1[i2], v2[i1], v2[i2];
    return ctx;
}

double procrustes_offdiag(const PairContext& ctx) {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(ctx.Ur, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix2d U = svd.matrixU() * svd.matrixV().transpose();
    const Eigen::Matrix2d Heff =
        U * Eigen::Vector2d(ctx.e1, ctx.e2).asDiagonal() * U.transpose();
    return Heff(0, 1);
}

double restricted_fit_offdiag(const PairContext& ctx) {
    const double p = ctx.Ur(0, 0) + ctx.Ur(1, 1);
    const double r = ctx.Ur(0, 1) - ctx.Ur(1, 0);
    const double th = 0.5 * std::atan2(2.0 * p * r, p * p - r * r);
    return -(ctx.e1 - ctx.e2) * std::sin(th);
}

}  // namespace

LabeledSpectrum assign_states(const Eigen::MatrixXd& H, const Layout& layout,
                              const std::vector<BasisLabel>& labels, double epsilon) {
    if ((H - H.transpose()).cwiseAbs().maxCoeff() >= 1e-12)
        throw std::invalid_argument("assign_states: Hamiltonian is not symmetric");
    LabeledSpectrum s;
    s.layout = layout;
    s.epsilon = epsilon;
    s.requested = labels;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    s.energies = es.eigenvalues();
    s.vectors = es.eigenvectors();

    const int dim = static_cast<int>(s.energies.size());
    for (const auto& lab : labels) {
        const int row = index_of(lab, layout);
        Assignment a;
        double best = -1.0;
        for (int c = 0; c < dim; ++c) {
            const double o = s.vectors(row, c) * s.vectors(row, c);
            if (o > best) { best = o; a.eig = c; }
        }
        a.overlap2 = best;
        a.pr = participation_ratio(s.vectors.col(a.eig));
        a.valid = best > epsilon;
        s.assignment[lab] = a;
    }
    // injectivity: labels claiming the same eigenvector are all invalid
    std::map<int, int> claims;
    for (const auto& [lab, a] : s.assignment) claims[a.eig]++;
    for (auto& [lab, a] : s.assignment)
        if (claims[a.eig] > 1) a.valid = false;
    return s;
}

LabeledSpectrum assign_states(const OperatorMatrix& H, const Layout& layout,
                              const std::vector<BasisLabel>& labels, double epsilon) {
    if (H.m.imag().cwiseAbs().maxCoeff() >= 1e-12)
        throw std::invalid_argument("assign_states: complex Hamiltonians are not supported");
    return assign_states(Eigen::MatrixXd(H.m.real()), layout, labels, epsilon);
}

double participation_ratio(const Eigen::VectorXd& vec) {
    const double norm = vec.norm();
    if (std::abs(norm - 1.0) > 1e-8)
        throw std::invalid_argument("participation_ratio: vector is not normalized");
    double s4 = 0.0;
    for (int i = 0; i < vec.size(); ++i) s4 += vec[i] * vec[i] * vec[i] * vec[i];
    return 1.0 / s4;
}

Eigen::MatrixXcd nearest_unitary(const Eigen::MatrixXcd& U_r, bool* rank_warning) {
    if (U_r.rows() != U_r.cols()) throw std::invalid_argument("nearest_unitary: matrix not square");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(U_r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (rank_warning) *rank_warning = svd.singularValues().minCoeff() < 1e-8;
    return svd.matrixU() * svd.matrixV().adjoint();
}

EffectiveHamiltonian effective_hamiltonian_manual(const LabeledSpectrum& s,
                                                  const std::vector<BasisLabel>& subspace,
                                                  const std::vector<int>& eig_indices) {
    const int m = static_cast<int>(subspace.size());
    if (static_cast<int>(eig_indices.size()) != m)
        throw std::invalid_argument("effective_hamiltonian: index count mismatch");
    EffectiveHamiltonian eff;
    eff.subspace = subspace;
    Eigen::MatrixXd Ur(m, m);
    Eigen::VectorXd E(m);
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd v = s.vectors.col(eig_indices[i]);
        gauge_fix(v);
        E[i] = s.energies[eig_indices[i]];
        for (int j = 0; j < m; ++j) Ur(i, j) = v[index_of(subspace[j], s.layout)];
    }
    eff.U_r = Ur.cast<std::complex<double>>();
    eff.U = nearest_unitary(eff.U_r, &eff.rank_warning);
    eff.H_eff = eff.U * E.cast<std::complex<double>>().asDiagonal() * eff.U.adjoint();
    return eff;
}

EffectiveHamiltonian effective_hamiltonian(const LabeledSpectrum& s,
                                           const std::vector<BasisLabel>& subspace) {
    std::vector<int> idx;
    for (const auto& lab : subspace) {
        auto it = s.assignment.find(lab);
        if (it == s.assignment.end() || !it->second.valid)
            throw std::runtime_error("effective_hamiltonian: subspace label lacks a valid assignment");
        idx.push_back(it->second.eig);
    }
    return effective_hamiltonian_manual(s, subspace, idx);
}

double j_perturbative(const LabeledSpectrum& s, const BasisLabel& lab1,
                      const BasisLabel& lab2) {
    const auto ctx = pair_context(s, lab1, lab2);
    if (!ctx.valid)
        throw std::runtime_error("j_perturbative: resonant or unassignable pair; "
                                 "use effective_hamiltonian");
    return restricted_fit_offdiag(ctx) * 1e3;
}

PairCoupling extract_pair(const LabeledSpectrum& s, const BasisLabel& lab1,
                          const BasisLabel& lab2) {
    const auto ctx = pair_context(s, lab1, lab2);
    PairCoupling out;
    out.valid = ctx.valid;
    out.j_proc_mhz = procrustes_offdiag(ctx) * 1e3;
    out.j_pert_mhz = restricted_fit_offdiag(ctx) * 1e3;
    return out;
}

ZZResult zz_shift(const LabeledSpectrum& s) {
    const size_t nm = s.layout.size();
    if (nm != 4) throw std::invalid_argument("zz_shift: expects the 4-mode registration");
    const BasisLabel l00{0, 0, 0, 0}, l10{1, 0, 0, 0}, l01{0, 0, 0, 1}, l11{1, 0, 0, 1};
    const int dim = static_cast<int>(s.energies.size());

    auto row_argmax = [&](const BasisLabel& lab) {
        const int row = index_of(lab, s.layout);
        int k = 0;
        double best = -1.0;
        for (int c = 0; c < dim; ++c) {
            const double o = s.vectors(row, c) * s.vectors(row, c);
            if (o > best) { best = o; k = c; }
        }
        return std::tuple<int, double, bool>(k, best, best > s.epsilon);
    };

    auto [k00, o00, v00] = row_argmax(l00);
    auto [k11, o11, v11] = row_argmax(l11);
    auto [k10, o10, v10] = row_argmax(l10);
    auto [k01, o01, v01] = row_argmax(l01);

    ZZResult r;
    r.valid = v00 && v11;
    double pair_sum;
    if (v10 && v01 && k10 != k01) {
        pair_sum = s.energies[k10] + s.energies[k01];
    } else {
        // the dressed one-excitation pair is identified by subspace weight;
        // the energy SUM is insensitive to which member carries which label
        const int i10 = index_of(l10, s.layout), i01 = index_of(l01, s.layout);
        std::vector<std::pair<double, int>> w(dim);
        for (int c = 0; c < dim; ++c)
            w[c] = {s.vectors(i10, c) * s.vectors(i10, c) + s.vectors(i01, c) * s.vectors(i01, c), c};
        std::partial_sort(w.begin(), w.begin() + 2, w.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        pair_sum = s.energies[w[0].second] + s.energies[w[1].second];
        r.valid = r.valid && (w[0].first + w[1].first > 1.0);
    }
    r.zz_khz = (s.energies[k11] + s.energies[k00] - pair_sum) * 1e6;  // GHz -> kHz
    return r;
}

std::vector<EffectiveHamiltonian> blockwise_effective(
    const Eigen::MatrixXd& H, const Layout& layout,
    const std::vector<std::vector<BasisLabel>>& regions, double epsilon) {
    std::set<BasisLabel> seen;
    std::vector<BasisLabel> all;
    for (const auto& region : regions)
        for (const auto& lab : region) {
            if (!seen.insert(lab).second)
                throw std::invalid_argument("blockwise_effective: regions overlap");
            all.push_back(lab);
        }
    const auto s = assign_states(H, layout, all, epsilon);
    std::vector<EffectiveHamiltonian> out;
    out.reserve(regions.size());
    for (const auto& region : regions) out.push_back(effective_hamiltonian(s, region));
    return out;
}

CouplingReport coupling_report(const LabeledSpectrum& s) {
    if (s.layout.size() != 4)
        throw std::invalid_argument("coupling_report: expects the 4-mode registration");
    CouplingReport r;
    r.j00 = extract_pair(s, {1, 0, 0, 0}, {0, 0, 0, 1});
    if (s.layout[0].levels > 2 && s.layout[3].levels > 2) {
        r.j01 = extract_pair(s, {1, 0, 0, 1}, {0, 0, 0, 2});
        r.j10 = extract_pair(s, {2, 0, 0, 0}, {1, 0, 0, 1});
    }
    const auto zz = zz_shift(s);
    r.zz_khz = zz.zz_khz;
    r.zz_valid = zz.valid;
    const double den = std::abs(r.j01.j_proc_mhz) + std::abs(r.j10.j_proc_mhz);
    r.ratio = den > 0.0 ? 2.0 * std::abs(r.j00.j_proc_mhz) / den
                        : std::numeric_limits<double>::infinity();
    return r;
}

CouplingReport coupling_report(const SystemSpec& spec) {
    const Eigen::MatrixXd H = build_hamiltonian_real(spec);
    const auto s = assign_states(H, spec.modes, {}, spec.options.epsilon);
    return coupling_report(s);
}

}  // namespace couplerlab
