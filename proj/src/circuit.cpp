#include "couplerlab/circuit.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace couplerlab {

namespace {

// 1/sqrt(nH * fF) -> GHz linear frequency (the 1e-24 element scaling folded in)
constexpr double kFreqGhz = 1e3 / (2.0 * M_PI);

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "circuit: " << name << " must be positive (got " << v << ")";
        throw std::invalid_argument(msg.str());
    }
}

struct LhCore {
    double sigma, c_plus, c_minus, l_plus, l_minus;
    double f_plus, f_minus;  // GHz
    double g12_mhz, alpha, beta;
    double ratio_fp, ratio_closed;  // g12/Delta12, two routes
};

LhCore lh_core(double c, double c2, double l, double dl, double l2) {
    require_positive(c, "c");
    require_positive(l, "l");
    if (c2 < 0.0 || l2 < 0.0)
        throw std::invalid_argument("circuit: c2 and l2 must be nonnegative");
    if (std::abs(dl) >= l)
        throw std::invalid_argument("circuit: |dl| must stay below l");
    LhCore k;
    k.sigma = 2.0 * l * l2 + l * l - dl * dl;
    if (k.sigma <= 0.0) throw std::invalid_argument("circuit: Sigma <= 0");
    if (l + dl == 0.0) throw std::invalid_argument("circuit: l + dl = 0 makes alpha singular");
    k.c_plus = 2.0 * c + 4.0 * c2;
    k.c_minus = 0.5 * c;
    k.l_plus = 0.5 * l;
    k.l_minus = 2.0 * l + 4.0 * l2;
    k.f_plus = kFreqGhz / std::sqrt(k.l_plus * k.c_plus);
    k.f_minus = kFreqGhz / std::sqrt(k.l_minus * k.c_minus);
    const double zquarter = std::pow(k.l_plus * k.l_minus / (k.c_plus * k.c_minus), 0.25);
    k.g12_mhz = -(dl / (2.0 * k.sigma)) * zquarter * kFreqGhz * 1e3;
    k.alpha = -((l + dl + 2.0 * l2) / (l + dl)) *
              std::sqrt(k.f_plus * c / (k.f_minus * (c + 2.0 * c2)));
    const double s = l * l - dl * dl;
    k.beta = -(s / ((l + 2.0 * l2 + dl) * (l + 2.0 * l2 - dl))) * (c + 2.0 * c2) / c;
    k.ratio_fp = k.g12_mhz * 1e-3 / (k.f_minus - k.f_plus);
    k.ratio_closed = (dl / (2.0 * k.sigma)) *
                     std::pow(k.l_plus * k.l_minus, 0.75) *
                     std::pow(k.c_plus * k.c_minus, 0.25) /
                     (std::sqrt(k.l_minus * k.c_minus) - std::sqrt(k.l_plus * k.c_plus));
    return k;
}

// qubit-coupler g in MHz from a velocity-coupling coefficient: all inputs in
// fF and GHz, the 1e-24 scaling already absorbed into the 1e3 factor
double g_coupling_mhz(double c_int, double coeff, double f_mode, double f_qubit,
                      double c_mode, double c_qubit) {
    return c_int * coeff * 1e3 * std::sqrt(f_mode * f_qubit / (c_mode * c_qubit));
}

void finish_report(CircuitReport& r, double ca, double cb, double c_plus) {
    const double load = std::max(ca, cb) / c_plus;
    std::ostringstream msg;
    if (load >= 0.05) {
        r.three_mode_regime = true;
        msg << "three-mode regime: coupling capacitor load " << load
            << " on the + mode is too large to freeze out";
    } else {
        msg << "frozen extra coupler mode dropped (capacitor load " << load << ")";
    }
    r.warnings.push_back(msg.str());
    const double scale = std::max({std::abs(r.g12_over_delta12),
                                   std::abs(r.g12_over_delta12_closed), 1e-300});
    if (std::abs(std::abs(r.g12_over_delta12) - std::abs(r.g12_over_delta12_closed)) >
        1e-9 * scale)
        r.warnings.push_back("g12/Delta12 closed form disagrees with the direct ratio");
    if (!(r.f_plus_ghz > 0.0) || !(r.f_minus_ghz > 0.0))
        throw std::logic_error("circuit: nonpositive mode frequency");
}

}  // namespace

CircuitReport lh_analyze(const LeftHandedDesign& d) {
    for (auto [v, n] : {std::pair{d.ca_ff, "ca"}, {d.cb_ff, "cb"}, {d.cqa_ff, "cqa"},
                        {d.cqb_ff, "cqb"}, {d.fa_ghz, "fa"}, {d.fb_ghz, "fb"}})
        require_positive(v, n);
    const auto k = lh_core(d.c_ff, d.c2_ff, d.l_nh, d.dl_nh, d.l2_nh);
    CircuitReport r;
    r.f_plus_ghz = k.f_plus;
    r.f_minus_ghz = k.f_minus;
    r.g12_mhz = k.g12_mhz;
    r.alpha = k.alpha;
    r.beta = k.beta;
    r.g12_over_delta12 = k.ratio_fp;
    r.g12_over_delta12_closed = k.ratio_closed;
    const double dd = k.sigma;
    const double coeff_p_a = 1.0 + 2.0 * d.l2_nh * d.dl_nh / dd;
    const double coeff_p_b = 1.0 - 2.0 * d.l2_nh * d.dl_nh / dd;
    const double coeff_m = (d.l_nh * d.l_nh - d.dl_nh * d.dl_nh) / (2.0 * dd);
    r.g_mhz(0, 0) = g_coupling_mhz(d.ca_ff, coeff_p_a, k.f_plus, d.fa_ghz, k.c_plus, d.cqa_ff);
    r.g_mhz(0, 1) = g_coupling_mhz(d.ca_ff, coeff_m, k.f_minus, d.fa_ghz, k.c_minus, d.cqa_ff);
    r.g_mhz(1, 0) = -g_coupling_mhz(d.cb_ff, coeff_p_b, k.f_plus, d.fb_ghz, k.c_plus, d.cqb_ff);
    r.g_mhz(1, 1) = g_coupling_mhz(d.cb_ff, coeff_m, k.f_minus, d.fb_ghz, k.c_minus, d.cqb_ff);
    finish_report(r, d.ca_ff, d.cb_ff, k.c_plus);
    return r;
}

CircuitReport rh_analyze(const RightHandedDesign& d) {
    for (auto [v, n] : {std::pair{d.c_ff, "c"}, {d.c2_ff, "c2"}, {d.l_nh, "l"},
                        {d.l2_nh, "l2"}, {d.ca_ff, "ca"}, {d.cb_ff, "cb"},
                        {d.cqa_ff, "cqa"}, {d.cqb_ff, "cqb"}, {d.fa_ghz, "fa"},
                        {d.fb_ghz, "fb"}})
        require_positive(v, n);
    // 1/l1 = 1/l + 1/dl and 1/l3 = 1/l - 1/dl: physical inductances need |dl| > l
    if (std::abs(d.dl_nh) <= d.l_nh)
        throw std::invalid_argument("circuit: right-handed split needs |dl| > l");
    const double c = d.c_ff, c2 = d.c2_ff, l = d.l_nh, dl = d.dl_nh, l2 = d.l2_nh;
    const double c_plus = 2.0 * c;
    const double c_minus = c * c2 / (2.0 * (2.0 * c + c2));
    const double L_plus = 1.0 / (2.0 / l + 4.0 / l2);
    const double L_minus = 2.0 * l;
    CircuitReport r;
    r.f_plus_ghz = kFreqGhz / std::sqrt(L_plus * c_plus);
    r.f_minus_ghz = kFreqGhz / std::sqrt(L_minus * c_minus);
    const double zquarter = std::pow(L_plus * L_minus / (c_plus * c_minus), 0.25);
    r.g12_mhz = (1.0 / (2.0 * dl)) * zquarter * kFreqGhz * 1e3;
    const double coeff_m = 0.5 * c2 / (2.0 * c + c2);
    r.g_mhz(0, 0) = g_coupling_mhz(d.ca_ff, 1.0, r.f_plus_ghz, d.fa_ghz, c_plus, d.cqa_ff);
    r.g_mhz(0, 1) = g_coupling_mhz(d.ca_ff, coeff_m, r.f_minus_ghz, d.fa_ghz, c_minus, d.cqa_ff);
    r.g_mhz(1, 0) = -g_coupling_mhz(d.cb_ff, 1.0, r.f_plus_ghz, d.fb_ghz, c_plus, d.cqb_ff);
    r.g_mhz(1, 1) = g_coupling_mhz(d.cb_ff, coeff_m, r.f_minus_ghz, d.fb_ghz, c_minus, d.cqb_ff);
    r.alpha = r.g_mhz(1, 0) / r.g_mhz(1, 1);
    r.beta = -c2 / (2.0 * c + c2);
    r.g12_over_delta12 = r.g12_mhz * 1e-3 / (r.f_minus_ghz - r.f_plus_ghz);
    r.g12_over_delta12_closed =
        (1.0 / (2.0 * dl)) * std::pow(L_plus * L_minus, 0.75) *
        std::pow(c_plus * c_minus, 0.25) /
        (std::sqrt(L_plus * c_plus) - std::sqrt(L_minus * c_minus));
    finish_report(r, d.ca_ff, d.cb_ff, c_plus);
    return r;
}

double lh_decoupling_l2(double c_ff, double c2_ff, double l_nh, double dl_nh) {
    require_positive(c_ff, "c");
    require_positive(l_nh, "l");
    const double k = (c_ff + 2.0 * c2_ff) / c_ff;
    const double rad = k * l_nh * l_nh - (k - 1.0) * dl_nh * dl_nh;
    if (rad <= 0.0) throw std::domain_error("lh_decoupling_l2: negative radicand");
    return 0.5 * (std::sqrt(rad) - l_nh);
}

double lh_locus_mismatch_signed(double c_ff, double c2_ff, double l_nh, double dl_nh,
                                double l2_nh) {
    const auto k = lh_core(c_ff, c2_ff, l_nh, dl_nh, l2_nh);
    const double denom = 1.0 - k.alpha * k.alpha;
    if (std::abs(denom) < 1e-12 || k.f_minus == k.f_plus)
        throw std::domain_error("lh_locus_mismatch: singular point");
    return k.ratio_fp - k.alpha / denom;
}

LocusGrid lh_locus_scan(const LhLocusSpec& spec) {
    if (spec.c2_points < 2 || spec.axis2_points < 2)
        throw std::invalid_argument("lh_locus_scan: need at least 2 points per axis");
    LocusGrid g;
    g.axis1.resize(spec.c2_points);
    g.axis2.resize(spec.axis2_points);
    for (int i = 0; i < spec.c2_points; ++i)
        g.axis1[i] = spec.c2_min_ff +
                     (spec.c2_max_ff - spec.c2_min_ff) * i / (spec.c2_points - 1);
    for (int j = 0; j < spec.axis2_points; ++j)
        g.axis2[j] = spec.axis2_min +
                     (spec.axis2_max - spec.axis2_min) * j / (spec.axis2_points - 1);
    const int n = spec.c2_points * spec.axis2_points;
    g.value.assign(n, 0.0);
    g.valid.assign(n, 0);

#pragma omp parallel for schedule(static)
    for (int cell = 0; cell < n; ++cell) {
        const int i = cell / spec.axis2_points;
        const int j = cell % spec.axis2_points;
        try {
            double dl, l2;
            if (spec.axis2 == LocusAxis::dl) {
                dl = g.axis2[j];
                l2 = lh_decoupling_l2(spec.c_ff, g.axis1[i], spec.l_nh, dl);
            } else {
                dl = spec.dl_fixed_nh;
                l2 = g.axis2[j];
            }
            const double v =
                std::abs(lh_locus_mismatch_signed(spec.c_ff, g.axis1[i], spec.l_nh, dl, l2));
            if (std::isfinite(v)) {
                g.value[cell] = v;
                g.valid[cell] = 1;
            }
        } catch (const std::exception&) {
            // invalid cell: out-of-range elements or singular alpha, left masked
        }
    }
    return g;
}

NormalModes normal_modes(const Eigen::MatrixXd& C, const Eigen::MatrixXd& Linv,
                         const Eigen::MatrixXd& Cint) {
    const auto n = C.rows();
    if (C.cols() != n || Linv.rows() != n || Linv.cols() != n)
        throw std::invalid_argument("normal_modes: shape mismatch");
    if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, C.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("normal_modes: C not symmetric");
    if ((Linv - Linv.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, Linv.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("normal_modes: Linv not symmetric");
    if (Cint.size() > 0 && Cint.cols() != n)
        throw std::invalid_argument("normal_modes: Cint column count mismatch");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esC(C);
    if (esC.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("normal_modes: C not positive-definite");
    const Eigen::MatrixXd Cs = esC.operatorSqrt();
    const Eigen::MatrixXd Csi = esC.operatorInverseSqrt();

    Eigen::MatrixXd M = Csi * Linv * Csi;
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    Eigen::VectorXd lam = es.eigenvalues();
    const double lmax = std::max(1.0, lam.cwiseAbs().maxCoeff());
    if (lam.minCoeff() < -1e-9 * lmax)
        throw std::invalid_argument("normal_modes: Linv not positive-semidefinite");

    NormalModes out;
    out.freqs_ghz.resize(n);
    for (Eigen::Index k = 0; k < n; ++k)
        out.freqs_ghz[k] = std::sqrt(std::max(lam[k], 0.0)) * 1e3 / (2.0 * M_PI);

    // rows of D are the normal-mode vectors; gauge: largest entry positive
    Eigen::MatrixXd D = es.eigenvectors().transpose();
    for (Eigen::Index r = 0; r < n; ++r) {
        Eigen::Index imax = 0;
        D.row(r).cwiseAbs().maxCoeff(&imax);
        if (D(r, imax) < 0.0) D.row(r) *= -1.0;
    }
    out.A = D * Cs;
    if (Cint.size() > 0) out.Ctilde = Cint * (Csi * D.transpose());

    out.decoupling_residual = std::numeric_limits<double>::quiet_NaN();
    if (out.Ctilde.rows() == 2 && out.Ctilde.cols() == 2) {
        const auto& ct = out.Ctilde;
        out.decoupling_residual =
            std::min(std::max(std::abs(ct(0, 0)), std::abs(ct(1, 1))),
                     std::max(std::abs(ct(0, 1)), std::abs(ct(1, 0))));
    }
    return out;
}

}  // namespace couplerlab
