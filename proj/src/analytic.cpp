#include "couplerlab/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace couplerlab {

DressedCoupler bogoliubov(const TwoModeCoupler& coupler) {
    const double d12 = coupler.f2_ghz - coupler.f1_ghz;
    const double lam = coupler.lam_ghz;
    DressedCoupler out;
    out.lambda_rad = 0.5 * std::atan2(2.0 * lam, d12);
    const double s = coupler.f1_ghz + coupler.f2_ghz;
    const double split = std::sqrt(d12 * d12 + 4.0 * lam * lam);
    out.f1t_ghz = 0.5 * (s - split);
    out.f2t_ghz = 0.5 * (s + split);
    const double c = std::cos(out.lambda_rad), sn = std::sin(out.lambda_rad);
    for (int row = 0; row < 2; ++row) {
        const double g1 = coupler.g_mhz(row, 0), g2 = coupler.g_mhz(row, 1);
        out.gt_mhz(row, 0) = g1 * c - g2 * sn;
        out.gt_mhz(row, 1) = g1 * sn + g2 * c;
    }
    return out;
}

DecouplingResult decoupling_condition(const Eigen::Matrix2d& g_mhz) {
    const double ga1 = g_mhz(0, 0), ga2 = g_mhz(0, 1);
    const double gb1 = g_mhz(1, 0), gb2 = g_mhz(1, 1);
    if (ga1 == 0.0 || gb2 == 0.0)
        throw std::invalid_argument("decoupling_condition: g_a1 and g_b2 must be nonzero");
    DecouplingResult r;
    r.ratio_a = -ga2 / ga1;
    r.ratio_b = gb1 / gb2;
    const double scale = std::max({std::abs(r.ratio_a), std::abs(r.ratio_b), 1e-300});
    if (std::abs(r.ratio_a - r.ratio_b) > 1e-9 * scale) return r;  // infeasible
    r.feasible = true;
    r.alpha = r.ratio_a;
    r.lambda_star_rad = std::atan(r.alpha);
    if (std::abs(std::abs(r.alpha) - 1.0) <= 1e-9) {
        // one rotation can still kill both couplings, but only at exact mode
        // degeneracy, where the angle saturates at +-pi/4
        r.degenerate = true;
        r.lambda_star_rad = std::copysign(M_PI / 4.0, r.alpha);
        r.lam_over_delta = std::numeric_limits<double>::infinity();
    } else {
        r.lam_over_delta = r.alpha / (1.0 - r.alpha * r.alpha);
    }
    return r;
}

double decoupled_residual(const TwoModeCoupler& coupler) {
    const DressedCoupler d = bogoliubov(coupler);
    return std::max(std::abs(d.gt_mhz(0, 1)), std::abs(d.gt_mhz(1, 0)));
}

double sw_J(int m, int n, const DressedCoupler& dressed, const QubitParams& qubits) {
    const double ft[2] = {dressed.f1t_ghz, dressed.f2t_ghz};
    double j_ghz = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double den_a = ft[k] - qubits.fa_ghz - m * qubits.da_ghz;
        const double den_b = ft[k] - qubits.fb_ghz - n * qubits.db_ghz;
        for (auto [den, side] : {std::pair{den_a, 'a'}, std::pair{den_b, 'b'}}) {
            if (std::abs(den) <= 1e-3) {
                std::ostringstream msg;
                msg << "sw_J: dressed mode " << (k + 1) << " within 1 MHz of the " << side
                    << "-side transition (J_" << m << n << ", detuning " << den * 1e3 << " MHz)";
                throw std::domain_error(msg.str());
            }
        }
        const double ga = dressed.gt_mhz(0, k) * 1e-3, gb = dressed.gt_mhz(1, k) * 1e-3;
        j_ghz += 0.5 * ga * gb * (1.0 / den_a + 1.0 / den_b);
    }
    return j_ghz * 1e3;
}

double selectivity_ratio(double j00_mhz, double j01_mhz, double j10_mhz) {
    const double den = std::abs(j01_mhz) + std::abs(j10_mhz);
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::abs(j00_mhz) / den;
}

MultimodeEstimate multimode_enhancement(double g0_mhz, double fq_ghz,
                                        const std::vector<double>& fc_ghz) {
    if (fc_ghz.empty())
        throw std::invalid_argument("multimode_enhancement: no mode frequencies");
    MultimodeEstimate out;
    const double g0 = g0_mhz * 1e-3;
    double centroid = 0.0;
    for (double fk : fc_ghz) {
        const double det = fq_ghz - fk;
        if (det == 0.0)
            throw std::domain_error("multimode_enhancement: zero qubit-mode detuning");
        out.exact_mhz += g0 * g0 / det * 1e3;
        centroid += fk;
    }
    centroid /= static_cast<double>(fc_ghz.size());
    const double det_c = fq_ghz - centroid;
    if (det_c == 0.0)
        throw std::domain_error("multimode_enhancement: zero centroid detuning");
    out.estimate_mhz = static_cast<double>(fc_ghz.size()) * g0 * g0 / det_c * 1e3;
    return out;
}

MultimodeEstimate multimode_enhancement(int m, double g0_mhz, double fq_ghz, double fc_ghz) {
    if (m < 1) throw std::invalid_argument("multimode_enhancement: need at least one mode");
    return multimode_enhancement(g0_mhz, fq_ghz, std::vector<double>(m, fc_ghz));
}

}  // namespace couplerlab
