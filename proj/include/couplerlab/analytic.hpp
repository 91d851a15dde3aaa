#pragma once

#include <Eigen/Dense>
#include <vector>

namespace couplerlab {

// Two bare coupler modes with a linear inter-mode coupling lam and a 2x2
// qubit-mode coupling matrix g, rows (a, b), columns (mode 1, mode 2).
struct TwoModeCoupler {
    double f1_ghz = 0.0;
    double f2_ghz = 0.0;
    double lam_ghz = 0.0;
    Eigen::Matrix2d g_mhz = Eigen::Matrix2d::Zero();
};

// Result of rotating the coupler pair into its normal modes.  f1t <= f2t.
struct DressedCoupler {
    double lambda_rad = 0.0;
    double f1t_ghz = 0.0;
    double f2t_ghz = 0.0;
    Eigen::Matrix2d gt_mhz = Eigen::Matrix2d::Zero();
};

struct DecouplingResult {
    bool feasible = false;
    bool degenerate = false;   // |alpha| = 1: requires f1 = f2, Lambda = +-pi/4
    double lambda_star_rad = 0.0;
    double alpha = 0.0;
    double lam_over_delta = 0.0;  // undefined (inf) on the degenerate branch
    double ratio_a = 0.0;         // -g_a2/g_a1
    double ratio_b = 0.0;         // g_b1/g_b2
};

struct QubitParams {
    double fa_ghz = 0.0;
    double fb_ghz = 0.0;
    double da_ghz = 0.0;
    double db_ghz = 0.0;
};

struct MultimodeEstimate {
    double exact_mhz = 0.0;     // sum over modes of g0^2/(f_q - f_k)
    double estimate_mhz = 0.0;  // m * g0^2 / (f_q - f_c)
};

// Normal-mode rotation of the coupler pair.  Mixing angle from atan2 so the
// f2 < f1 branch is continuous; frequencies come out sorted by construction.
DressedCoupler bogoliubov(const TwoModeCoupler& coupler);

// Tests whether one rotation angle can zero both cross couplings at once:
// -g_a2/g_a1 = g_b1/g_b2 = alpha.  Feasible inputs get the angle and the
// lam/delta ratio that realizes it; mismatched ratios are reported back.
DecouplingResult decoupling_condition(const Eigen::Matrix2d& g_mhz);

// max(|gt_a2|, |gt_b1|) after rotation; 0 certifies full localization.
double decoupled_residual(const TwoModeCoupler& coupler);

// Manifold-resolved exchange coupling through the dressed modes:
//   J_mn = sum_k (gt_ak gt_bk / 2) [1/(f_kt - f_a - m d_a) + 1/(f_kt - f_b - n d_b)]
// Throws when any denominator comes within 1 MHz of resonance.
double sw_J(int m, int n, const DressedCoupler& dressed, const QubitParams& qubits);

// 2|J00| / (|J01| + |J10|); +inf when both excited-manifold couplings vanish.
double selectivity_ratio(double j00_mhz, double j01_mhz, double j10_mhz);

// Exchange through m degenerate far-detuned modes, plus the linear-scaling
// estimate m*g0^2/Delta.  The overload takes distinct mode frequencies; its
// estimate uses the centroid detuning.
MultimodeEstimate multimode_enhancement(int m, double g0_mhz, double fq_ghz, double fc_ghz);
MultimodeEstimate multimode_enhancement(double g0_mhz, double fq_ghz,
                                        const std::vector<double>& fc_ghz);

}  // namespace couplerlab
