#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace couplerlab {

// Three-cell coupler designs, element values in fF / nH, qubit frequencies in
// GHz.  The a/b suffixes are the coupling capacitors to the two qubits; cqa and
// cqb are the qubits' own shunt capacitances.
struct LeftHandedDesign {
    double c_ff = 30.0;   // c1 = c3
    double c2_ff = 30.0;
    double l_nh = 30.0;   // (l1 + l3) / 2
    double dl_nh = 0.0;   // (l1 - l3) / 2, any sign, |dl| < l
    double l2_nh = 20.0;
    double ca_ff = 5.0, cb_ff = 5.0;
    double cqa_ff = 60.0, cqb_ff = 60.0;
    double fa_ghz = 4.0, fb_ghz = 3.6;
};

// Right-handed variant: l is the harmonic pair mean 2/l = 1/l1 + 1/l3 and dl
// the inverse split 2/dl = 1/l1 - 1/l3, so physical inductances need |dl| > l.
struct RightHandedDesign {
    double c_ff = 30.0;
    double c2_ff = 30.0;
    double l_nh = 30.0;
    double dl_nh = 120.0;
    double l2_nh = 20.0;
    double ca_ff = 5.0, cb_ff = 5.0;
    double cqa_ff = 60.0, cqb_ff = 60.0;
    double fa_ghz = 4.0, fb_ghz = 3.6;
};

struct CircuitReport {
    double f_plus_ghz = 0.0;
    double f_minus_ghz = 0.0;
    double g12_mhz = 0.0;
    Eigen::Matrix2d g_mhz = Eigen::Matrix2d::Zero();  // rows (a,b), cols (+,-)
    double alpha = 0.0;
    double beta = 0.0;
    double g12_over_delta12 = 0.0;         // g12 / (f_minus - f_plus), authoritative
    double g12_over_delta12_closed = 0.0;  // printed closed form, cross-check
    bool three_mode_regime = false;
    std::vector<std::string> warnings;
};

struct NormalModes {
    Eigen::VectorXd freqs_ghz;     // ascending
    Eigen::MatrixXd A;             // eta = A * phi
    Eigen::MatrixXd Ctilde;        // Cint * A^-1
    double decoupling_residual = 0.0;  // 2x2 Cint only, else NaN
};

enum class LocusAxis { dl, l2 };

struct LhLocusSpec {
    double c_ff = 30.0;
    double l_nh = 30.0;
    double c2_min_ff = 1.0, c2_max_ff = 120.0;
    int c2_points = 60;
    LocusAxis axis2 = LocusAxis::dl;
    double axis2_min = 0.0, axis2_max = 28.0;
    int axis2_points = 60;
    // axis2 == l2 scans l2 at this fixed dl; axis2 == dl derives l2 from the
    // |beta| = 1 condition cell by cell
    double dl_fixed_nh = 3.0;
};

struct LocusGrid {
    std::vector<double> axis1;  // c2, fF
    std::vector<double> axis2;  // dl or l2, nH
    std::vector<double> value;  // row-major, axis1-major
    std::vector<std::uint8_t> valid;
};

CircuitReport lh_analyze(const LeftHandedDesign& d);
CircuitReport rh_analyze(const RightHandedDesign& d);

// l2 that makes |beta| = 1 for the left-handed cell pair
double lh_decoupling_l2(double c_ff, double c2_ff, double l_nh, double dl_nh);

// signed mode-matching defect g12/(f- - f+) - alpha/(1 - alpha^2); its zero
// set is the full-localization locus
double lh_locus_mismatch_signed(double c_ff, double c2_ff, double l_nh, double dl_nh,
                                double l2_nh);

LocusGrid lh_locus_scan(const LhLocusSpec& spec);

// Generic lumped-circuit quantizer: C in fF, Linv in 1/nH, Cint rows are the
// qubit-side velocity-coupling coefficients in fF.
NormalModes normal_modes(const Eigen::MatrixXd& C, const Eigen::MatrixXd& Linv,
                         const Eigen::MatrixXd& Cint);

}  // namespace couplerlab
