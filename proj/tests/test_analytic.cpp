#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "couplerlab/analytic.hpp"

using namespace couplerlab;

namespace {

TwoModeCoupler make_coupler(double f1, double f2, double lam, double ga1, double ga2,
                            double gb1, double gb2) {
    TwoModeCoupler c;
    c.f1_ghz = f1;
    c.f2_ghz = f2;
    c.lam_ghz = lam;
    c.g_mhz << ga1, ga2, gb1, gb2;
    return c;
}

}  // namespace

TEST_CASE("dressed frequencies match the 2x2 eigenvalues over random instances") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uf(2.5, 6.0), ul(-0.2, 0.2);
    for (int t = 0; t < 200; ++t) {
        const auto c = make_coupler(uf(rng), uf(rng), ul(rng), 0, 0, 0, 0);
        const auto d = bogoliubov(c);
        Eigen::Matrix2d M;
        M << c.f1_ghz, c.lam_ghz, c.lam_ghz, c.f2_ghz;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
        CHECK(std::abs(d.f1t_ghz - es.eigenvalues()(0)) < 1e-12);
        CHECK(std::abs(d.f2t_ghz - es.eigenvalues()(1)) < 1e-12);
        CHECK(d.f1t_ghz <= d.f2t_ghz);
    }
}

TEST_CASE("the mixing angle diagonalizes the coupler block") {
    const auto c = make_coupler(3.12, 3.05, 0.01, 150, -200, 150, 150);
    const auto d = bogoliubov(c);
    const double co = std::cos(d.lambda_rad), si = std::sin(d.lambda_rad);
    Eigen::Matrix2d R;
    R << co, si, -si, co;
    Eigen::Matrix2d M;
    M << c.f1_ghz, c.lam_ghz, c.lam_ghz, c.f2_ghz;
    const Eigen::Matrix2d D = R.transpose() * M * R;
    CHECK(std::abs(D(0, 1)) < 1e-12);
    CHECK(std::abs(D(1, 0)) < 1e-12);
    CHECK(D(0, 0) == doctest::Approx(d.f1t_ghz).epsilon(1e-12));
    CHECK(D(1, 1) == doctest::Approx(d.f2t_ghz).epsilon(1e-12));
    // the qubit rows rotate with the same R
    const Eigen::Matrix2d gt = c.g_mhz * R;
    CHECK((gt - d.gt_mhz).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rotation preserves each qubit's total coupling weight") {
    const auto c = make_coupler(3.3, 2.9, -0.05, 120, 80, -60, 140);
    const auto d = bogoliubov(c);
    for (int r = 0; r < 2; ++r)
        CHECK(d.gt_mhz.row(r).norm() == doctest::Approx(c.g_mhz.row(r).norm()).epsilon(1e-13));
}

TEST_CASE("matched ratios admit a single decoupling angle") {
    Eigen::Matrix2d g;
    g << 100.0, -50.0, 60.0, 120.0;  // -ga2/ga1 = gb1/gb2 = 0.5
    const auto res = decoupling_condition(g);
    CHECK(res.feasible);
    CHECK_FALSE(res.degenerate);
    CHECK(res.alpha == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.lambda_star_rad == doctest::Approx(std::atan(0.5)).epsilon(1e-12));
    CHECK(res.lam_over_delta == doctest::Approx(0.5 / 0.75).epsilon(1e-12));
}

TEST_CASE("a coupler tuned to the decoupling ratio rotates fully block-diagonal") {
    // alpha = 0.5 wants lam/(f2-f1) = 2/3; f2-f1 = 0.09 GHz fixes lam = 0.06
    const auto c = make_coupler(3.31, 3.40, 0.06, 100, -50, 60, 120);
    CHECK(decoupled_residual(c) < 1e-10);
    // detuning it off the ratio leaves a finite residual
    const auto off = make_coupler(3.31, 3.40, 0.03, 100, -50, 60, 120);
    CHECK(decoupled_residual(off) > 1.0);
}

TEST_CASE("mismatched ratios are reported as infeasible") {
    Eigen::Matrix2d g;
    g << 150.0, -200.0, 150.0, 150.0;
    const auto res = decoupling_condition(g);
    CHECK_FALSE(res.feasible);
    CHECK(res.ratio_a == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(res.ratio_b == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unit ratio needs degenerate bare modes and a 45-degree angle") {
    Eigen::Matrix2d g;
    g << 100.0, -100.0, 70.0, 70.0;
    const auto res = decoupling_condition(g);
    CHECK(res.feasible);
    CHECK(res.degenerate);
    CHECK(res.lambda_star_rad == doctest::Approx(M_PI / 4).epsilon(1e-12));
    CHECK(std::isinf(res.lam_over_delta));

    g << 100.0, 100.0, -70.0, 70.0;
    const auto neg = decoupling_condition(g);
    CHECK(neg.degenerate);
    CHECK(neg.lambda_star_rad == doctest::Approx(-M_PI / 4).epsilon(1e-12));
}

TEST_CASE("decoupling test rejects zero reference couplings") {
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    CHECK_THROWS_AS(decoupling_condition(g), std::invalid_argument);
}

TEST_CASE("exchange through a single far mode matches the closed form") {
    DressedCoupler d;
    d.f1t_ghz = 4.5;
    d.f2t_ghz = 9.0;
    d.gt_mhz << 50.0, 0.0, 40.0, 0.0;
    const QubitParams q{4.0, 3.6, -0.3, -0.35};
    CHECK(sw_J(0, 0, d, q) ==
          doctest::Approx(1e3 * 0.05 * 0.04 / 2 * (1 / 0.5 + 1 / 0.9)).epsilon(1e-12));
    CHECK(sw_J(0, 1, d, q) ==
          doctest::Approx(1e3 * 0.001 * (1 / 0.5 + 1 / 1.25)).epsilon(1e-12));
    CHECK(sw_J(1, 0, d, q) ==
          doctest::Approx(1e3 * 0.001 * (1 / 0.8 + 1 / 0.9)).epsilon(1e-12));
}

TEST_CASE("both dressed modes contribute additively") {
    DressedCoupler d;
    d.f1t_ghz = 4.5;
    d.f2t_ghz = 5.5;
    d.gt_mhz << 50.0, 30.0, 40.0, 20.0;
    DressedCoupler d1 = d, d2 = d;
    d1.gt_mhz.col(1).setZero();
    d2.gt_mhz.col(0).setZero();
    const QubitParams q{4.0, 3.6, -0.3, -0.35};
    CHECK(sw_J(0, 0, d, q) ==
          doctest::Approx(sw_J(0, 0, d1, q) + sw_J(0, 0, d2, q)).epsilon(1e-12));
}

TEST_CASE("near-resonant denominators are refused rather than amplified") {
    DressedCoupler d;
    d.f1t_ghz = 4.0005;  // 0.5 MHz from the qubit
    d.f2t_ghz = 6.0;
    d.gt_mhz << 50.0, 0.0, 40.0, 0.0;
    const QubitParams q{4.0, 3.6, -0.3, -0.35};
    CHECK_THROWS_AS(sw_J(0, 0, d, q), std::domain_error);
}

TEST_CASE("selectivity ratio handles the all-zero leakage case") {
    CHECK(selectivity_ratio(3.0, 1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::isinf(selectivity_ratio(3.0, 0.0, 0.0)));
}

TEST_CASE("degenerate multimode exchange scales linearly in mode count") {
    const auto est = multimode_enhancement(3, 50.0, 4.0, 4.5);
    CHECK(est.exact_mhz == doctest::Approx(-15.0).epsilon(1e-12));
    CHECK(est.estimate_mhz == doctest::Approx(est.exact_mhz).epsilon(1e-12));
}

TEST_CASE("spread modes deviate from the centroid estimate by the curvature") {
    const auto est = multimode_enhancement(50.0, 4.0, {4.4, 4.5, 4.6});
    CHECK(est.estimate_mhz == doctest::Approx(-15.0).epsilon(1e-12));
    CHECK(est.exact_mhz ==
          doctest::Approx(2.5 * (-1 / 0.4 - 1 / 0.5 - 1 / 0.6)).epsilon(1e-12));
}

TEST_CASE("multimode guards reject empty and resonant inputs") {
    CHECK_THROWS_AS(multimode_enhancement(0, 50.0, 4.0, 4.5), std::invalid_argument);
    CHECK_THROWS_AS(multimode_enhancement(50.0, 4.0, std::vector<double>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(multimode_enhancement(2, 50.0, 4.0, 4.0), std::domain_error);
}
