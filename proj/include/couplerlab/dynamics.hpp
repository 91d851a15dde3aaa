#pragma once

#include <cstdint>
#include <vector>

#include "couplerlab/system.hpp"

namespace couplerlab {

// Rectangular pulses only: each segment holds one static system
struct PulseSegment {
    SystemSpec spec;
    double duration_ns = 0.0;
};

struct PulseSchedule {
    std::vector<PulseSegment> segments;
};

struct EvolutionTrace {
    std::vector<double> times_ns;
    std::vector<BasisLabel> tracked;
    Eigen::MatrixXcd amplitudes;  // row = sample, col = tracked label
    Eigen::VectorXcd final_state;
    double max_norm_drift = 0.0;  // over the full basis, every sample
};

struct ConditionalPhase {
    std::vector<double> times_ns;
    std::vector<double> phase_rad;   // unwrapped; NaN where masked
    std::vector<std::uint8_t> valid; // 0 where any amplitude fell below 1e-6
};

struct IswapScan {
    std::vector<double> fa_ghz;
    std::vector<double> times_ns;
    Eigen::MatrixXd p_0001, p_1000, p_1001;  // row = fa column, col = sample
    Eigen::MatrixXd cond_phase_rad;
    Eigen::MatrixXd phase_valid;
};

struct GateTime {
    double t_ns = 0.0;
    double peak = 0.0;
    bool found = false;
};

// Piecewise-exact propagation: per segment U(t) = V exp(-i 2 pi E t) V^T from
// the eigendecomposition, so samples only choose readout points.  Tracked
// labels default to the four computational states.
EvolutionTrace evolve(const PulseSchedule& schedule, const BasisLabel& psi0,
                      int samples_per_ns, std::vector<BasisLabel> tracked = {});

std::vector<double> population(const EvolutionTrace& trace, const BasisLabel& label);
std::vector<double> phase(const EvolutionTrace& trace, const BasisLabel& label);

// ZZ phase from four runs started in the computational states under one
// schedule: arg<11> + arg<00> - arg<10> - arg<01>, unwrapped
ConditionalPhase conditional_phase(const EvolutionTrace& t00, const EvolutionTrace& t10,
                                   const EvolutionTrace& t01, const EvolutionTrace& t11);

// Sweep of the first mode's frequency against a fixed last-mode frequency;
// single-excitation panels start from |1000>, the |1001> panels from |1001>
IswapScan iswap_scan(const SystemSpec& tmpl, const std::vector<double>& fa_values,
                     double fb_ghz, double t_max_ns, int samples_per_ns);

// first interior population maximum, refined by quadratic interpolation
GateTime first_transfer_peak(const std::vector<double>& times_ns,
                             const std::vector<double>& pop);

}  // namespace couplerlab
