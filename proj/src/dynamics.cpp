#include "couplerlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace couplerlab {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::vector<double> segment_sample_offsets(double duration_ns, int samples_per_ns) {
    // strictly increasing offsets in (0, duration], endpoint always included
    std::vector<double> out;
    const double step = 1.0 / samples_per_ns;
    for (int k = 1; k * step < duration_ns - 1e-12; ++k) out.push_back(k * step);
    out.push_back(duration_ns);
    return out;
}

int tracked_column(const EvolutionTrace& t, const BasisLabel& label) {
    for (size_t j = 0; j < t.tracked.size(); ++j)
        if (t.tracked[j] == label) return static_cast<int>(j);
    throw std::invalid_argument("trace does not track the requested label");
}

}  // namespace

EvolutionTrace evolve(const PulseSchedule& schedule, const BasisLabel& psi0,
                      int samples_per_ns, std::vector<BasisLabel> tracked) {
    if (schedule.segments.empty()) throw std::invalid_argument("evolve: empty schedule");
    if (samples_per_ns < 1) throw std::invalid_argument("evolve: samples_per_ns < 1");
    const Layout& layout = schedule.segments.front().spec.modes;
    for (const auto& seg : schedule.segments) {
        if (!(seg.duration_ns > 0.0))
            throw std::invalid_argument("evolve: segment durations must be positive");
        if (seg.spec.modes.size() != layout.size())
            throw std::invalid_argument("evolve: segment layouts differ");
        for (size_t k = 0; k < layout.size(); ++k)
            if (seg.spec.modes[k].levels != layout[k].levels)
                throw std::invalid_argument("evolve: segment truncations differ");
    }
    if (tracked.empty()) {
        if (layout.size() == 4)
            tracked = {{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {1, 0, 0, 1}};
        else
            tracked = {psi0};
    }

    const int dim = total_dim(layout);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi[index_of(psi0, layout)] = 1.0;

    EvolutionTrace trace;
    trace.tracked = tracked;
    std::vector<int> rows;
    rows.reserve(tracked.size());
    for (const auto& lab : tracked) rows.push_back(index_of(lab, layout));

    std::vector<Eigen::VectorXcd> samples;
    trace.times_ns.push_back(0.0);
    samples.push_back(psi);

    double t_base = 0.0;
    for (const auto& seg : schedule.segments) {
        const Eigen::MatrixXd H = build_hamiltonian_real(seg.spec);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const Eigen::MatrixXd& V = es.eigenvectors();
        const Eigen::VectorXd& E = es.eigenvalues();
        const Eigen::VectorXcd c0 = V.transpose() * psi;
        for (double t : segment_sample_offsets(seg.duration_ns, samples_per_ns)) {
            Eigen::VectorXcd c = c0;
            for (int k = 0; k < dim; ++k)
                c[k] *= std::exp(std::complex<double>(0.0, -kTwoPi * E[k] * t));
            samples.push_back(V * c);
            trace.times_ns.push_back(t_base + t);
        }
        psi = samples.back();  // segment endpoint is always the last sample
        t_base += seg.duration_ns;
    }

    const auto n = static_cast<Eigen::Index>(samples.size());
    trace.amplitudes.resize(n, static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        trace.max_norm_drift = std::max(trace.max_norm_drift,
                                        std::abs(samples[i].norm() - 1.0));
        for (size_t j = 0; j < rows.size(); ++j)
            trace.amplitudes(i, static_cast<Eigen::Index>(j)) = samples[i][rows[j]];
    }
    trace.final_state = psi;
    return trace;
}

std::vector<double> population(const EvolutionTrace& trace, const BasisLabel& label) {
    const int col = tracked_column(trace, label);
    std::vector<double> out(trace.times_ns.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = std::norm(trace.amplitudes(static_cast<Eigen::Index>(i), col));
    return out;
}

std::vector<double> phase(const EvolutionTrace& trace, const BasisLabel& label) {
    const int col = tracked_column(trace, label);
    std::vector<double> out(trace.times_ns.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = std::arg(trace.amplitudes(static_cast<Eigen::Index>(i), col));
    return out;
}

ConditionalPhase conditional_phase(const EvolutionTrace& t00, const EvolutionTrace& t10,
                                   const EvolutionTrace& t01, const EvolutionTrace& t11) {
    const size_t n = t00.times_ns.size();
    for (const auto* t : {&t10, &t01, &t11})
        if (t->times_ns != t00.times_ns)
            throw std::invalid_argument("conditional_phase: trace time grids differ");
    const size_t nm = t00.tracked.empty() ? 0 : t00.tracked.front().size();
    BasisLabel l00(nm, 0), l10(nm, 0), l01(nm, 0), l11(nm, 0);
    l10.front() = 1;
    l01.back() = 1;
    l11.front() = 1;
    l11.back() = 1;
    const int c00 = tracked_column(t00, l00), c10 = tracked_column(t10, l10);
    const int c01 = tracked_column(t01, l01), c11 = tracked_column(t11, l11);

    ConditionalPhase out;
    out.times_ns = t00.times_ns;
    out.phase_rad.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.valid.assign(n, 0);
    double offset = 0.0, prev = 0.0;
    bool have_prev = false;
    for (size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const std::complex<double> a00 = t00.amplitudes(idx, c00);
        const std::complex<double> a10 = t10.amplitudes(idx, c10);
        const std::complex<double> a01 = t01.amplitudes(idx, c01);
        const std::complex<double> a11 = t11.amplitudes(idx, c11);
        if (std::abs(a00) < 1e-6 || std::abs(a10) < 1e-6 || std::abs(a01) < 1e-6 ||
            std::abs(a11) < 1e-6)
            continue;  // phase undefined at this sample
        double raw = std::arg(a11) + std::arg(a00) - std::arg(a10) - std::arg(a01);
        if (have_prev) {
            // shift by whole turns to keep the sequence continuous
            const double jump = raw + offset - prev;
            offset -= kTwoPi * std::round(jump / kTwoPi);
        }
        const double unwrapped = raw + offset;
        out.phase_rad[i] = unwrapped;
        out.valid[i] = 1;
        prev = unwrapped;
        have_prev = true;
    }
    return out;
}

IswapScan iswap_scan(const SystemSpec& tmpl, const std::vector<double>& fa_values,
                     double fb_ghz, double t_max_ns, int samples_per_ns) {
    if (fa_values.empty()) throw std::invalid_argument("iswap_scan: empty f_a range");
    if (!(t_max_ns > 0.0)) throw std::invalid_argument("iswap_scan: t range empty");
    if (tmpl.modes.size() < 2)
        throw std::invalid_argument("iswap_scan: need qubits in first and last slots");
    const size_t nm = tmpl.modes.size();

    IswapScan scan;
    scan.fa_ghz = fa_values;
    scan.times_ns.push_back(0.0);
    for (double t : segment_sample_offsets(t_max_ns, samples_per_ns))
        scan.times_ns.push_back(t);
    const auto nt = static_cast<Eigen::Index>(scan.times_ns.size());
    const auto nf = static_cast<Eigen::Index>(fa_values.size());
    scan.p_0001.resize(nf, nt);
    scan.p_1000.resize(nf, nt);
    scan.p_1001.resize(nf, nt);
    scan.cond_phase_rad.resize(nf, nt);
    scan.phase_valid.resize(nf, nt);

    BasisLabel l00(nm, 0), l10(nm, 0), l01(nm, 0), l11(nm, 0);
    l10.front() = 1;
    l01.back() = 1;
    l11.front() = 1;
    l11.back() = 1;
    const std::vector<BasisLabel> tracked = {l00, l10, l01, l11};

#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index col = 0; col < nf; ++col) {
        SystemSpec spec = tmpl;
        spec.modes.front().freq_ghz = fa_values[col];
        spec.modes.back().freq_ghz = fb_ghz;
        PulseSchedule sched;
        sched.segments.push_back({spec, t_max_ns});
        const auto t00 = evolve(sched, l00, samples_per_ns, tracked);
        const auto t10 = evolve(sched, l10, samples_per_ns, tracked);
        const auto t01 = evolve(sched, l01, samples_per_ns, tracked);
        const auto t11 = evolve(sched, l11, samples_per_ns, tracked);
        const auto p01 = population(t10, l01);
        const auto p10 = population(t10, l10);
        const auto p11 = population(t11, l11);
        const auto cp = conditional_phase(t00, t10, t01, t11);
        for (Eigen::Index i = 0; i < nt; ++i) {
            scan.p_0001(col, i) = p01[i];
            scan.p_1000(col, i) = p10[i];
            scan.p_1001(col, i) = p11[i];
            scan.cond_phase_rad(col, i) = cp.phase_rad[i];
            scan.phase_valid(col, i) = cp.valid[i];
        }
    }
    return scan;
}

GateTime first_transfer_peak(const std::vector<double>& times_ns,
                             const std::vector<double>& pop) {
    GateTime g;
    if (times_ns.size() != pop.size() || pop.size() < 3) return g;
    for (size_t k = 1; k + 1 < pop.size(); ++k) {
        if (pop[k] >= pop[k - 1] && pop[k] >= pop[k + 1] && pop[k] > pop[0]) {
            const double den = pop[k - 1] - 2.0 * pop[k] + pop[k + 1];
            double delta = 0.0;
            if (std::abs(den) > 1e-30) delta = 0.5 * (pop[k - 1] - pop[k + 1]) / den;
            delta = std::clamp(delta, -0.5, 0.5);
            const double h = times_ns[k + 1] - times_ns[k];
            g.t_ns = times_ns[k] + delta * h;
            g.peak = pop[k] - 0.25 * (pop[k - 1] - pop[k + 1]) * delta;
            g.found = true;
            return g;
        }
    }
    return g;
}

}  // namespace couplerlab
