// couplerlab_cli: user surface for the coupler laboratory.
// Subcommands: spectrum, couplings, sweep, evolve, iswap, circuit lh|rh,
// analytic, reproduce fig5|fig7|fig8|fig9.

#include <CLI11.hpp>

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "couplerlab/analytic.hpp"
#include "couplerlab/circuit.hpp"
#include "couplerlab/config.hpp"
#include "couplerlab/dynamics.hpp"
#include "couplerlab/overlap.hpp"
#include "couplerlab/sweep.hpp"

namespace cl = couplerlab;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::string levels_csv;
    double epsilon = -1.0;
    std::string method = "procrustes";
    bool method_given = false;
    int threads = 0;
    bool strict = false;
};

int resolve_threads(const GlobalOpts& g) {
    if (g.threads > 0) return g.threads;
    if (const char* env = std::getenv("COUPLERLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;
}

cl::SweepMethod parse_method(const std::string& m) {
    if (m == "procrustes") return cl::SweepMethod::procrustes;
    if (m == "perturbative") return cl::SweepMethod::perturbative;
    if (m == "sw") return cl::SweepMethod::sw;
    throw std::runtime_error("unknown method '" + m + "'");
}

cl::SystemSpec base_system(const GlobalOpts& g) {
    cl::SystemSpec spec =
        g.config_path.empty() ? cl::reference_spec() : cl::load_system(g.config_path);
    if (!g.levels_csv.empty()) {
        std::vector<int> levels;
        std::stringstream ss(g.levels_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) levels.push_back(std::stoi(tok));
        if (levels.size() == 1) levels.assign(spec.modes.size(), levels[0]);
        if (levels.size() != spec.modes.size())
            throw std::runtime_error("--levels count does not match mode count");
        for (size_t i = 0; i < levels.size(); ++i) spec.modes[i].levels = levels[i];
    }
    if (g.epsilon > 0.0) spec.options.epsilon = g.epsilon;
    cl::validate(spec);
    return spec;
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json j;
    f >> j;
    return j;
}

std::string label_str(const cl::BasisLabel& lab) {
    std::string s = "|";
    for (int n : lab) s += std::to_string(n);
    return s + ">";
}

int run_spectrum(const GlobalOpts& g) {
    const auto spec = base_system(g);
    std::vector<cl::BasisLabel> labels;
    for (const auto& lab : cl::enumerate_basis(spec.modes)) {
        int total = 0;
        for (int n : lab) total += n;
        if (total <= 2) labels.push_back(lab);
    }
    const auto s = cl::assign_states(cl::build_hamiltonian_real(spec), spec.modes, labels,
                                     spec.options.epsilon);
    std::printf("%-10s %14s %10s %8s %6s\n", "label", "energy_ghz", "overlap2", "pr", "ok");
    std::vector<std::pair<double, cl::BasisLabel>> rows;
    for (const auto& lab : labels)
        rows.emplace_back(s.energies[s.assignment.at(lab).eig], lab);
    std::sort(rows.begin(), rows.end());
    bool all_ok = true;
    for (const auto& [e, lab] : rows) {
        const auto& a = s.assignment.at(lab);
        all_ok = all_ok && a.valid;
        std::printf("%-10s %14.9f %10.6f %8.3f %6s\n", label_str(lab).c_str(), e, a.overlap2,
                    a.pr, a.valid ? "yes" : "NO");
    }
    return (g.strict && !all_ok) ? 2 : 0;
}

int run_couplings(const GlobalOpts& g) {
    const auto spec = base_system(g);
    const auto rep = cl::coupling_report(spec);
    std::printf("J00 %+.6f MHz (pert %+.6f)%s  J01 %+.6f MHz%s  J10 %+.6f MHz%s  "
                "ZZ %+.4f kHz%s  ratio %.4g\n",
                rep.j00.j_proc_mhz, rep.j00.j_pert_mhz, rep.j00.valid ? "" : " [resonant]",
                rep.j01.j_proc_mhz, rep.j01.valid ? "" : " [resonant]", rep.j10.j_proc_mhz,
                rep.j10.valid ? "" : " [resonant]", rep.zz_khz, rep.zz_valid ? "" : " [invalid]",
                rep.ratio);
    const bool all_ok = rep.j00.valid && rep.j01.valid && rep.j10.valid && rep.zz_valid;
    return (g.strict && !all_ok) ? 2 : 0;
}

int finish_sweep(const GlobalOpts& g, cl::SweepSpec& s, const std::string& stem) {
    s.threads = resolve_threads(g);
    const auto grid = cl::run_sweep(s);
    const auto paths = cl::write_grid(grid, s, g.out_dir, stem);
    for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
    int n_valid = 0;
    for (auto v : grid.valid) n_valid += v;
    std::printf("grid %dx%d method=%s valid_cells=%d/%zu\n", grid.points1, grid.points2,
                cl::method_name(s.method).c_str(), n_valid, grid.valid.size());
    return (g.strict && n_valid == 0) ? 2 : 0;
}

int run_sweep_cmd(const GlobalOpts& g) {
    if (g.config_path.empty()) throw std::runtime_error("sweep requires --config");
    const auto j = load_json(g.config_path);
    cl::SweepSpec s;
    s.base = base_system(g);
    if (!j.contains("sweep")) throw std::runtime_error("config lacks a 'sweep' block");
    const auto& js = j["sweep"];
    auto read_axis = [&](const char* key) {
        const auto& ja = js.at(key);
        cl::SweepAxis ax;
        ax.path = ja.at("path").get<std::string>();
        ax.start = ja.at("start").get<double>();
        ax.stop = ja.at("stop").get<double>();
        ax.points = ja.at("points").get<int>();
        return ax;
    };
    s.axis1 = read_axis("axis1");
    s.axis2 = read_axis("axis2");
    s.method = parse_method(g.method_given ? g.method
                                           : js.value("method", std::string("procrustes")));
    return finish_sweep(g, s, "sweep");
}

void write_text(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    f << bytes;
}

int run_evolve(const GlobalOpts& g, double t_max, int samples, const std::string& psi0_csv) {
    const auto spec = base_system(g);
    cl::BasisLabel psi0(spec.modes.size(), 0);
    if (!psi0_csv.empty()) {
        std::vector<int> v;
        std::stringstream ss(psi0_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
        if (v.size() != spec.modes.size())
            throw std::runtime_error("--psi0 length does not match mode count");
        psi0 = v;
    } else {
        psi0.front() = 1;
    }
    cl::PulseSchedule sched;
    sched.segments.push_back({spec, t_max});
    const auto trace = cl::evolve(sched, psi0, samples);
    std::ostringstream csv;
    csv << "time_ns";
    for (const auto& lab : trace.tracked) {
        std::string flat;
        for (int n : lab) flat += std::to_string(n);
        csv << ",pop_" << flat << ",phase_" << flat;
    }
    csv << "\n";
    char buf[64];
    for (size_t i = 0; i < trace.times_ns.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", trace.times_ns[i]);
        csv << buf;
        for (size_t jcol = 0; jcol < trace.tracked.size(); ++jcol) {
            const auto a = trace.amplitudes(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(jcol));
            std::snprintf(buf, sizeof buf, ",%.12g,%.12g", std::norm(a), std::arg(a));
            csv << buf;
        }
        csv << "\n";
    }
    std::filesystem::create_directories(g.out_dir);
    const auto path = (std::filesystem::path(g.out_dir) / "evolve_trace.csv").string();
    write_text(path, csv.str());
    std::printf("wrote %s (norm drift %.3g)\n", path.c_str(), trace.max_norm_drift);
    return 0;
}

std::string scan_csv(const std::vector<double>& ax1, const std::vector<double>& ax2,
                     const Eigen::MatrixXd& value, const Eigen::MatrixXd* valid) {
    std::string out = "axis1,axis2,value,valid\n";
    char buf[128];
    for (Eigen::Index i = 0; i < value.rows(); ++i)
        for (Eigen::Index j = 0; j < value.cols(); ++j) {
            const int ok = valid ? static_cast<int>((*valid)(i, j)) : 1;
            const double v = value(i, j);
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d\n", ax1[i], ax2[j],
                          std::isfinite(v) ? v : 0.0, std::isfinite(v) ? ok : 0);
            out += buf;
        }
    return out;
}

int run_iswap(const GlobalOpts& g, double fa_min, double fa_max, int fa_points, double fb,
              double t_max, int samples, const std::string& stem) {
    auto spec = base_system(g);
    const int nt = resolve_threads(g);
    if (nt > 0) omp_set_num_threads(nt);
    std::vector<double> fa(fa_points);
    for (int i = 0; i < fa_points; ++i)
        fa[i] = fa_points == 1 ? fa_min : fa_min + (fa_max - fa_min) * i / (fa_points - 1);
    const auto scan = cl::iswap_scan(spec, fa, fb, t_max, samples);
    std::filesystem::create_directories(g.out_dir);
    const std::vector<std::pair<std::string, const Eigen::MatrixXd*>> panels = {
        {stem + "_p0001.csv", &scan.p_0001},
        {stem + "_p1000.csv", &scan.p_1000},
        {stem + "_p1001.csv", &scan.p_1001},
    };
    for (const auto& [name, mat] : panels) {
        const auto path = (std::filesystem::path(g.out_dir) / name).string();
        write_text(path, scan_csv(scan.fa_ghz, scan.times_ns, *mat, nullptr));
        std::printf("wrote %s\n", path.c_str());
    }
    const auto phase_path =
        (std::filesystem::path(g.out_dir) / (stem + "_cond_phase.csv")).string();
    write_text(phase_path,
               scan_csv(scan.fa_ghz, scan.times_ns, scan.cond_phase_rad, &scan.phase_valid));
    std::printf("wrote %s\n", phase_path.c_str());
    return 0;
}

int run_circuit_lh(const GlobalOpts& g, const cl::LeftHandedDesign& d, bool with_locus) {
    const auto rep = cl::lh_analyze(d);
    std::printf("f+ %.6f GHz  f- %.6f GHz  g12 %+.4f MHz\n", rep.f_plus_ghz, rep.f_minus_ghz,
                rep.g12_mhz);
    std::printf("g (MHz): a+ %+.4f  a- %+.4f  b+ %+.4f  b- %+.4f\n", rep.g_mhz(0, 0),
                rep.g_mhz(0, 1), rep.g_mhz(1, 0), rep.g_mhz(1, 1));
    std::printf("alpha %+.6f  beta %+.6f  g12/D12 %+.6f (closed %+.6f)\n", rep.alpha, rep.beta,
                rep.g12_over_delta12, rep.g12_over_delta12_closed);
    for (const auto& w : rep.warnings) std::printf("note: %s\n", w.c_str());
    if (with_locus) {
        cl::LhLocusSpec ls;
        ls.c_ff = d.c_ff;
        ls.l_nh = d.l_nh;
        const auto grid = cl::lh_locus_scan(ls);
        std::string csv = "axis1,axis2,value,valid\n";
        char buf[128];
        for (size_t i = 0; i < grid.axis1.size(); ++i)
            for (size_t j = 0; j < grid.axis2.size(); ++j) {
                const size_t cell = i * grid.axis2.size() + j;
                std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d\n", grid.axis1[i],
                              grid.axis2[j], grid.value[cell],
                              static_cast<int>(grid.valid[cell]));
                csv += buf;
            }
        std::filesystem::create_directories(g.out_dir);
        const auto path = (std::filesystem::path(g.out_dir) / "lh_locus.csv").string();
        write_text(path, csv);
        std::printf("wrote %s\n", path.c_str());
    }
    return (g.strict && rep.three_mode_regime) ? 2 : 0;
}

int run_circuit_rh(const GlobalOpts& g, const cl::RightHandedDesign& d) {
    const auto rep = cl::rh_analyze(d);
    std::printf("f+ %.6f GHz  f- %.6f GHz  g12 %+.4f MHz\n", rep.f_plus_ghz, rep.f_minus_ghz,
                rep.g12_mhz);
    std::printf("g (MHz): a+ %+.4f  a- %+.4f  b+ %+.4f  b- %+.4f\n", rep.g_mhz(0, 0),
                rep.g_mhz(0, 1), rep.g_mhz(1, 0), rep.g_mhz(1, 1));
    std::printf("alpha %+.6f  beta %+.6f  g12/D12 %+.6f (closed %+.6f)\n", rep.alpha, rep.beta,
                rep.g12_over_delta12, rep.g12_over_delta12_closed);
    for (const auto& w : rep.warnings) std::printf("note: %s\n", w.c_str());
    return (g.strict && rep.three_mode_regime) ? 2 : 0;
}

int run_analytic(const GlobalOpts& g) {
    const auto spec = base_system(g);
    if (spec.modes.size() != 4)
        throw std::runtime_error("analytic expects the 4-mode registration");
    auto coupling_of = [&](int i, int j) {
        for (const auto& c : spec.couplings)
            if ((c.a == spec.modes[i].label && c.b == spec.modes[j].label) ||
                (c.a == spec.modes[j].label && c.b == spec.modes[i].label))
                return c.g_mhz;
        return 0.0;
    };
    cl::TwoModeCoupler tmc;
    tmc.f1_ghz = spec.modes[1].freq_ghz;
    tmc.f2_ghz = spec.modes[2].freq_ghz;
    tmc.lam_ghz = coupling_of(1, 2) * 1e-3;
    tmc.g_mhz << coupling_of(0, 1), coupling_of(0, 2), coupling_of(3, 1), coupling_of(3, 2);
    const auto dressed = cl::bogoliubov(tmc);
    std::printf("dressed: Lambda %+.6f rad  f1t %.6f GHz  f2t %.6f GHz\n", dressed.lambda_rad,
                dressed.f1t_ghz, dressed.f2t_ghz);
    std::printf("rotated g (MHz): a1 %+.4f  a2 %+.4f  b1 %+.4f  b2 %+.4f\n",
                dressed.gt_mhz(0, 0), dressed.gt_mhz(0, 1), dressed.gt_mhz(1, 0),
                dressed.gt_mhz(1, 1));
    const auto cond = cl::decoupling_condition(tmc.g_mhz);
    if (cond.feasible)
        std::printf("decoupling: alpha %+.6f  Lambda* %+.6f rad  lam/delta %+.6f%s\n",
                    cond.alpha, cond.lambda_star_rad, cond.lam_over_delta,
                    cond.degenerate ? " (degenerate branch)" : "");
    else
        std::printf("decoupling infeasible: -ga2/ga1 %+.6f vs gb1/gb2 %+.6f\n", cond.ratio_a,
                    cond.ratio_b);
    const cl::QubitParams q{spec.modes[0].freq_ghz, spec.modes[3].freq_ghz,
                            spec.modes[0].anharm_ghz, spec.modes[3].anharm_ghz};
    try {
        const double j00 = cl::sw_J(0, 0, dressed, q);
        const double j01 = cl::sw_J(0, 1, dressed, q);
        const double j10 = cl::sw_J(1, 0, dressed, q);
        std::printf("sw J (MHz): J00 %+.6f  J01 %+.6f  J10 %+.6f  ratio %.4g\n", j00, j01, j10,
                    cl::selectivity_ratio(j00, j01, j10));
    } catch (const std::domain_error& e) {
        std::printf("sw J unavailable: %s\n", e.what());
        if (g.strict) return 2;
    }
    return 0;
}

int run_reproduce(const GlobalOpts& g, const std::string& which) {
    auto spec = base_system(g);
    if (which == "fig9") return run_iswap(g, 3.4, 3.8, 41, 3.6, 100.0, 4, "fig9");
    cl::SweepSpec s;
    s.base = spec;
    if (which == "fig5") {
        s.base.modes[0].freq_ghz = 4.0;
        s.base.modes[3].freq_ghz = 3.6;
        s.method = parse_method(g.method);
    } else if (which == "fig7" || which == "fig8") {
        s.base.modes[0].freq_ghz = 3.6;
        s.base.modes[3].freq_ghz = 3.6;
        s.method = which == "fig8" && !g.method_given ? cl::SweepMethod::sw
                                                      : parse_method(g.method);
    } else {
        throw std::runtime_error("unknown figure '" + which + "'");
    }
    s.axis1 = {"modes." + s.base.modes[1].label + ".freq_ghz", 2.8, 3.6, 60};
    s.axis2 = {"modes." + s.base.modes[2].label + ".freq_ghz", 2.8, 3.6, 60};
    return finish_sweep(g, s, which);
}

}  // namespace

int main(int argc, char** argv) {
    GlobalOpts g;
    CLI::App app{"numerical laboratory for multi-mode tunable couplers"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", g.config_path, "system / sweep config JSON");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--levels", g.levels_csv, "truncation override: N or N,N,...");
    app.add_option("--epsilon", g.epsilon, "assignment overlap^2 threshold");
    auto* mopt = app.add_option("--method", g.method, "procrustes|perturbative|sw");
    app.add_option("--threads", g.threads, "worker count (env COUPLERLAB_THREADS)");
    app.add_flag("--strict", g.strict, "exit 2 on validity failures");

    auto* sc_spectrum = app.add_subcommand("spectrum", "labeled low-lying spectrum");
    auto* sc_couplings = app.add_subcommand("couplings", "single-point coupling report");
    auto* sc_sweep = app.add_subcommand("sweep", "2D sweep from config");
    auto* sc_evolve = app.add_subcommand("evolve", "time evolution trace");
    double ev_tmax = 100.0;
    int ev_samples = 4;
    std::string ev_psi0;
    sc_evolve->add_option("--tmax", ev_tmax, "duration, ns");
    sc_evolve->add_option("--samples", ev_samples, "samples per ns");
    sc_evolve->add_option("--psi0", ev_psi0, "initial label, comma-separated");

    auto* sc_iswap = app.add_subcommand("iswap", "transfer scan over f_a");
    double is_famin = 3.4, is_famax = 3.8, is_fb = 3.6, is_tmax = 100.0;
    int is_fapoints = 41, is_samples = 4;
    sc_iswap->add_option("--fa-min", is_famin, "f_a start, GHz");
    sc_iswap->add_option("--fa-max", is_famax, "f_a stop, GHz");
    sc_iswap->add_option("--fa-points", is_fapoints, "f_a grid points");
    sc_iswap->add_option("--fb", is_fb, "f_b, GHz");
    sc_iswap->add_option("--tmax", is_tmax, "duration, ns");
    sc_iswap->add_option("--samples", is_samples, "samples per ns");

    auto* sc_circuit = app.add_subcommand("circuit", "lumped-element designs");
    sc_circuit->require_subcommand(1);
    auto* sc_lh = sc_circuit->add_subcommand("lh", "left-handed three-cell design");
    auto* sc_rh = sc_circuit->add_subcommand("rh", "right-handed three-cell design");
    cl::LeftHandedDesign lhd;
    cl::RightHandedDesign rhd;
    bool lh_locus = false;
    for (auto [sub, c, c2, l, dl, l2, ca, cb, cqa, cqb, fa, fb] :
         {std::tuple{sc_lh, &lhd.c_ff, &lhd.c2_ff, &lhd.l_nh, &lhd.dl_nh, &lhd.l2_nh,
                     &lhd.ca_ff, &lhd.cb_ff, &lhd.cqa_ff, &lhd.cqb_ff, &lhd.fa_ghz,
                     &lhd.fb_ghz},
          std::tuple{sc_rh, &rhd.c_ff, &rhd.c2_ff, &rhd.l_nh, &rhd.dl_nh, &rhd.l2_nh,
                     &rhd.ca_ff, &rhd.cb_ff, &rhd.cqa_ff, &rhd.cqb_ff, &rhd.fa_ghz,
                     &rhd.fb_ghz}}) {
        sub->add_option("--c", *c, "cell capacitance, fF");
        sub->add_option("--c2", *c2, "middle capacitance, fF");
        sub->add_option("--l", *l, "cell inductance, nH");
        sub->add_option("--dl", *dl, "inductance split, nH");
        sub->add_option("--l2", *l2, "middle inductance, nH");
        sub->add_option("--ca", *ca, "qubit-a coupling capacitor, fF");
        sub->add_option("--cb", *cb, "qubit-b coupling capacitor, fF");
        sub->add_option("--cqa", *cqa, "qubit-a shunt capacitance, fF");
        sub->add_option("--cqb", *cqb, "qubit-b shunt capacitance, fF");
        sub->add_option("--fa", *fa, "qubit-a frequency, GHz");
        sub->add_option("--fb", *fb, "qubit-b frequency, GHz");
    }
    sc_lh->add_flag("--locus", lh_locus, "also write the decoupling locus grid");

    auto* sc_analytic = app.add_subcommand("analytic", "dressed-mode / SW report");
    auto* sc_reproduce = app.add_subcommand("reproduce", "bundled figure protocols");
    std::string fig;
    sc_reproduce->add_option("figure", fig, "fig5|fig7|fig8|fig9")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 1;
    }
    g.method_given = mopt->count() > 0;

    try {
        if (*sc_spectrum) return run_spectrum(g);
        if (*sc_couplings) return run_couplings(g);
        if (*sc_sweep) return run_sweep_cmd(g);
        if (*sc_evolve) return run_evolve(g, ev_tmax, ev_samples, ev_psi0);
        if (*sc_iswap)
            return run_iswap(g, is_famin, is_famax, is_fapoints, is_fb, is_tmax, is_samples,
                             "iswap");
        if (*sc_circuit) {
            if (*sc_lh) return run_circuit_lh(g, lhd, lh_locus);
            if (*sc_rh) return run_circuit_rh(g, rhd);
        }
        if (*sc_analytic) return run_analytic(g);
        if (*sc_reproduce) return run_reproduce(g, fig);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << app.help() << "\n";
    return 1;
}
