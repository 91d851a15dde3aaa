#include "couplerlab/sweep.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "couplerlab/analytic.hpp"
#include "couplerlab/config.hpp"
#include "couplerlab/overlap.hpp"

namespace couplerlab {

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

double coupling_of(const SystemSpec& spec, const std::string& a, const std::string& b) {
    for (const auto& c : spec.couplings)
        if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return c.g_mhz;
    return 0.0;
}

void numeric_cell(const SystemSpec& spec, SweepMethod method, GridResult& g, int cell) {
    const auto s = assign_states(build_hamiltonian_real(spec), spec.modes, {},
                                 spec.options.epsilon);
    const auto rep = coupling_report(s);
    const bool primary_proc = method == SweepMethod::procrustes;
    auto pick = [&](const PairCoupling& p) { return primary_proc ? p.j_proc_mhz : p.j_pert_mhz; };
    auto alt = [&](const PairCoupling& p) { return primary_proc ? p.j_pert_mhz : p.j_proc_mhz; };
    g.j00_mhz[cell] = pick(rep.j00);
    g.j01_mhz[cell] = pick(rep.j01);
    g.j10_mhz[cell] = pick(rep.j10);
    g.j00_alt_mhz[cell] = alt(rep.j00);
    g.j01_alt_mhz[cell] = alt(rep.j01);
    g.j10_alt_mhz[cell] = alt(rep.j10);
    g.j00_valid[cell] = rep.j00.valid;
    g.j01_valid[cell] = rep.j01.valid;
    g.j10_valid[cell] = rep.j10.valid;
    g.zz_khz[cell] = rep.zz_khz;
    g.zz_valid[cell] = rep.zz_valid;
    const double den = std::abs(g.j01_mhz[cell]) + std::abs(g.j10_mhz[cell]);
    if (den > 0.0) {
        g.ratio[cell] = 2.0 * std::abs(g.j00_mhz[cell]) / den;
    } else {
        g.ratio[cell] = 0.0;  // +inf sentinel masked in grid output
    }
    g.valid[cell] = rep.j00.valid && rep.j01.valid && rep.j10.valid && rep.zz_valid &&
                    den > 0.0;
}

void sw_cell(const SystemSpec& spec, GridResult& g, int cell) {
    TwoModeCoupler tmc;
    tmc.f1_ghz = spec.modes[1].freq_ghz;
    tmc.f2_ghz = spec.modes[2].freq_ghz;
    tmc.lam_ghz = coupling_of(spec, spec.modes[1].label, spec.modes[2].label) * 1e-3;
    tmc.g_mhz << coupling_of(spec, spec.modes[0].label, spec.modes[1].label),
        coupling_of(spec, spec.modes[0].label, spec.modes[2].label),
        coupling_of(spec, spec.modes[3].label, spec.modes[1].label),
        coupling_of(spec, spec.modes[3].label, spec.modes[2].label);
    const DressedCoupler dressed = bogoliubov(tmc);
    const QubitParams q{spec.modes[0].freq_ghz, spec.modes[3].freq_ghz,
                        spec.modes[0].anharm_ghz, spec.modes[3].anharm_ghz};
    bool all_ok = true;
    auto eval = [&](int m, int n, std::vector<double>& out, std::vector<std::uint8_t>& ok) {
        try {
            out[cell] = sw_J(m, n, dressed, q);
            ok[cell] = 1;
        } catch (const std::domain_error&) {
            out[cell] = 0.0;
            ok[cell] = 0;
            all_ok = false;
        }
    };
    eval(0, 0, g.j00_mhz, g.j00_valid);
    eval(0, 1, g.j01_mhz, g.j01_valid);
    eval(1, 0, g.j10_mhz, g.j10_valid);
    g.zz_khz[cell] = 0.0;
    g.zz_valid[cell] = 0;
    const double den = std::abs(g.j01_mhz[cell]) + std::abs(g.j10_mhz[cell]);
    g.ratio[cell] = den > 0.0 ? 2.0 * std::abs(g.j00_mhz[cell]) / den : 0.0;
    g.valid[cell] = all_ok && den > 0.0;
}

void run_cell(const SweepSpec& s, GridResult& g, int cell) {
    const int i1 = cell / g.points2, i2 = cell % g.points2;
    SystemSpec spec = s.base;
    set_parameter(spec, s.axis1.path, g.axis1[i1]);
    set_parameter(spec, s.axis2.path, g.axis2[i2]);
    try {
        if (s.method == SweepMethod::sw)
            sw_cell(spec, g, cell);
        else
            numeric_cell(spec, s.method, g, cell);
    } catch (const std::exception&) {
        g.valid[cell] = 0;  // best-effort zeros stay in place
    }
}

GridResult prepare(const SweepSpec& s) {
    if (s.axis1.points < 2 || s.axis2.points < 2)
        throw std::invalid_argument("run_sweep: each axis needs at least 2 points");
    if (s.base.modes.size() != 4)
        throw std::invalid_argument("run_sweep: expects the 4-mode registration");
    validate(s.base);
    {
        SystemSpec probe = s.base;  // surface unresolvable paths before the pool starts
        set_parameter(probe, s.axis1.path, s.axis1.start);
        set_parameter(probe, s.axis2.path, s.axis2.start);
    }
    GridResult g;
    g.method = s.method;
    g.has_alt = s.method != SweepMethod::sw;
    g.points1 = s.axis1.points;
    g.points2 = s.axis2.points;
    g.axis1 = linspace(s.axis1.start, s.axis1.stop, s.axis1.points);
    g.axis2 = linspace(s.axis2.start, s.axis2.stop, s.axis2.points);
    const int n = g.points1 * g.points2;
    for (auto* v : {&g.j00_mhz, &g.j01_mhz, &g.j10_mhz, &g.zz_khz, &g.ratio,
                    &g.j00_alt_mhz, &g.j01_alt_mhz, &g.j10_alt_mhz})
        v->assign(n, 0.0);
    for (auto* v : {&g.j00_valid, &g.j01_valid, &g.j10_valid, &g.zz_valid, &g.valid})
        v->assign(n, 0);
    return g;
}

}  // namespace

std::string method_name(SweepMethod m) {
    switch (m) {
        case SweepMethod::procrustes: return "procrustes";
        case SweepMethod::perturbative: return "perturbative";
        case SweepMethod::sw: return "sw";
    }
    return "procrustes";
}

GridResult run_sweep(const SweepSpec& s) {
    GridResult g = prepare(s);
    const int n = g.points1 * g.points2;
    const int nthreads = s.threads > 0 ? s.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (int cell = 0; cell < n; ++cell) run_cell(s, g, cell);
    return g;
}

GridResult run_sweep_serial(const SweepSpec& s) {
    GridResult g = prepare(s);
    const int n = g.points1 * g.points2;
    for (int cell = 0; cell < n; ++cell) run_cell(s, g, cell);
    return g;
}

namespace {

std::string csv_bytes(const GridResult& g, const std::vector<double>& value,
                      const std::vector<std::uint8_t>& valid) {
    std::string out = "axis1,axis2,value,valid\n";
    char buf[128];
    for (int i1 = 0; i1 < g.points1; ++i1)
        for (int i2 = 0; i2 < g.points2; ++i2) {
            const int cell = i1 * g.points2 + i2;
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d\n", g.axis1[i1],
                          g.axis2[i2], value[cell], static_cast<int>(valid[cell]));
            out += buf;
        }
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_grid: cannot open '" + path + "'");
    f << bytes;
}

}  // namespace

std::vector<std::string> write_grid(const GridResult& g, const SweepSpec& s,
                                    const std::string& out_dir, const std::string& stem) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    struct Item {
        std::string name;
        std::string bytes;
    };
    std::vector<Item> items;
    auto add = [&](const std::string& suffix, const std::vector<double>& v,
                   const std::vector<std::uint8_t>& ok) {
        items.push_back({stem + "_" + suffix + ".csv", csv_bytes(g, v, ok)});
    };
    add("j00", g.j00_mhz, g.j00_valid);
    add("j01", g.j01_mhz, g.j01_valid);
    add("j10", g.j10_mhz, g.j10_valid);
    add("zz", g.zz_khz, g.zz_valid);
    add("ratio", g.ratio, g.valid);
    if (g.has_alt) {
        const std::string other =
            g.method == SweepMethod::procrustes ? "perturbative" : "procrustes";
        add("j00_" + other, g.j00_alt_mhz, g.j00_valid);
        add("j01_" + other, g.j01_alt_mhz, g.j01_valid);
        add("j10_" + other, g.j10_alt_mhz, g.j10_valid);
    }

    nlohmann::json manifest;
    char hash[32];
    std::snprintf(hash, sizeof hash, "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_system_json(s.base))));
    manifest["spec_hash"] = hash;
    std::vector<int> levels;
    for (const auto& m : s.base.modes) levels.push_back(m.levels);
    manifest["truncation"] = levels;
    manifest["epsilon"] = s.base.options.epsilon;
    manifest["method"] = method_name(s.method);
    manifest["tool_version"] = kToolVersion;
    manifest["grid"] = {g.points1, g.points2};
    for (auto [ax, name] : {std::pair{&s.axis1, "axis1"}, {&s.axis2, "axis2"}})
        manifest["axes"][name] = {{"path", ax->path},
                                  {"start", ax->start},
                                  {"stop", ax->stop},
                                  {"points", ax->points}};
    nlohmann::json names = nlohmann::json::array();
    for (const auto& it : items) names.push_back(it.name);
    manifest["outputs"] = names;

    std::vector<std::string> paths;
    for (const auto& it : items) {
        const std::string p = (fs::path(out_dir) / it.name).string();
        write_file(p, it.bytes);
        paths.push_back(p);
    }
    const std::string mp = (fs::path(out_dir) / (stem + "_manifest.json")).string();
    write_file(mp, manifest.dump(2) + "\n");
    paths.push_back(mp);
    return paths;
}

}  // namespace couplerlab
