#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "couplerlab/system.hpp"

namespace couplerlab {

inline constexpr char kToolVersion[] = "0.1.0";

enum class SweepMethod { procrustes, perturbative, sw };

struct SweepAxis {
    std::string path;  // e.g. "modes.c1.freq_ghz"
    double start = 0.0;
    double stop = 0.0;
    int points = 2;
};

struct SweepSpec {
    SystemSpec base;
    SweepAxis axis1, axis2;
    SweepMethod method = SweepMethod::procrustes;
    int threads = 0;  // 0: runtime default
};

// Row-major cell order, axis1-major.  Numeric methods carry the companion
// extraction (the other numeric method) in the *_alt arrays.
struct GridResult {
    std::vector<double> axis1, axis2;
    std::vector<double> j00_mhz, j01_mhz, j10_mhz, zz_khz, ratio;
    std::vector<double> j00_alt_mhz, j01_alt_mhz, j10_alt_mhz;
    std::vector<std::uint8_t> j00_valid, j01_valid, j10_valid, zz_valid, valid;
    SweepMethod method = SweepMethod::procrustes;
    bool has_alt = false;
    int points1 = 0, points2 = 0;
};

std::string method_name(SweepMethod m);

GridResult run_sweep(const SweepSpec& s);         // worker pool over cells
GridResult run_sweep_serial(const SweepSpec& s);  // same kernel, plain loop

// One CSV per quantity (header axis1,axis2,value,valid; 12 significant
// digits) plus a JSON manifest; returns the written paths, manifest last.
// Output bytes are fully assembled before any file is opened.
std::vector<std::string> write_grid(const GridResult& g, const SweepSpec& s,
                                    const std::string& out_dir, const std::string& stem);

}  // namespace couplerlab
