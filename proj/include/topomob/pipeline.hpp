#pragma once

// Pipeline orchestration: plain-text config, per-stage entry points used by
// the CLI, and the oracle-equivalence selftest.
//
// Stage artifacts land in the output directory:
//   raster.csv, shares.csv, volume_<group>.grid, barcode_<group>.csv,
//   barcode_<group>_dedup.csv, components_<group>.csv, cavities_<group>.csv,
//   tables/feature_counts.csv, tables/stats.csv, tables/top10_<group>.csv,
//   figures/barcode_<group>.svg, figures/diagram_<group>.svg,
//   tables/distributions.csv
// Re-running a stage on unchanged inputs reproduces its artifacts byte for
// byte.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "topomob/mobility.hpp"
#include "topomob/reduction.hpp"

namespace topomob {

struct Config {
    std::string geometry;
    std::string od_dir;
    std::string destination_map;
    std::string out_dir = "out";
    int year_start = 2004;
    int year_end = 2023;
    int grid_size = 100;
    int importance_threshold = 2;
    int workers = 0;  // 0 = available cores capped at 4
    CorrectionsMode corrections = CorrectionsMode::Madrid;
    std::vector<int> groups{0, 1, 2, 3};

    int years() const { return year_end - year_start + 1; }
    int effective_workers() const;
    static Config load(const std::string& path);
};

void stage_rasterize(const Config& cfg);
void stage_ingest(const Config& cfg);
void stage_volumes(const Config& cfg);
void stage_persist(const Config& cfg);
void stage_trace(const Config& cfg);
void stage_report(const Config& cfg);
void run_all(const Config& cfg);

// Single-volume mode for `persist --volume X --out Y`.
void persist_volume(const std::string& volume_path, const std::string& out_path);

// Randomized equivalence suite: reduction vs. brute-force oracle, Euler
// consistency and component counts on random small volumes. Returns the
// number of failed cases (0 = pass).
struct SelftestOptions {
    int cases = 100;
    std::array<int, 3> max_shape{5, 5, 4};
    std::uint64_t seed = 20040101;
};
int run_selftest(const SelftestOptions& opts, std::ostream& log);

}  // namespace topomob
