#include "topomob/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "topomob/oracle.hpp"
#include "topomob/report.hpp"
#include "topomob/trace.hpp"

namespace topomob {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

class StageTimer {
public:
    explicit StageTimer(std::string stage) : stage_(std::move(stage)), start_(clock::now()) {}
    ~StageTimer() {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start_);
        std::fprintf(stderr, "[%s] done in %lld ms\n", stage_.c_str(),
                     static_cast<long long>(ms.count()));
    }

private:
    using clock = std::chrono::steady_clock;
    std::string stage_;
    clock::time_point start_;
};

std::string group_path(const Config& cfg, const std::string& prefix, int group,
                       const std::string& suffix) {
    return cfg.out_dir + "/" + prefix + kGroupNames[group] + suffix;
}

// Run fn(group) for each selected group on up to effective_workers() threads.
template <typename Fn>
void for_each_group(const Config& cfg, Fn fn) {
    const auto& groups = cfg.groups;
    int workers = std::min<int>(cfg.effective_workers(), static_cast<int>(groups.size()));
    if (workers <= 1) {
        for (int g : groups) fn(g);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr first_error;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= groups.size()) return;
                try {
                    fn(groups[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

int Config::effective_workers() const {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hw ? hw : 1u, 4u));
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config " + path);
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw validation_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        try {
            if (key == "geometry")
                cfg.geometry = value;
            else if (key == "od_dir")
                cfg.od_dir = value;
            else if (key == "destination_map")
                cfg.destination_map = value;
            else if (key == "out_dir")
                cfg.out_dir = value;
            else if (key == "year_start")
                cfg.year_start = std::stoi(value);
            else if (key == "year_end")
                cfg.year_end = std::stoi(value);
            else if (key == "grid_size")
                cfg.grid_size = std::stoi(value);
            else if (key == "importance_threshold")
                cfg.importance_threshold = std::stoi(value);
            else if (key == "workers")
                cfg.workers = std::stoi(value);
            else if (key == "corrections")
                cfg.corrections =
                    (value == "none") ? CorrectionsMode::None : CorrectionsMode::Madrid;
            else
                throw validation_error(path + ":" + std::to_string(lineno) + ": unknown key '" +
                                       key + "'");
        } catch (const validation_error&) {
            throw;
        } catch (const std::exception&) {
            throw validation_error(path + ":" + std::to_string(lineno) + ": bad value for " + key);
        }
    }
    if (cfg.year_end < cfg.year_start)
        throw validation_error(path + ": year_end precedes year_start");
    return cfg;
}

void stage_rasterize(const Config& cfg) {
    StageTimer timer("rasterize");
    fs::create_directories(cfg.out_dir);
    NeighbourhoodGeometry geo = load_geometry(cfg.geometry);
    NeighbourhoodRaster raster = rasterize(geo, cfg.grid_size);
    raster.save(cfg.out_dir + "/raster.csv");
}

void stage_ingest(const Config& cfg) {
    StageTimer timer("ingest");
    fs::create_directories(cfg.out_dir);
    NeighbourhoodGeometry geo = load_geometry(cfg.geometry);
    DestinationMap destmap = DestinationMap::load(cfg.destination_map);
    std::vector<ODTable> tables;
    for (int year = cfg.year_start; year <= cfg.year_end; ++year)
        tables.push_back(
            load_od(cfg.od_dir + "/od_" + std::to_string(year) + ".csv", year, geo, destmap));
    apply_corrections(tables, cfg.corrections);
    std::vector<GroupShares> shares;
    for (const ODTable& t : tables) shares.push_back(compute_shares(t, destmap));
    save_shares_csv(shares, cfg.out_dir + "/shares.csv");
}

void stage_volumes(const Config& cfg) {
    StageTimer timer("volumes");
    NeighbourhoodRaster raster = NeighbourhoodRaster::load(cfg.out_dir + "/raster.csv");
    std::vector<GroupShares> shares = load_shares_csv(cfg.out_dir + "/shares.csv");
    if (static_cast<int>(shares.size()) != cfg.years())
        throw validation_error("shares.csv covers " + std::to_string(shares.size()) +
                               " years, config expects " + std::to_string(cfg.years()));
    auto volumes = build_volumes(shares, raster);
    for (int g : cfg.groups) volumes[g].save(group_path(cfg, "volume_", g, ".grid"));
}

void persist_volume(const std::string& volume_path, const std::string& out_path) {
    ScalarVolume volume = ScalarVolume::load(volume_path);
    FilteredComplex complex = FilteredComplex::build(volume);
    Barcode barcode = compute_persistence(complex);
    save_barcode_csv(barcode, out_path);
}

void stage_persist(const Config& cfg) {
    StageTimer timer("persist");
    for_each_group(cfg, [&](int g) {
        persist_volume(group_path(cfg, "volume_", g, ".grid"),
                       group_path(cfg, "barcode_", g, ".csv"));
        std::fprintf(stderr, "[persist] %s barcode written\n", kGroupNames[g]);
    });
}

void stage_trace(const Config& cfg) {
    StageTimer timer("trace");
    NeighbourhoodRaster raster = NeighbourhoodRaster::load(cfg.out_dir + "/raster.csv");
    for_each_group(cfg, [&](int g) {
        ScalarVolume volume = ScalarVolume::load(group_path(cfg, "volume_", g, ".grid"));
        FilteredComplex complex = FilteredComplex::build(volume);
        Barcode barcode = compute_persistence(complex);

        // Cavity membership for every dimension-2 feature; failures are
        // diagnostics, not fatal (the feature simply keeps its row).
        std::map<std::size_t, std::vector<VoxelId>> cavities;
        std::size_t rejected = 0;
        for (std::size_t id = 0; id < barcode.features.size(); ++id) {
            if (barcode.features[id].dim != 2) continue;
            try {
                cavities.emplace(id, cavity_at_birth(complex, barcode, id).voxels);
            } catch (const validation_error&) {
                ++rejected;
            }
        }
        if (rejected)
            std::fprintf(stderr, "[trace] %s: %zu dim-2 features without a traceable cavity\n",
                         kGroupNames[g], rejected);

        Barcode deduped = dedup(barcode, cavities);
        save_barcode_csv(deduped, group_path(cfg, "barcode_", g, "_dedup.csv"));

        // Snapshot exports for important features, ids relative to the
        // deduped barcode.
        std::ofstream comp_csv(group_path(cfg, "components_", g, ".csv"));
        std::ofstream cav_csv(group_path(cfg, "cavities_", g, ".csv"));
        comp_csv << "feature_id,t,x,y,z,neighbourhood,year\n";
        cav_csv << "feature_id,t,x,y,z,neighbourhood,year\n";
        std::map<std::size_t, std::vector<VoxelId>> dedup_cavities;
        for (std::size_t id = 0; id < deduped.features.size(); ++id) {
            const PersistenceFeature& f = deduped.features[id];
            if (f.persistence() <= cfg.importance_threshold) continue;
            if (f.dim == 0) {
                ComponentSnapshot snap = component_at(complex, deduped, id, f.birth);
                append_snapshot_csv(comp_csv, id, snap.t, snap.voxels, complex, raster,
                                    cfg.year_start);
            } else if (f.dim == 2) {
                try {
                    CavitySnapshot snap = cavity_at_birth(complex, deduped, id);
                    append_snapshot_csv(cav_csv, id, snap.birth, snap.voxels, complex, raster,
                                        cfg.year_start);
                } catch (const validation_error&) {
                    // already counted above
                }
            }
        }
        std::fprintf(stderr, "[trace] %s: %zu features after dedup\n", kGroupNames[g],
                     deduped.features.size());
    });
}

void stage_report(const Config& cfg) {
    StageTimer timer("report");
    fs::create_directories(cfg.out_dir + "/tables");
    fs::create_directories(cfg.out_dir + "/figures");
    NeighbourhoodRaster raster = NeighbourhoodRaster::load(cfg.out_dir + "/raster.csv");

    std::array<Barcode, 4> barcodes;
    for (int g : cfg.groups)
        barcodes[g] = load_barcode_csv(group_path(cfg, "barcode_", g, "_dedup.csv"));

    write_feature_counts(barcodes, cfg.importance_threshold,
                         cfg.out_dir + "/tables/feature_counts.csv");
    write_descriptive_stats(barcodes, cfg.out_dir + "/tables/stats.csv");
    write_distributions(barcodes, cfg.out_dir + "/tables/distributions.csv");
    for (int g : cfg.groups) {
        write_top_k(barcodes[g], raster, cfg.year_start, 10,
                    cfg.out_dir + "/tables/top10_" + kGroupNames[g] + ".csv");
        render_barcode(barcodes[g], cfg.out_dir + "/figures/barcode_" + kGroupNames[g] + ".svg");
        render_diagram(barcodes[g], cfg.out_dir + "/figures/diagram_" + kGroupNames[g] + ".svg");
    }
}

void run_all(const Config& cfg) {
    stage_rasterize(cfg);
    stage_ingest(cfg);
    stage_volumes(cfg);
    stage_persist(cfg);
    stage_trace(cfg);
    stage_report(cfg);
}

namespace {

// Deterministic random volume: values from {0,20,...,100}, background with
// probability ~1/5. Uses raw engine draws so results do not depend on the
// standard library's distribution implementations.
ScalarVolume random_volume(std::mt19937_64& rng, const std::array<int, 3>& max_shape) {
    std::vector<int> shape(3);
    for (int i = 0; i < 3; ++i) shape[i] = 1 + static_cast<int>(rng() % max_shape[i]);
    ScalarVolume v(shape, 0);
    bool any_foreground = false;
    VoxelCoord c(3);
    for (c[0] = 0; c[0] < shape[0]; ++c[0])
        for (c[1] = 0; c[1] < shape[1]; ++c[1])
            for (c[2] = 0; c[2] < shape[2]; ++c[2]) {
                if (rng() % 5 == 0) {
                    v.set_background(c);
                } else {
                    v.set(c, 20 * static_cast<int>(rng() % 6));
                    any_foreground = true;
                }
            }
    if (!any_foreground) v.set({0, 0, 0}, 40);
    return v;
}

}  // namespace

int run_selftest(const SelftestOptions& opts, std::ostream& log) {
    std::mt19937_64 rng(opts.seed);
    int failures = 0;
    for (int n = 0; n < opts.cases; ++n) {
        ScalarVolume volume = random_volume(rng, opts.max_shape);
        FilteredComplex complex = FilteredComplex::build(volume);
        Barcode barcode = compute_persistence(complex);

        // Thresholds where the sublevel complex changes; betti/euler are
        // constant in between, so checking one t per segment covers all t.
        std::vector<int> thresholds{0, kValueMax};
        for (CellId c = 0; c < complex.cell_capacity(); ++c)
            if (complex.cell_exists(c)) thresholds.push_back(complex.cell_g(c));
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

        for (int t : thresholds) {
            auto fast = betti_at(barcode, t);
            auto slow = betti_bruteforce(complex, t);
            if (fast != slow) {
                ++failures;
                log << "case " << n << " t=" << t << ": reduction betti (" << fast[0] << ","
                    << fast[1] << "," << fast[2] << ") != oracle (" << slow[0] << "," << slow[1]
                    << "," << slow[2] << ")\n";
                break;
            }
            long euler = complex.euler_characteristic(t);
            if (euler != fast[0] - fast[1] + fast[2]) {
                ++failures;
                log << "case " << n << " t=" << t << ": euler " << euler
                    << " != alternating betti sum\n";
                break;
            }
            if (components_bruteforce(complex, t) != slow[0]) {
                ++failures;
                log << "case " << n << " t=" << t << ": component count mismatch\n";
                break;
            }
        }
    }
    log << "selftest: " << (opts.cases - failures) << "/" << opts.cases << " cases passed\n";
    return failures;
}

}  // namespace topomob
