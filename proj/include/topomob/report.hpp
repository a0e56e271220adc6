#pragma once

// Summary artifacts: feature-count tables, descriptive statistics, top-k
// tables, barcode and persistence-diagram figures (SVG), and long-format
// distribution exports. All outputs are deterministic: fixed ordering, fixed
// number formatting, no timestamps.

#include <array>
#include <string>
#include <vector>

#include "topomob/mobility.hpp"
#include "topomob/reduction.hpp"
#include "topomob/trace.hpp"

namespace topomob {

// Per group x dimension: total and important (persistence > threshold)
// feature counts. CSV rows: measure,dim,<group...>.
void write_feature_counts(const std::array<Barcode, 4>& barcodes, int importance_threshold,
                          const std::string& path);

// mean/median/std/min/max of birth, death and persistence per dimension.
// The standard deviation uses the sample (n-1) convention, recorded in the
// header; single-feature groups emit 0 with a flag.
void write_descriptive_stats(const std::array<Barcode, 4>& barcodes, const std::string& path);

struct TopFeatureRow {
    int dim, birth, death, persistence;
    int year_of_birth;
    std::optional<int> year_of_death;
    int nb_of_birth;
    std::optional<int> nb_of_death;
    int prevalence_at_birth;
};

// k most persistent features per dimension, persistence descending, ties by
// birth ascending then barcode order.
std::vector<TopFeatureRow> top_k(const Barcode& barcode, const NeighbourhoodRaster& raster,
                                 int year0, int k = 10);
void write_top_k(const Barcode& barcode, const NeighbourhoodRaster& raster, int year0, int k,
                 const std::string& path);

// One horizontal bar per feature, grouped and colour-keyed by dimension,
// x axis = filtration value 0..100; essential bars carry an open-end marker.
void render_barcode(const Barcode& barcode, const std::string& path);

// Scatter of (birth, death) per dimension with the diagonal; essential
// points drawn at death = 100 with a distinct marker.
void render_diagram(const Barcode& barcode, const std::string& path);

// Long format: group,dim,birth,death,persistence.
void write_distributions(const std::array<Barcode, 4>& barcodes, const std::string& path);

}  // namespace topomob
