#pragma once

// Spatial/temporal post-processing of barcodes: component membership at a
// threshold, cavity membership at birth, duplicate removal, importance
// filtering and neighbourhood/year lookup.
//
// Foreground components use full (diagonal) voxel connectivity, matching the
// complex; cavity complements use face connectivity, the dual pairing.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "topomob/mobility.hpp"
#include "topomob/reduction.hpp"

namespace topomob {

struct ComponentSnapshot {
    std::size_t feature_id = 0;
    int t = 0;
    std::vector<VoxelId> voxels;  // ascending
};

struct CavitySnapshot {
    std::size_t feature_id = 0;
    int birth = 0;
    std::vector<VoxelId> voxels;  // ascending
};

// Connected component (full connectivity) of the sublevel voxel set at t
// containing the feature's birth voxel. The feature must be dimension 0 and
// alive at t.
ComponentSnapshot component_at(const FilteredComplex& complex, const Barcode& barcode,
                               std::size_t feature_id, int t);

// Void traced from a dimension-2 feature at its birth threshold: flood fill
// over absent voxels (face connectivity) seeded at the death voxel. A flood
// that reaches the volume's outer boundary is rejected. For essential
// features, which have no death voxel, the seed is the absent side of the
// birth cell when there is one; otherwise the bounded complement component
// whose enclosing surface completes exactly at the birth value.
CavitySnapshot cavity_at_birth(const FilteredComplex& complex, const Barcode& barcode,
                               std::size_t feature_id);

// Removes rows identical in (dim, birth, death, birth voxel, death voxel),
// and dimension-2 rows whose cavity voxel set equals an earlier row's.
// First occurrence wins; order is preserved.
Barcode dedup(const Barcode& barcode,
              const std::map<std::size_t, std::vector<VoxelId>>& cavity_voxels);

// Features with persistence strictly greater than the threshold.
Barcode important(const Barcode& barcode, int threshold = 2);

struct FeatureLocation {
    int year_of_birth = 0;
    std::optional<int> year_of_death;
    int nb_of_birth = 0;
    std::optional<int> nb_of_death;
};

// year = year0 + z index; neighbourhood = raster code at (x, y).
FeatureLocation locate(const PersistenceFeature& feature, const NeighbourhoodRaster& raster,
                       int year0);

// CSV rows: feature_id,t,x,y,z,neighbourhood,year (one per member voxel).
void append_snapshot_csv(std::ostream& out, std::size_t feature_id, int t,
                         const std::vector<VoxelId>& voxels, const FilteredComplex& complex,
                         const NeighbourhoodRaster& raster, int year0);

}  // namespace topomob
