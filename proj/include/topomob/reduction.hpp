#pragma once

// Persistence pairs of a FilteredComplex over the two-element field.
//
// Column reduction of the boundary matrix with the clearing (twist)
// optimization, dimensions processed top-down; dimension-0 pairs come from a
// union-find sweep over edges, which produces the same pairing as column
// reduction in the shared filtration order. Zero-persistence pairs are
// computed but dropped from the reported barcode.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topomob/tconstruction.hpp"

namespace topomob {

struct PersistenceFeature {
    int dim = 0;
    int birth = 0;
    std::optional<int> death;  // nullopt = essential
    VoxelCoord birth_voxel;
    std::optional<VoxelCoord> death_voxel;

    // Internal attribution, kept for tracing; not part of the CSV contract.
    CellId birth_cell = kNoCell;
    CellId death_cell = kNoCell;

    bool essential() const { return !death.has_value(); }
    int reported_death() const { return death ? *death : kValueMax; }
    int persistence() const { return reported_death() - birth; }
};

struct Barcode {
    int complex_dim = 0;
    // Sorted by (dim, birth, death, birth cell order); essential after finite
    // deaths of equal birth. Zero-persistence pairs are excluded.
    std::vector<PersistenceFeature> features;
    std::uint64_t zero_pairs_dropped = 0;

    std::vector<const PersistenceFeature*> in_dim(int dim) const;
};

Barcode compute_persistence(const FilteredComplex& complex);

// Betti numbers at threshold t: features with birth <= t < death.
std::array<int, 3> betti_at(const Barcode& barcode, int t);

struct DiagramPoints {
    std::vector<std::pair<int, int>> finite;  // (birth, death)
    std::vector<int> essential_births;
};
DiagramPoints diagram_points(const Barcode& barcode, int dim);

// CSV schema: dim,birth,death,persistence,bx,by,bz,dx,dy,dz. Essential rows
// carry death=100 and empty death coordinates. Row order is the barcode
// order; the row index is the feature id used by trace exports.
void save_barcode_csv(const Barcode& barcode, const std::string& path);
Barcode load_barcode_csv(const std::string& path);

}  // namespace topomob
