#pragma once

// Filtered cubical complex built from a ScalarVolume.
//
// Top cells (dimension d) correspond to non-background voxels and carry
// g = 100 - f, where f is the stored voxel value. Every lower cell takes the
// minimum g over its incident top cells, so the sublevel set {g <= t} is a
// closed complex whose top cells are exactly the voxels with f >= 100 - t,
// and voxels sharing any face are connected diagonally within it.
//
// Cells are addressed on the doubled grid: axis coordinate 2a is the vertex
// position a, 2a+1 the unit interval [a, a+1]. A cell's dimension is the
// number of odd coordinates; its faces are the +-1 perturbations of its odd
// coordinates. Cells whose incident top cells are all background are not
// part of the complex.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "topomob/grid.hpp"

namespace topomob {

using CellId = std::uint32_t;
using VoxelId = std::uint32_t;

constexpr CellId kNoCell = 0xffffffffu;
constexpr std::int16_t kAbsentCell = -1;

struct Cell {
    VoxelCoord anchor;       // lower corner, one entry per axis
    unsigned extent = 0;     // bit i set <=> interval along axis i
    int dim() const { return __builtin_popcount(extent); }
};

class FilteredComplex {
public:
    // Requires d <= 3 and at least one non-background voxel.
    static FilteredComplex build(const ScalarVolume& volume);

    int dim() const { return d_; }
    const std::array<int, 3>& shape() const { return shape_; }  // unused axes are 1
    std::size_t cell_capacity() const { return g_.size(); }     // doubled-grid slots
    std::size_t cell_count() const { return existing_; }        // cells in the complex
    std::size_t voxel_count() const { return voxel_total_; }

    bool cell_exists(CellId c) const { return g_[c] >= 0; }
    int cell_g(CellId c) const { return g_[c]; }
    VoxelId cell_provenance(CellId c) const { return prov_[c]; }
    int cell_dim(CellId c) const;
    Cell cell_of(CellId c) const;
    CellId cell_id(const Cell& cell) const;

    // Top-cell (voxel) helpers. Voxel ids are row-major over the volume shape.
    CellId top_cell_of_voxel(VoxelId v) const;
    VoxelId voxel_of_top_cell(CellId c) const;
    VoxelCoord voxel_coord(VoxelId v) const;
    VoxelId voxel_id(const VoxelCoord& c) const;
    bool voxel_in_complex(VoxelId v) const { return cell_exists(top_cell_of_voxel(v)); }
    int voxel_g(VoxelId v) const { return g_[top_cell_of_voxel(v)]; }

    // Faces of a cell: exactly 2*dim ids, all present whenever the cell is.
    void faces_of(CellId c, CellId* out, int* count) const;
    // Incident top cells (existing only): up to 2^(d-dim) ids.
    void incident_tops(CellId c, CellId* out, int* count) const;

    // Non-background voxels with g <= t, ascending by voxel id.
    std::vector<VoxelCoord> sublevel_voxels(int t) const;
    std::vector<VoxelId> sublevel_voxel_ids(int t) const;

    struct CellRecord {
        Cell cell;
        int g;
        VoxelCoord provenance;
    };
    // Cells of one dimension in increasing (g, anchor, extent) order.
    std::vector<CellRecord> enumerate_cells(int dim) const;

    // Alternating cell count of the sublevel complex at t.
    long euler_characteristic(int t) const;

    // Filtration sort key: (g, dim, anchor lexicographic, extent). This is
    // the documented cell order; all tie-breaking downstream derives from it.
    std::uint64_t order_key(CellId c) const;

    // Debug dump: dim,anchor,extent,g,provenance per cell.
    void dump_cells_csv(const std::string& path) const;

    // Doubled-grid geometry, exposed for the reduction and oracle.
    const std::array<int, 3>& doubled() const { return doubled_; }
    CellId id_from_doubled(int c0, int c1, int c2) const {
        return static_cast<CellId>((static_cast<std::size_t>(c0) * doubled_[1] + c1) * doubled_[2] +
                                   c2);
    }
    void doubled_of(CellId c, int* out) const {
        out[2] = static_cast<int>(c % doubled_[2]);
        c /= doubled_[2];
        out[1] = static_cast<int>(c % doubled_[1]);
        out[0] = static_cast<int>(c / doubled_[1]);
    }

private:
    FilteredComplex() = default;

    int d_ = 0;
    std::array<int, 3> shape_{1, 1, 1};
    std::array<int, 3> doubled_{1, 1, 1};
    std::size_t voxel_total_ = 0;
    std::size_t existing_ = 0;
    std::vector<std::int16_t> g_;    // kAbsentCell when not in the complex
    std::vector<VoxelId> prov_;      // argmin incident voxel, lowest id among ties
};

}  // namespace topomob
