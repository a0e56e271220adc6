#include "topomob/tconstruction.hpp"

#include <algorithm>
#include <fstream>

namespace topomob {

FilteredComplex FilteredComplex::build(const ScalarVolume& volume) {
    const int d = volume.dim();
    if (d > 3) throw validation_error("filtered complexes support d <= 3");
    if (volume.background_count() == volume.voxel_count())
        throw validation_error("volume is entirely background");

    FilteredComplex fc;
    fc.d_ = d;
    for (int i = 0; i < d; ++i) {
        fc.shape_[i] = volume.shape()[i];
        fc.doubled_[i] = 2 * volume.shape()[i] + 1;
    }
    fc.voxel_total_ = volume.voxel_count();

    const std::size_t total =
        static_cast<std::size_t>(fc.doubled_[0]) * fc.doubled_[1] * fc.doubled_[2];
    fc.g_.assign(total, kAbsentCell);
    fc.prov_.assign(total, 0);

    // Pass over every doubled-grid slot; g = min over incident non-background
    // voxels, provenance = the smallest voxel id among the argmins.
    std::size_t existing = 0;
    int c[3];
    for (c[0] = 0; c[0] < fc.doubled_[0]; ++c[0]) {
        for (c[1] = 0; c[1] < fc.doubled_[1]; ++c[1]) {
            for (c[2] = 0; c[2] < fc.doubled_[2]; ++c[2]) {
                int lo[3], hi[3];
                bool any_axis_empty = false;
                for (int i = 0; i < 3; ++i) {
                    if (i >= d) {
                        lo[i] = hi[i] = 0;
                        continue;
                    }
                    if (c[i] & 1) {
                        lo[i] = hi[i] = c[i];
                    } else {
                        lo[i] = c[i] - 1;
                        hi[i] = c[i] + 1;
                        if (lo[i] < 0) lo[i] = hi[i];
                        if (hi[i] >= fc.doubled_[i]) hi[i] = lo[i];
                        if (lo[i] < 0) any_axis_empty = true;  // 1-wide axis edge case
                    }
                }
                if (any_axis_empty) continue;
                int best = kValueMax + 1;
                VoxelId best_voxel = 0;
                VoxelCoord vc(d);
                for (int x = lo[0]; x <= hi[0]; x += 2) {
                    for (int y = lo[1]; y <= hi[1]; y += 2) {
                        for (int z = lo[2]; z <= hi[2]; z += 2) {
                            vc[0] = x >> 1;
                            if (d > 1) vc[1] = y >> 1;
                            if (d > 2) vc[2] = z >> 1;
                            std::size_t vl = volume.linear_index(vc);
                            if (volume.is_background_linear(vl)) continue;
                            int g = kValueMax - volume.value_at_linear(vl);
                            if (g < best || (g == best && vl < best_voxel)) {
                                best = g;
                                best_voxel = static_cast<VoxelId>(vl);
                            }
                        }
                    }
                }
                if (best > kValueMax) continue;  // all incident voxels background
                CellId id = fc.id_from_doubled(c[0], c[1], c[2]);
                fc.g_[id] = static_cast<std::int16_t>(best);
                fc.prov_[id] = best_voxel;
                ++existing;
            }
        }
    }
    fc.existing_ = existing;
    return fc;
}

int FilteredComplex::cell_dim(CellId c) const {
    int dc[3];
    doubled_of(c, dc);
    return (dc[0] & 1) + (dc[1] & 1) + (dc[2] & 1);
}

Cell FilteredComplex::cell_of(CellId c) const {
    int dc[3];
    doubled_of(c, dc);
    Cell cell;
    cell.anchor.resize(d_);
    for (int i = 0; i < d_; ++i) {
        cell.anchor[i] = dc[i] >> 1;
        if (dc[i] & 1) cell.extent |= 1u << i;
    }
    return cell;
}

CellId FilteredComplex::cell_id(const Cell& cell) const {
    int dc[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) dc[i] = 2 * cell.anchor[i] + ((cell.extent >> i) & 1);
    return id_from_doubled(dc[0], dc[1], dc[2]);
}

CellId FilteredComplex::top_cell_of_voxel(VoxelId v) const {
    int vc[3] = {0, 0, 0};
    std::size_t rest = v;
    for (int i = d_ - 1; i >= 0; --i) {
        vc[i] = static_cast<int>(rest % shape_[i]);
        rest /= shape_[i];
    }
    int dc[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) dc[i] = 2 * vc[i] + 1;
    return id_from_doubled(dc[0], dc[1], dc[2]);
}

VoxelId FilteredComplex::voxel_of_top_cell(CellId c) const {
    int dc[3];
    doubled_of(c, dc);
    std::size_t v = 0;
    for (int i = 0; i < d_; ++i) {
        TOPOMOB_CHECK(dc[i] & 1, "voxel_of_top_cell on a non-top cell");
        v = v * shape_[i] + static_cast<std::size_t>(dc[i] >> 1);
    }
    return static_cast<VoxelId>(v);
}

VoxelCoord FilteredComplex::voxel_coord(VoxelId v) const {
    VoxelCoord c(d_);
    std::size_t rest = v;
    for (int i = d_ - 1; i >= 0; --i) {
        c[i] = static_cast<int>(rest % shape_[i]);
        rest /= shape_[i];
    }
    return c;
}

VoxelId FilteredComplex::voxel_id(const VoxelCoord& c) const {
    std::size_t v = 0;
    for (int i = 0; i < d_; ++i) v = v * shape_[i] + static_cast<std::size_t>(c[i]);
    return static_cast<VoxelId>(v);
}

void FilteredComplex::faces_of(CellId c, CellId* out, int* count) const {
    int dc[3];
    doubled_of(c, dc);
    int n = 0;
    for (int i = 0; i < d_; ++i) {
        if (!(dc[i] & 1)) continue;
        int keep = dc[i];
        dc[i] = keep - 1;
        out[n++] = id_from_doubled(dc[0], dc[1], dc[2]);
        dc[i] = keep + 1;
        out[n++] = id_from_doubled(dc[0], dc[1], dc[2]);
        dc[i] = keep;
    }
    *count = n;
}

void FilteredComplex::incident_tops(CellId c, CellId* out, int* count) const {
    int dc[3];
    doubled_of(c, dc);
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int i = 0; i < d_; ++i) {
        if (dc[i] & 1) {
            lo[i] = hi[i] = dc[i];
        } else {
            lo[i] = std::max(dc[i] - 1, 1);
            hi[i] = std::min(dc[i] + 1, doubled_[i] - 2);
        }
    }
    int n = 0;
    for (int x = lo[0]; x <= hi[0]; x += 2)
        for (int y = lo[1]; y <= hi[1]; y += 2)
            for (int z = lo[2]; z <= hi[2]; z += 2) {
                CellId id = id_from_doubled(x, y, z);
                if (g_[id] >= 0) out[n++] = id;
            }
    *count = n;
}

std::vector<VoxelId> FilteredComplex::sublevel_voxel_ids(int t) const {
    std::vector<VoxelId> out;
    for (VoxelId v = 0; v < voxel_total_; ++v) {
        CellId c = top_cell_of_voxel(v);
        if (g_[c] >= 0 && g_[c] <= t) out.push_back(v);
    }
    return out;
}

std::vector<VoxelCoord> FilteredComplex::sublevel_voxels(int t) const {
    std::vector<VoxelCoord> out;
    for (VoxelId v : sublevel_voxel_ids(t)) out.push_back(voxel_coord(v));
    return out;
}

std::vector<FilteredComplex::CellRecord> FilteredComplex::enumerate_cells(int dim) const {
    if (dim < 0 || dim > 3) throw validation_error("cell dimension must be in [0,3]");
    std::vector<std::pair<std::uint64_t, CellId>> keyed;
    for (CellId c = 0; c < g_.size(); ++c) {
        if (g_[c] < 0 || cell_dim(c) != dim) continue;
        keyed.emplace_back(order_key(c), c);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<CellRecord> out;
    out.reserve(keyed.size());
    for (auto& [key, c] : keyed) {
        (void)key;
        out.push_back({cell_of(c), g_[c], voxel_coord(prov_[c])});
    }
    return out;
}

long FilteredComplex::euler_characteristic(int t) const {
    long chi = 0;
    for (CellId c = 0; c < g_.size(); ++c) {
        if (g_[c] < 0 || g_[c] > t) continue;
        chi += (cell_dim(c) & 1) ? -1 : 1;
    }
    return chi;
}

std::uint64_t FilteredComplex::order_key(CellId c) const {
    int dc[3];
    doubled_of(c, dc);
    std::uint64_t anchor = 0;
    unsigned extent = 0;
    int dim = 0;
    for (int i = 0; i < d_; ++i) {
        anchor = anchor * static_cast<std::uint64_t>(shape_[i] + 1) +
                 static_cast<std::uint64_t>(dc[i] >> 1);
        extent |= static_cast<unsigned>(dc[i] & 1) << i;
        dim += dc[i] & 1;
    }
    std::uint64_t anchor_span = 1;
    for (int i = 0; i < d_; ++i) anchor_span *= static_cast<std::uint64_t>(shape_[i] + 1);
    std::uint64_t key = static_cast<std::uint64_t>(g_[c]);
    key = key * 4 + static_cast<std::uint64_t>(dim);
    key = key * anchor_span + anchor;
    key = key * 8 + extent;
    return key;
}

void FilteredComplex::dump_cells_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    out << "dim,anchor,extent,g,provenance\n";
    for (int dim = 0; dim <= d_; ++dim) {
        for (const auto& rec : enumerate_cells(dim)) {
            out << dim << ',';
            for (std::size_t i = 0; i < rec.cell.anchor.size(); ++i)
                out << (i ? " " : "") << rec.cell.anchor[i];
            out << ',' << rec.cell.extent << ',' << rec.g << ',';
            for (std::size_t i = 0; i < rec.provenance.size(); ++i)
                out << (i ? " " : "") << rec.provenance[i];
            out << '\n';
        }
    }
}

}  // namespace topomob
