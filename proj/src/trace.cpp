#include "topomob/trace.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

namespace topomob {

namespace {

const PersistenceFeature& feature_by_id(const Barcode& barcode, std::size_t feature_id) {
    if (feature_id >= barcode.features.size())
        throw validation_error("feature id " + std::to_string(feature_id) + " out of range");
    return barcode.features[feature_id];
}

std::vector<int> volume_shape(const FilteredComplex& fc) {
    std::vector<int> shape(fc.dim());
    for (int i = 0; i < fc.dim(); ++i) shape[i] = fc.shape()[i];
    return shape;
}

bool on_hull(const VoxelCoord& c, const std::vector<int>& shape) {
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] == 0 || c[i] == shape[i] - 1) return true;
    return false;
}

// Face-connected component of absent voxels containing `seed`.
// Returns false when the flood reaches the volume's outer layer.
bool flood_absent(const FilteredComplex& fc, const std::vector<int>& shape, int t, VoxelId seed,
                  std::vector<VoxelId>& out) {
    auto absent = [&](VoxelId v) { return !fc.voxel_in_complex(v) || fc.voxel_g(v) > t; };
    std::vector<std::uint8_t> seen(fc.voxel_count(), 0);
    std::vector<VoxelId> stack{seed};
    seen[seed] = 1;
    bool bounded = true;
    out.clear();
    while (!stack.empty()) {
        VoxelId v = stack.back();
        stack.pop_back();
        out.push_back(v);
        VoxelCoord c = fc.voxel_coord(v);
        if (on_hull(c, shape)) bounded = false;
        for (const VoxelCoord& n : neighbours(c, shape, Connectivity::Face)) {
            VoxelId u = fc.voxel_id(n);
            if (!seen[u] && absent(u)) {
                seen[u] = 1;
                stack.push_back(u);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return bounded;
}

// Threshold at which a bounded absent component becomes enclosed: the largest
// g over the faces separating it from present voxels.
int completion_time(const FilteredComplex& fc, const std::vector<int>& shape, int t,
                    const std::vector<VoxelId>& component) {
    int completion = -1;
    for (VoxelId v : component) {
        VoxelCoord c = fc.voxel_coord(v);
        CellId top = fc.top_cell_of_voxel(v);
        int dc[3];
        fc.doubled_of(top, dc);
        for (const VoxelCoord& n : neighbours(c, shape, Connectivity::Face)) {
            VoxelId u = fc.voxel_id(n);
            if (!fc.voxel_in_complex(u) || fc.voxel_g(u) > t) continue;  // absent side
            int fcoords[3] = {dc[0], dc[1], dc[2]};
            for (std::size_t i = 0; i < c.size(); ++i) fcoords[i] += n[i] - c[i];
            CellId face = fc.id_from_doubled(fcoords[0], fcoords[1], fcoords[2]);
            completion = std::max(completion, fc.cell_g(face));
        }
    }
    return completion;
}

}  // namespace

ComponentSnapshot component_at(const FilteredComplex& fc, const Barcode& barcode,
                               std::size_t feature_id, int t) {
    const PersistenceFeature& f = feature_by_id(barcode, feature_id);
    if (f.dim != 0) throw validation_error("component_at requires a dimension-0 feature");
    if (t < f.birth)
        throw validation_error("threshold " + std::to_string(t) + " precedes feature birth " +
                               std::to_string(f.birth));
    if (!f.essential() && t >= *f.death)
        throw validation_error("feature is dead at threshold " + std::to_string(t));

    std::vector<int> shape = volume_shape(fc);
    ComponentSnapshot snap;
    snap.feature_id = feature_id;
    snap.t = t;

    VoxelId seed = fc.voxel_id(f.birth_voxel);
    TOPOMOB_CHECK(fc.voxel_in_complex(seed) && fc.voxel_g(seed) <= t,
                  "birth voxel absent from its own component");
    std::vector<std::uint8_t> seen(fc.voxel_count(), 0);
    std::vector<VoxelId> stack{seed};
    seen[seed] = 1;
    while (!stack.empty()) {
        VoxelId v = stack.back();
        stack.pop_back();
        snap.voxels.push_back(v);
        for (const VoxelCoord& n : neighbours(fc.voxel_coord(v), shape, Connectivity::Full)) {
            VoxelId u = fc.voxel_id(n);
            if (!seen[u] && fc.voxel_in_complex(u) && fc.voxel_g(u) <= t) {
                seen[u] = 1;
                stack.push_back(u);
            }
        }
    }
    std::sort(snap.voxels.begin(), snap.voxels.end());
    return snap;
}

CavitySnapshot cavity_at_birth(const FilteredComplex& fc, const Barcode& barcode,
                               std::size_t feature_id) {
    const PersistenceFeature& f = feature_by_id(barcode, feature_id);
    if (f.dim != 2) throw validation_error("cavity_at_birth requires a dimension-2 feature");
    const int t = f.birth;
    std::vector<int> shape = volume_shape(fc);
    auto absent = [&](VoxelId v) { return !fc.voxel_in_complex(v) || fc.voxel_g(v) > t; };

    CavitySnapshot snap;
    snap.feature_id = feature_id;
    snap.birth = t;

    if (!f.essential()) {
        VoxelId seed = fc.voxel_id(*f.death_voxel);
        if (!absent(seed))
            throw validation_error("cavity seed voxel is present at the birth threshold");
        if (!flood_absent(fc, shape, t, seed, snap.voxels))
            throw validation_error("cavity flood reached the volume boundary (not a cavity)");
        return snap;
    }

    // Essential cavity: no death voxel exists. Seed from the absent side of
    // the birth 2-cell when there is one.
    if (f.birth_cell != kNoCell) {
        int dc[3];
        fc.doubled_of(f.birth_cell, dc);
        for (int axis = 0; axis < fc.dim(); ++axis) {
            if (dc[axis] & 1) continue;
            for (int step : {-1, 1}) {
                int v[3] = {dc[0], dc[1], dc[2]};
                v[axis] += step;
                if (v[axis] < 1 || v[axis] > fc.doubled()[axis] - 2) continue;
                VoxelId side = fc.voxel_of_top_cell(fc.id_from_doubled(v[0], v[1], v[2]));
                if (!absent(side)) continue;
                if (!flood_absent(fc, shape, t, side, snap.voxels))
                    throw validation_error(
                        "cavity flood reached the volume boundary (not a cavity)");
                return snap;
            }
        }
    }

    // Fall back to the bounded absent component whose enclosing surface
    // completes exactly at the birth value.
    std::vector<std::uint8_t> claimed(fc.voxel_count(), 0);
    std::vector<VoxelId> component;
    std::vector<VoxelId> best;
    for (VoxelId v = 0; v < fc.voxel_count(); ++v) {
        if (claimed[v] || !absent(v)) continue;
        bool bounded = flood_absent(fc, shape, t, v, component);
        for (VoxelId u : component) claimed[u] = 1;
        if (!bounded) continue;
        if (completion_time(fc, shape, t, component) == t) {
            if (best.empty() || component.front() < best.front()) best = component;
        }
    }
    if (best.empty())
        throw validation_error("no bounded cavity completes at the feature's birth value");
    snap.voxels = std::move(best);
    return snap;
}

Barcode dedup(const Barcode& barcode,
              const std::map<std::size_t, std::vector<VoxelId>>& cavity_voxels) {
    using RowKey = std::tuple<int, int, int, VoxelCoord, VoxelCoord>;
    std::vector<RowKey> seen_rows;
    std::vector<const std::vector<VoxelId>*> seen_cavities;

    Barcode out;
    out.complex_dim = barcode.complex_dim;
    out.zero_pairs_dropped = barcode.zero_pairs_dropped;
    for (std::size_t id = 0; id < barcode.features.size(); ++id) {
        const PersistenceFeature& f = barcode.features[id];
        RowKey key{f.dim, f.birth, f.death.value_or(-1), f.birth_voxel,
                   f.death_voxel.value_or(VoxelCoord{})};
        if (std::find(seen_rows.begin(), seen_rows.end(), key) != seen_rows.end()) continue;

        bool duplicate_cavity = false;
        auto cav = cavity_voxels.find(id);
        if (f.dim == 2 && cav != cavity_voxels.end()) {
            for (const auto* prior : seen_cavities)
                if (*prior == cav->second) {
                    duplicate_cavity = true;
                    break;
                }
        }
        if (duplicate_cavity) continue;

        seen_rows.push_back(std::move(key));
        if (f.dim == 2 && cav != cavity_voxels.end()) seen_cavities.push_back(&cav->second);
        out.features.push_back(f);
    }
    return out;
}

Barcode important(const Barcode& barcode, int threshold) {
    if (threshold < 0) throw validation_error("importance threshold must be >= 0");
    Barcode out;
    out.complex_dim = barcode.complex_dim;
    for (const auto& f : barcode.features)
        if (f.persistence() > threshold) out.features.push_back(f);
    return out;
}

FeatureLocation locate(const PersistenceFeature& feature, const NeighbourhoodRaster& raster,
                       int year0) {
    if (feature.birth_voxel.size() != 3)
        throw validation_error("locate requires 3-D feature coordinates");
    auto lookup = [&](const VoxelCoord& c, const char* what) {
        if (c[0] < 0 || c[0] >= raster.grid_size || c[1] < 0 || c[1] >= raster.grid_size)
            throw validation_error(std::string(what) + " voxel outside the raster");
        int code = raster.code_at(c[0], c[1]);
        if (code < 0)
            throw validation_error(std::string(what) + " voxel maps to background");
        return code;
    };
    FeatureLocation loc;
    loc.year_of_birth = year0 + feature.birth_voxel[2];
    loc.nb_of_birth = lookup(feature.birth_voxel, "birth");
    if (feature.death_voxel) {
        loc.year_of_death = year0 + (*feature.death_voxel)[2];
        loc.nb_of_death = lookup(*feature.death_voxel, "death");
    }
    return loc;
}

void append_snapshot_csv(std::ostream& out, std::size_t feature_id, int t,
                         const std::vector<VoxelId>& voxels, const FilteredComplex& complex,
                         const NeighbourhoodRaster& raster, int year0) {
    for (VoxelId v : voxels) {
        VoxelCoord c = complex.voxel_coord(v);
        int code = (c[0] >= 0 && c[0] < raster.grid_size && c[1] >= 0 && c[1] < raster.grid_size)
                       ? raster.code_at(c[0], c[1])
                       : -1;
        out << feature_id << ',' << t << ',' << c[0] << ',' << c[1] << ',' << c[2] << ',';
        if (code >= 0) out << code;
        out << ',' << (year0 + c[2]) << '\n';
    }
}

}  // namespace topomob
