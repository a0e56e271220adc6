#pragma once

// Ingestion of neighbourhood geometry and yearly origin-destination tables,
// administrative corrections, mover-group shares and rasterization into the
// four group volumes.

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topomob/grid.hpp"

namespace topomob {

inline constexpr std::array<const char*, 4> kGroupNames{"stay", "city", "cmadrid", "outside"};
enum class Group { Stay = 0, City = 1, CMadrid = 2, Outside = 3 };

struct Ring {
    std::vector<std::array<double, 2>> points;  // closed implicitly
};
struct Polygon {
    Ring outer;
    std::vector<Ring> holes;
};
struct NeighbourhoodShape {
    int code = 0;
    std::string name;
    std::vector<Polygon> polygons;
};

struct NeighbourhoodGeometry {
    std::vector<NeighbourhoodShape> shapes;  // ascending by code
    bool has_code(int code) const;
    const NeighbourhoodShape* find(int code) const;
};

// GeoJSON FeatureCollection in planar coordinates; each feature needs a
// `code` property (integer or numeric string) and Polygon/MultiPolygon
// geometry. Duplicate codes, empty collections and degenerate rings are
// rejected.
NeighbourhoodGeometry load_geometry(const std::string& path);

enum class DestKind { Stay, City, CMadrid, Outside, Ignore };

// Plain-text mapping of non-numeric destination column labels to groups.
// Numeric labels are in-city neighbourhood codes and need no entry: they
// count as 'stay' when equal to the origin and 'city' otherwise.
struct DestinationMap {
    int version = 0;
    std::map<std::string, DestKind> labels;
    static DestinationMap load(const std::string& path);
};

struct ODTable {
    int year = 0;
    std::vector<std::string> dest_labels;
    std::vector<std::optional<int>> dest_codes;  // parsed numeric labels
    std::map<int, std::vector<double>> rows;     // origin code -> counts
};

// Semicolon-delimited table: header `year;origin;<label>...`, one row per
// origin. Every row must carry the requested year; origins must exist in the
// geometry; non-numeric labels must be covered by the destination map.
ODTable load_od(const std::string& path, int year, const NeighbourhoodGeometry& geometry,
                const DestinationMap& destmap);

enum class CorrectionsMode { None, Madrid };

// Madrid mode, years before 2017: the four Vicálvaro codes (191,192,193,194)
// all carry the district-merged row, with intra-district moves counted as
// 'stay', and 183 carries 181's rates. Idempotent; later years pass through
// but must contain the post-2017 codes.
void apply_corrections(std::vector<ODTable>& tables, CorrectionsMode mode);

struct ShareRow {
    double movers = 0;                       // 0 flags a zero-mover row
    std::array<double, 4> share{0, 0, 0, 0};  // stay, city, cmadrid, outside
};
struct GroupShares {
    int year = 0;
    std::map<int, ShareRow> rows;
};

GroupShares compute_shares(const ODTable& table, const DestinationMap& destmap);

void save_shares_csv(const std::vector<GroupShares>& shares, const std::string& path);
std::vector<GroupShares> load_shares_csv(const std::string& path);

struct NeighbourhoodRaster {
    int grid_size = 0;
    double origin_x = 0, origin_y = 0, cell_size = 0;
    std::vector<int> codes;  // x-major, -1 = background

    int code_at(int x, int y) const { return codes[static_cast<std::size_t>(x) * grid_size + y]; }
    void save(const std::string& path) const;
    static NeighbourhoodRaster load(const std::string& path);
};

// Square grid over the city's bounding box, shorter axis padded symmetrically.
// Each cell takes the code of the polygon containing its center (smallest
// code wins overlaps, boundary ties by the half-open rule: left/bottom edges
// inclusive). Every nonempty neighbourhood must cover at least one cell.
NeighbourhoodRaster rasterize(const NeighbourhoodGeometry& geometry, int grid_size = 100);

// Four volumes of shape (grid, grid, years): value = round(100 * share).
// Background where the raster is background or the share row has no movers;
// the mask is identical across groups.
std::array<ScalarVolume, 4> build_volumes(const std::vector<GroupShares>& shares,
                                          const NeighbourhoodRaster& raster);

// Point-in-polygon by crossing number with the half-open boundary rule.
bool polygon_contains(const Polygon& poly, double x, double y);

}  // namespace topomob
