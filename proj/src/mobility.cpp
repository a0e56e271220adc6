#include "topomob/mobility.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace topomob {

namespace {

std::optional<int> parse_code(const std::string& s) {
    if (s.empty()) return std::nullopt;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
    try {
        return std::stoi(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

Ring parse_ring(const nlohmann::json& arr, const std::string& where) {
    Ring ring;
    for (const auto& pt : arr) {
        if (!pt.is_array() || pt.size() < 2)
            throw validation_error(where + ": ring point is not an [x,y] pair");
        ring.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    // Drop an explicit closing point; the ring is treated as cyclic.
    if (ring.points.size() > 1 && ring.points.front() == ring.points.back())
        ring.points.pop_back();
    if (ring.points.size() < 3) throw validation_error(where + ": invalid ring (fewer than 3 points)");
    return ring;
}

Polygon parse_polygon(const nlohmann::json& rings, const std::string& where) {
    if (!rings.is_array() || rings.empty())
        throw validation_error(where + ": polygon without rings");
    Polygon poly;
    poly.outer = parse_ring(rings[0], where);
    for (std::size_t i = 1; i < rings.size(); ++i) poly.holes.push_back(parse_ring(rings[i], where));
    return poly;
}

bool ring_crossings(const Ring& ring, double x, double y, int& crossings) {
    const auto& p = ring.points;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& a = p[i];
        const auto& b = p[(i + 1) % p.size()];
        if ((a[1] > y) != (b[1] > y)) {
            double xint = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if (x < xint) ++crossings;
        }
    }
    return true;
}

}  // namespace

bool polygon_contains(const Polygon& poly, double x, double y) {
    int crossings = 0;
    ring_crossings(poly.outer, x, y, crossings);
    for (const auto& hole : poly.holes) ring_crossings(hole, x, y, crossings);
    return crossings & 1;
}

bool NeighbourhoodGeometry::has_code(int code) const { return find(code) != nullptr; }

const NeighbourhoodShape* NeighbourhoodGeometry::find(int code) const {
    auto it = std::lower_bound(shapes.begin(), shapes.end(), code,
                               [](const NeighbourhoodShape& s, int c) { return s.code < c; });
    if (it == shapes.end() || it->code != code) return nullptr;
    return &*it;
}

NeighbourhoodGeometry load_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw validation_error(path + ": invalid JSON: " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw validation_error(path + ": not a GeoJSON FeatureCollection");
    const auto& features = doc["features"];
    if (!features.is_array() || features.empty())
        throw validation_error(path + ": empty feature collection");

    NeighbourhoodGeometry geo;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& feat = features[i];
        std::string where = path + ": feature " + std::to_string(i);
        if (!feat.contains("properties") || !feat["properties"].contains("code"))
            throw validation_error(where + ": missing `code` property");
        const auto& code_prop = feat["properties"]["code"];
        int code;
        if (code_prop.is_number_integer()) {
            code = code_prop.get<int>();
        } else if (code_prop.is_string()) {
            auto parsed = parse_code(code_prop.get<std::string>());
            if (!parsed) throw validation_error(where + ": non-numeric code");
            code = *parsed;
        } else {
            throw validation_error(where + ": non-numeric code");
        }
        NeighbourhoodShape shape;
        shape.code = code;
        shape.name = feat["properties"].value("name", "");
        if (!feat.contains("geometry") || feat["geometry"].is_null())
            throw validation_error(where + ": missing geometry");
        const auto& geom = feat["geometry"];
        std::string gtype = geom.value("type", "");
        if (gtype == "Polygon") {
            shape.polygons.push_back(parse_polygon(geom["coordinates"], where));
        } else if (gtype == "MultiPolygon") {
            for (const auto& rings : geom["coordinates"])
                shape.polygons.push_back(parse_polygon(rings, where));
        } else {
            throw validation_error(where + ": unsupported geometry type '" + gtype + "'");
        }
        geo.shapes.push_back(std::move(shape));
    }
    std::sort(geo.shapes.begin(), geo.shapes.end(),
              [](const NeighbourhoodShape& a, const NeighbourhoodShape& b) { return a.code < b.code; });
    for (std::size_t i = 1; i < geo.shapes.size(); ++i)
        if (geo.shapes[i].code == geo.shapes[i - 1].code)
            throw validation_error(path + ": duplicate neighbourhood code " +
                                   std::to_string(geo.shapes[i].code));
    return geo;
}

DestinationMap DestinationMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    DestinationMap map;
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
        if (key == "version") {
            map.version = std::stoi(value);
            continue;
        }
        DestKind kind;
        if (value == "stay")
            kind = DestKind::Stay;
        else if (value == "city")
            kind = DestKind::City;
        else if (value == "cmadrid")
            kind = DestKind::CMadrid;
        else if (value == "outside")
            kind = DestKind::Outside;
        else if (value == "ignore")
            kind = DestKind::Ignore;
        else
            throw validation_error(path + ":" + std::to_string(lineno) + ": unknown group '" +
                                   value + "'");
        map.labels[key] = kind;
    }
    return map;
}

ODTable load_od(const std::string& path, int year, const NeighbourhoodGeometry& geometry,
                const DestinationMap& destmap) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw validation_error(path + ": empty file");
    auto header = split(line, ';');
    if (header.size() < 3 || header[0] != "year" || header[1] != "origin")
        throw validation_error(path + ": header must start with year;origin;");

    ODTable table;
    table.year = year;
    for (std::size_t i = 2; i < header.size(); ++i) {
        table.dest_labels.push_back(header[i]);
        auto code = parse_code(header[i]);
        table.dest_codes.push_back(code);
        if (!code && !destmap.labels.count(header[i]))
            throw validation_error(path + ": destination column '" + header[i] +
                                   "' missing from the destination map");
    }

    std::size_t lineno = 1;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto f = split(line, ';');
        auto where = path + ":" + std::to_string(lineno);
        if (f.size() != header.size())
            throw validation_error(where + ": expected " + std::to_string(header.size()) +
                                   " fields, got " + std::to_string(f.size()));
        int row_year, origin;
        try {
            row_year = std::stoi(f[0]);
            origin = std::stoi(f[1]);
        } catch (const std::exception&) {
            throw validation_error(where + ": malformed year/origin");
        }
        if (row_year != year)
            throw validation_error(where + ": row year " + std::to_string(row_year) +
                                   " does not match requested year " + std::to_string(year));
        if (!geometry.has_code(origin))
            throw validation_error(where + ": unknown origin code " + std::to_string(origin));
        if (table.rows.count(origin))
            throw validation_error(where + ": duplicate origin code " + std::to_string(origin));
        std::vector<double> counts(table.dest_labels.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            double v;
            try {
                v = std::stod(f[i + 2]);
            } catch (const std::exception&) {
                throw validation_error(where + ": malformed count '" + f[i + 2] + "'");
            }
            if (v < 0)
                throw validation_error(where + ": negative count in column '" +
                                       table.dest_labels[i] + "'");
            counts[i] = v;
        }
        table.rows.emplace(origin, std::move(counts));
        any = true;
    }
    if (!any) throw validation_error(path + ": no rows for year " + std::to_string(year));
    return table;
}

namespace {

constexpr int kVicalvaro[] = {191, 192, 193, 194};
constexpr int kVallecasOld = 181, kVallecasNew = 183;
constexpr int kCorrectionCutoff = 2017;

std::size_t dest_index_of_code(const ODTable& t, int code) {
    for (std::size_t i = 0; i < t.dest_codes.size(); ++i)
        if (t.dest_codes[i] && *t.dest_codes[i] == code) return i;
    return static_cast<std::size_t>(-1);
}

// Index of the destination column for `code`, appending an all-zero column
// when the year's schema predates the neighbourhood.
std::size_t ensure_dest_column(ODTable& t, int code) {
    std::size_t i = dest_index_of_code(t, code);
    if (i != static_cast<std::size_t>(-1)) return i;
    t.dest_labels.push_back(std::to_string(code));
    t.dest_codes.push_back(code);
    for (auto& [origin, counts] : t.rows) counts.push_back(0.0);
    return t.dest_labels.size() - 1;
}

void correct_table(ODTable& t) {
    if (t.year >= kCorrectionCutoff) {
        for (int code : kVicalvaro)
            if (!t.rows.count(code))
                throw validation_error("year " + std::to_string(t.year) +
                                       ": missing Vicálvaro code " + std::to_string(code));
        if (!t.rows.count(kVallecasNew))
            throw validation_error("year " + std::to_string(t.year) +
                                   ": missing Vallecas code " + std::to_string(kVallecasNew));
        return;
    }

    // District 19: every Vicálvaro code carries the mean of the available
    // rows (191 and 192 before 2017), with moves towards any Vicálvaro code
    // collected on the own-code diagonal so they count as 'stay'. The mean
    // rather than the sum keeps the operation idempotent; shares are scale
    // invariant either way.
    std::vector<const std::vector<double>*> present;
    for (int code : kVicalvaro) {
        auto it = t.rows.find(code);
        if (it != t.rows.end()) present.push_back(&it->second);
    }
    if (present.empty())
        throw validation_error("year " + std::to_string(t.year) + ": no Vicálvaro rows to merge");
    std::vector<double> merged(t.dest_labels.size(), 0.0);
    for (const auto* row : present)
        for (std::size_t i = 0; i < merged.size(); ++i) merged[i] += (*row)[i] / present.size();

    for (int code : kVicalvaro) ensure_dest_column(t, code);
    if (merged.size() < t.dest_labels.size()) merged.resize(t.dest_labels.size(), 0.0);
    double intra = 0;
    for (int code : kVicalvaro) {
        std::size_t di = dest_index_of_code(t, code);
        intra += merged[di];
        merged[di] = 0;
    }
    for (int code : kVicalvaro) {
        std::vector<double> row = merged;
        row[dest_index_of_code(t, code)] = intra;
        t.rows[code] = std::move(row);
    }

    // District 18: 183 takes 181's emigration rates, diagonal moved to 183.
    auto it181 = t.rows.find(kVallecasOld);
    if (it181 == t.rows.end())
        throw validation_error("year " + std::to_string(t.year) + ": missing row 181");
    std::size_t d181 = ensure_dest_column(t, kVallecasOld);
    std::size_t d183 = ensure_dest_column(t, kVallecasNew);
    std::vector<double> row = t.rows.at(kVallecasOld);
    row[d183] += row[d181];
    row[d181] = 0;
    t.rows[kVallecasNew] = std::move(row);
}

}  // namespace

void apply_corrections(std::vector<ODTable>& tables, CorrectionsMode mode) {
    if (mode == CorrectionsMode::None) return;
    for (ODTable& t : tables) correct_table(t);
}

GroupShares compute_shares(const ODTable& table, const DestinationMap& destmap) {
    GroupShares out;
    out.year = table.year;
    for (const auto& [origin, counts] : table.rows) {
        std::array<double, 4> sums{0, 0, 0, 0};
        double total = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            double c = counts[i];
            if (c == 0) continue;
            Group g;
            if (table.dest_codes[i]) {
                g = (*table.dest_codes[i] == origin) ? Group::Stay : Group::City;
            } else {
                switch (destmap.labels.at(table.dest_labels[i])) {
                    case DestKind::Stay: g = Group::Stay; break;
                    case DestKind::City: g = Group::City; break;
                    case DestKind::CMadrid: g = Group::CMadrid; break;
                    case DestKind::Outside: g = Group::Outside; break;
                    case DestKind::Ignore: continue;
                }
            }
            sums[static_cast<int>(g)] += c;
            total += c;
        }
        ShareRow row;
        row.movers = total;
        if (total > 0)
            for (int g = 0; g < 4; ++g) row.share[g] = sums[g] / total;
        out.rows.emplace(origin, row);
    }
    return out;
}

void save_shares_csv(const std::vector<GroupShares>& shares, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    out << "year,code,stay,city,cmadrid,outside,movers\n";
    char buf[64];
    for (const auto& ys : shares) {
        for (const auto& [code, row] : ys.rows) {
            out << ys.year << ',' << code;
            for (int g = 0; g < 4; ++g) {
                std::snprintf(buf, sizeof buf, ",%.9f", row.share[g]);
                out << buf;
            }
            std::snprintf(buf, sizeof buf, ",%.9f", row.movers);
            out << buf << '\n';
        }
    }
}

std::vector<GroupShares> load_shares_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("year,code,", 0) != 0)
        throw validation_error(path + ": not a shares CSV");
    std::map<int, GroupShares> by_year;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 7)
            throw validation_error(path + ":" + std::to_string(lineno) + ": expected 7 fields");
        try {
            int year = std::stoi(f[0]);
            int code = std::stoi(f[1]);
            ShareRow row;
            for (int g = 0; g < 4; ++g) row.share[g] = std::stod(f[2 + g]);
            row.movers = std::stod(f[6]);
            auto& ys = by_year[year];
            ys.year = year;
            ys.rows[code] = row;
        } catch (const std::exception&) {
            throw validation_error(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    std::vector<GroupShares> out;
    for (auto& [year, ys] : by_year) out.push_back(std::move(ys));
    return out;
}

void NeighbourhoodRaster::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    char buf[128];
    std::snprintf(buf, sizeof buf, "# grid=%d origin_x=%.17g origin_y=%.17g cell=%.17g\n",
                  grid_size, origin_x, origin_y, cell_size);
    out << buf << "x,y,code\n";
    for (int x = 0; x < grid_size; ++x)
        for (int y = 0; y < grid_size; ++y) out << x << ',' << y << ',' << code_at(x, y) << '\n';
}

NeighbourhoodRaster NeighbourhoodRaster::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    NeighbourhoodRaster r;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# grid=", 0) != 0)
        throw validation_error(path + ": missing raster header");
    if (std::sscanf(line.c_str(), "# grid=%d origin_x=%lg origin_y=%lg cell=%lg", &r.grid_size,
                    &r.origin_x, &r.origin_y, &r.cell_size) != 4)
        throw validation_error(path + ": malformed raster header");
    if (!std::getline(in, line) || line != "x,y,code")
        throw validation_error(path + ": missing column header");
    r.codes.assign(static_cast<std::size_t>(r.grid_size) * r.grid_size, -1);
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int x, y, code;
        if (std::sscanf(line.c_str(), "%d,%d,%d", &x, &y, &code) != 3)
            throw validation_error(path + ":" + std::to_string(lineno) + ": malformed row");
        if (x < 0 || x >= r.grid_size || y < 0 || y >= r.grid_size)
            throw validation_error(path + ":" + std::to_string(lineno) + ": cell out of range");
        r.codes[static_cast<std::size_t>(x) * r.grid_size + y] = code;
    }
    return r;
}

NeighbourhoodRaster rasterize(const NeighbourhoodGeometry& geometry, int grid_size) {
    if (grid_size < 1) throw validation_error("grid size must be >= 1");
    double minx = std::numeric_limits<double>::infinity(), miny = minx;
    double maxx = -minx, maxy = -minx;
    for (const auto& shape : geometry.shapes) {
        for (const auto& poly : shape.polygons) {
            for (const auto& p : poly.outer.points) {
                minx = std::min(minx, p[0]);
                maxx = std::max(maxx, p[0]);
                miny = std::min(miny, p[1]);
                maxy = std::max(maxy, p[1]);
            }
        }
    }
    if (!(minx < maxx) || !(miny < maxy))
        throw validation_error("degenerate geometry bounding box");

    NeighbourhoodRaster r;
    r.grid_size = grid_size;
    double span = std::max(maxx - minx, maxy - miny);
    r.cell_size = span / grid_size;
    r.origin_x = minx - (span - (maxx - minx)) / 2;
    r.origin_y = miny - (span - (maxy - miny)) / 2;
    r.codes.assign(static_cast<std::size_t>(grid_size) * grid_size, -1);

    for (int x = 0; x < grid_size; ++x) {
        double cx = r.origin_x + (x + 0.5) * r.cell_size;
        for (int y = 0; y < grid_size; ++y) {
            double cy = r.origin_y + (y + 0.5) * r.cell_size;
            int assigned = -1;
            for (const auto& shape : geometry.shapes) {  // ascending code
                bool inside = false;
                for (const auto& poly : shape.polygons)
                    if (polygon_contains(poly, cx, cy)) {
                        inside = true;
                        break;
                    }
                if (inside) {
                    assigned = shape.code;
                    break;
                }
            }
            r.codes[static_cast<std::size_t>(x) * grid_size + y] = assigned;
        }
    }

    for (const auto& shape : geometry.shapes) {
        if (shape.polygons.empty()) continue;
        bool covered = std::find(r.codes.begin(), r.codes.end(), shape.code) != r.codes.end();
        if (!covered)
            throw validation_error("neighbourhood " + std::to_string(shape.code) +
                                   " covers no grid cell at resolution " +
                                   std::to_string(grid_size) + "; increase the grid size");
    }
    return r;
}

std::array<ScalarVolume, 4> build_volumes(const std::vector<GroupShares>& shares,
                                          const NeighbourhoodRaster& raster) {
    if (shares.empty()) throw validation_error("no share years provided");
    for (std::size_t i = 1; i < shares.size(); ++i)
        if (shares[i].year != shares[i - 1].year + 1)
            throw validation_error("share years must be consecutive; missing year " +
                                   std::to_string(shares[i - 1].year + 1));

    const int g = raster.grid_size;
    const int years = static_cast<int>(shares.size());
    std::vector<int> shape{g, g, years};
    std::array<ScalarVolume, 4> volumes{ScalarVolume(shape, 0), ScalarVolume(shape, 0),
                                        ScalarVolume(shape, 0), ScalarVolume(shape, 0)};

    VoxelCoord c(3);
    for (int x = 0; x < g; ++x) {
        c[0] = x;
        for (int y = 0; y < g; ++y) {
            c[1] = y;
            int code = raster.code_at(x, y);
            for (int z = 0; z < years; ++z) {
                c[2] = z;
                if (code < 0) {
                    for (auto& v : volumes) v.set_background(c);
                    continue;
                }
                auto it = shares[z].rows.find(code);
                if (it == shares[z].rows.end())
                    throw validation_error("no share row for neighbourhood " +
                                           std::to_string(code) + " in year " +
                                           std::to_string(shares[z].year));
                const ShareRow& row = it->second;
                if (row.movers <= 0) {
                    for (auto& v : volumes) v.set_background(c);
                    continue;
                }
                for (int grp = 0; grp < 4; ++grp)
                    volumes[grp].set(c, static_cast<int>(std::lround(100.0 * row.share[grp])));
            }
        }
    }
    return volumes;
}

}  // namespace topomob
