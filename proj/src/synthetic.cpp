#include "topomob/synthetic.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "topomob/grid.hpp"

namespace topomob {

namespace {

constexpr int kYear0 = 2004, kYears = 20;
constexpr double kBlock = 2000.0;  // neighbourhood block size in metres

struct Row {
    int stay, city, cm, out;  // mover counts; rows summing 100 read as percent
};

// Planted mover counts for one neighbourhood-year. Baseline is (50,25,15,10).
Row shares_for(int code, int year) {
    const int z = year - kYear0;
    // Stay enclave in 22 (2009-2011, peak 2010); its dip shows up as small
    // cavities in the other three groups.
    if (code == 22 && z >= 5 && z <= 7) {
        return (z == 6) ? Row{88, 10, 1, 1} : Row{85, 12, 2, 1};
    }
    // City collapse in 22 (2015-2017): the planted city cavity.
    if (code == 22 && z >= 11 && z <= 13) return {65, 5, 20, 10};
    // City hotspot in 21 (2008-2009).
    if (code == 21 && (z == 4 || z == 5)) return {25, 60, 10, 5};
    // Regional-move hotspot in 11 (2004-2006).
    if (code == 11 && z <= 2) return {40, 15, 40, 5};
    // Leaving-the-region hotspot in 23 (2020-2022).
    if (code == 23 && z >= 16 && z <= 18) return {40, 15, 10, 35};
    // Zero-mover year for 31.
    if (code == 31 && year == 2010) return {0, 0, 0, 0};
    // Rounding-slack rows for 32: totals that do not divide 100.
    if (code == 32 && year == 2012) return {3, 2, 1, 1};
    if (code == 32 && year == 2013) return {1, 1, 1, 0};
    // Mild texture in the outer neighbourhoods, traded between stay and
    // cmadrid so the city group stays flat.
    if (code == 13 || code == 31 || code == 32) {
        int v = (code * 7 + year * 13) % 5 - 2;
        return {50 + v, 25, 15 - v, 10};
    }
    return {50, 25, 15, 10};
}

std::string block_polygon(double x0, double y0, double x1, double y1) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "[[[%g,%g],[%g,%g],[%g,%g],[%g,%g],[%g,%g]]]", x0, y0, x1, y0,
                  x1, y1, x0, y1, x0, y0);
    return buf;
}

}  // namespace

void write_synthetic_city(const std::string& dir, int grid_size) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::create_directories(dir + "/od");

    {
        std::ofstream out(dir + "/geometry.geojson");
        if (!out) throw validation_error("cannot write " + dir + "/geometry.geojson");
        out << "{\"type\":\"FeatureCollection\",\"features\":[\n";
        bool first = true;
        auto emit = [&](int code, const std::string& name, const std::string& geom) {
            if (!first) out << ",\n";
            first = false;
            out << "{\"type\":\"Feature\",\"properties\":{\"code\":" << code << ",\"name\":\""
                << name << "\"},\"geometry\":" << geom << "}";
        };
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                int code = (r + 1) * 10 + (c + 1);
                if (code == 33) continue;  // L-shaped city: the corner is open land
                double x0 = r * kBlock, y0 = c * kBlock;
                std::string rings = block_polygon(x0, y0, x0 + kBlock, y0 + kBlock);
                if (code == 11) {
                    // Detached exclave in the open corner.
                    std::string exclave = block_polygon(4500, 4500, 5500, 5500);
                    emit(code, "nb" + std::to_string(code),
                         "{\"type\":\"MultiPolygon\",\"coordinates\":[" + rings + "," + exclave +
                             "]}");
                } else if (code == 21) {
                    // Hole: unassigned land inside the neighbourhood.
                    std::string outer = rings.substr(1, rings.size() - 2);
                    std::string hole =
                        "[[2850,850],[3150,850],[3150,1150],[2850,1150],[2850,850]]";
                    emit(code, "nb21",
                         "{\"type\":\"Polygon\",\"coordinates\":[" + outer + "," + hole + "]}");
                } else {
                    emit(code, "nb" + std::to_string(code),
                         "{\"type\":\"Polygon\",\"coordinates\":" + rings + "}");
                }
            }
        }
        out << "\n]}\n";
    }

    {
        std::ofstream out(dir + "/destinations.map");
        out << "# destination-column mapping for the synthetic city\n"
            << "version = 1\n"
            << "CM_OTHER = cmadrid\n"
            << "ES_OTHER = outside\n"
            << "ABROAD = outside\n";
    }

    const std::array<int, 8> codes{11, 12, 13, 21, 22, 23, 31, 32};
    for (int year = kYear0; year < kYear0 + kYears; ++year) {
        std::ofstream out(dir + "/od/od_" + std::to_string(year) + ".csv");
        if (!out) throw validation_error("cannot write OD table for " + std::to_string(year));
        out << "year;origin";
        for (int c : codes) out << ';' << c;
        out << ";CM_OTHER;ES_OTHER;ABROAD\n";
        for (std::size_t i = 0; i < codes.size(); ++i) {
            int origin = codes[i];
            Row r = shares_for(origin, year);
            // 'city' movers all head to the next neighbourhood in the list;
            // only the group totals matter for shares.
            int partner = codes[(i + 1) % codes.size()];
            std::map<int, int> dest;
            dest[origin] = r.stay;
            dest[partner] += r.city;
            out << year << ';' << origin;
            for (int c : codes) out << ';' << (dest.count(c) ? dest[c] : 0);
            int abroad = r.out / 2;
            out << ';' << r.cm << ';' << (r.out - abroad) << ';' << abroad << '\n';
        }
    }

    {
        std::ofstream out(dir + "/synth.conf");
        out << "geometry = " << dir << "/geometry.geojson\n"
            << "od_dir = " << dir << "/od\n"
            << "destination_map = " << dir << "/destinations.map\n"
            << "year_start = " << kYear0 << "\n"
            << "year_end = " << (kYear0 + kYears - 1) << "\n"
            << "grid_size = " << grid_size << "\n"
            << "corrections = none\n"
            << "out_dir = " << dir << "/out\n";
    }
}

}  // namespace topomob
