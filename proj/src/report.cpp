#include "topomob/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace topomob {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    return out;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct Stats {
    double mean = 0, median = 0, stdev = 0, min = 0, max = 0;
    bool single = false;
};

Stats stats_of(std::vector<double> xs) {
    Stats s;
    if (xs.empty()) return s;
    std::sort(xs.begin(), xs.end());
    double sum = 0;
    for (double x : xs) sum += x;
    const std::size_t n = xs.size();
    s.mean = sum / n;
    s.median = (n % 2) ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
    s.min = xs.front();
    s.max = xs.back();
    if (n < 2) {
        s.single = true;
        s.stdev = 0;
    } else {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stdev = std::sqrt(ss / (n - 1));
    }
    return s;
}

constexpr std::array<const char*, 3> kDimColor{"#d62728", "#2ca02c", "#1f77b4"};

}  // namespace

void write_feature_counts(const std::array<Barcode, 4>& barcodes, int importance_threshold,
                          const std::string& path) {
    auto out = open_out(path);
    out << "measure,dim";
    for (const char* g : kGroupNames) out << ',' << g;
    out << '\n';
    for (int dim = 0; dim < 3; ++dim) {
        out << "features,H" << dim;
        for (const auto& bc : barcodes) out << ',' << bc.in_dim(dim).size();
        out << '\n';
    }
    for (int dim = 0; dim < 3; ++dim) {
        out << "important_features,H" << dim;
        for (const auto& bc : barcodes) {
            int n = 0;
            for (const auto* f : bc.in_dim(dim))
                if (f->persistence() > importance_threshold) ++n;
            out << ',' << n;
        }
        out << '\n';
    }
}

void write_descriptive_stats(const std::array<Barcode, 4>& barcodes, const std::string& path) {
    auto out = open_out(path);
    out << "# std_convention=sample\n";
    out << "measure,dim,stat,";
    for (int g = 0; g < 4; ++g) out << kGroupNames[g] << (g == 3 ? '\n' : ',');

    const std::array<const char*, 3> measures{"birth", "death", "persistence"};
    const std::array<const char*, 5> stat_names{"mean", "median", "std", "min", "max"};
    for (int m = 0; m < 3; ++m) {
        for (int dim = 0; dim < 3; ++dim) {
            std::array<Stats, 4> per_group;
            for (int g = 0; g < 4; ++g) {
                std::vector<double> xs;
                for (const auto* f : barcodes[g].in_dim(dim)) {
                    double v = m == 0   ? f->birth
                               : m == 1 ? f->reported_death()
                                        : f->persistence();
                    xs.push_back(v);
                }
                per_group[g] = stats_of(std::move(xs));
            }
            for (int s = 0; s < 5; ++s) {
                out << measures[m] << ",H" << dim << ',' << stat_names[s];
                for (int g = 0; g < 4; ++g) {
                    const Stats& st = per_group[g];
                    double v = s == 0   ? st.mean
                               : s == 1 ? st.median
                               : s == 2 ? st.stdev
                               : s == 3 ? st.min
                                        : st.max;
                    out << ',' << fmt(v);
                    if (s == 2 && st.single) out << " (n=1)";
                }
                out << '\n';
            }
        }
    }
}

std::vector<TopFeatureRow> top_k(const Barcode& barcode, const NeighbourhoodRaster& raster,
                                 int year0, int k) {
    std::vector<TopFeatureRow> rows;
    for (int dim = 0; dim < 3; ++dim) {
        auto feats = barcode.in_dim(dim);
        std::vector<std::size_t> idx(feats.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (feats[a]->persistence() != feats[b]->persistence())
                return feats[a]->persistence() > feats[b]->persistence();
            return feats[a]->birth < feats[b]->birth;
        });
        std::size_t take = std::min<std::size_t>(k, idx.size());
        for (std::size_t i = 0; i < take; ++i) {
            const PersistenceFeature& f = *feats[idx[i]];
            FeatureLocation loc = locate(f, raster, year0);
            rows.push_back({f.dim, f.birth, f.reported_death(), f.persistence(),
                            loc.year_of_birth, loc.year_of_death, loc.nb_of_birth,
                            loc.nb_of_death, kValueMax - f.birth});
        }
    }
    return rows;
}

void write_top_k(const Barcode& barcode, const NeighbourhoodRaster& raster, int year0, int k,
                 const std::string& path) {
    auto out = open_out(path);
    out << "dim,birth,death,persistence,year_of_birth,year_of_death,"
           "neighbourhood_of_birth,neighbourhood_of_death,prevalence_at_birth\n";
    for (const auto& r : top_k(barcode, raster, year0, k)) {
        out << r.dim << ',' << r.birth << ',' << r.death << ',' << r.persistence << ','
            << r.year_of_birth << ',';
        if (r.year_of_death) out << *r.year_of_death;
        out << ',' << r.nb_of_birth << ',';
        if (r.nb_of_death) out << *r.nb_of_death;
        out << ',' << r.prevalence_at_birth << '\n';
    }
}

void render_barcode(const Barcode& barcode, const std::string& path) {
    constexpr int width = 720, margin_left = 50, margin_right = 20, margin_top = 30;
    constexpr int bar_gap = 3, bar_h = 2, band_gap = 18;
    auto xpos = [&](double v) { return margin_left + v / kValueMax * (width - margin_left - margin_right); };

    std::vector<std::vector<const PersistenceFeature*>> bands;
    for (int dim = 0; dim < 3; ++dim) {
        auto feats = barcode.in_dim(dim);
        if (!feats.empty() || dim < barcode.complex_dim) bands.push_back(feats);
    }
    int y = margin_top;
    std::string body;
    char buf[256];
    for (std::size_t band = 0; band < bands.size(); ++band) {
        const char* color = kDimColor[band];
        std::snprintf(buf, sizeof buf,
                      "<text x=\"8\" y=\"%d\" font-size=\"12\" fill=\"%s\">H%zu</text>\n", y + 4,
                      color, band);
        body += buf;
        for (const auto* f : bands[band]) {
            double x0 = xpos(f->birth), x1 = xpos(f->reported_death());
            std::snprintf(buf, sizeof buf,
                          "<line x1=\"%.2f\" y1=\"%d\" x2=\"%.2f\" y2=\"%d\" stroke=\"%s\" "
                          "stroke-width=\"%d\"/>\n",
                          x0, y, x1, y, color, bar_h);
            body += buf;
            if (f->essential()) {
                std::snprintf(buf, sizeof buf,
                              "<circle cx=\"%.2f\" cy=\"%d\" r=\"3\" fill=\"none\" "
                              "stroke=\"%s\"/>\n",
                              x1, y, color);
                body += buf;
            }
            y += bar_gap + bar_h;
        }
        y += band_gap;
    }
    int height = y + 30;

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int tick = 0; tick <= kValueMax; tick += 20) {
        double x = xpos(tick);
        char tb[256];
        std::snprintf(tb, sizeof tb,
                      "<line x1=\"%.2f\" y1=\"%d\" x2=\"%.2f\" y2=\"%d\" stroke=\"#cccccc\" "
                      "stroke-width=\"1\"/>\n<text x=\"%.2f\" y=\"%d\" font-size=\"10\" "
                      "text-anchor=\"middle\" fill=\"#444444\">%d</text>\n",
                      x, margin_top - 12, x, height - 22, x, height - 8, tick);
        out << tb;
    }
    out << body;
    out << "</svg>\n";
}

void render_diagram(const Barcode& barcode, const std::string& path) {
    constexpr int size = 440, margin = 45;
    auto pos = [&](double v) { return margin + v / kValueMax * (size - 2 * margin); };
    auto ypos = [&](double v) { return size - margin - v / kValueMax * (size - 2 * margin); };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    char buf[320];
    for (int tick = 0; tick <= kValueMax; tick += 20) {
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%d\" font-size=\"10\" text-anchor=\"middle\" "
                      "fill=\"#444444\">%d</text>\n<text x=\"%d\" y=\"%.2f\" font-size=\"10\" "
                      "text-anchor=\"end\" fill=\"#444444\">%d</text>\n",
                      pos(tick), size - margin + 16, tick, margin - 8, ypos(tick) + 3, tick);
        out << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#888888\" "
                  "stroke-width=\"1\"/>\n",
                  pos(0), ypos(0), pos(kValueMax), ypos(kValueMax));
    out << buf;
    for (int dim = 0; dim < 3; ++dim) {
        const char* color = kDimColor[dim];
        for (const auto* f : barcode.in_dim(dim)) {
            if (f->essential()) {
                double x = pos(f->birth), y = ypos(kValueMax);
                std::snprintf(buf, sizeof buf,
                              "<path d=\"M %.2f %.2f L %.2f %.2f L %.2f %.2f Z\" fill=\"%s\"/>\n",
                              x, y - 4.0, x - 3.5, y + 3.0, x + 3.5, y + 3.0, color);
            } else {
                std::snprintf(buf, sizeof buf,
                              "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\" "
                              "fill-opacity=\"0.7\"/>\n",
                              pos(f->birth), ypos(*f->death), color);
            }
            out << buf;
        }
    }
    out << "</svg>\n";
}

void write_distributions(const std::array<Barcode, 4>& barcodes, const std::string& path) {
    auto out = open_out(path);
    out << "group,dim,birth,death,persistence\n";
    for (int g = 0; g < 4; ++g) {
        for (const auto& f : barcodes[g].features) {
            out << kGroupNames[g] << ',' << f.dim << ',' << f.birth << ',' << f.reported_death()
                << ',' << f.persistence() << '\n';
        }
    }
}

}  // namespace topomob
