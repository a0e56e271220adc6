#include "topomob/reduction.hpp"

#include <algorithm>
#include <climits>
#include <fstream>
#include <sstream>

namespace topomob {

namespace {

using Pos = std::uint32_t;
constexpr Pos kNoPos = 0xffffffffu;

struct RawPair {
    int dim;              // homology dimension
    CellId birth, death;  // death == kNoCell for essential
    Pos birth_pos;
};

// Symmetric difference of two ascending position lists.
void add_column(std::vector<Pos>& col, const std::vector<Pos>& other, std::vector<Pos>& tmp) {
    tmp.clear();
    auto a = col.begin(), ae = col.end();
    auto b = other.begin(), be = other.end();
    while (a != ae && b != be) {
        if (*a < *b)
            tmp.push_back(*a++);
        else if (*b < *a)
            tmp.push_back(*b++);
        else {
            ++a;
            ++b;
        }
    }
    tmp.insert(tmp.end(), a, ae);
    tmp.insert(tmp.end(), b, be);
    col.swap(tmp);
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n, kNoPos) {}

    Pos find(Pos x) {
        if (parent_[x] == kNoPos) parent_[x] = x;
        Pos root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            Pos next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    // Returns the surviving (older, i.e. smaller-position) root.
    Pos unite(Pos a, Pos b) {
        Pos keep = std::min(a, b), gone = std::max(a, b);
        parent_[gone] = keep;
        return keep;
    }

private:
    std::vector<Pos> parent_;
};

}  // namespace

Barcode compute_persistence(const FilteredComplex& fc) {
    const int d = fc.dim();
    const std::size_t n_cells = fc.cell_count();

    // Global filtration order: ascending (g, dim, anchor, extent).
    std::vector<std::pair<std::uint64_t, CellId>> keyed;
    keyed.reserve(n_cells);
    for (CellId c = 0; c < fc.cell_capacity(); ++c)
        if (fc.cell_exists(c)) keyed.emplace_back(fc.order_key(c), c);
    std::sort(keyed.begin(), keyed.end());

    std::vector<CellId> cell_at(n_cells);
    std::vector<Pos> pos_of(fc.cell_capacity(), kNoPos);
    for (std::size_t p = 0; p < keyed.size(); ++p) {
        cell_at[p] = keyed[p].second;
        pos_of[keyed[p].second] = static_cast<Pos>(p);
    }

    std::vector<std::vector<Pos>> by_dim(d + 1);
    for (std::size_t p = 0; p < n_cells; ++p)
        by_dim[fc.cell_dim(cell_at[p])].push_back(static_cast<Pos>(p));

    std::vector<RawPair> pairs;
    std::vector<std::uint8_t> cleared(n_cells, 0);

    // Matrix passes, top dimension down to 2.
    std::vector<Pos> owner_col;  // pivot position -> slot in stored columns
    std::vector<std::vector<Pos>> stored;
    std::vector<Pos> col, tmp;
    CellId face_ids[6];
    int n_faces = 0;

    for (int k = d; k >= 2; --k) {
        owner_col.assign(n_cells, kNoPos);
        stored.clear();
        int last_g = -1;
        for (Pos p : by_dim[k]) {
            CellId cell = cell_at[p];
            int g = fc.cell_g(cell);
            TOPOMOB_CHECK(g >= last_g, "filtration order not monotone in g");
            last_g = g;
            if (cleared[p]) continue;
            fc.faces_of(cell, face_ids, &n_faces);
            col.clear();
            for (int i = 0; i < n_faces; ++i) col.push_back(pos_of[face_ids[i]]);
            std::sort(col.begin(), col.end());
            while (!col.empty()) {
                Pos pivot = col.back();
                Pos slot = owner_col[pivot];
                if (slot == kNoPos) break;
                add_column(col, stored[slot], tmp);
            }
            if (!col.empty()) {
                Pos pivot = col.back();
                owner_col[pivot] = static_cast<Pos>(stored.size());
                stored.push_back(col);
                cleared[pivot] = 1;
                pairs.push_back({k - 1, cell_at[pivot], cell, pivot});
            } else {
                // Positive k-cell. For k == d this would be a d-cycle, which
                // cannot exist in a grid-embedded complex.
                TOPOMOB_CHECK(k < d, "positive top-dimensional cell");
                pairs.push_back({k, cell, kNoCell, p});
            }
        }
    }

    // Dimension 0 via union-find over vertices, edges in filtration order.
    // Produces the same pairing as column reduction of the vertex-edge
    // boundary: the elder (smaller-position) component root survives a merge.
    if (d >= 1) {
        UnionFind uf(n_cells);
        CellId vpair[6];
        int nv = 0;
        int last_g = -1;
        for (Pos p : by_dim[1]) {
            CellId edge = cell_at[p];
            int g = fc.cell_g(edge);
            TOPOMOB_CHECK(g >= last_g, "filtration order not monotone in g");
            last_g = g;
            if (cleared[p]) continue;  // pivot of a 2-column: positive, already paired
            fc.faces_of(edge, vpair, &nv);
            TOPOMOB_CHECK(nv == 2, "edge without two vertices");
            Pos ra = uf.find(pos_of[vpair[0]]);
            Pos rb = uf.find(pos_of[vpair[1]]);
            if (ra == rb) {
                pairs.push_back({1, edge, kNoCell, p});  // essential 1-cycle
            } else {
                Pos dying = std::max(ra, rb);
                uf.unite(ra, rb);
                pairs.push_back({0, cell_at[dying], edge, dying});
            }
        }
        for (Pos p : by_dim[0]) {
            if (uf.find(p) == p) pairs.push_back({0, cell_at[p], kNoCell, p});
        }
    }

    Barcode out;
    out.complex_dim = d;
    for (const RawPair& rp : pairs) {
        if (rp.dim > d - 1) continue;  // volume analyses report H_0..H_{d-1}
        PersistenceFeature f;
        f.dim = rp.dim;
        f.birth = fc.cell_g(rp.birth);
        f.birth_cell = rp.birth;
        f.birth_voxel = fc.voxel_coord(fc.cell_provenance(rp.birth));
        if (rp.death != kNoCell) {
            f.death = fc.cell_g(rp.death);
            f.death_cell = rp.death;
            f.death_voxel = fc.voxel_coord(fc.cell_provenance(rp.death));
            if (*f.death == f.birth) {
                ++out.zero_pairs_dropped;
                continue;
            }
        }
        out.features.push_back(std::move(f));
    }

    std::vector<std::size_t> perm(out.features.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    auto death_key = [](const PersistenceFeature& f) { return f.death ? *f.death : INT_MAX; };
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        const auto& fa = out.features[a];
        const auto& fb = out.features[b];
        if (fa.dim != fb.dim) return fa.dim < fb.dim;
        if (fa.birth != fb.birth) return fa.birth < fb.birth;
        if (death_key(fa) != death_key(fb)) return death_key(fa) < death_key(fb);
        return pos_of[fa.birth_cell] < pos_of[fb.birth_cell];
    });
    std::vector<PersistenceFeature> sorted;
    sorted.reserve(out.features.size());
    for (std::size_t i : perm) sorted.push_back(std::move(out.features[i]));
    out.features = std::move(sorted);
    return out;
}

std::vector<const PersistenceFeature*> Barcode::in_dim(int dim) const {
    std::vector<const PersistenceFeature*> out;
    for (const auto& f : features)
        if (f.dim == dim) out.push_back(&f);
    return out;
}

std::array<int, 3> betti_at(const Barcode& barcode, int t) {
    std::array<int, 3> b{0, 0, 0};
    for (const auto& f : barcode.features) {
        if (f.birth <= t && (f.essential() || t < *f.death)) ++b[f.dim];
    }
    return b;
}

DiagramPoints diagram_points(const Barcode& barcode, int dim) {
    if (dim < 0 || dim > 2) throw validation_error("diagram dimension must be 0, 1 or 2");
    DiagramPoints out;
    for (const auto& f : barcode.features) {
        if (f.dim != dim) continue;
        if (f.essential())
            out.essential_births.push_back(f.birth);
        else
            out.finite.emplace_back(f.birth, *f.death);
    }
    return out;
}

void save_barcode_csv(const Barcode& barcode, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    out << "dim,birth,death,persistence,bx,by,bz,dx,dy,dz\n";
    auto coords = [&out](const VoxelCoord& c) {
        for (int i = 0; i < 3; ++i) {
            out << ',';
            if (i < static_cast<int>(c.size())) out << c[i];
        }
    };
    for (const auto& f : barcode.features) {
        out << f.dim << ',' << f.birth << ',' << f.reported_death() << ',' << f.persistence();
        coords(f.birth_voxel);
        if (f.death_voxel) {
            coords(*f.death_voxel);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
}

Barcode load_barcode_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("dim,birth,death", 0) != 0)
        throw validation_error(path + ": not a barcode CSV");
    Barcode out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        f.resize(10);
        auto where = [&] { return path + ":" + std::to_string(lineno); };
        try {
            PersistenceFeature pf;
            pf.dim = std::stoi(f[0]);
            pf.birth = std::stoi(f[1]);
            for (int i = 4; i < 7; ++i)
                if (!f[i].empty()) pf.birth_voxel.push_back(std::stoi(f[i]));
            if (!f[7].empty()) {
                pf.death = std::stoi(f[2]);
                VoxelCoord dv;
                for (int i = 7; i < 10; ++i)
                    if (!f[i].empty()) dv.push_back(std::stoi(f[i]));
                pf.death_voxel = dv;
            }
            out.complex_dim = std::max(out.complex_dim, pf.dim + 1);
            out.features.push_back(std::move(pf));
        } catch (const std::exception&) {
            throw validation_error(where() + ": malformed barcode row");
        }
    }
    return out;
}

}  // namespace topomob
