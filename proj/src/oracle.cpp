#include "topomob/oracle.hpp"

#include <algorithm>
#include <vector>

namespace topomob {

namespace {

constexpr std::size_t kOracleCellCap = 20000;

// Column-major bit matrix rank over the two-element field.
class BitMatrixRank {
public:
    explicit BitMatrixRank(std::size_t rows) : words_((rows + 63) / 64) {}

    // Feed one column (set row indices); returns true if it was independent.
    bool add_column(const std::vector<std::size_t>& rows) {
        std::vector<std::uint64_t> col(words_, 0);
        for (std::size_t r : rows) col[r >> 6] |= std::uint64_t{1} << (r & 63);
        for (;;) {
            int top = top_bit(col);
            if (top < 0) return false;
            auto it = pivots_.find_slot(top);
            if (it == pivots_.slots.end()) {
                pivots_.slots.push_back({top, std::move(col)});
                return true;
            }
            for (std::size_t w = 0; w < words_; ++w) col[w] ^= it->bits[w];
        }
    }

    int rank() const { return static_cast<int>(pivots_.slots.size()); }

private:
    struct Pivot {
        int row;
        std::vector<std::uint64_t> bits;
    };
    struct PivotSet {
        std::vector<Pivot> slots;
        std::vector<Pivot>::iterator find_slot(int row) {
            return std::find_if(slots.begin(), slots.end(),
                                [row](const Pivot& p) { return p.row == row; });
        }
    };

    int top_bit(const std::vector<std::uint64_t>& col) const {
        for (std::size_t w = words_; w-- > 0;) {
            if (col[w]) return static_cast<int>(w * 64 + (63 - __builtin_clzll(col[w])));
        }
        return -1;
    }

    std::size_t words_;
    PivotSet pivots_;
};

struct SublevelCells {
    // Per dimension: cell ids in the sublevel complex, and id -> dense index.
    std::vector<std::vector<CellId>> cells;
    std::vector<std::size_t> dense;  // indexed by cell id

    SublevelCells(const FilteredComplex& fc, int t) : cells(fc.dim() + 1) {
        if (fc.cell_count() > kOracleCellCap)
            throw validation_error("complex too large for the brute-force oracle");
        dense.assign(fc.cell_capacity(), 0);
        for (CellId c = 0; c < fc.cell_capacity(); ++c) {
            if (!fc.cell_exists(c) || fc.cell_g(c) > t) continue;
            int k = fc.cell_dim(c);
            dense[c] = cells[k].size();
            cells[k].push_back(c);
        }
    }
};

}  // namespace

std::array<int, 3> betti_bruteforce(const FilteredComplex& fc, int t) {
    const int d = fc.dim();
    SublevelCells sub(fc, t);

    std::vector<int> rank(d + 2, 0);  // rank[k] = rank of boundary_k
    CellId face_ids[6];
    int n_faces = 0;
    for (int k = 1; k <= d; ++k) {
        BitMatrixRank elim(sub.cells[k - 1].size());
        std::vector<std::size_t> rows;
        for (CellId c : sub.cells[k]) {
            fc.faces_of(c, face_ids, &n_faces);
            rows.clear();
            for (int i = 0; i < n_faces; ++i) rows.push_back(sub.dense[face_ids[i]]);
            elim.add_column(rows);
        }
        rank[k] = elim.rank();
    }

    std::array<int, 3> betti{0, 0, 0};
    for (int k = 0; k <= std::min(d, 2); ++k) {
        int n_k = static_cast<int>(sub.cells[k].size());
        betti[k] = n_k - rank[k] - rank[k + 1];
    }
    return betti;
}

int components_bruteforce(const FilteredComplex& fc, int t) {
    SublevelCells sub(fc, t);
    std::vector<CellId> all;
    for (const auto& layer : sub.cells) all.insert(all.end(), layer.begin(), layer.end());
    if (all.empty()) return 0;

    std::vector<std::uint8_t> seen(fc.cell_capacity(), 0);
    // Adjacency via the face relation in both directions: visit faces of each
    // cell, and cells whose face set contains the current cell. The latter is
    // covered by seeding traversal from every cell.
    int components = 0;
    std::vector<CellId> stack;
    CellId face_ids[6];
    int n_faces = 0;

    // cofaces: build reverse adjacency once
    std::vector<std::vector<CellId>> cofaces(fc.cell_capacity());
    for (CellId c : all) {
        fc.faces_of(c, face_ids, &n_faces);
        for (int i = 0; i < n_faces; ++i) cofaces[face_ids[i]].push_back(c);
    }

    for (CellId seed : all) {
        if (seen[seed]) continue;
        ++components;
        stack.push_back(seed);
        seen[seed] = 1;
        while (!stack.empty()) {
            CellId c = stack.back();
            stack.pop_back();
            fc.faces_of(c, face_ids, &n_faces);
            for (int i = 0; i < n_faces; ++i) {
                CellId f = face_ids[i];
                if (fc.cell_g(f) <= t && !seen[f]) {
                    seen[f] = 1;
                    stack.push_back(f);
                }
            }
            for (CellId co : cofaces[c]) {
                if (!seen[co]) {
                    seen[co] = 1;
                    stack.push_back(co);
                }
            }
        }
    }
    return components;
}

}  // namespace topomob
