#include "topomob/grid.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace topomob {

ScalarVolume::ScalarVolume(std::vector<int> shape, int fill) : shape_(std::move(shape)) {
    if (shape_.empty()) throw validation_error("volume shape must not be empty");
    for (int n : shape_)
        if (n < 1) throw validation_error("volume shape entries must be >= 1");
    if (fill < 0 || fill > kValueMax)
        throw validation_error("fill value " + std::to_string(fill) + " outside [0,100]");

    strides_.assign(shape_.size(), 1);
    for (int i = static_cast<int>(shape_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * static_cast<std::size_t>(shape_[i + 1]);
    std::size_t total = strides_[0] * static_cast<std::size_t>(shape_[0]);
    values_.assign(total, static_cast<std::uint8_t>(fill));
    background_.assign(total, 0);
}

bool ScalarVolume::in_bounds(const VoxelCoord& c) const {
    if (c.size() != shape_.size()) return false;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] < 0 || c[i] >= shape_[i]) return false;
    return true;
}

std::size_t ScalarVolume::linear_index(const VoxelCoord& c) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < c.size(); ++i) idx += strides_[i] * static_cast<std::size_t>(c[i]);
    return idx;
}

VoxelCoord ScalarVolume::coord_of(std::size_t linear) const {
    VoxelCoord c(shape_.size());
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        c[i] = static_cast<int>(linear / strides_[i]);
        linear %= strides_[i];
    }
    return c;
}

std::size_t ScalarVolume::checked_index(const VoxelCoord& c) const {
    if (!in_bounds(c)) {
        std::ostringstream os;
        os << "voxel coordinate (";
        for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
        os << ") out of bounds";
        throw validation_error(os.str());
    }
    return linear_index(c);
}

void ScalarVolume::set(const VoxelCoord& c, int value) {
    if (value < 0 || value > kValueMax)
        throw validation_error("voxel value " + std::to_string(value) + " outside [0,100]");
    std::size_t i = checked_index(c);
    values_[i] = static_cast<std::uint8_t>(value);
    background_[i] = 0;
}

void ScalarVolume::set_background(const VoxelCoord& c) {
    std::size_t i = checked_index(c);
    background_[i] = 1;
    values_[i] = 0;
}

std::size_t ScalarVolume::background_count() const {
    return static_cast<std::size_t>(
        std::accumulate(background_.begin(), background_.end(), std::size_t{0}));
}

void ScalarVolume::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open " + path + " for writing");
    out << "shape=";
    for (std::size_t i = 0; i < shape_.size(); ++i) out << (i ? "," : "") << shape_[i];
    out << "\n";
    std::size_t row = static_cast<std::size_t>(shape_.back());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i % row) out << ' ';
        if (background_[i])
            out << -1;
        else
            out << static_cast<int>(values_[i]);
        if ((i + 1) % row == 0) out << '\n';
    }
    if (!out) throw validation_error("failed writing " + path);
}

ScalarVolume ScalarVolume::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("shape=", 0) != 0)
        throw validation_error(path + ": missing shape= header");
    std::vector<int> shape;
    {
        std::stringstream ss(header.substr(6));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                shape.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw validation_error(path + ": bad shape entry '" + tok + "'");
            }
        }
    }
    ScalarVolume v(shape, 0);
    for (std::size_t i = 0; i < v.values_.size(); ++i) {
        int x;
        if (!(in >> x)) throw validation_error(path + ": truncated value section");
        if (x == -1) {
            v.background_[i] = 1;
        } else if (x >= 0 && x <= kValueMax) {
            v.values_[i] = static_cast<std::uint8_t>(x);
        } else {
            throw validation_error(path + ": value " + std::to_string(x) + " outside [0,100]");
        }
    }
    int extra;
    if (in >> extra) throw validation_error(path + ": trailing data after value section");
    return v;
}

std::vector<VoxelCoord> neighbours(const VoxelCoord& coord, const std::vector<int>& shape,
                                   Connectivity conn) {
    const std::size_t d = shape.size();
    if (coord.size() != d) throw validation_error("coordinate/shape dimension mismatch");
    for (std::size_t i = 0; i < d; ++i)
        if (coord[i] < 0 || coord[i] >= shape[i]) throw validation_error("coordinate out of bounds");

    std::vector<VoxelCoord> out;
    if (conn == Connectivity::Face) {
        VoxelCoord c = coord;
        for (std::size_t i = 0; i < d; ++i) {
            for (int step : {-1, 1}) {
                c[i] = coord[i] + step;
                if (c[i] >= 0 && c[i] < shape[i]) out.push_back(c);
            }
            c[i] = coord[i];
        }
        return out;
    }
    // Full connectivity: odometer over {-1,0,1}^d, skipping the zero offset.
    std::vector<int> off(d, -1);
    for (;;) {
        bool zero = true, ok = true;
        VoxelCoord c(d);
        for (std::size_t i = 0; i < d; ++i) {
            if (off[i] != 0) zero = false;
            c[i] = coord[i] + off[i];
            if (c[i] < 0 || c[i] >= shape[i]) ok = false;
        }
        if (!zero && ok) out.push_back(c);
        std::size_t k = 0;
        while (k < d && off[k] == 1) off[k++] = -1;
        if (k == d) break;
        ++off[k];
    }
    return out;
}

}  // namespace topomob
