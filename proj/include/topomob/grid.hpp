#pragma once

// d-dimensional integer grayscale volumes with a background mask.
//
// Values are quantized percentages in [0,100]; background voxels carry no
// value and never enter any filtration. Storage is row-major (first axis
// slowest) with precomputed strides.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace topomob {

using VoxelCoord = std::vector<int>;

// Thrown for malformed inputs (bad files, out-of-range values, bad flags).
// The CLI maps this to exit code 1; anything else is an internal error (2).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Internal consistency failure; maps to exit code 2 in the CLI.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

#define TOPOMOB_CHECK(cond, msg)                                             \
    do {                                                                     \
        if (!(cond)) throw ::topomob::internal_error(std::string("check failed: ") + (msg)); \
    } while (0)

constexpr int kValueMax = 100;

enum class Connectivity { Face, Full };

class ScalarVolume {
public:
    // All voxels set to `fill`, none background.
    ScalarVolume(std::vector<int> shape, int fill);

    int dim() const { return static_cast<int>(shape_.size()); }
    const std::vector<int>& shape() const { return shape_; }
    std::size_t voxel_count() const { return values_.size(); }

    bool in_bounds(const VoxelCoord& c) const;
    std::size_t linear_index(const VoxelCoord& c) const;
    VoxelCoord coord_of(std::size_t linear) const;

    int value_at(const VoxelCoord& c) const { return values_[checked_index(c)]; }
    int value_at_linear(std::size_t i) const { return values_[i]; }
    bool is_background(const VoxelCoord& c) const { return background_[checked_index(c)]; }
    bool is_background_linear(std::size_t i) const { return background_[i] != 0; }

    void set(const VoxelCoord& c, int value);
    void set_background(const VoxelCoord& c);

    std::size_t background_count() const;

    // Grid file: one-line header "shape=n1,n2,...,nd", then values row-major
    // (last axis contiguous per line), background written as -1.
    void save(const std::string& path) const;
    static ScalarVolume load(const std::string& path);

private:
    std::size_t checked_index(const VoxelCoord& c) const;

    std::vector<int> shape_;
    std::vector<std::size_t> strides_;
    std::vector<std::uint8_t> values_;
    std::vector<std::uint8_t> background_;
};

// Neighbours of `coord` in a grid of the given shape. Face connectivity
// yields up to 2d results, full (diagonal included) up to 3^d - 1; all
// results are in bounds and distinct.
std::vector<VoxelCoord> neighbours(const VoxelCoord& coord, const std::vector<int>& shape,
                                   Connectivity conn);

}  // namespace topomob
