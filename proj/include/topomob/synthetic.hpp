#pragma once

// Deterministic demo city: an L-shaped 6 km square of eight neighbourhoods
// (codes 11..13, 21..23, 31..32) with a detached exclave for 11 and a hole
// in 21, plus twenty years of origin-destination tables with planted
// structure (a stay enclave, a city cavity, group-specific hotspots, a
// zero-mover year and rounding-slack rows).
//
// Written as a ready-to-run input directory: geometry.geojson, od/od_<year>.csv,
// destinations.map and synth.conf.

#include <string>

namespace topomob {

void write_synthetic_city(const std::string& dir, int grid_size = 30);

}  // namespace topomob
