#pragma once

// Independent ground truth for small complexes: Betti numbers by dense
// Gaussian elimination on explicitly materialized boundary matrices, and
// component counts by graph traversal. Deliberately unoptimized; used to
// validate the reduction module.

#include <array>

#include "topomob/tconstruction.hpp"

namespace topomob {

// b_k = dim ker boundary_k - rank boundary_{k+1} over the two-element field,
// for the sublevel subcomplex at t. Requires <= 20000 cells in the complex.
std::array<int, 3> betti_bruteforce(const FilteredComplex& complex, int t);

// Connected components of the sublevel subcomplex via the face relation.
int components_bruteforce(const FilteredComplex& complex, int t);

}  // namespace topomob
