#pragma once

#include <vector>

#include "benthic/geometry.hpp"

namespace benthic {

// All grid cells touched by the segment between the centers of a and b,
// in order from a to b. When the segment passes exactly through a cell
// corner, both side cells are included.
std::vector<CellIndex> supercover_line(CellIndex a, CellIndex b);

}  // namespace benthic
