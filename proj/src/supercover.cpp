#include "benthic/supercover.hpp"

#include <cstdlib>

namespace benthic {

std::vector<CellIndex> supercover_line(CellIndex a, CellIndex b) {
  std::vector<CellIndex> cells;
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x);
  const int dy = std::abs(b.y - a.y);
  const int xstep = b.x > a.x ? 1 : -1;
  const int ystep = b.y > a.y ? 1 : -1;
  const int ddx = 2 * dx;
  const int ddy = 2 * dy;

  cells.reserve(static_cast<size_t>(dx + dy + 2));
  cells.push_back({x, y});

  if (ddx >= ddy) {
    int error = dx;
    int errorprev = error;
    for (int i = 0; i < dx; ++i) {
      x += xstep;
      error += ddy;
      if (error > ddx) {
        y += ystep;
        error -= ddx;
        if (error + errorprev < ddx) {
          cells.push_back({x, y - ystep});
        } else if (error + errorprev > ddx) {
          cells.push_back({x - xstep, y});
        } else {
          // exact corner crossing: both side cells are touched
          cells.push_back({x, y - ystep});
          cells.push_back({x - xstep, y});
        }
      }
      cells.push_back({x, y});
      errorprev = error;
    }
  } else {
    int error = dy;
    int errorprev = error;
    for (int i = 0; i < dy; ++i) {
      y += ystep;
      error += ddx;
      if (error > ddy) {
        x += xstep;
        error -= ddy;
        if (error + errorprev < ddy) {
          cells.push_back({x - xstep, y});
        } else if (error + errorprev > ddy) {
          cells.push_back({x, y - ystep});
        } else {
          cells.push_back({x - xstep, y});
          cells.push_back({x, y - ystep});
        }
      }
      cells.push_back({x, y});
      errorprev = error;
    }
  }
  return cells;
}

}  // namespace benthic
