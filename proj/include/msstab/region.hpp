#pragma once

// Raster scans of stability regions in the (x, Y) = (lambda h, mu^2 h) plane.

#include <string_view>
#include <vector>

#include "msstab/schemes.hpp"
#include "msstab/verdict.hpp"

namespace msstab {

/// Cell-centred grid over [x_min, x_max] x [y_min, y_max].
struct RegionGrid {
  double x_min = -8, x_max = 0;
  double y_min = 0, y_max = 16;
  std::size_t nx = 400, ny = 400;

  double x(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * (x_max - x_min) / nx; }
  double Y(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * (y_max - y_min) / ny; }
  void validate() const;
};

struct RegionCell {
  double x, Y;
  std::string_view scheme;  // scheme token or "sde"
  Status verdict;
};

/// Real test equation stability at (x, Y): Y < -2x.
Status sde_region_status(double x, double Y, const Tolerances& tol = {});

Status classify_xy(Scheme s, double x, double Y, const Tolerances& tol = {});

/// Rows ordered by x index, then Y index, then scheme, with "sde" last.
std::vector<RegionCell> scan_region(const std::vector<Scheme>& schemes, const RegionGrid& grid, unsigned threads = 0,
                                    const Tolerances& tol = {});

}  // namespace msstab
