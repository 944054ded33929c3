#include "msstab/region.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "msstab/errors.hpp"
#include "msstab/scalar_stability.hpp"

namespace msstab {

void RegionGrid::validate() const {
  if (nx == 0 || ny == 0) throw Error(ErrorCode::InvalidArgument, "grid resolution must be positive");
  if (!(x_max > x_min) || !(y_max > y_min)) throw Error(ErrorCode::InvalidArgument, "empty grid bounds");
  if (y_min < 0) throw Error(ErrorCode::InvalidArgument, "Y = mu^2 h cannot be negative");
}

Status sde_region_status(double x, double Y, const Tolerances& tol) {
  const double m = -2 * x - Y;
  if (std::abs(m) <= tol.marginal * std::max(1.0, std::abs(x) + Y)) return Status::Marginal;
  return m > 0 ? Status::Stable : Status::Unstable;
}

Status classify_xy(Scheme s, double x, double Y, const Tolerances& tol) {
  const auto rc = reduce_xy<double>(catalog(s), x, std::sqrt(Y));
  return theorem_conditions(rc, tol).status;
}

std::vector<RegionCell> scan_region(const std::vector<Scheme>& schemes, const RegionGrid& grid, unsigned threads,
                                    const Tolerances& tol) {
  grid.validate();
  const std::size_t per_cell = schemes.size() + 1;
  std::vector<RegionCell> out(grid.nx * grid.ny * per_cell);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < grid.nx && !failed;) {
        const double x = grid.x(i);
        for (std::size_t j = 0; j < grid.ny; ++j) {
          const double Y = grid.Y(j);
          std::size_t at = (i * grid.ny + j) * per_cell;
          for (Scheme s : schemes) out[at++] = {x, Y, to_string(s), classify_xy(s, x, Y, tol)};
          out[at] = {x, Y, "sde", sde_region_status(x, Y, tol)};
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, grid.nx));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace msstab
