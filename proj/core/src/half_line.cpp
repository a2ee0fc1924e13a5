#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "kpplab/error.hpp"
#include "kpplab/solver.hpp"

namespace kpplab {

std::vector<LinearSnapshot> solve_half_line(double diffusivity, double rate, const GridFunction& v0,
                                            const std::function<double(double)>& boundary, HalfLineSide side,
                                            std::span<const double> times, std::optional<double> dt) {
  const Grid& grid = v0.grid();
  if (grid.dim() != 1) throw InvalidArgument("half-line problems are one-dimensional");
  if (!(diffusivity > 0.0)) throw InvalidArgument("diffusivity must be positive");
  if (!boundary) throw InvalidArgument("boundary trace is empty");
  const std::size_t n = grid.nodes_per_axis();
  if (n < 3) throw InvalidArgument("half-line grid needs at least three nodes");
  const std::size_t wall = side == HalfLineSide::right ? 0 : n - 1;
  const std::size_t far = side == HalfLineSide::right ? n - 1 : 0;
  if (std::abs(grid.coord(wall)) > 1e-9 * grid.h()) {
    throw InvalidArgument(fmt::format("the Dirichlet wall must sit at x = 0, found {}", grid.coord(wall)));
  }

  const double h2 = grid.h() * grid.h();
  const double limit = h2 / (2.0 * diffusivity);
  double step = dt.value_or(0.9 * limit);
  if (step > limit * (1.0 + 1e-12)) {
    throw NumericalError(fmt::format("stability violation: dt = {} exceeds h^2/(2a) = {}", step, limit));
  }

  auto rhs_of = [&](const GridFunction& v) {
    GridFunction r(grid);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      r[i] = diffusivity * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2 + rate * v[i];
    }
    return r;
  };

  GridFunction v = v0;
  v[far] = 0.0;
  std::vector<double> next(n);
  std::vector<LinearSnapshot> out;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw InvalidArgument("half-line snapshot times must be nondecreasing");
    if (target > t) {
      const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((target - t) / step - 1e-9)));
      const double sub = (target - t) / static_cast<double>(steps);
      for (std::size_t s = 0; s < steps; ++s) {
        const double t_next = t + static_cast<double>(s + 1) * sub;
        for (std::size_t i = 1; i + 1 < n; ++i) {
          next[i] = v[i] + sub * (diffusivity * (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2 + rate * v[i]);
        }
        for (std::size_t i = 1; i + 1 < n; ++i) v[i] = next[i];
        v[wall] = boundary(t_next);
        v[far] = 0.0;
        if (!std::isfinite(v[n / 2])) throw NumericalError(fmt::format("non-finite half-line state at t = {}", t_next));
      }
      t = target;
    }
    out.push_back(LinearSnapshot{t, v, rhs_of(v)});
  }
  return out;
}

}  // namespace kpplab
