#include <doctest.h>

#include "kpplab/error.hpp"
#include "kpplab/grid.hpp"

using namespace kpplab;

TEST_CASE("symmetric grid geometry") {
  const Grid g = Grid::symmetric(1, 2.0, 0.5);
  CHECK(g.nodes_per_axis() == 9);
  CHECK(g.lower() == doctest::Approx(-2.0));
  CHECK(g.upper() == doctest::Approx(2.0));
  CHECK(g.coord(4) == doctest::Approx(0.0));
  CHECK(g.index_of(0.5) == 5u);
  CHECK_FALSE(g.index_of(0.25).has_value());
  CHECK(g.is_edge(0));
  CHECK(g.is_edge(8));
  CHECK_FALSE(g.is_edge(4));
  CHECK_THROWS_AS(Grid::symmetric(1, 1.0, 0.3), InvalidArgument);
  CHECK_THROWS_AS(Grid::symmetric(3, 1.0, 0.5), InvalidArgument);
}

TEST_CASE("2D flat index is row-major with x fastest") {
  const Grid g = Grid::symmetric(2, 1.0, 0.5);
  REQUIRE(g.size() == 25);
  const Point p = g.point(5 * 1 + 3);
  CHECK(p.x == doctest::Approx(0.5));
  CHECK(p.y == doctest::Approx(-0.5));
  CHECK(g.flat_index_of(Point{0.5, -0.5}) == 8u);
  CHECK(g.is_edge(2));         // bottom row
  CHECK(g.is_edge(5 * 2));     // left column
  CHECK_FALSE(g.is_edge(12));  // centre
  CHECK(g.cell_volume() == doctest::Approx(0.25));
}

TEST_CASE("grid function reductions and centreline") {
  const Grid g = Grid::symmetric(2, 1.0, 1.0);
  GridFunction f(g, 0.0);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k);
  CHECK(f.max() == 8.0);
  CHECK(f.min() == 0.0);
  CHECK(f.edge_max() == 8.0);
  const auto c = f.centerline();
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 3.0);
  CHECK(c[2] == 5.0);
  CHECK(f.all_finite());
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(4, 0.0)), InvalidArgument);
}

TEST_CASE("interval grid") {
  const Grid g = Grid::interval(0.0, 0.1, 11);
  CHECK(g.upper() == doctest::Approx(1.0));
  CHECK(g.extent() == doctest::Approx(1.0));
  CHECK(g.index_of(1.0) == 10u);
}
