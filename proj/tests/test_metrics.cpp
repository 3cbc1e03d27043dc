#include "fixtures.hpp"

#include "umbir/metrics.hpp"

#include <doctest.h>

using namespace umbir;
using namespace fixtures;

namespace {

Image wall(const ImageGrid &g, std::size_t col) {
  Image img{g, std::vector<double>(g.size(), 0.0)};
  for (std::size_t r = 0; r < g.rows; ++r) {
    img.data[g.index(r, col)] = 1.0;
  }
  return img;
}

} // namespace

TEST_CASE("identical image has no error") {
  const auto truth = wall(small_grid(), 6);
  const auto rep = compute_metrics(truth, truth);
  CHECK(rep.rmse == 0.0);
  CHECK(rep.mean_error == 0.0);
  CHECK(rep.within_one == 1.0);
  CHECK(rep.artifact_energy == 0.0);
  CHECK(rep.rows_evaluated == 12);
  REQUIRE(rep.wall_depth.has_value());
  CHECK(*rep.wall_depth == doctest::Approx(truth.grid.col_depth(6)));
}

TEST_CASE("zero image rmse is the truth norm over root N") {
  const auto truth = wall(small_grid(), 6);
  Image zero{truth.grid, std::vector<double>(truth.data.size(), 0.0)};
  const auto rep = compute_metrics(zero, truth);
  CHECK(rep.rmse == doctest::Approx(norm(truth.data) / std::sqrt(120.0)));
  CHECK_FALSE(rep.wall_depth.has_value());
}

TEST_CASE("shifted wall reports its offset and artifact share") {
  const auto g = small_grid();
  const auto truth = wall(g, 3);
  auto est = wall(g, 6);
  const auto rep = compute_metrics(est, truth);
  CHECK(rep.mean_error == 3.0);
  CHECK(rep.within_two == 0.0);
  CHECK(rep.artifact_energy == doctest::Approx(1.0));
  MetricsOptions band;
  band.band_low = g.row_height(2);
  band.band_high = g.row_height(5);
  CHECK(compute_metrics(est, truth, band).rows_evaluated == 4);
  est.data[g.index(0, 3)] = 2.0;
  const auto mixed = compute_metrics(est, truth);
  CHECK(mixed.within_one == doctest::Approx(1.0 / 12.0));
  CHECK(mixed.to_json().find("\"within_one_voxel\"") != std::string::npos);
}
