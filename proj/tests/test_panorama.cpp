#include "fixtures.hpp"

#include "umbir/error.hpp"
#include "umbir/panorama.hpp"

#include <doctest.h>

using namespace umbir;
using namespace fixtures;

namespace {

Image wall_view(const ImageGrid &g, std::size_t col, double value = 1.0) {
  Image img{g, std::vector<double>(g.size(), 0.0)};
  for (std::size_t r = 0; r < g.rows; ++r) {
    img.data[g.index(r, col)] = value;
  }
  return img;
}

} // namespace

TEST_CASE("a single view stitches to one spoke") {
  const ImageGrid g{4, 10, 1.0, {0.0, 0.0}};
  Image view{g, std::vector<double>(g.size(), 0.0)};
  for (std::size_t c = 0; c < g.cols; ++c) {
    view.data[g.index(2, c)] = 1.0 + static_cast<double>(c);
  }
  PanoramaSpec spec;
  spec.angles_deg = {90.0};
  spec.height = 2.5;
  const auto pano = stitch_panorama({view}, spec);
  const auto &pg = pano.grid;
  for (std::size_t r = 0; r < pg.rows; ++r) {
    for (std::size_t c = 0; c < pg.cols; ++c) {
      const double v = pano.data[pg.index(r, c)];
      const double x = pg.col_depth(c);
      const double y = pg.row_height(r);
      if (std::abs(x) > 0.5 || y < 0.0) {
        CHECK(v == 0.0);
      } else {
        // profile values are carried along the spoke unchanged
        CHECK(v == 1.0 + std::floor(y));
      }
    }
  }
}

TEST_CASE("constant-depth wall stitches to a circle") {
  const ImageGrid g{20, 30, 0.01, {0.0, 0.0}};
  const std::size_t col = 17;
  PanoramaSpec spec;
  spec.angles_deg = angle_range(0.0, 180.0, 37);
  spec.height = 0.105;
  spec.interpolation = AngularInterpolation::linear;
  const std::vector<Image> views(37, wall_view(g, col));
  const auto pano = stitch_panorama(views, spec);
  const auto &pg = pano.grid;
  const double radius = g.col_depth(col);
  std::size_t lit = 0;
  for (std::size_t r = 0; r < pg.rows; ++r) {
    for (std::size_t c = 0; c < pg.cols; ++c) {
      if (pano.data[pg.index(r, c)] != 0.0) {
        ++lit;
        const double rad = std::hypot(pg.col_depth(c), pg.row_height(r));
        CHECK(std::abs(rad - radius) <= g.pitch);
        CHECK(pg.row_height(r) >= -g.pitch);
      }
    }
  }
  // half-ring of circumference pi * r, one pixel thick
  CHECK(static_cast<double>(lit) >= 0.8 * kPi * radius / g.pitch);
}

TEST_CASE("stitching keeps the extracted values") {
  const ImageGrid g{3, 8, 1.0, {0.0, 0.0}};
  std::vector<Image> views{wall_view(g, 5, 2.0), wall_view(g, 5, 2.0),
                           wall_view(g, 5, 2.0)};
  PanoramaSpec spec;
  spec.angles_deg = {0.0, 120.0, 240.0};
  spec.height = 1.0;
  const auto pano = stitch_panorama(views, spec);
  for (double v : pano.data) {
    CHECK((v == 0.0 || v == 2.0));
  }
}

TEST_CASE("panorama input errors") {
  const ImageGrid g{3, 8, 1.0, {0.0, 0.0}};
  PanoramaSpec spec;
  spec.angles_deg = {0.0, 90.0};
  spec.height = 1.0;
  CHECK_THROWS_AS((void)stitch_panorama({wall_view(g, 2)}, spec), DataError);
  spec.height = 7.0;
  CHECK_THROWS_AS((void)stitch_panorama({wall_view(g, 2), wall_view(g, 2)}, spec),
                  DataError);
  spec.height = 1.0;
  spec.angles_deg = {90.0, 0.0};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  CHECK(angle_range(0.0, 180.0, 37)[1] == doctest::Approx(5.0));
  CHECK(row_at_height(g, 2.999) == 2);
}
