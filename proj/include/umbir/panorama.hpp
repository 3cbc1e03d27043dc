#pragma once

#include "umbir/io.hpp"

#include <vector>

namespace umbir {

enum class AngularInterpolation { nearest, linear };

struct PanoramaSpec {
  std::vector<double> angles_deg; // strictly increasing view azimuths
  double height{};                // [m], row taken from every view
  AngularInterpolation interpolation{AngularInterpolation::nearest};
  double radial_offset{0.0}; // borehole axis to image depth 0 [m]
  double pitch{0.0};         // raster pitch; 0 = image pitch

  void validate() const;
};

/// Polar map on a square Cartesian raster centered on the borehole axis. The
/// raster uses ImageGrid conventions with depth as x and height as y, both
/// measured from the axis. Values come from the radial profiles at the
/// views; radius uses the nearest profile sample and azimuth interpolates
/// between neighboring spokes only. Pixels outside the covered sector or
/// radius stay zero. A single view yields one spoke one pixel wide.
[[nodiscard]] Image stitch_panorama(const std::vector<Image> &views,
                                    const PanoramaSpec &spec);

/// Row of `image` whose cell contains `height`. Throws DataError outside.
[[nodiscard]] std::size_t row_at_height(const ImageGrid &grid, double height);

/// Evenly spaced angles from `first` to `last` inclusive.
[[nodiscard]] std::vector<double> angle_range(double first, double last,
                                              std::size_t count);

} // namespace umbir
