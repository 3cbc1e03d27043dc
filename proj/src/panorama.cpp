#include "umbir/panorama.hpp"

#include "umbir/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace umbir {
namespace {

double wrap360(double a) {
  a = std::fmod(a, 360.0);
  return a < 0.0 ? a + 360.0 : a;
}

// Profile value at radius r along one view, nearest sample in depth.
double profile_at(const Image &view, std::size_t row, double depth) {
  const auto &g = view.grid;
  const double pos = (depth - g.origin.depth) / g.pitch;
  if (!(pos >= 0.0) || pos >= static_cast<double>(g.cols)) {
    return 0.0;
  }
  return view.data[g.index(row, static_cast<std::size_t>(pos))];
}

} // namespace

void PanoramaSpec::validate() const {
  std::vector<std::string> errors;
  if (angles_deg.empty()) {
    errors.emplace_back("panorama.angles: at least one view is required");
  }
  for (std::size_t i = 1; i < angles_deg.size(); ++i) {
    if (!(angles_deg[i] > angles_deg[i - 1])) {
      errors.emplace_back("panorama.angles: must be strictly increasing");
      break;
    }
  }
  if (!angles_deg.empty() && angles_deg.back() - angles_deg.front() >= 360.0) {
    errors.emplace_back("panorama.angles: must span less than 360 degrees");
  }
  if (!std::isfinite(height)) {
    errors.emplace_back("panorama.height: must be finite");
  }
  if (!(radial_offset >= 0.0)) {
    errors.emplace_back("panorama.radial_offset: must be >= 0");
  }
  if (!(pitch >= 0.0)) {
    errors.emplace_back("panorama.pitch: must be >= 0");
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
}

std::size_t row_at_height(const ImageGrid &grid, double height) {
  const double pos = (height - grid.origin.height) / grid.pitch;
  if (!(pos >= 0.0) || pos >= static_cast<double>(grid.rows)) {
    throw DataError("panorama height " + std::to_string(height) +
                    " m lies outside the image");
  }
  return static_cast<std::size_t>(pos);
}

std::vector<double> angle_range(double first, double last, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? first
                        : first + (last - first) * static_cast<double>(i) /
                                      static_cast<double>(count - 1);
  }
  return out;
}

Image stitch_panorama(const std::vector<Image> &views, const PanoramaSpec &spec) {
  spec.validate();
  if (views.size() != spec.angles_deg.size()) {
    throw DataError("panorama has " + std::to_string(views.size()) +
                    " images for " + std::to_string(spec.angles_deg.size()) +
                    " angles");
  }
  const ImageGrid &g0 = views.front().grid;
  for (const auto &v : views) {
    if (v.grid.rows != g0.rows || v.grid.cols != g0.cols ||
        v.grid.pitch != g0.pitch || !(v.grid.origin == g0.origin)) {
      throw DataError("panorama views do not share one grid");
    }
  }
  const std::size_t row = row_at_height(g0, spec.height);
  const double pitch = spec.pitch > 0.0 ? spec.pitch : g0.pitch;
  const double radius = spec.radial_offset + g0.far_depth();
  const auto half = static_cast<std::size_t>(std::ceil(radius / pitch));

  Image out;
  out.grid.rows = 2 * half;
  out.grid.cols = 2 * half;
  out.grid.pitch = pitch;
  out.grid.origin = {-static_cast<double>(half) * pitch,
                     -static_cast<double>(half) * pitch};
  out.data.assign(out.grid.size(), 0.0);

  const auto &angles = spec.angles_deg;
  const std::size_t n = angles.size();
  const double first = angles.front();
  const double span = angles.back() - first;
  double max_gap = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  }
  const double closing_gap = 360.0 - span;
  const bool full_circle = n > 1 && closing_gap <= max_gap * (1.0 + 1e-9);
  const double deg = std::numbers::pi / 180.0;

  for (std::size_t r = 0; r < out.grid.rows; ++r) {
    for (std::size_t c = 0; c < out.grid.cols; ++c) {
      const double x = out.grid.col_depth(c);
      const double y = out.grid.row_height(r);
      const double rad = std::hypot(x, y);
      const double depth = rad - spec.radial_offset;
      double value = 0.0;
      if (n == 1) {
        const double ux = std::cos(first * deg);
        const double uy = std::sin(first * deg);
        const double along = x * ux + y * uy;
        const double across = std::abs(-x * uy + y * ux);
        if (along >= 0.0 && across <= pitch * (0.5 + 1e-9)) {
          value = profile_at(views[0], row, along - spec.radial_offset);
        }
        out.data[out.grid.index(r, c)] = value;
        continue;
      }
      const double psi = wrap360(std::atan2(y, x) / deg - first);
      std::size_t lo = 0;
      std::size_t hi = 0;
      double t = 0.0;
      if (psi <= span + 1e-9) {
        const auto it = std::upper_bound(angles.begin(), angles.end(),
                                         first + psi);
        hi = std::min<std::size_t>(
            static_cast<std::size_t>(it - angles.begin()), n - 1);
        lo = hi == 0 ? 0 : hi - 1;
        const double a0 = angles[lo] - first;
        const double a1 = angles[hi] - first;
        t = a1 > a0 ? std::clamp((psi - a0) / (a1 - a0), 0.0, 1.0) : 0.0;
      } else if (full_circle) {
        lo = n - 1;
        hi = 0;
        t = (psi - span) / closing_gap;
      } else {
        continue;
      }
      const double v0 = profile_at(views[lo], row, depth);
      const double v1 = profile_at(views[hi], row, depth);
      if (spec.interpolation == AngularInterpolation::nearest) {
        value = t < 0.5 ? v0 : v1;
      } else {
        value = (1.0 - t) * v0 + t * v1;
      }
      out.data[out.grid.index(r, c)] = value;
    }
  }
  return out;
}

} // namespace umbir
