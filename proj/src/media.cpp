#include "umbir/media.hpp"

#include "umbir/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace umbir {

double distance(const Point2 &a, const Point2 &b) {
  return std::hypot(a.depth - b.depth, a.height - b.height);
}

Layer Layer::with_density(double thickness, double speed, double attenuation,
                          double density, std::string name) {
  return Layer{thickness, speed, attenuation, density * speed, std::move(name)};
}

LayeredMedium::LayeredMedium(std::vector<Layer> layers)
    : layers_(std::move(layers)) {
  std::vector<std::string> errors;
  if (layers_.empty()) {
    errors.emplace_back("medium.layers: at least one layer required");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto &layer = layers_[l];
    const std::string tag = "medium.layers[" + std::to_string(l) + "]";
    if (!(layer.thickness > 0.0) || !std::isfinite(layer.thickness)) {
      errors.push_back(tag + ".thickness: must be > 0");
    }
    if (!(layer.speed > 0.0) || !std::isfinite(layer.speed)) {
      errors.push_back(tag + ".speed: must be > 0");
    }
    if (!(layer.attenuation >= 0.0) || !std::isfinite(layer.attenuation)) {
      errors.push_back(tag + ".attenuation: must be >= 0");
    }
    if (!(layer.impedance > 0.0) || !std::isfinite(layer.impedance)) {
      errors.push_back(tag + ".impedance: must be > 0");
    }
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
  tops_.reserve(layers_.size());
  double depth = 0.0;
  for (const auto &layer : layers_) {
    tops_.push_back(depth);
    depth += layer.thickness;
  }
  total_depth_ = depth;
}

std::size_t LayeredMedium::layer_of_depth(double depth) const {
  if (!(depth >= 0.0) || depth > total_depth_) {
    std::ostringstream msg;
    msg << "depth " << depth << " m outside medium [0, " << total_depth_
        << "]";
    throw DataError(msg.str());
  }
  // First top strictly greater than depth, minus one.
  const auto it = std::upper_bound(tops_.begin(), tops_.end(), depth);
  return static_cast<std::size_t>(std::distance(tops_.begin(), it)) - 1;
}

std::optional<LayeredMedium> LayeredMedium::truncated(double depth) const {
  const std::size_t l = layer_of_depth(depth);
  std::vector<Layer> stack(layers_.begin(),
                           layers_.begin() + static_cast<std::ptrdiff_t>(l));
  const double partial = depth - tops_[l];
  if (partial > 0.0) {
    Layer cut = layers_[l];
    cut.thickness = std::min(partial, layers_[l].thickness);
    stack.push_back(cut);
  }
  if (stack.empty()) {
    return std::nullopt;
  }
  return LayeredMedium(std::move(stack));
}

Point2 ArrayGeometry::assembly_reference() const {
  Point2 centroid{};
  for (const auto &r : receivers) {
    centroid.depth += r.depth;
    centroid.height += r.height;
  }
  const auto k = static_cast<double>(std::max<std::size_t>(receivers.size(), 1));
  centroid.depth /= k;
  centroid.height /= k;
  return {0.5 * (transmitter.depth + centroid.depth),
          0.5 * (transmitter.height + centroid.height)};
}

void ArrayGeometry::validate() const {
  std::vector<std::string> errors;
  if (receivers.empty()) {
    errors.emplace_back("geometry.receivers: at least one receiver required");
  }
  for (std::size_t j = 0; j < receivers.size(); ++j) {
    if (std::abs(receivers[j].depth - transmitter.depth) > 1e-12) {
      errors.push_back("geometry.receivers[" + std::to_string(j) +
                       "]: must share the transmitter face depth");
    }
  }
  if (!std::isfinite(pointing_angle) ||
      std::abs(pointing_angle) >= std::numbers::pi / 2) {
    errors.emplace_back("geometry.pointing_angle: |angle| must be < 90 deg");
  }
  if (!(embedding_speed > 0.0)) {
    errors.emplace_back("geometry.embedding_speed: must be > 0");
  }
  if (!(embedding_attenuation >= 0.0)) {
    errors.emplace_back("geometry.embedding_attenuation: must be >= 0");
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
}

double ImageGrid::col_depth(std::size_t col) const {
  return origin.depth + (static_cast<double>(col) + 0.5) * pitch;
}

double ImageGrid::row_height(std::size_t row) const {
  return origin.height + (static_cast<double>(row) + 0.5) * pitch;
}

ImageGrid ImageGrid::refined(std::size_t factor) const {
  if (factor == 0) {
    throw ConfigError("refinement factor must be >= 1");
  }
  return ImageGrid{rows * factor, cols * factor,
                   pitch / static_cast<double>(factor), origin};
}

void ImageGrid::validate() const {
  std::vector<std::string> errors;
  if (rows == 0) {
    errors.emplace_back("grid.rows: must be >= 1");
  }
  if (cols == 0) {
    errors.emplace_back("grid.cols: must be >= 1");
  }
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    errors.emplace_back("grid.pitch: must be > 0");
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
}

Point2 voxel_center(const ImageGrid &grid, std::size_t v) {
  if (v >= grid.size()) {
    throw DataError("voxel index " + std::to_string(v) + " out of range (N=" +
                    std::to_string(grid.size()) + ")");
  }
  return {grid.col_depth(grid.col_of(v)), grid.row_height(grid.row_of(v))};
}

std::optional<std::size_t> nearest_voxel(const ImageGrid &grid,
                                         const Point2 &p) {
  const double c = std::floor((p.depth - grid.origin.depth) / grid.pitch);
  const double r = std::floor((p.height - grid.origin.height) / grid.pitch);
  if (c < 0.0 || r < 0.0 || c >= static_cast<double>(grid.cols) ||
      r >= static_cast<double>(grid.rows)) {
    return std::nullopt;
  }
  return grid.index(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

void validate_pairing(const LayeredMedium &medium, const ArrayGeometry &geometry,
                      const ImageGrid &grid) {
  std::vector<std::string> errors;
  const double face = geometry.transmitter.depth;
  if (grid.origin.depth < face - 1e-12) {
    errors.emplace_back("grid.origin: voxels lie behind the transducer face");
  }
  const double reach = face + medium.total_depth();
  if (std::abs(reach - grid.far_depth()) > grid.pitch + 1e-12) {
    std::ostringstream msg;
    msg << "medium.layers: total thickness reaches depth " << reach
        << " m but grid ends at " << grid.far_depth()
        << " m (must agree within one pitch)";
    errors.push_back(msg.str());
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
}

} // namespace umbir
