#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace umbir {

/// 2D point in meters. `depth` runs perpendicular to the array face (away from
/// the transducers), `height` runs along the receiver line.
struct Point2 {
  double depth{};
  double height{};

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

[[nodiscard]] double distance(const Point2 &a, const Point2 &b);

/// One parallel slab of the propagation medium.
struct Layer {
  double thickness{}; // [m]
  double speed{};     // [m/s]
  double attenuation{}; // [s/m], amplitude decays as exp(-attenuation*|f|*path)
  double impedance{};   // [kg/(m^2 s)]
  std::string name;

  /// Impedance from density when only density is known.
  static Layer with_density(double thickness, double speed, double attenuation,
                            double density, std::string name = {});
};

/// Ordered stack of layers starting at the array face (depth 0 of the medium).
class LayeredMedium {
public:
  LayeredMedium() = default;
  explicit LayeredMedium(std::vector<Layer> layers);

  [[nodiscard]] std::size_t size() const { return layers_.size(); }
  [[nodiscard]] const Layer &operator[](std::size_t l) const {
    return layers_[l];
  }
  [[nodiscard]] const std::vector<Layer> &layers() const { return layers_; }
  [[nodiscard]] double total_depth() const { return total_depth_; }
  // Depth of the top interface of layer l (0-based).
  [[nodiscard]] double top_of(std::size_t l) const { return tops_[l]; }

  /// 0-based index of the layer containing `depth`; interface depths belong
  /// to the deeper layer, and depth == total_depth() maps to the last layer.
  /// Throws DataError outside [0, total_depth()].
  [[nodiscard]] std::size_t layer_of_depth(double depth) const;

  /// The stack a ray crosses to reach `depth`: every layer above it in full
  /// and the containing layer cut at `depth`. Returns nullopt for depth 0.
  [[nodiscard]] std::optional<LayeredMedium> truncated(double depth) const;

private:
  std::vector<Layer> layers_;
  std::vector<double> tops_;
  double total_depth_{};
};

/// One transmitter with pointing angle plus K receivers on the same face.
struct ArrayGeometry {
  Point2 transmitter;
  double pointing_angle{}; // [rad], positive tilts toward increasing height
  std::vector<Point2> receivers;
  double embedding_speed{1500.0};     // [m/s]
  double embedding_attenuation{0.0};  // [s/m]

  [[nodiscard]] std::size_t receiver_count() const { return receivers.size(); }
  // Midpoint between the transmitter and the receiver-array centroid.
  [[nodiscard]] Point2 assembly_reference() const;
  void validate() const;
};

/// Voxel raster. Index v = row * cols + col, where row counts along height
/// and col counts along depth, both from `origin` (the outer corner of voxel
/// 0).
struct ImageGrid {
  std::size_t rows{};
  std::size_t cols{};
  double pitch{};
  Point2 origin;

  [[nodiscard]] std::size_t size() const { return rows * cols; }
  [[nodiscard]] double depth_extent() const {
    return static_cast<double>(cols) * pitch;
  }
  [[nodiscard]] double height_extent() const {
    return static_cast<double>(rows) * pitch;
  }
  [[nodiscard]] double far_depth() const { return origin.depth + depth_extent(); }
  [[nodiscard]] std::size_t index(std::size_t row, std::size_t col) const {
    return row * cols + col;
  }
  [[nodiscard]] std::size_t row_of(std::size_t v) const { return v / cols; }
  [[nodiscard]] std::size_t col_of(std::size_t v) const { return v % cols; }

  [[nodiscard]] double col_depth(std::size_t col) const;
  [[nodiscard]] double row_height(std::size_t row) const;

  /// Same extent, pitch divided by `factor`.
  [[nodiscard]] ImageGrid refined(std::size_t factor) const;

  void validate() const;
};

/// Physical center of voxel v. Throws DataError when v >= grid.size().
[[nodiscard]] Point2 voxel_center(const ImageGrid &grid, std::size_t v);

/// Voxel whose cell contains p, or nullopt outside the grid.
[[nodiscard]] std::optional<std::size_t> nearest_voxel(const ImageGrid &grid,
                                                       const Point2 &p);

/// Checks that the medium, measured from the array face, reaches the far edge
/// of the grid to within one pitch, and that no voxel lies behind the face.
void validate_pairing(const LayeredMedium &medium, const ArrayGeometry &geometry,
                      const ImageGrid &grid);

} // namespace umbir
