#pragma once

#include "umbir/media.hpp"

#include <cstddef>
#include <vector>

namespace umbir {

/// Outbound rays are seeded by their angle in the first layer (at the
/// transmitter face); inbound rays by their angle in the deepest layer (at the
/// reflecting voxel) and refract back toward the face.
enum class Direction { outbound, inbound };

/// Propagation angle in every layer, always indexed in layer order
/// (0 = layer at the face), whichever end seeded it.
struct AngleChain {
  Direction direction{Direction::outbound};
  std::vector<double> angles;
};

/// Largest seed angle for which every layer still transmits. Equals pi/2 when
/// the seed layer is the fastest one.
[[nodiscard]] double critical_angle(const LayeredMedium &medium,
                                    Direction direction);

/// Snell recursion from the seed layer. The horizontal slowness
/// sin(theta)/c is held fixed along the chain, which is the same recursion
/// for both directions. Throws TotalInternalReflection when some layer would
/// need |sin| >= 1.
[[nodiscard]] AngleChain snell_chain(const LayeredMedium &medium, double seed,
                                     Direction direction);

/// Lateral (height) displacement accumulated over the whole stack,
/// sum(thickness * tan(angle)).
[[nodiscard]] double vertical_reach(const LayeredMedium &medium, double seed,
                                    Direction direction);

/// Seed angle whose ray is displaced by `dz` in height, found by bisection on
/// the monotone reach function. Negative `dz` gives the mirrored angle.
/// Throws UnreachableTarget when |dz| exceeds the reach just below the
/// critical angle.
[[nodiscard]] double solve_angle(const LayeredMedium &medium, double dz,
                                 Direction direction, double tol_z);

/// One-way travel time through each layer along `chain`.
[[nodiscard]] std::vector<double> layer_delays(const LayeredMedium &medium,
                                               const AngleChain &chain);

/// Bracket margin below the critical angle used by solve_angle.
inline constexpr double kCriticalMargin = 1e-6;

struct DelayEntry {
  double delay{};        // round-trip group delay [s]
  double gamma{};        // dispersion exponent [s]
  double lambda{};       // amplitude factor, filled by the system model
  double depart_angle{}; // outbound angle at the transmitter face [rad]
  double arrive_angle{}; // return angle at the receiver face [rad]
  bool reachable{false};
};

/// Delay entries for every (voxel, receiver) pair, voxel-major.
class DelayTable {
public:
  DelayTable() = default;
  DelayTable(std::size_t voxels, std::size_t receivers)
      : voxels_(voxels), receivers_(receivers),
        entries_(voxels * receivers), voxel_layer_(voxels, 0) {}

  [[nodiscard]] std::size_t voxels() const { return voxels_; }
  [[nodiscard]] std::size_t receivers() const { return receivers_; }

  [[nodiscard]] DelayEntry &at(std::size_t v, std::size_t j) {
    return entries_[v * receivers_ + j];
  }
  [[nodiscard]] const DelayEntry &at(std::size_t v, std::size_t j) const {
    return entries_[v * receivers_ + j];
  }

  // 0-based layer containing each voxel (meaningful for reachable voxels).
  [[nodiscard]] std::size_t &voxel_layer(std::size_t v) {
    return voxel_layer_[v];
  }
  [[nodiscard]] std::size_t voxel_layer(std::size_t v) const {
    return voxel_layer_[v];
  }

  [[nodiscard]] std::size_t reachable_count() const;

private:
  std::size_t voxels_{};
  std::size_t receivers_{};
  std::vector<DelayEntry> entries_;
  std::vector<std::size_t> voxel_layer_;
};

/// Round-trip delay and dispersion for a single reflector position. The
/// medium is measured from the array face at `geometry.transmitter.depth`.
/// Unreachable pairs come back with reachable == false.
[[nodiscard]] std::vector<DelayEntry>
point_delays(const LayeredMedium &medium, const ArrayGeometry &geometry,
             const Point2 &point, double tol_z);

/// Solves every (voxel, receiver) pair of the grid. A grid that extends a
/// little past the medium (within the pairing tolerance) sees the last layer
/// continued. `tol_z` defaults to pitch / 100 when <= 0.
[[nodiscard]] DelayTable delay_table(const LayeredMedium &medium,
                                     const ArrayGeometry &geometry,
                                     const ImageGrid &grid, double tol_z = 0.0);

} // namespace umbir
