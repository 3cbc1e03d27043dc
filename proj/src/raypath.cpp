#include "umbir/raypath.hpp"

#include "umbir/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace umbir {
namespace {

std::size_t seed_layer(const LayeredMedium &medium, Direction direction) {
  return direction == Direction::outbound ? 0 : medium.size() - 1;
}

// Horizontal slowness of a ray seeded at `seed` in the seed layer.
double slowness(const LayeredMedium &medium, double seed, Direction direction) {
  return std::sin(seed) / medium[seed_layer(medium, direction)].speed;
}

// sum(thickness * tan) straight from the slowness; used by the bisection.
double reach_from_slowness(const LayeredMedium &medium, double p) {
  double z = 0.0;
  for (const auto &layer : medium.layers()) {
    const double s = p * layer.speed;
    z += layer.thickness * s / std::sqrt(1.0 - s * s);
  }
  return z;
}

LayeredMedium extended_to(const LayeredMedium &medium, double depth) {
  if (depth <= medium.total_depth()) {
    return medium;
  }
  auto layers = medium.layers();
  layers.back().thickness += depth - medium.total_depth();
  return LayeredMedium(std::move(layers));
}

} // namespace

double critical_angle(const LayeredMedium &medium, Direction direction) {
  const double seed_speed = medium[seed_layer(medium, direction)].speed;
  double fastest = 0.0;
  for (const auto &layer : medium.layers()) {
    fastest = std::max(fastest, layer.speed);
  }
  if (fastest <= seed_speed) {
    return std::numbers::pi / 2;
  }
  return std::asin(seed_speed / fastest);
}

AngleChain snell_chain(const LayeredMedium &medium, double seed,
                       Direction direction) {
  if (!(std::abs(seed) < std::numbers::pi / 2)) {
    throw TotalInternalReflection("seed angle must satisfy |theta| < pi/2");
  }
  const double p = slowness(medium, seed, direction);
  AngleChain chain{direction, std::vector<double>(medium.size())};
  for (std::size_t l = 0; l < medium.size(); ++l) {
    const double s = p * medium[l].speed;
    if (std::abs(s) >= 1.0) {
      std::ostringstream msg;
      msg << "total internal reflection entering layer " << l
          << " (sin argument " << s << ")";
      throw TotalInternalReflection(msg.str());
    }
    chain.angles[l] = std::asin(s);
  }
  chain.angles[seed_layer(medium, direction)] = seed;
  return chain;
}

double vertical_reach(const LayeredMedium &medium, double seed,
                      Direction direction) {
  const auto chain = snell_chain(medium, seed, direction);
  double z = 0.0;
  for (std::size_t l = 0; l < medium.size(); ++l) {
    z += medium[l].thickness * std::tan(chain.angles[l]);
  }
  return z;
}

double solve_angle(const LayeredMedium &medium, double dz, Direction direction,
                   double tol_z) {
  if (!std::isfinite(dz)) {
    throw UnreachableTarget("non-finite lateral offset");
  }
  const double target = std::abs(dz);
  if (target == 0.0) {
    return 0.0;
  }
  const double seed_speed = medium[seed_layer(medium, direction)].speed;
  double lo = 0.0;
  double hi = critical_angle(medium, direction) - kCriticalMargin;
  double z_hi = reach_from_slowness(medium, std::sin(hi) / seed_speed);
  if (!(z_hi >= target)) {
    std::ostringstream msg;
    msg << "lateral offset " << target << " m exceeds maximum reach " << z_hi
        << " m";
    throw UnreachableTarget(msg.str());
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double z = reach_from_slowness(medium, std::sin(mid) / seed_speed);
    if (std::abs(z - target) <= tol_z) {
      break;
    }
    if (z < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) {
      break;
    }
  }
  return dz < 0.0 ? -mid : mid;
}

std::vector<double> layer_delays(const LayeredMedium &medium,
                                 const AngleChain &chain) {
  std::vector<double> t(medium.size());
  for (std::size_t l = 0; l < medium.size(); ++l) {
    const double tn = std::tan(chain.angles[l]);
    t[l] = medium[l].thickness * std::sqrt(1.0 + tn * tn) / medium[l].speed;
  }
  return t;
}

std::size_t DelayTable::reachable_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(),
                    [](const DelayEntry &e) { return e.reachable; }));
}

namespace {

// Delays from the transmitter and to every receiver for a reflector at
// `point`, given the already truncated stack above it.
void solve_point(const LayeredMedium &stack, const ArrayGeometry &geometry,
                 const Point2 &point, double tol_z,
                 std::vector<DelayEntry> &out) {
  const std::size_t k = geometry.receiver_count();
  out.assign(k, DelayEntry{});
  double depart = 0.0;
  std::vector<double> t_out;
  try {
    depart = solve_angle(stack, point.height - geometry.transmitter.height,
                         Direction::outbound, tol_z);
    t_out = layer_delays(stack, snell_chain(stack, depart, Direction::outbound));
  } catch (const NumericalError &) {
    return;
  }
  for (std::size_t j = 0; j < k; ++j) {
    try {
      const double seed =
          solve_angle(stack, geometry.receivers[j].height - point.height,
                      Direction::inbound, tol_z);
      const auto chain = snell_chain(stack, seed, Direction::inbound);
      const auto t_ret = layer_delays(stack, chain);
      DelayEntry &e = out[j];
      for (std::size_t l = 0; l < stack.size(); ++l) {
        const double t = t_out[l] + t_ret[l];
        e.delay += t;
        e.gamma += stack[l].speed * stack[l].attenuation * t;
      }
      e.depart_angle = depart;
      e.arrive_angle = chain.angles.front();
      e.reachable = true;
    } catch (const NumericalError &) {
      out[j] = DelayEntry{};
    }
  }
}

} // namespace

std::vector<DelayEntry> point_delays(const LayeredMedium &medium,
                                     const ArrayGeometry &geometry,
                                     const Point2 &point, double tol_z) {
  std::vector<DelayEntry> out(geometry.receiver_count());
  const double depth = point.depth - geometry.transmitter.depth;
  if (!(depth > 0.0)) {
    return out;
  }
  const auto medium_ext = extended_to(medium, depth);
  const auto stack = medium_ext.truncated(depth);
  if (!stack) {
    return out;
  }
  solve_point(*stack, geometry, point, tol_z, out);
  return out;
}

DelayTable delay_table(const LayeredMedium &medium,
                       const ArrayGeometry &geometry, const ImageGrid &grid,
                       double tol_z) {
  geometry.validate();
  grid.validate();
  if (tol_z <= 0.0) {
    tol_z = grid.pitch / 100.0;
  }
  const std::size_t n = grid.size();
  const std::size_t k = geometry.receiver_count();
  const double face = geometry.transmitter.depth;
  const auto medium_ext = extended_to(medium, grid.far_depth() - face);

  DelayTable table(n, k);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t vi = 0; vi < count; ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    const Point2 c = voxel_center(grid, v);
    const double depth = c.depth - face;
    if (!(depth > 0.0)) {
      continue;
    }
    table.voxel_layer(v) = medium_ext.layer_of_depth(depth);
    const auto stack = medium_ext.truncated(depth);
    if (!stack) {
      continue;
    }
    std::vector<DelayEntry> row;
    solve_point(*stack, geometry, c, tol_z, row);
    for (std::size_t j = 0; j < k; ++j) {
      table.at(v, j) = row[j];
    }
  }
  return table;
}

} // namespace umbir
