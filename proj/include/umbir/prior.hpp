#pragma once

#include "umbir/media.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace umbir {

struct QggmrfParams {
  double p{1.1};
  double q{2.0};
  double T{0.01};
  double sigma0{2.0};
  double nu{10.0};
  double a{2.0};

  void validate() const;
};

/// Potential rho(delta) for pair scale `sigma`.
[[nodiscard]] double rho(double delta, double sigma, const QggmrfParams &prm);
/// d rho / d delta.
[[nodiscard]] double rho_prime(double delta, double sigma,
                               const QggmrfParams &prm);
/// Curvature of the symmetric quadratic bound, rho'(delta) / (2 delta), with
/// its limit at delta = 0.
[[nodiscard]] double surrogate_coeff(double delta, double sigma,
                                     const QggmrfParams &prm);

struct NeighborOffset {
  int drow{};
  int dcol{};
  double weight{};
};

/// 8-connected offsets weighted by inverse distance, normalized to sum 1.
[[nodiscard]] std::vector<NeighborOffset> eight_connected();

/// Depth-dependent amplification nu_s per voxel.
struct VarianceField {
  double sigma0{};
  std::vector<double> nu;

  [[nodiscard]] double sigma(std::size_t s, std::size_t r) const;
};

/// nu_s = 1 + (nu - 1) (d_s / d_max)^a, d_s measured from the assembly
/// reference point of `geometry` to each voxel center.
[[nodiscard]] VarianceField variance_field(const ImageGrid &grid,
                                           const ArrayGeometry &geometry,
                                           double nu, double a, double sigma0);

/// Clique structure and per-pair scales on a grid.
class QggmrfPrior {
public:
  struct Neighbor {
    std::size_t index{};
    double weight{};
    double sigma{};
  };

  QggmrfPrior(const ImageGrid &grid, QggmrfParams params, VarianceField field,
              std::vector<NeighborOffset> offsets = eight_connected());

  [[nodiscard]] std::size_t size() const { return begin_.size() - 1; }
  [[nodiscard]] const QggmrfParams &params() const { return params_; }
  [[nodiscard]] const VarianceField &field() const { return field_; }

  [[nodiscard]] std::span<const Neighbor> neighbors(std::size_t s) const {
    return {neighbors_.data() + begin_[s], begin_[s + 1] - begin_[s]};
  }

  /// Sum over unordered cliques of b * rho(x_s - x_r).
  [[nodiscard]] double cost(std::span<const double> x) const;
  /// Gradient of cost() with respect to x.
  [[nodiscard]] std::vector<double> gradient(std::span<const double> x) const;

private:
  QggmrfParams params_;
  VarianceField field_;
  std::vector<std::size_t> begin_;
  std::vector<Neighbor> neighbors_;
};

} // namespace umbir
