#include "umbir/prior.hpp"

#include "umbir/error.hpp"

#include <cmath>
#include <string>

namespace umbir {

void QggmrfParams::validate() const {
  std::vector<std::string> errors;
  if (!(q == 2.0)) {
    errors.emplace_back("prior.q: must equal 2");
  }
  if (!(p > 1.0 && p < q)) {
    errors.emplace_back("prior.p: must satisfy 1 < p < q");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    errors.emplace_back("prior.T: must be finite and > 0");
  }
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    errors.emplace_back("prior.sigma0: must be finite and > 0");
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    errors.emplace_back("prior.nu: must be finite and > 0");
  }
  if (!(a > 0.0) || !std::isfinite(a)) {
    errors.emplace_back("prior.a: must be finite and > 0");
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
}

double rho(double delta, double sigma, const QggmrfParams &prm) {
  const double d = std::abs(delta);
  if (d == 0.0) {
    return 0.0;
  }
  const double uk = std::pow(d / (prm.T * sigma), prm.q - prm.p);
  return std::pow(d, prm.p) / (prm.p * std::pow(sigma, prm.p)) * uk /
         (1.0 + uk);
}

double rho_prime(double delta, double sigma, const QggmrfParams &prm) {
  const double d = std::abs(delta);
  if (d == 0.0) {
    return 0.0;
  }
  const double uk = std::pow(d / (prm.T * sigma), prm.q - prm.p);
  const double mag = std::pow(d, prm.p - 1.0) / std::pow(sigma, prm.p) * uk /
                     (1.0 + uk) * (prm.q / prm.p + uk) / (1.0 + uk);
  return delta > 0.0 ? mag : -mag;
}

double surrogate_coeff(double delta, double sigma, const QggmrfParams &prm) {
  const double d = std::abs(delta);
  const double k = prm.q - prm.p;
  const double uk = d == 0.0 ? 0.0 : std::pow(d / (prm.T * sigma), k);
  // |delta|^(q-2) is 1 at q = 2, including the limit delta -> 0.
  const double dq = prm.q == 2.0 ? 1.0 : std::pow(d, prm.q - 2.0);
  return dq / (2.0 * std::pow(sigma, prm.p) * std::pow(prm.T * sigma, k)) *
         (prm.q / prm.p + uk) / ((1.0 + uk) * (1.0 + uk));
}

std::vector<NeighborOffset> eight_connected() {
  std::vector<NeighborOffset> out;
  double total = 0.0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) {
        continue;
      }
      const double w = 1.0 / std::hypot(dr, dc);
      out.push_back({dr, dc, w});
      total += w;
    }
  }
  for (auto &o : out) {
    o.weight /= total;
  }
  return out;
}

double VarianceField::sigma(std::size_t s, std::size_t r) const {
  return sigma0 * std::sqrt(nu[s] * nu[r]);
}

VarianceField variance_field(const ImageGrid &grid,
                             const ArrayGeometry &geometry, double nu, double a,
                             double sigma0) {
  const Point2 ref = geometry.assembly_reference();
  std::vector<double> d(grid.size());
  double d_max = 0.0;
  for (std::size_t v = 0; v < grid.size(); ++v) {
    d[v] = distance(voxel_center(grid, v), ref);
    d_max = std::max(d_max, d[v]);
  }
  VarianceField f;
  f.sigma0 = sigma0;
  f.nu.resize(grid.size());
  for (std::size_t v = 0; v < grid.size(); ++v) {
    const double ratio = d_max > 0.0 ? d[v] / d_max : 0.0;
    f.nu[v] = 1.0 + (nu - 1.0) * std::pow(ratio, a);
  }
  return f;
}

QggmrfPrior::QggmrfPrior(const ImageGrid &grid, QggmrfParams params,
                         VarianceField field,
                         std::vector<NeighborOffset> offsets)
    : params_(params), field_(std::move(field)) {
  if (field_.nu.size() != grid.size()) {
    throw DataError("variance field does not match the grid");
  }
  begin_.reserve(grid.size() + 1);
  begin_.push_back(0);
  const auto rows = static_cast<long>(grid.rows);
  const auto cols = static_cast<long>(grid.cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      const std::size_t s = grid.index(static_cast<std::size_t>(r),
                                       static_cast<std::size_t>(c));
      for (const auto &o : offsets) {
        const long rr = r + o.drow;
        const long cc = c + o.dcol;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols || o.weight == 0.0) {
          continue;
        }
        const std::size_t n = grid.index(static_cast<std::size_t>(rr),
                                         static_cast<std::size_t>(cc));
        neighbors_.push_back({n, o.weight, field_.sigma(s, n)});
      }
      begin_.push_back(neighbors_.size());
    }
  }
}

double QggmrfPrior::cost(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t s = 0; s < size(); ++s) {
    for (const auto &nb : neighbors(s)) {
      if (nb.index > s) {
        total += nb.weight * rho(x[s] - x[nb.index], nb.sigma, params_);
      }
    }
  }
  return total;
}

std::vector<double> QggmrfPrior::gradient(std::span<const double> x) const {
  std::vector<double> g(size(), 0.0);
  for (std::size_t s = 0; s < size(); ++s) {
    for (const auto &nb : neighbors(s)) {
      g[s] += nb.weight * rho_prime(x[s] - x[nb.index], nb.sigma, params_);
    }
  }
  return g;
}

} // namespace umbir
