#include "umbir/metrics.hpp"

#include "umbir/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace umbir {
namespace {

std::size_t argmax_in_row(const Image &img, std::size_t row) {
  const auto &g = img.grid;
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t c = 0; c < g.cols; ++c) {
    const double v = std::abs(img.data[g.index(row, c)]);
    if (v > best_v) {
      best_v = v;
      best = c;
    }
  }
  return best;
}

} // namespace

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["wall_depth"] = wall_depth ? nlohmann::ordered_json(*wall_depth)
                               : nlohmann::ordered_json(nullptr);
  j["rows_evaluated"] = rows_evaluated;
  j["mean_error_voxels"] = mean_error;
  j["max_error_voxels"] = max_error;
  j["within_one_voxel"] = within_one;
  j["within_two_voxels"] = within_two;
  j["rmse"] = rmse;
  j["artifact_energy"] = artifact_energy;
  return j.dump(2);
}

MetricsReport compute_metrics(const Image &estimate, const Image &truth,
                              const MetricsOptions &options) {
  const auto &g = truth.grid;
  if (estimate.grid.rows != g.rows || estimate.grid.cols != g.cols ||
      estimate.data.size() != truth.data.size()) {
    throw DataError("estimate and ground truth are on different grids");
  }
  MetricsReport rep;
  const std::size_t n = truth.data.size();
  double se = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const double d = estimate.data[v] - truth.data[v];
    se += d * d;
  }
  rep.rmse = n > 0 ? std::sqrt(se / static_cast<double>(n)) : 0.0;

  auto in_band = [&](std::size_t r) {
    const double h = g.row_height(r);
    return (!options.band_low || h >= *options.band_low) &&
           (!options.band_high || h <= *options.band_high);
  };

  std::vector<double> profile(g.cols, 0.0);
  double err_sum = 0.0;
  std::size_t one = 0;
  std::size_t two = 0;
  for (std::size_t r = 0; r < g.rows; ++r) {
    if (!in_band(r)) {
      continue;
    }
    for (std::size_t c = 0; c < g.cols; ++c) {
      profile[c] += std::abs(estimate.data[g.index(r, c)]);
    }
    bool has_truth = false;
    for (std::size_t c = 0; c < g.cols && !has_truth; ++c) {
      has_truth = truth.data[g.index(r, c)] != 0.0;
    }
    if (!has_truth) {
      continue;
    }
    const auto want = static_cast<double>(argmax_in_row(truth, r));
    const auto got = static_cast<double>(argmax_in_row(estimate, r));
    const double e = std::abs(got - want);
    err_sum += e;
    rep.max_error = std::max(rep.max_error, e);
    one += e <= 1.0 ? 1 : 0;
    two += e <= 2.0 ? 1 : 0;
    ++rep.rows_evaluated;
  }
  if (rep.rows_evaluated > 0) {
    const auto rows = static_cast<double>(rep.rows_evaluated);
    rep.mean_error = err_sum / rows;
    rep.within_one = static_cast<double>(one) / rows;
    rep.within_two = static_cast<double>(two) / rows;
  }
  const auto peak = std::max_element(profile.begin(), profile.end());
  if (peak != profile.end() && *peak > 0.0) {
    rep.wall_depth =
        g.col_depth(static_cast<std::size_t>(peak - profile.begin()));
  }

  // Dilate the true support and measure the estimate's energy outside it.
  std::vector<char> near(n, 0);
  const auto rad = static_cast<long>(options.dilation);
  const auto rows = static_cast<long>(g.rows);
  const auto cols = static_cast<long>(g.cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (truth.data[g.index(static_cast<std::size_t>(r),
                             static_cast<std::size_t>(c))] == 0.0) {
        continue;
      }
      for (long rr = std::max(0L, r - rad); rr <= std::min(rows - 1, r + rad);
           ++rr) {
        for (long cc = std::max(0L, c - rad); cc <= std::min(cols - 1, c + rad);
             ++cc) {
          near[g.index(static_cast<std::size_t>(rr),
                       static_cast<std::size_t>(cc))] = 1;
        }
      }
    }
  }
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const double e = estimate.data[v] * estimate.data[v];
    total += e;
    if (!near[v]) {
      outside += e;
    }
  }
  rep.artifact_energy = total > 0.0 ? outside / total : 0.0;
  return rep;
}

} // namespace umbir
