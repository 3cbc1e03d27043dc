#pragma once

#include "umbir/io.hpp"

#include <optional>
#include <string>

namespace umbir {

struct MetricsOptions {
  // Height band [low, high] in meters for the depth profile and the per-row
  // localization; all rows when unset.
  std::optional<double> band_low;
  std::optional<double> band_high;
  std::size_t dilation{2}; // support dilation radius in voxels (Chebyshev)
};

struct MetricsReport {
  std::optional<double> wall_depth; // argmax of the band-averaged |x| profile
  std::size_t rows_evaluated{};
  double mean_error{};      // per-row |argmax column - true column| [voxels]
  double max_error{};
  double within_one{};      // fraction of rows with error <= 1 voxel
  double within_two{};
  double rmse{};
  double artifact_energy{}; // share of image energy outside dilated support

  [[nodiscard]] std::string to_json() const;
};

/// Compares an estimate to the ground truth on the same grid. Localization
/// uses, per row with nonzero truth, the column of largest magnitude.
[[nodiscard]] MetricsReport compute_metrics(const Image &estimate,
                                            const Image &truth,
                                            const MetricsOptions &options = {});

} // namespace umbir
