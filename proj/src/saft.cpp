#include "umbir/saft.hpp"

#include "umbir/error.hpp"
#include "umbir/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace umbir {

std::vector<double> saft_reconstruct(std::span<const double> y,
                                     const DelayTable &table,
                                     const PulseSpec &spec,
                                     const BeamParams &beam,
                                     const SaftConfig &config) {
  const std::size_t k = table.receivers();
  const std::size_t m = spec.record_length;
  if (y.size() != k * m) {
    throw DataError("SAFT input has " + std::to_string(y.size()) +
                    " samples, expected " + std::to_string(k * m));
  }
  std::vector<std::vector<double>> traces(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto trace = y.subspan(j * m, m);
    traces[j] = config.envelope ? fft::envelope(trace)
                                : std::vector<double>(trace.begin(), trace.end());
  }

  std::vector<double> image(table.voxels(), 0.0);
  const auto count = static_cast<std::ptrdiff_t>(table.voxels());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t vi = 0; vi < count; ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const DelayEntry &e = table.at(v, j);
      if (!e.reachable) {
        continue;
      }
      const double pos = (e.delay - spec.record_start) * spec.sampling_frequency;
      if (pos < 0.0 || pos > static_cast<double>(m - 1)) {
        continue;
      }
      const auto i0 = static_cast<std::size_t>(std::floor(pos));
      const std::size_t i1 = std::min(i0 + 1, m - 1);
      const double f = pos - static_cast<double>(i0);
      const double sample = (1.0 - f) * traces[j][i0] + f * traces[j][i1];
      const double w =
          config.apodize ? apodization(e.depart_angle, e.arrive_angle, beam) : 1.0;
      sum += w * sample;
    }
    image[v] = sum;
  }
  return image;
}

std::vector<double>
combine_saft(const std::vector<std::vector<double>> &images) {
  if (images.empty()) {
    throw DataError("no SAFT images to combine");
  }
  std::vector<double> out(images.front().size(), 0.0);
  for (const auto &img : images) {
    if (img.size() != out.size()) {
      throw DataError("SAFT images differ in size");
    }
    double peak = 0.0;
    for (double v : img) {
      peak = std::max(peak, std::abs(v));
    }
    if (peak == 0.0) {
      continue;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += img[i] / peak;
    }
  }
  for (auto &v : out) {
    v /= static_cast<double>(images.size());
  }
  return out;
}

} // namespace umbir
