#pragma once

#include "umbir/pulse.hpp"
#include "umbir/raypath.hpp"
#include "umbir/system_model.hpp"

#include <span>
#include <vector>

namespace umbir {

struct SaftConfig {
  bool envelope{true};
  bool apodize{true};
};

/// Delay-and-sum image from one frequency's traces (receiver-major, M samples
/// per receiver). Traces are read by linear interpolation at each round-trip
/// delay; delays outside the record contribute nothing.
[[nodiscard]] std::vector<double> saft_reconstruct(std::span<const double> y,
                                                   const DelayTable &table,
                                                   const PulseSpec &spec,
                                                   const BeamParams &beam,
                                                   const SaftConfig &config = {});

/// Average of per-frequency images, each first scaled to unit peak magnitude.
[[nodiscard]] std::vector<double>
combine_saft(const std::vector<std::vector<double>> &images);

} // namespace umbir
