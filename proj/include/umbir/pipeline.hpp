#pragma once

#include "umbir/config.hpp"
#include "umbir/io.hpp"
#include "umbir/solver.hpp"

#include <memory>
#include <string>
#include <vector>

namespace umbir {

/// Delay table of the configured grid with amplitudes filled in.
[[nodiscard]] DelayTable model_table(const Config &config);

/// One system per selected frequency, all sharing `table`.
[[nodiscard]] std::vector<std::shared_ptr<const SparseSystem>>
build_systems(const Config &config, const DelayTable &table,
              const std::vector<std::size_t> &frequencies);

/// "all" or a comma separated list of 0-based indices below `count`.
[[nodiscard]] std::vector<std::size_t>
parse_frequency_list(const std::string &text, std::size_t count);

/// Ground truth on the configured grid (view-aware).
[[nodiscard]] Image truth_image(const Config &config);

/// Synthetic measurements for the configured phantom. Off-grid synthesis
/// uses a refined copy of the phantom; `systems` is only used for on-grid
/// synthesis and may be empty otherwise.
[[nodiscard]] MeasurementSet
synthesize_config(const Config &config, std::uint64_t seed,
                  const std::vector<std::shared_ptr<const SparseSystem>> &systems = {});

/// Checks that a measurement file was acquired with the configured pulses
/// and receivers. Throws DataError on any mismatch.
void check_measurements(const Config &config, const MeasurementSet &set);

/// Stacks the selected frequencies into a MAP problem. Without
/// `direct_arrival` the D term is left out of the model.
[[nodiscard]] ReconProblem
make_problem(const Config &config,
             const std::vector<std::shared_ptr<const SparseSystem>> &systems,
             const MeasurementSet &set,
             const std::vector<std::size_t> &frequencies,
             bool direct_arrival = true);

/// SAFT image averaged over the selected frequencies.
[[nodiscard]] Image saft_image(const Config &config, const DelayTable &table,
                               const MeasurementSet &set,
                               const std::vector<std::size_t> &frequencies);

} // namespace umbir
