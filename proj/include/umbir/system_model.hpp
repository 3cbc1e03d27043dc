#pragma once

#include "umbir/media.hpp"
#include "umbir/pulse.hpp"
#include "umbir/raypath.hpp"
#include "umbir/sparse.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace umbir {

struct BeamParams {
  double beta{8.0};
  double pointing_angle{}; // [rad]
};

/// Collimated-beam weight cos^beta(depart - pointing) * cos^2(arrive), with the
/// first factor clamped to zero behind the beam.
[[nodiscard]] double apodization(double depart_angle, double arrive_angle,
                                 const BeamParams &beam);

/// Apodization times the interface transmission coefficients down to and back
/// up from layer `last_layer` (0-based, inclusive).
[[nodiscard]] double transmission_factor(const LayeredMedium &medium,
                                         double phi, std::size_t last_layer);
/// Same, through every layer of the medium.
[[nodiscard]] double transmission_factor(const LayeredMedium &medium,
                                         double phi);

/// Fills DelayEntry::lambda for every reachable pair. The product runs only
/// over the layers between the face and the voxel.
void fill_amplitudes(DelayTable &table, const LayeredMedium &medium,
                     const BeamParams &beam);

struct ModelOptions {
  double window{0.0};       // t0 [s]; <= 0 picks default_window_length
  double gamma_step{1e-8};  // kernel lattice spacing in gamma [s]
  std::size_t oversample{8};
  double tail_fraction{0.01};
};

struct SparsityStats {
  std::size_t nnz{};
  std::size_t max_column_nnz{};
  std::size_t empty_columns{};
  double fill{};               // nnz / (rows * cols)
  double worst_tail_fraction{}; // largest windowed-away kernel energy share
  bool tail_warning{false};
};

/// A and D for one excitation frequency. Rows are receiver-major: row
/// j * M + m holds receiver j at time sample m.
struct SparseSystem {
  std::shared_ptr<const SparseColumns> A;
  std::shared_ptr<const SparseColumns> D;
  PulseSpec pulse;
  double window{};
  std::size_t samples{};   // M
  std::size_t receivers{}; // K
  std::size_t voxels{};    // N
  SparsityStats stats;

  [[nodiscard]] std::size_t rows() const { return samples * receivers; }
};

/// Row band [first, end) of receiver j for a response starting at `delay`.
/// Sample m is kept when 0 <= t_m - delay < window.
struct RowBand {
  std::size_t first{};
  std::size_t end{};
};
[[nodiscard]] RowBand response_band(const PulseSpec &spec, double window,
                                    double delay);

/// Offset of sample m from `delay`, snapped to zero within rounding noise.
[[nodiscard]] double response_lag(const PulseSpec &spec, double delay,
                                  std::size_t m);

/// Columns of A from a filled delay table (lambda must already be set).
[[nodiscard]] SparseColumns build_A(const DelayTable &table,
                                    const KernelBank &bank);

/// Direct-arrival basis: one column per receiver, the kernel delayed by the
/// straight transmitter-to-receiver travel time in the embedding fluid.
[[nodiscard]] SparseColumns build_D(const ArrayGeometry &geometry,
                                    const KernelBank &bank);

/// Delay table, amplitudes, kernel bank, A and D for one pulse.
[[nodiscard]] SparseSystem build_system(const LayeredMedium &medium,
                                        const ArrayGeometry &geometry,
                                        const ImageGrid &grid,
                                        const PulseSpec &spec,
                                        const BeamParams &beam,
                                        const ModelOptions &options = {});
/// Same, reusing a delay table whose lambda values are already filled.
[[nodiscard]] SparseSystem build_system(const DelayTable &table,
                                        const ArrayGeometry &geometry,
                                        const PulseSpec &spec,
                                        const ModelOptions &options = {});

[[nodiscard]] SparsityStats sparsity(const SparseColumns &m);

/// Frequency-major stack of several single-frequency systems.
struct MultiFreqSystem {
  std::vector<std::shared_ptr<const SparseSystem>> systems;
  BlockColumns A; // sum(M_s K) x N
  BlockColumns D; // sum(M_s K) x (S K), block diagonal
  std::vector<std::size_t> row_offsets; // first stacked row of each frequency
  std::vector<double> row_scales;       // per-frequency row weighting

  [[nodiscard]] std::size_t frequencies() const { return systems.size(); }
  [[nodiscard]] std::size_t rows() const { return A.rows(); }
};

struct StackedProblemData {
  MultiFreqSystem system;
  std::vector<double> y;
};

/// Stacks systems and their measurements in the same order. When
/// `row_scales` is non-empty, block s of both A and y is multiplied by
/// row_scales[s] (per-frequency noise weighting); D blocks likewise.
[[nodiscard]] StackedProblemData
stack_multifrequency(std::vector<std::shared_ptr<const SparseSystem>> systems,
                     const std::vector<std::vector<double>> &measurements,
                     std::vector<double> row_scales = {});

/// Stacked operators without measurements (for synthesis and tests).
[[nodiscard]] MultiFreqSystem
stack_systems(std::vector<std::shared_ptr<const SparseSystem>> systems,
              std::vector<double> row_scales = {});

} // namespace umbir
