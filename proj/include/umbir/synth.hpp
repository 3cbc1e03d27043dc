#pragma once

#include "umbir/media.hpp"
#include "umbir/pulse.hpp"
#include "umbir/system_model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace umbir {

enum class PhantomProfile { cc_no_notch, cc_notch, gb_defect, point_targets };

[[nodiscard]] PhantomProfile parse_profile(const std::string &name);
[[nodiscard]] std::string profile_name(PhantomProfile profile);

struct PhantomOptions {
  double wall_depth{0.1885};     // [m] from the array face
  double notch_depth{0.2385};    // [m]
  double notch_angle_deg{45.0};  // angular width of the notch
  double cylinder_radius{0.1885}; // maps notch angle to a height span [m]
  std::optional<double> notch_center_height; // default: grid mid-height
  double defect_depth{0.21};     // gb-defect reflector depth [m]
  double defect_length{0.009};   // gb-defect vertical extent [m]
  std::vector<Point2> targets;   // point-targets; default set when empty
  double amplitude{1.0};
  // Pitch the amplitudes refer to. Finer grids scale line features by
  // pitch / reference_pitch and point features by its square so the
  // integrated reflectivity does not depend on the grid. 0 = grid pitch.
  double reference_pitch{0.0};
};

struct NotchSpan {
  double depth{};
  double low{};  // height span [low, high]
  double high{};
};

struct Phantom {
  ImageGrid grid;
  std::vector<double> x;
  PhantomProfile profile{PhantomProfile::cc_no_notch};
  std::optional<double> wall_depth;
  std::optional<NotchSpan> notch;
  std::vector<Point2> defects;
};

/// Reflectivity image for a named profile. Throws DataError when a feature
/// falls outside the grid.
[[nodiscard]] Phantom make_phantom(PhantomProfile profile, const ImageGrid &grid,
                                   const PhantomOptions &options = {});

/// Wall at a single depth over all heights (one panorama view).
[[nodiscard]] Phantom make_wall_phantom(const ImageGrid &grid, double depth,
                                        const PhantomOptions &options = {});

struct NoiseSpec {
  double sigma{0.0};            // absolute noise level [Pa]
  std::optional<double> snr_db; // overrides sigma per frequency when set
  std::uint64_t seed{1};
};

/// Measured traces for S frequencies. traces[s] holds K * M_s samples,
/// receiver-major.
struct MeasurementSet {
  std::vector<PulseSpec> pulses;
  std::size_t receivers{};
  std::vector<std::vector<double>> traces;
  std::vector<double> noise_sigma;
  std::vector<std::vector<double>> direct_arrivals; // g per frequency
};

/// Per-receiver direct-arrival amplitudes drawn uniformly in
/// [0.25, 0.75] * scale for every frequency.
[[nodiscard]] std::vector<std::vector<double>>
default_direct_arrivals(std::size_t frequencies, std::size_t receivers,
                        std::uint64_t seed, double scale = 1.0);

/// Noise level giving `snr_db` against the echo part of a record, or against
/// the whole clean record when the echo is zero.
[[nodiscard]] double noise_for_snr(const std::vector<double> &echo,
                                   const std::vector<double> &clean,
                                   double snr_db);

/// y_s = A_s x + D_s g_s + w_s with the systems' own matrices.
[[nodiscard]] MeasurementSet
synthesize(const Phantom &phantom,
           const std::vector<std::shared_ptr<const SparseSystem>> &systems,
           const std::vector<std::vector<double>> &direct_arrivals,
           const NoiseSpec &noise);

struct OffgridOptions {
  std::size_t refinement{4};
  std::size_t oversample{16};
  double gamma_step{2.5e-9};
  double window_scale{1.0}; // data kernel window relative to the model's
};

/// Traces summed directly from a phantom on a refined grid, with its own
/// ray tracing and kernel lattice, so no system matrix is shared with the
/// reconstruction.
[[nodiscard]] MeasurementSet synthesize_offgrid(
    PhantomProfile profile, const PhantomOptions &phantom_options,
    const ImageGrid &grid, const LayeredMedium &medium,
    const ArrayGeometry &geometry, const std::vector<PulseSpec> &pulses,
    const BeamParams &beam, const ModelOptions &model,
    const std::vector<std::vector<double>> &direct_arrivals,
    const NoiseSpec &noise, const OffgridOptions &options = {});

/// Off-grid synthesis from an explicit fine phantom.
[[nodiscard]] MeasurementSet synthesize_offgrid(
    const Phantom &fine, const LayeredMedium &medium,
    const ArrayGeometry &geometry, const std::vector<PulseSpec> &pulses,
    const BeamParams &beam, const ModelOptions &model,
    const std::vector<std::vector<double>> &direct_arrivals,
    const NoiseSpec &noise, const OffgridOptions &options = {});

} // namespace umbir
