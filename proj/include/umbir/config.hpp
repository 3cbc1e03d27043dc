#pragma once

#include "umbir/media.hpp"
#include "umbir/panorama.hpp"
#include "umbir/prior.hpp"
#include "umbir/pulse.hpp"
#include "umbir/saft.hpp"
#include "umbir/synth.hpp"
#include "umbir/system_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace umbir {

struct SolverSettings {
  std::size_t iterations{100};
  double sigma{0.1};
  std::uint64_t seed{1};
  bool early_exit{false};
  double tolerance{1e-6};
  // Per-frequency noise levels; rows of frequency s are weighted by
  // sigma / frequency_sigmas[s]. Empty means one sigma for all.
  std::vector<double> frequency_sigmas;
};

struct SynthSettings {
  PhantomProfile phantom{PhantomProfile::cc_no_notch};
  PhantomOptions phantom_options;
  std::optional<double> snr_db{20.0};
  double sigma_w{0.0};
  bool offgrid{true};
  OffgridOptions offgrid_options;
  bool direct_arrivals{true};
  double direct_arrival_scale{1.0};
  // Azimuth of a single panorama view. When set, the cc profiles become a
  // wall at one depth: the notch depth if the view faces the notch.
  std::optional<double> view_angle_deg;
  double notch_azimuth_deg{90.0};
};

struct Config {
  std::string name;
  LayeredMedium medium;
  ArrayGeometry geometry;
  ImageGrid grid;
  std::vector<PulseSpec> pulses;
  BeamParams beam;
  ModelOptions model;
  QggmrfParams prior;
  SolverSettings solver;
  SynthSettings synth;
  SaftConfig saft;
  PanoramaSpec panorama;
  nlohmann::ordered_json source; // as loaded, for provenance

  /// Stable fingerprint of the loaded document (FNV-1a of its compact dump).
  [[nodiscard]] std::string fingerprint() const;
};

/// Parses and validates every field, collecting all problems into a single
/// ConfigError. Lengths in meters, angles in degrees, attenuation in s/m.
[[nodiscard]] Config parse_config(const nlohmann::ordered_json &doc);
[[nodiscard]] Config load_config(const std::filesystem::path &path);

/// Phantom for the synth settings (view-aware for the cc profiles).
[[nodiscard]] Phantom config_phantom(const Config &config,
                                     const ImageGrid &grid);

} // namespace umbir
