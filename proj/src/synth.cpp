#include "umbir/synth.hpp"

#include "umbir/error.hpp"
#include "umbir/raypath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace umbir {
namespace {

constexpr std::uint64_t kArrivalStream = 0x9e3779b97f4a7c15ULL;

std::size_t column_at(const ImageGrid &grid, double depth, const char *what) {
  const double pos = (depth - grid.origin.depth) / grid.pitch;
  if (!(pos >= 0.0) || pos >= static_cast<double>(grid.cols)) {
    throw DataError(std::string(what) + " at depth " + std::to_string(depth) +
                    " m lies outside the grid");
  }
  return static_cast<std::size_t>(pos);
}

double scale_for(const ImageGrid &grid, const PhantomOptions &o) {
  return o.reference_pitch > 0.0 ? grid.pitch / o.reference_pitch : 1.0;
}

void add_noise(std::vector<double> &trace, double sigma, std::mt19937_64 &rng) {
  if (sigma <= 0.0) {
    return;
  }
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto &v : trace) {
    v += normal(rng);
  }
}

void check_arrivals(const std::vector<std::vector<double>> &g, std::size_t s,
                    std::size_t k) {
  if (g.empty()) {
    return;
  }
  if (g.size() != s) {
    throw DataError("direct-arrival amplitudes needed for every frequency");
  }
  for (const auto &gs : g) {
    if (gs.size() != k) {
      throw DataError("direct-arrival amplitudes needed for every receiver");
    }
  }
}

// Adds amplitude * h~(gamma, t_m - delay) into one receiver band.
void add_response(std::span<double> band, const PulseSpec &spec,
                  const KernelBank &bank, double delay, double gamma,
                  double amplitude) {
  const auto rows = response_band(spec, bank.window(), delay);
  if (rows.first == rows.end) {
    return;
  }
  const auto sampler = bank.sampler(gamma);
  for (std::size_t m = rows.first; m < rows.end; ++m) {
    band[m] += amplitude * sampler(response_lag(spec, delay, m));
  }
}

} // namespace

PhantomProfile parse_profile(const std::string &name) {
  if (name == "cc-no-notch") {
    return PhantomProfile::cc_no_notch;
  }
  if (name == "cc-notch") {
    return PhantomProfile::cc_notch;
  }
  if (name == "gb-defect") {
    return PhantomProfile::gb_defect;
  }
  if (name == "point-targets") {
    return PhantomProfile::point_targets;
  }
  throw ConfigError("synth.phantom: unknown profile '" + name +
                    "' (cc-no-notch, cc-notch, gb-defect, point-targets)");
}

std::string profile_name(PhantomProfile profile) {
  switch (profile) {
  case PhantomProfile::cc_no_notch:
    return "cc-no-notch";
  case PhantomProfile::cc_notch:
    return "cc-notch";
  case PhantomProfile::gb_defect:
    return "gb-defect";
  case PhantomProfile::point_targets:
    return "point-targets";
  }
  return "unknown";
}

Phantom make_wall_phantom(const ImageGrid &grid, double depth,
                          const PhantomOptions &options) {
  grid.validate();
  Phantom ph;
  ph.grid = grid;
  ph.x.assign(grid.size(), 0.0);
  ph.wall_depth = depth;
  const std::size_t col = column_at(grid, depth, "wall");
  const double amp = options.amplitude * scale_for(grid, options);
  for (std::size_t r = 0; r < grid.rows; ++r) {
    ph.x[grid.index(r, col)] = amp;
  }
  return ph;
}

Phantom make_phantom(PhantomProfile profile, const ImageGrid &grid,
                     const PhantomOptions &options) {
  grid.validate();
  Phantom ph;
  ph.grid = grid;
  ph.profile = profile;
  ph.x.assign(grid.size(), 0.0);
  const double line = options.amplitude * scale_for(grid, options);
  const double point = line * scale_for(grid, options);

  switch (profile) {
  case PhantomProfile::cc_no_notch:
  case PhantomProfile::cc_notch: {
    const std::size_t wall = column_at(grid, options.wall_depth, "back wall");
    ph.wall_depth = options.wall_depth;
    std::optional<std::size_t> notch_col;
    if (profile == PhantomProfile::cc_notch) {
      notch_col = column_at(grid, options.notch_depth, "notch wall");
      const double center = options.notch_center_height.value_or(
          grid.origin.height + grid.height_extent() / 2.0);
      const double half = options.cylinder_radius *
                          options.notch_angle_deg * std::numbers::pi / 360.0;
      ph.notch = NotchSpan{options.notch_depth, center - half, center + half};
    }
    for (std::size_t r = 0; r < grid.rows; ++r) {
      const double h = grid.row_height(r);
      const bool in_notch = ph.notch && h >= ph.notch->low && h <= ph.notch->high;
      ph.x[grid.index(r, in_notch ? *notch_col : wall)] = line;
    }
    break;
  }
  case PhantomProfile::gb_defect: {
    const std::size_t col = column_at(grid, options.defect_depth, "defect");
    const double center = grid.origin.height + grid.height_extent() / 2.0;
    const double half = options.defect_length / 2.0;
    for (std::size_t r = 0; r < grid.rows; ++r) {
      const double h = grid.row_height(r);
      if (h >= center - half && h <= center + half) {
        ph.x[grid.index(r, col)] = line;
      }
    }
    ph.defects.push_back({options.defect_depth, center});
    break;
  }
  case PhantomProfile::point_targets: {
    auto targets = options.targets;
    if (targets.empty()) {
      const double d0 = grid.origin.depth;
      const double h0 = grid.origin.height;
      for (const auto &[fd, fh] : {std::pair{0.45, 0.3}, std::pair{0.6, 0.5},
                                   std::pair{0.75, 0.7}}) {
        targets.push_back(
            {d0 + fd * grid.depth_extent(), h0 + fh * grid.height_extent()});
      }
    }
    for (const auto &t : targets) {
      const auto v = nearest_voxel(grid, t);
      if (!v) {
        throw DataError("point target lies outside the grid");
      }
      ph.x[*v] = point;
    }
    ph.defects = targets;
    break;
  }
  }
  return ph;
}

std::vector<std::vector<double>> default_direct_arrivals(std::size_t frequencies,
                                                         std::size_t receivers,
                                                         std::uint64_t seed,
                                                         double scale) {
  std::mt19937_64 rng(seed ^ kArrivalStream);
  std::uniform_real_distribution<double> uniform(0.25, 0.75);
  std::vector<std::vector<double>> g(frequencies,
                                     std::vector<double>(receivers));
  for (auto &gs : g) {
    for (auto &v : gs) {
      v = scale * uniform(rng);
    }
  }
  return g;
}

double noise_for_snr(const std::vector<double> &echo,
                     const std::vector<double> &clean, double snr_db) {
  auto rms = [](const std::vector<double> &v) {
    double s = 0.0;
    for (double a : v) {
      s += a * a;
    }
    return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
  };
  double level = rms(echo);
  if (level == 0.0) {
    level = rms(clean);
  }
  return level / std::pow(10.0, snr_db / 20.0);
}

MeasurementSet
synthesize(const Phantom &phantom,
           const std::vector<std::shared_ptr<const SparseSystem>> &systems,
           const std::vector<std::vector<double>> &direct_arrivals,
           const NoiseSpec &noise) {
  if (systems.empty()) {
    throw DataError("no systems to synthesize from");
  }
  const std::size_t k = systems.front()->receivers;
  check_arrivals(direct_arrivals, systems.size(), k);
  MeasurementSet out;
  out.receivers = k;
  std::mt19937_64 rng(noise.seed);
  for (std::size_t s = 0; s < systems.size(); ++s) {
    const auto &sys = *systems[s];
    if (sys.voxels != phantom.x.size() || sys.receivers != k) {
      throw DataError("system " + std::to_string(s) +
                      " does not match the phantom grid or receiver count");
    }
    std::vector<double> echo(sys.rows(), 0.0);
    sys.A->apply_add(phantom.x, echo);
    std::vector<double> trace = echo;
    std::vector<double> g(k, 0.0);
    if (!direct_arrivals.empty()) {
      g = direct_arrivals[s];
      sys.D->apply_add(g, trace);
    }
    const double sigma =
        noise.snr_db ? noise_for_snr(echo, trace, *noise.snr_db) : noise.sigma;
    add_noise(trace, sigma, rng);
    out.pulses.push_back(sys.pulse);
    out.traces.push_back(std::move(trace));
    out.noise_sigma.push_back(sigma);
    out.direct_arrivals.push_back(std::move(g));
  }
  return out;
}

MeasurementSet synthesize_offgrid(
    const Phantom &fine, const LayeredMedium &medium,
    const ArrayGeometry &geometry, const std::vector<PulseSpec> &pulses,
    const BeamParams &beam, const ModelOptions &model,
    const std::vector<std::vector<double>> &direct_arrivals,
    const NoiseSpec &noise, const OffgridOptions &options) {
  geometry.validate();
  const std::size_t k = geometry.receiver_count();
  check_arrivals(direct_arrivals, pulses.size(), k);
  const double tol_z = fine.grid.pitch / 100.0;

  // Ray-trace only the voxels that reflect.
  struct Source {
    double amplitude;
    std::vector<DelayEntry> paths;
  };
  std::vector<std::size_t> active;
  for (std::size_t v = 0; v < fine.x.size(); ++v) {
    if (fine.x[v] != 0.0) {
      active.push_back(v);
    }
  }
  std::vector<Source> sources(active.size());
  const auto count = static_cast<std::ptrdiff_t>(active.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const std::size_t v = active[static_cast<std::size_t>(i)];
    const Point2 c = voxel_center(fine.grid, v);
    auto paths = point_delays(medium, geometry, c, tol_z);
    const double depth = c.depth - geometry.transmitter.depth;
    const std::size_t layer =
        depth >= medium.total_depth() ? medium.size() - 1
                                      : medium.layer_of_depth(depth);
    for (auto &p : paths) {
      if (p.reachable) {
        p.lambda = transmission_factor(
            medium, apodization(p.depart_angle, p.arrive_angle, beam), layer);
      }
    }
    sources[static_cast<std::size_t>(i)] = {fine.x[v], std::move(paths)};
  }

  MeasurementSet out;
  out.receivers = k;
  std::mt19937_64 rng(noise.seed);
  for (std::size_t s = 0; s < pulses.size(); ++s) {
    const PulseSpec &spec = pulses[s];
    spec.validate();
    const std::size_t m = spec.record_length;
    const double window =
        (model.window > 0.0 ? model.window : default_window_length(spec)) *
        options.window_scale;
    const KernelBank bank(spec, window, options.gamma_step, options.oversample);
    std::vector<double> gammas;
    for (const auto &src : sources) {
      for (const auto &p : src.paths) {
        if (p.reachable) {
          gammas.push_back(p.gamma);
        }
      }
    }
    bank.prepare(gammas);

    std::vector<double> echo(k * m, 0.0);
    const auto kk = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ji = 0; ji < kk; ++ji) {
      const auto j = static_cast<std::size_t>(ji);
      std::span<double> band(echo.data() + j * m, m);
      for (const auto &src : sources) {
        const DelayEntry &p = src.paths[j];
        if (p.reachable && p.lambda != 0.0) {
          add_response(band, spec, bank, p.delay, p.gamma,
                       p.lambda * src.amplitude);
        }
      }
    }
    std::vector<double> trace = echo;
    std::vector<double> g(k, 0.0);
    if (!direct_arrivals.empty()) {
      g = direct_arrivals[s];
      for (std::size_t j = 0; j < k; ++j) {
        const double tau = distance(geometry.transmitter, geometry.receivers[j]) /
                           geometry.embedding_speed;
        const double gamma =
            geometry.embedding_attenuation * geometry.embedding_speed * tau;
        add_response(std::span<double>(trace.data() + j * m, m), spec, bank,
                     tau, gamma, g[j]);
      }
    }
    const double sigma =
        noise.snr_db ? noise_for_snr(echo, trace, *noise.snr_db) : noise.sigma;
    add_noise(trace, sigma, rng);
    out.pulses.push_back(spec);
    out.traces.push_back(std::move(trace));
    out.noise_sigma.push_back(sigma);
    out.direct_arrivals.push_back(std::move(g));
  }
  return out;
}

MeasurementSet synthesize_offgrid(
    PhantomProfile profile, const PhantomOptions &phantom_options,
    const ImageGrid &grid, const LayeredMedium &medium,
    const ArrayGeometry &geometry, const std::vector<PulseSpec> &pulses,
    const BeamParams &beam, const ModelOptions &model,
    const std::vector<std::vector<double>> &direct_arrivals,
    const NoiseSpec &noise, const OffgridOptions &options) {
  if (options.refinement == 0) {
    throw ConfigError("synth.refinement: must be >= 1");
  }
  auto opts = phantom_options;
  if (opts.reference_pitch <= 0.0) {
    opts.reference_pitch = grid.pitch;
  }
  const Phantom fine =
      make_phantom(profile, grid.refined(options.refinement), opts);
  return synthesize_offgrid(fine, medium, geometry, pulses, beam, model,
                            direct_arrivals, noise, options);
}

} // namespace umbir
