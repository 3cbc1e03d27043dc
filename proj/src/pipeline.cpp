#include "umbir/pipeline.hpp"

#include "umbir/error.hpp"
#include "umbir/saft.hpp"

#include <cmath>
#include <sstream>

namespace umbir {

DelayTable model_table(const Config &config) {
  DelayTable table = delay_table(config.medium, config.geometry, config.grid);
  fill_amplitudes(table, config.medium, config.beam);
  return table;
}

std::vector<std::shared_ptr<const SparseSystem>>
build_systems(const Config &config, const DelayTable &table,
              const std::vector<std::size_t> &frequencies) {
  std::vector<std::shared_ptr<const SparseSystem>> out;
  for (std::size_t s : frequencies) {
    if (s >= config.pulses.size()) {
      throw DataError("frequency index " + std::to_string(s) + " out of range");
    }
    out.push_back(std::make_shared<const SparseSystem>(
        build_system(table, config.geometry, config.pulses[s], config.model)));
  }
  return out;
}

std::vector<std::size_t> parse_frequency_list(const std::string &text,
                                              std::size_t count) {
  std::vector<std::size_t> out;
  if (text == "all") {
    for (std::size_t s = 0; s < count; ++s) {
      out.push_back(s);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v >= count) {
      throw ConfigError("--frequencies: '" + item + "' is not an index below " +
                        std::to_string(count));
    }
    for (std::size_t prev : out) {
      if (prev == v) {
        throw ConfigError("--frequencies: index " + item + " repeated");
      }
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw ConfigError("--frequencies: empty list");
  }
  return out;
}

Image truth_image(const Config &config) {
  const Phantom p = config_phantom(config, config.grid);
  return {p.grid, p.x};
}

MeasurementSet
synthesize_config(const Config &config, std::uint64_t seed,
                  const std::vector<std::shared_ptr<const SparseSystem>> &systems) {
  const std::size_t S = config.pulses.size();
  const std::size_t K = config.geometry.receiver_count();
  const auto &syn = config.synth;
  auto g = syn.direct_arrivals
               ? default_direct_arrivals(S, K, seed, syn.direct_arrival_scale)
               : std::vector<std::vector<double>>(S, std::vector<double>(K, 0.0));
  NoiseSpec noise;
  noise.sigma = syn.sigma_w;
  noise.snr_db = syn.snr_db;
  noise.seed = seed;

  if (!syn.offgrid) {
    if (systems.size() != S) {
      throw DataError("on-grid synthesis needs one system per frequency");
    }
    return synthesize(config_phantom(config, config.grid), systems, g, noise);
  }
  Config fine_cfg = config;
  if (fine_cfg.synth.phantom_options.reference_pitch <= 0.0) {
    fine_cfg.synth.phantom_options.reference_pitch = config.grid.pitch;
  }
  const Phantom fine = config_phantom(
      fine_cfg, config.grid.refined(syn.offgrid_options.refinement));
  return synthesize_offgrid(fine, config.medium, config.geometry, config.pulses,
                            config.beam, config.model, g, noise,
                            syn.offgrid_options);
}

void check_measurements(const Config &config, const MeasurementSet &set) {
  if (set.receivers != config.geometry.receiver_count()) {
    throw DataError("measurements have " + std::to_string(set.receivers) +
                    " receivers, config has " +
                    std::to_string(config.geometry.receiver_count()));
  }
  if (set.pulses.size() != config.pulses.size()) {
    throw DataError("measurements have " + std::to_string(set.pulses.size()) +
                    " frequencies, config has " +
                    std::to_string(config.pulses.size()));
  }
  // Files hold float32 header values, so compare with a relative tolerance.
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (std::size_t s = 0; s < set.pulses.size(); ++s) {
    const auto &a = set.pulses[s];
    const auto &b = config.pulses[s];
    if (a.record_length != b.record_length ||
        !close(a.sampling_frequency, b.sampling_frequency) ||
        !close(a.center_frequency, b.center_frequency) ||
        !close(a.duration, b.duration) || !close(a.record_start, b.record_start)) {
      throw DataError("measurement frequency " + std::to_string(s) +
                      " does not match the configured pulse");
    }
    if (set.traces[s].size() != set.receivers * a.record_length) {
      throw DataError("measurement frequency " + std::to_string(s) +
                      " has a truncated trace block");
    }
  }
}

ReconProblem
make_problem(const Config &config,
             const std::vector<std::shared_ptr<const SparseSystem>> &systems,
             const MeasurementSet &set,
             const std::vector<std::size_t> &frequencies, bool direct_arrival) {
  if (systems.size() != frequencies.size()) {
    throw DataError("one system per selected frequency is required");
  }
  std::vector<std::vector<double>> y;
  std::vector<double> scales;
  const auto &fs = config.solver.frequency_sigmas;
  for (std::size_t s : frequencies) {
    y.push_back(set.traces.at(s));
    if (!fs.empty()) {
      scales.push_back(config.solver.sigma / fs[s]);
    }
  }
  auto stacked = stack_multifrequency(systems, y, scales);

  ReconProblem p;
  p.A = std::make_shared<const BlockColumns>(std::move(stacked.system.A));
  if (direct_arrival) {
    p.D = std::make_shared<const BlockColumns>(std::move(stacked.system.D));
  }
  p.y = std::move(stacked.y);
  p.sigma = config.solver.sigma;
  p.prior = std::make_shared<const QggmrfPrior>(
      config.grid, config.prior,
      variance_field(config.grid, config.geometry, config.prior.nu,
                     config.prior.a, config.prior.sigma0));
  p.options.iterations = config.solver.iterations;
  p.options.seed = config.solver.seed;
  p.options.early_exit = config.solver.early_exit;
  p.options.tolerance = config.solver.tolerance;
  p.options.update_direct_arrival = direct_arrival;
  return p;
}

Image saft_image(const Config &config, const DelayTable &table,
                 const MeasurementSet &set,
                 const std::vector<std::size_t> &frequencies) {
  std::vector<std::vector<double>> images;
  for (std::size_t s : frequencies) {
    images.push_back(saft_reconstruct(set.traces.at(s), table,
                                      config.pulses[s], config.beam,
                                      config.saft));
  }
  return {config.grid, combine_saft(images)};
}

} // namespace umbir
