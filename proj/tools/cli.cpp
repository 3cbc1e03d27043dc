#include "cli.hpp"

#include "umbir/config.hpp"
#include "umbir/error.hpp"
#include "umbir/io.hpp"
#include "umbir/metrics.hpp"
#include "umbir/panorama.hpp"
#include "umbir/pipeline.hpp"
#include "umbir/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

namespace umbir::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char *kind_name(ExitCode code) {
  switch (code) {
  case ExitCode::usage:
    return "usage";
  case ExitCode::config:
    return "config";
  case ExitCode::data:
    return "data";
  case ExitCode::numerical:
    return "numerical";
  default:
    return "internal";
  }
}

int fail(std::ostream &err, ExitCode code, const std::string &msg) {
  std::string escaped;
  for (char c : msg) {
    if (c == '"' || c == '\\') {
      escaped += '\\';
    }
    escaped += c == '\n' ? ' ' : c;
  }
  err << "error code=" << static_cast<int>(code) << " kind=" << kind_name(code)
      << " msg=\"" << escaped << "\"\n";
  return static_cast<int>(code);
}

void apply_thread_override() {
  if (const char *env = std::getenv("UMBIR_THREADS")) {
    char *end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) {
      throw ConfigError("UMBIR_THREADS: must be a positive integer");
    }
    omp_set_num_threads(static_cast<int>(n));
  }
}

json frequency_json(const Config &c, const std::vector<std::size_t> &freqs) {
  json out = json::array();
  for (std::size_t s : freqs) {
    out.push_back({{"index", s},
                   {"center_frequency", c.pulses[s].center_frequency},
                   {"duration", c.pulses[s].duration}});
  }
  return out;
}

fs::path sidecar(const fs::path &p) { return fs::path(p.string() + ".json"); }

std::vector<std::shared_ptr<const SparseSystem>>
systems_for(const Config &config, const std::string &cache,
            const std::vector<std::size_t> &freqs,
            std::optional<DelayTable> &table) {
  if (cache.empty()) {
    if (!table) {
      table = model_table(config);
    }
    return build_systems(config, *table, freqs);
  }
  const auto all = read_system_cache(cache);
  if (all.size() != config.pulses.size()) {
    throw DataError("cache holds " + std::to_string(all.size()) +
                    " frequencies, config has " +
                    std::to_string(config.pulses.size()));
  }
  std::vector<std::shared_ptr<const SparseSystem>> out;
  for (std::size_t s : freqs) {
    const auto &sys = *all[s];
    if (sys.voxels != config.grid.size() ||
        sys.receivers != config.geometry.receiver_count() ||
        sys.samples != config.pulses[s].record_length ||
        std::abs(sys.pulse.center_frequency - config.pulses[s].center_frequency) >
            1e-6 * config.pulses[s].center_frequency) {
      throw DataError("cache " + cache + " does not match the config");
    }
    out.push_back(all[s]);
  }
  return out;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool verbose{false};
};

Config load(const Common &c) {
  Config cfg = load_config(c.config);
  if (c.seed) {
    cfg.solver.seed = *c.seed;
  }
  return cfg;
}

void add_common(CLI::App *cmd, Common &c) {
  cmd->add_option("--config", c.config, "Configuration file (JSON)")
      ->required();
  cmd->add_option("--seed", c.seed, "Override the configured seed");
  cmd->add_flag("--verbose", c.verbose, "Progress and per-sweep costs on stderr");
}

} // namespace

int dispatch(int argc, const char *const *argv, std::ostream &out,
             std::ostream &err) {
  CLI::App app{"Multi-frequency ultrasound model-based reconstruction"};
  app.name("umbir");
  app.require_subcommand(1);

  Common common;
  std::string output;
  std::string input;
  std::string cache;
  std::string frequencies = "all";
  std::optional<double> view_angle;
  bool render = false;

  auto *synth = app.add_subcommand("synth", "Phantom and synthetic measurements");
  add_common(synth, common);
  synth->add_option("--output", output, "Output directory")->required();
  synth->add_option("--view-angle", view_angle,
                    "Panorama view azimuth in degrees");

  auto *build = app.add_subcommand("build", "System matrices to a cache file");
  add_common(build, common);
  build->add_option("--output", output, "Cache file")->required();

  auto *recon = app.add_subcommand("reconstruct", "MAP reconstruction");
  auto *saft = app.add_subcommand("saft", "Delay-and-sum baseline");
  for (auto *cmd : {recon, saft}) {
    add_common(cmd, common);
    cmd->add_option("--input", input, "Measurement file")->required();
    cmd->add_option("--output", output, "Image file")->required();
    cmd->add_option("--frequencies", frequencies,
                    "'all' or comma separated indices");
    cmd->add_flag("--render", render, "Also write a PGM rendering");
  }
  recon->add_option("--cache", cache, "System cache from `build`");

  std::vector<std::string> views;
  auto *stitch = app.add_subcommand("stitch", "Panorama from per-angle images");
  add_common(stitch, common);
  stitch->add_option("--output", output, "Panorama image file")->required();
  stitch->add_option("images", views, "Per-angle images in angle order")
      ->required();
  stitch->add_flag("--render", render, "Also write a PGM rendering");

  std::string truth;
  std::optional<double> band_low;
  std::optional<double> band_high;
  auto *metrics = app.add_subcommand("metrics", "Compare an image to ground truth");
  metrics->add_option("--truth", truth, "Ground-truth image")->required();
  metrics->add_option("--image", input, "Estimated image")->required();
  metrics->add_option("--band-low", band_low, "Lowest height of the band [m]");
  metrics->add_option("--band-high", band_high, "Highest height of the band [m]");
  metrics->add_option("--output", output, "Report file (JSON)");

  std::size_t frequency = 0;
  double gamma = 0.0;
  auto *kdump = app.add_subcommand("kernel-dump", "Sampled model kernel as text");
  add_common(kdump, common);
  kdump->add_option("--frequency", frequency, "Frequency index")->required();
  kdump->add_option("--gamma", gamma, "Dispersion exponent [s]")
      ->check(CLI::NonNegativeNumber);
  kdump->add_option("--output", output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    return fail(err, ExitCode::usage, e.what());
  }

  try {
    apply_thread_override();
    std::ostream *log = common.verbose ? &err : nullptr;

    if (*synth) {
      Config cfg = load(common);
      if (view_angle) {
        cfg.synth.view_angle_deg = view_angle;
      }
      const std::uint64_t seed = cfg.solver.seed;
      std::vector<std::shared_ptr<const SparseSystem>> systems;
      if (!cfg.synth.offgrid) {
        std::vector<std::size_t> all;
        for (std::size_t s = 0; s < cfg.pulses.size(); ++s) {
          all.push_back(s);
        }
        systems = build_systems(cfg, model_table(cfg), all);
      }
      const MeasurementSet set = synthesize_config(cfg, seed, systems);
      const Image truth_img = truth_image(cfg);
      const Phantom ph = config_phantom(cfg, cfg.grid);

      json manifest;
      manifest["config"] = cfg.name;
      manifest["config_fingerprint"] = cfg.fingerprint();
      manifest["seed"] = seed;
      manifest["profile"] = profile_name(cfg.synth.phantom);
      manifest["view_angle_deg"] =
          cfg.synth.view_angle_deg ? json(*cfg.synth.view_angle_deg) : json();
      manifest["wall_depth"] = ph.wall_depth ? json(*ph.wall_depth) : json();
      manifest["offgrid"] = cfg.synth.offgrid;
      manifest["refinement"] = cfg.synth.offgrid_options.refinement;
      manifest["snr_db"] = cfg.synth.snr_db ? json(*cfg.synth.snr_db) : json();
      manifest["noise_sigma"] = set.noise_sigma;
      manifest["frequencies"] = frequency_json(cfg, [&] {
        std::vector<std::size_t> all(cfg.pulses.size());
        for (std::size_t s = 0; s < all.size(); ++s) {
          all[s] = s;
        }
        return all;
      }());
      manifest["direct_arrivals"] = set.direct_arrivals;

      const fs::path dir(output);
      fs::create_directories(dir);
      write_measurements(dir / "measurements.umbm", set);
      write_image(dir / "truth.umbi", truth_img);
      write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
      if (log) {
        *log << "wrote " << dir.string() << "\n";
      }
      return 0;
    }

    if (*build) {
      const Config cfg = load(common);
      const DelayTable table = model_table(cfg);
      std::vector<std::size_t> all(cfg.pulses.size());
      for (std::size_t s = 0; s < all.size(); ++s) {
        all[s] = s;
      }
      const auto systems = build_systems(cfg, table, all);
      for (std::size_t s = 0; s < systems.size(); ++s) {
        const auto &st = systems[s]->stats;
        out << "frequency " << s << ": nnz=" << st.nnz
            << " max_column_nnz=" << st.max_column_nnz
            << " empty_columns=" << st.empty_columns << " fill=" << st.fill
            << " tail_fraction=" << st.worst_tail_fraction
            << (st.tail_warning ? " TAIL-WARNING" : "") << "\n";
      }
      write_system_cache(output, systems);
      return 0;
    }

    if (*recon || *saft) {
      const Config cfg = load(common);
      const MeasurementSet set = read_measurements(input);
      check_measurements(cfg, set);
      const auto freqs = parse_frequency_list(frequencies, cfg.pulses.size());
      std::optional<DelayTable> table;
      Image img;
      json meta;
      meta["method"] = *recon ? "umbir" : "saft";
      meta["config"] = cfg.name;
      meta["config_fingerprint"] = cfg.fingerprint();
      meta["input"] = input;
      meta["frequencies"] = frequency_json(cfg, freqs);
      if (*recon) {
        const auto systems = systems_for(cfg, cache, freqs, table);
        ReconProblem problem = make_problem(cfg, systems, set, freqs);
        problem.options.log = log;
        const ReconState state = reconstruct(problem);
        img = {cfg.grid, state.x};
        meta["seed"] = cfg.solver.seed;
        meta["sweeps"] = state.sweeps;
        meta["cost_history"] = state.cost_history;
        meta["direct_arrivals"] = state.g;
        meta["degenerate_arrivals"] = state.degenerate_arrivals;
      } else {
        table = model_table(cfg);
        img = saft_image(cfg, *table, set, freqs);
      }
      write_image(output, img);
      write_text_atomic(sidecar(output), meta.dump(2) + "\n");
      if (render) {
        write_pgm(fs::path(output).replace_extension(".pgm"), img);
      }
      return 0;
    }

    if (*stitch) {
      const Config cfg = load(common);
      std::vector<Image> imgs;
      for (const auto &v : views) {
        imgs.push_back(read_image(v));
      }
      const Image pano = stitch_panorama(imgs, cfg.panorama);
      write_image(output, pano);
      if (render) {
        write_pgm(fs::path(output).replace_extension(".pgm"), pano);
      }
      return 0;
    }

    if (*metrics) {
      MetricsOptions opts;
      opts.band_low = band_low;
      opts.band_high = band_high;
      const auto rep = compute_metrics(read_image(input), read_image(truth), opts);
      if (output.empty()) {
        out << rep.to_json() << "\n";
      } else {
        write_text_atomic(output, rep.to_json() + "\n");
      }
      return 0;
    }

    if (*kdump) {
      const Config cfg = load(common);
      if (frequency >= cfg.pulses.size()) {
        throw ConfigError("--frequency: index out of range");
      }
      const PulseSpec &spec = cfg.pulses[frequency];
      const double window = cfg.model.window > 0.0
                                ? cfg.model.window
                                : default_window_length(spec);
      const KernelBank bank(spec, window, cfg.model.gamma_step,
                            cfg.model.oversample);
      const auto h = bank.sampler(gamma);
      std::ostringstream text;
      text << "# gamma=" << gamma << " window=" << window << "\n";
      text << "t,h\n" << std::setprecision(17);
      for (std::size_t m = 0; m < bank.window_samples(); ++m) {
        const double t = static_cast<double>(m) / spec.sampling_frequency;
        text << t << "," << h(t) << "\n";
      }
      if (output.empty()) {
        out << text.str();
      } else {
        write_text_atomic(output, text.str());
      }
      return 0;
    }
  } catch (const Error &e) {
    return fail(err, e.code(), e.what());
  } catch (const fs::filesystem_error &e) {
    return fail(err, ExitCode::data, e.what());
  } catch (const std::bad_alloc &) {
    return fail(err, ExitCode::numerical, "out of memory");
  }
  return fail(err, ExitCode::usage, "no subcommand");
}

} // namespace umbir::cli
