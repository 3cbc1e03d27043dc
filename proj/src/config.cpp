#include "umbir/config.hpp"

#include "umbir/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace umbir {
namespace {

using json = nlohmann::ordered_json;

constexpr double kDeg = std::numbers::pi / 180.0;

// Reads typed fields and collects every problem instead of stopping at the
// first one.
class Fields {
public:
  template <typename T>
  T get(const json &obj, const std::string &path, const char *key, T fallback) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
      return fallback;
    }
    return convert<T>(obj.at(key), path + "." + key, fallback);
  }

  template <typename T>
  T need(const json &obj, const std::string &path, const char *key) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
      errors.push_back(path + "." + key + ": required");
      return T{};
    }
    return convert<T>(obj.at(key), path + "." + key, T{});
  }

  const json &section(const json &doc, const char *key, bool required) {
    static const json empty = json::object();
    if (doc.contains(key) && doc.at(key).is_object()) {
      return doc.at(key);
    }
    if (doc.contains(key)) {
      errors.push_back(std::string(key) + ": must be an object");
    } else if (required) {
      errors.push_back(std::string(key) + ": required section");
    }
    return empty;
  }

  void check(bool ok, const std::string &message) {
    if (!ok) {
      errors.push_back(message);
    }
  }

  // Runs a validator that throws ConfigError and keeps its field messages.
  template <typename F> void absorb(F &&f) {
    try {
      f();
    } catch (const ConfigError &e) {
      errors.insert(errors.end(), e.fields().begin(), e.fields().end());
    } catch (const Error &e) {
      errors.emplace_back(e.what());
    }
  }

  std::vector<std::string> errors;

private:
  template <typename T>
  T convert(const json &v, const std::string &path, T fallback) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) {
          throw std::invalid_argument("not a number");
        }
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
          throw std::invalid_argument("not a non-negative integer");
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) {
          throw std::invalid_argument("not a boolean");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) {
          throw std::invalid_argument("not a string");
        }
      }
      return v.get<T>();
    } catch (const std::exception &) {
      errors.push_back(path + ": wrong type");
      return fallback;
    }
  }
};

Point2 point(Fields &f, const json &obj, const std::string &path) {
  return {f.need<double>(obj, path, "depth"), f.need<double>(obj, path, "height")};
}

LayeredMedium parse_medium(Fields &f, const json &doc) {
  const json &sec = f.section(doc, "medium", true);
  std::vector<Layer> layers;
  if (!sec.contains("layers") || !sec.at("layers").is_array() ||
      sec.at("layers").empty()) {
    f.errors.emplace_back("medium.layers: required non-empty list");
    return {};
  }
  std::size_t i = 0;
  for (const auto &l : sec.at("layers")) {
    const std::string path = "medium.layers[" + std::to_string(i++) + "]";
    Layer layer;
    layer.name = f.get<std::string>(l, path, "name", "");
    layer.thickness = f.need<double>(l, path, "thickness");
    layer.speed = f.need<double>(l, path, "speed");
    layer.attenuation = f.get<double>(l, path, "attenuation", 0.0);
    const bool has_density = l.contains("density");
    const bool has_impedance = l.contains("impedance");
    if (has_impedance) {
      layer.impedance = f.need<double>(l, path, "impedance");
    } else if (has_density) {
      layer.impedance = f.need<double>(l, path, "density") * layer.speed;
    } else {
      f.errors.push_back(path + ": density or impedance required");
    }
    layers.push_back(layer);
  }
  LayeredMedium medium;
  f.absorb([&] { medium = LayeredMedium(layers); });
  return medium;
}

ArrayGeometry parse_geometry(Fields &f, const json &doc) {
  const json &sec = f.section(doc, "geometry", true);
  ArrayGeometry g;
  if (sec.contains("transmitter")) {
    g.transmitter = point(f, sec.at("transmitter"), "geometry.transmitter");
  } else {
    f.errors.emplace_back("geometry.transmitter: required");
  }
  g.pointing_angle =
      f.get<double>(sec, "geometry", "pointing_angle_deg", 0.0) * kDeg;
  g.embedding_speed = f.get<double>(sec, "geometry", "embedding_speed", 1500.0);
  g.embedding_attenuation =
      f.get<double>(sec, "geometry", "embedding_attenuation", 0.0);
  if (!sec.contains("receivers")) {
    f.errors.emplace_back("geometry.receivers: required");
  } else if (sec.at("receivers").is_array()) {
    std::size_t i = 0;
    for (const auto &r : sec.at("receivers")) {
      g.receivers.push_back(
          point(f, r, "geometry.receivers[" + std::to_string(i++) + "]"));
    }
  } else {
    const json &r = sec.at("receivers");
    const std::string path = "geometry.receivers";
    const double first = f.need<double>(r, path, "first_height");
    const double spacing = f.need<double>(r, path, "spacing");
    const auto count = f.need<std::size_t>(r, path, "count");
    const double depth =
        f.get<double>(r, path, "depth", g.transmitter.depth);
    for (std::size_t j = 0; j < count; ++j) {
      g.receivers.push_back({depth, first + spacing * static_cast<double>(j)});
    }
  }
  f.absorb([&] { g.validate(); });
  return g;
}

ImageGrid parse_grid(Fields &f, const json &doc) {
  const json &sec = f.section(doc, "grid", true);
  ImageGrid g;
  g.rows = f.need<std::size_t>(sec, "grid", "rows");
  g.cols = f.need<std::size_t>(sec, "grid", "cols");
  g.pitch = f.need<double>(sec, "grid", "pitch");
  if (sec.contains("origin")) {
    g.origin = point(f, sec.at("origin"), "grid.origin");
  }
  f.absorb([&] { g.validate(); });
  return g;
}

std::vector<PulseSpec> parse_pulses(Fields &f, const json &doc) {
  const json &sec = f.section(doc, "acquisition", true);
  PulseSpec base;
  base.sampling_frequency =
      f.need<double>(sec, "acquisition", "sampling_frequency");
  base.record_length = f.need<std::size_t>(sec, "acquisition", "record_length");
  base.record_start = f.get<double>(sec, "acquisition", "record_start", 0.0);
  base.amplitude = f.get<double>(sec, "acquisition", "amplitude", 1.0);
  base.taper = f.get<double>(sec, "acquisition", "taper", 0.5);
  std::vector<PulseSpec> out;
  if (!sec.contains("frequencies") || !sec.at("frequencies").is_array() ||
      sec.at("frequencies").empty()) {
    f.errors.emplace_back("acquisition.frequencies: required non-empty list");
    return out;
  }
  std::size_t i = 0;
  for (const auto &fr : sec.at("frequencies")) {
    const std::string path = "acquisition.frequencies[" + std::to_string(i++) + "]";
    PulseSpec p = base;
    p.center_frequency = f.need<double>(fr, path, "center_frequency");
    p.duration = f.need<double>(fr, path, "duration");
    p.taper = f.get<double>(fr, path, "taper", base.taper);
    p.record_length = f.get<std::size_t>(fr, path, "record_length", base.record_length);
    f.absorb([&] {
      try {
        p.validate();
      } catch (const ConfigError &e) {
        std::vector<std::string> scoped;
        for (const auto &m : e.fields()) {
          scoped.push_back(path + ": " + m);
        }
        throw ConfigError(scoped);
      }
    });
    out.push_back(p);
  }
  return out;
}

} // namespace

std::string Config::fingerprint() const {
  const std::string text = source.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Config parse_config(const json &doc) {
  if (!doc.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  Fields f;
  Config c;
  c.source = doc;
  c.name = f.get<std::string>(doc, "config", "name", "custom");
  c.medium = parse_medium(f, doc);
  c.geometry = parse_geometry(f, doc);
  c.grid = parse_grid(f, doc);
  c.pulses = parse_pulses(f, doc);

  const json &model = f.section(doc, "model", false);
  c.beam.beta = f.get<double>(model, "model", "beta", 8.0);
  c.beam.pointing_angle = c.geometry.pointing_angle;
  f.check(c.beam.beta >= 0.0, "model.beta: must be >= 0");
  c.model.window = f.get<double>(model, "model", "window", 0.0);
  c.model.gamma_step = f.get<double>(model, "model", "gamma_step", 1e-8);
  c.model.oversample = f.get<std::size_t>(model, "model", "oversample", 8);
  c.model.tail_fraction = f.get<double>(model, "model", "tail_fraction", 0.01);
  f.check(c.model.window >= 0.0, "model.window: must be >= 0 (0 = default)");
  f.check(c.model.gamma_step > 0.0, "model.gamma_step: must be > 0");
  f.check(c.model.oversample >= 1, "model.oversample: must be >= 1");

  const json &prior = f.section(doc, "prior", false);
  c.prior.p = f.get<double>(prior, "prior", "p", 1.1);
  c.prior.q = f.get<double>(prior, "prior", "q", 2.0);
  c.prior.T = f.get<double>(prior, "prior", "T", 0.01);
  c.prior.sigma0 = f.get<double>(prior, "prior", "sigma0", 2.0);
  c.prior.nu = f.get<double>(prior, "prior", "nu", 10.0);
  c.prior.a = f.get<double>(prior, "prior", "a", 2.0);
  f.absorb([&] { c.prior.validate(); });

  const json &solver = f.section(doc, "solver", false);
  c.solver.iterations = f.get<std::size_t>(solver, "solver", "iterations", 100);
  c.solver.sigma = f.get<double>(solver, "solver", "sigma", 0.1);
  c.solver.seed = f.get<std::uint64_t>(solver, "solver", "seed", 1);
  c.solver.early_exit = f.get<bool>(solver, "solver", "early_exit", false);
  c.solver.tolerance = f.get<double>(solver, "solver", "tolerance", 1e-6);
  c.solver.frequency_sigmas = f.get<std::vector<double>>(
      solver, "solver", "frequency_sigmas", {});
  f.check(c.solver.iterations >= 1, "solver.iterations: must be >= 1");
  f.check(c.solver.sigma > 0.0, "solver.sigma: must be > 0");
  f.check(c.solver.frequency_sigmas.empty() ||
              c.solver.frequency_sigmas.size() == c.pulses.size(),
          "solver.frequency_sigmas: one value per frequency");

  const json &synth = f.section(doc, "synth", false);
  const auto phantom = f.get<std::string>(synth, "synth", "phantom", "cc-no-notch");
  f.absorb([&] { c.synth.phantom = parse_profile(phantom); });
  auto &po = c.synth.phantom_options;
  po.wall_depth = f.get<double>(synth, "synth", "wall_depth", po.wall_depth);
  po.notch_depth = f.get<double>(synth, "synth", "notch_depth", po.notch_depth);
  po.notch_angle_deg =
      f.get<double>(synth, "synth", "notch_angle_deg", po.notch_angle_deg);
  po.cylinder_radius =
      f.get<double>(synth, "synth", "cylinder_radius", po.cylinder_radius);
  if (synth.contains("notch_center_height")) {
    po.notch_center_height = f.need<double>(synth, "synth", "notch_center_height");
  }
  po.defect_depth = f.get<double>(synth, "synth", "defect_depth", po.defect_depth);
  po.amplitude = f.get<double>(synth, "synth", "amplitude", po.amplitude);
  if (synth.contains("targets") && synth.at("targets").is_array()) {
    std::size_t i = 0;
    for (const auto &t : synth.at("targets")) {
      po.targets.push_back(point(f, t, "synth.targets[" + std::to_string(i++) + "]"));
    }
  }
  if (synth.contains("snr_db") && synth.at("snr_db").is_null()) {
    c.synth.snr_db.reset();
  } else {
    c.synth.snr_db = f.get<double>(synth, "synth", "snr_db", 20.0);
  }
  c.synth.sigma_w = f.get<double>(synth, "synth", "sigma_w", 0.0);
  f.check(c.synth.sigma_w >= 0.0, "synth.sigma_w: must be >= 0");
  c.synth.offgrid = f.get<bool>(synth, "synth", "offgrid", true);
  c.synth.offgrid_options.refinement =
      f.get<std::size_t>(synth, "synth", "refinement", 4);
  f.check(c.synth.offgrid_options.refinement >= 1,
          "synth.refinement: must be >= 1");
  c.synth.direct_arrivals = f.get<bool>(synth, "synth", "direct_arrivals", true);
  c.synth.direct_arrival_scale =
      f.get<double>(synth, "synth", "direct_arrival_scale", 1.0);
  if (synth.contains("view_angle_deg")) {
    c.synth.view_angle_deg = f.need<double>(synth, "synth", "view_angle_deg");
  }
  c.synth.notch_azimuth_deg =
      f.get<double>(synth, "synth", "notch_azimuth_deg", 90.0);

  const json &saft = f.section(doc, "saft", false);
  c.saft.envelope = f.get<bool>(saft, "saft", "envelope", true);
  c.saft.apodize = f.get<bool>(saft, "saft", "apodize", true);

  const json &pano = f.section(doc, "panorama", false);
  if (pano.contains("angles_deg") && pano.at("angles_deg").is_array()) {
    c.panorama.angles_deg =
        f.get<std::vector<double>>(pano, "panorama", "angles_deg", {});
  } else if (pano.contains("angles")) {
    const json &a = pano.at("angles");
    c.panorama.angles_deg = angle_range(
        f.need<double>(a, "panorama.angles", "first"),
        f.need<double>(a, "panorama.angles", "last"),
        f.need<std::size_t>(a, "panorama.angles", "count"));
  } else {
    c.panorama.angles_deg = angle_range(0.0, 180.0, 37);
  }
  c.panorama.height = f.get<double>(pano, "panorama", "height",
                                    c.grid.origin.height + c.grid.height_extent() / 2.0);
  const auto interp = f.get<std::string>(pano, "panorama", "interpolation", "nearest");
  if (interp == "nearest") {
    c.panorama.interpolation = AngularInterpolation::nearest;
  } else if (interp == "linear") {
    c.panorama.interpolation = AngularInterpolation::linear;
  } else {
    f.errors.emplace_back("panorama.interpolation: must be nearest or linear");
  }
  c.panorama.radial_offset = f.get<double>(pano, "panorama", "radial_offset", 0.0);
  c.panorama.pitch = f.get<double>(pano, "panorama", "pitch", 0.0);
  f.absorb([&] { c.panorama.validate(); });

  if (f.errors.empty()) {
    f.absorb([&] { validate_pairing(c.medium, c.geometry, c.grid); });
  }
  if (!f.errors.empty()) {
    throw ConfigError(f.errors);
  }
  return c;
}

Config load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON (" +
                      e.what() + ")");
  }
  return parse_config(doc);
}

Phantom config_phantom(const Config &config, const ImageGrid &grid) {
  const auto &s = config.synth;
  const bool cc = s.phantom == PhantomProfile::cc_no_notch ||
                  s.phantom == PhantomProfile::cc_notch;
  if (s.view_angle_deg && cc) {
    // Angular distance on the circle to the notch center.
    const double d =
        std::abs(std::remainder(*s.view_angle_deg - s.notch_azimuth_deg, 360.0));
    const bool faces_notch = s.phantom == PhantomProfile::cc_notch &&
                             d <= s.phantom_options.notch_angle_deg / 2.0;
    return make_wall_phantom(grid,
                             faces_notch ? s.phantom_options.notch_depth
                                         : s.phantom_options.wall_depth,
                             s.phantom_options);
  }
  return make_phantom(s.phantom, grid, s.phantom_options);
}

} // namespace umbir
