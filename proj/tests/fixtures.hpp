#pragma once

#include "umbir/config.hpp"
#include "umbir/media.hpp"
#include "umbir/pulse.hpp"
#include "umbir/system_model.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace fixtures {

using namespace umbir;

inline constexpr double kPi = std::numbers::pi;

inline LayeredMedium table_one_medium() {
  return LayeredMedium({Layer::with_density(0.073, 1500, 2e-6, 997, "water"),
                        Layer::with_density(0.006, 2800, 0.0, 1180, "plexiglas"),
                        Layer::with_density(0.12, 2620, 30e-6, 1970, "concrete")});
}

// Water over concrete, small enough for dense oracles.
inline LayeredMedium small_medium() {
  return LayeredMedium({Layer::with_density(0.02, 1500, 2e-6, 1000, "water"),
                        Layer::with_density(0.04, 2600, 30e-6, 2000, "concrete")});
}

inline ArrayGeometry small_geometry(std::size_t receivers = 4) {
  ArrayGeometry g;
  g.transmitter = {0.0, 0.005};
  g.pointing_angle = 20.0 * kPi / 180.0;
  for (std::size_t j = 0; j < receivers; ++j) {
    g.receivers.push_back({0.0, 0.02 + 0.01 * static_cast<double>(j)});
  }
  return g;
}

inline ImageGrid small_grid(std::size_t rows = 12, std::size_t cols = 10) {
  ImageGrid g;
  g.rows = rows;
  g.cols = cols;
  g.pitch = 0.004;
  g.origin = {0.06 - 0.004 * static_cast<double>(cols), 0.0};
  return g;
}

inline PulseSpec small_pulse(double f0 = 58e3, double duration = 50e-6) {
  PulseSpec p;
  p.center_frequency = f0;
  p.duration = duration;
  p.sampling_frequency = 2e6;
  p.record_length = 300;
  return p;
}

// Config document for the tiny setup above; tests tweak fields as needed.
inline nlohmann::ordered_json small_config_json() {
  nlohmann::ordered_json j = {
      {"name", "small"},
      {"medium",
       {{"layers",
         {{{"name", "water"}, {"thickness", 0.02}, {"speed", 1500},
           {"attenuation", 2e-6}, {"density", 1000}},
          {{"name", "concrete"}, {"thickness", 0.04}, {"speed", 2600},
           {"attenuation", 30e-6}, {"density", 2000}}}}}},
      {"geometry",
       {{"transmitter", {{"depth", 0.0}, {"height", 0.005}}},
        {"pointing_angle_deg", 20},
        {"receivers", {{"first_height", 0.02}, {"spacing", 0.01}, {"count", 4}}},
        {"embedding_speed", 1500},
        {"embedding_attenuation", 2e-6}}},
      {"grid",
       {{"rows", 12}, {"cols", 10}, {"pitch", 0.004},
        {"origin", {{"depth", 0.02}, {"height", 0.0}}}}},
      {"acquisition",
       {{"sampling_frequency", 2e6},
        {"record_length", 300},
        {"frequencies",
         {{{"center_frequency", 58000}, {"duration", 50e-6}},
          {{"center_frequency", 90000}, {"duration", 40e-6}}}}}},
      {"prior", {{"p", 1.1}, {"q", 2}, {"T", 0.01}, {"sigma0", 2}, {"nu", 10}, {"a", 2}}},
      {"solver", {{"iterations", 5}, {"sigma", 0.1}, {"seed", 3}}},
      {"synth",
       {{"phantom", "cc-no-notch"}, {"wall_depth", 0.045}, {"snr_db", 20},
        {"offgrid", false}}},
      {"panorama", {{"angles", {{"first", 0}, {"last", 180}, {"count", 5}}},
                    {"height", 0.024}}}};
  return j;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("umbir_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double dot(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

inline double norm(const std::vector<double> &a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64 &rng) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto &x : v) {
    x = d(rng);
  }
  return v;
}

} // namespace fixtures
