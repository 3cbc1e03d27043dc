#include "umbir/system_model.hpp"

#include "umbir/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace umbir {

double apodization(double depart_angle, double arrive_angle,
                   const BeamParams &beam) {
  const double c = std::cos(depart_angle - beam.pointing_angle);
  if (c <= 0.0) {
    return 0.0;
  }
  const double r = std::cos(arrive_angle);
  return std::pow(c, beam.beta) * r * r;
}

double transmission_factor(const LayeredMedium &medium, double phi,
                           std::size_t last_layer) {
  double down = 1.0;
  double up = 1.0;
  for (std::size_t l = 1; l <= last_layer && l < medium.size(); ++l) {
    const double z0 = medium[l - 1].impedance;
    const double z1 = medium[l].impedance;
    down *= 2.0 * z1 / (z0 + z1);
    up *= 2.0 * z0 / (z0 + z1);
  }
  return phi * down * up;
}

double transmission_factor(const LayeredMedium &medium, double phi) {
  return transmission_factor(medium, phi, medium.size() - 1);
}

void fill_amplitudes(DelayTable &table, const LayeredMedium &medium,
                     const BeamParams &beam) {
  if (!(beam.beta >= 0.0)) {
    throw ConfigError("model.beta: must be >= 0");
  }
  // Deep voxels past the last interface see the last layer continued.
  std::vector<double> interfaces(medium.size());
  for (std::size_t l = 0; l < medium.size(); ++l) {
    interfaces[l] = transmission_factor(medium, 1.0, l);
  }
  for (std::size_t v = 0; v < table.voxels(); ++v) {
    const std::size_t layer = std::min(table.voxel_layer(v), medium.size() - 1);
    for (std::size_t j = 0; j < table.receivers(); ++j) {
      DelayEntry &e = table.at(v, j);
      e.lambda = e.reachable ? interfaces[layer] * apodization(e.depart_angle,
                                                               e.arrive_angle,
                                                               beam)
                             : 0.0;
    }
  }
}

RowBand response_band(const PulseSpec &spec, double window, double delay) {
  const double x = (delay - spec.record_start) * spec.sampling_frequency;
  const double last = x + window * spec.sampling_frequency;
  const auto m = static_cast<double>(spec.record_length);
  const double first = std::clamp(std::ceil(x - 1e-9), 0.0, m);
  const double end = std::clamp(std::ceil(last - 1e-9), 0.0, m);
  RowBand band;
  band.first = static_cast<std::size_t>(first);
  band.end = std::max(band.first, static_cast<std::size_t>(end));
  return band;
}

double response_lag(const PulseSpec &spec, double delay, std::size_t m) {
  const double x = (delay - spec.record_start) * spec.sampling_frequency;
  double u = static_cast<double>(m) - x;
  if (std::abs(u) < 1e-9) {
    u = 0.0;
  }
  return u / spec.sampling_frequency;
}

namespace {

struct Response {
  double delay{};
  double gamma{};
  double amplitude{};
};

// Columns whose entries per receiver are amplitude * h~(gamma, t_m - delay).
// `responses` is column-major: responses[c * per_column + j]. With
// `diagonal`, column c has one response and it lands in receiver band c;
// otherwise response j of every column lands in band j.
SparseColumns assemble(const std::vector<Response> &responses,
                       std::size_t cols, std::size_t per_column,
                       std::size_t receivers, bool diagonal,
                       const KernelBank &bank) {
  const PulseSpec &spec = bank.spec();
  const std::size_t m = spec.record_length;
  std::vector<std::size_t> run_begin(cols + 1, 0);
  std::vector<SparseColumns::Run> runs;
  std::vector<double> gammas;
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t j = 0; j < per_column; ++j) {
      const Response &r = responses[c * per_column + j];
      if (r.amplitude == 0.0) {
        continue;
      }
      const auto band = response_band(spec, bank.window(), r.delay);
      if (band.end == band.first) {
        continue;
      }
      const std::size_t receiver = diagonal ? c : j;
      runs.push_back({static_cast<std::uint32_t>(receiver * m + band.first),
                      static_cast<std::uint32_t>(band.end - band.first)});
      gammas.push_back(r.gamma);
    }
    run_begin[c + 1] = runs.size();
  }
  SparseColumns out(m * receivers, cols, std::move(run_begin), std::move(runs));
  bank.prepare(gammas);

  const auto count = static_cast<std::ptrdiff_t>(cols);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t ci = 0; ci < count; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    std::size_t r = out.first_run(c);
    for (std::size_t j = 0; j < per_column; ++j) {
      const Response &resp = responses[c * per_column + j];
      if (resp.amplitude == 0.0) {
        continue;
      }
      const auto band = response_band(spec, bank.window(), resp.delay);
      if (band.end == band.first) {
        continue;
      }
      const auto sampler = bank.sampler(resp.gamma);
      auto values = out.run_values(r);
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double tau = response_lag(spec, resp.delay, band.first + i);
        values[i] = static_cast<float>(resp.amplitude * sampler(tau));
      }
      ++r;
    }
  }
  return out;
}

} // namespace

SparseColumns build_A(const DelayTable &table, const KernelBank &bank) {
  const std::size_t n = table.voxels();
  const std::size_t k = table.receivers();
  std::vector<Response> responses(n * k);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t j = 0; j < k; ++j) {
      const DelayEntry &e = table.at(v, j);
      if (e.reachable) {
        responses[v * k + j] = {e.delay, e.gamma, e.lambda};
      }
    }
  }
  return assemble(responses, n, k, k, false, bank);
}

SparseColumns build_D(const ArrayGeometry &geometry, const KernelBank &bank) {
  geometry.validate();
  const std::size_t k = geometry.receiver_count();
  std::vector<Response> responses(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double tau =
        distance(geometry.transmitter, geometry.receivers[j]) /
        geometry.embedding_speed;
    responses[j] = {tau,
                    geometry.embedding_attenuation * geometry.embedding_speed *
                        tau,
                    1.0};
  }
  return assemble(responses, k, 1, k, true, bank);
}

SparsityStats sparsity(const SparseColumns &m) {
  SparsityStats s;
  s.nnz = m.nnz();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const std::size_t n = m.column_nnz(c);
    s.max_column_nnz = std::max(s.max_column_nnz, n);
    if (n == 0) {
      ++s.empty_columns;
    }
  }
  const double total = static_cast<double>(m.rows()) * static_cast<double>(m.cols());
  s.fill = total > 0.0 ? static_cast<double>(s.nnz) / total : 0.0;
  return s;
}

SparseSystem build_system(const DelayTable &table,
                          const ArrayGeometry &geometry, const PulseSpec &spec,
                          const ModelOptions &options) {
  spec.validate();
  if (table.receivers() != geometry.receiver_count()) {
    throw DataError("delay table receiver count does not match the geometry");
  }
  const double window =
      options.window > 0.0 ? options.window : default_window_length(spec);
  const KernelBank bank(spec, window, options.gamma_step, options.oversample);

  SparseSystem sys;
  sys.pulse = spec;
  sys.window = window;
  sys.samples = spec.record_length;
  sys.receivers = table.receivers();
  sys.voxels = table.voxels();
  sys.A = std::make_shared<const SparseColumns>(build_A(table, bank));
  sys.D = std::make_shared<const SparseColumns>(build_D(geometry, bank));
  sys.stats = sparsity(*sys.A);
  sys.stats.worst_tail_fraction = bank.worst_discarded_fraction();
  sys.stats.tail_warning = sys.stats.worst_tail_fraction > options.tail_fraction;
  return sys;
}

SparseSystem build_system(const LayeredMedium &medium,
                          const ArrayGeometry &geometry, const ImageGrid &grid,
                          const PulseSpec &spec, const BeamParams &beam,
                          const ModelOptions &options) {
  validate_pairing(medium, geometry, grid);
  auto table = delay_table(medium, geometry, grid);
  fill_amplitudes(table, medium, beam);
  return build_system(table, geometry, spec, options);
}

MultiFreqSystem
stack_systems(std::vector<std::shared_ptr<const SparseSystem>> systems,
              std::vector<double> row_scales) {
  if (systems.empty()) {
    throw DataError("no systems to stack");
  }
  if (row_scales.empty()) {
    row_scales.assign(systems.size(), 1.0);
  }
  if (row_scales.size() != systems.size()) {
    throw DataError("one row scale per frequency is required");
  }
  const std::size_t n = systems.front()->voxels;
  const std::size_t k = systems.front()->receivers;
  std::size_t rows = 0;
  MultiFreqSystem out;
  std::vector<BlockColumns::Block> a_blocks;
  std::vector<BlockColumns::Block> d_blocks;
  for (std::size_t s = 0; s < systems.size(); ++s) {
    const auto &sys = *systems[s];
    if (sys.voxels != n || sys.receivers != k) {
      throw DataError("frequency " + std::to_string(s) +
                      " has a different grid or receiver count");
    }
    if (!(row_scales[s] > 0.0) || !std::isfinite(row_scales[s])) {
      throw ConfigError("solver.frequency_sigmas: must be finite and > 0");
    }
    out.row_offsets.push_back(rows);
    a_blocks.push_back({sys.A, rows, 0, row_scales[s]});
    d_blocks.push_back({sys.D, rows, s * k, row_scales[s]});
    rows += sys.rows();
  }
  out.A = BlockColumns(rows, n, std::move(a_blocks));
  out.D = BlockColumns(rows, systems.size() * k, std::move(d_blocks));
  out.row_scales = std::move(row_scales);
  out.systems = std::move(systems);
  return out;
}

StackedProblemData
stack_multifrequency(std::vector<std::shared_ptr<const SparseSystem>> systems,
                     const std::vector<std::vector<double>> &measurements,
                     std::vector<double> row_scales) {
  if (measurements.size() != systems.size()) {
    throw DataError("expected " + std::to_string(systems.size()) +
                    " measurement blocks, got " +
                    std::to_string(measurements.size()));
  }
  StackedProblemData out;
  out.system = stack_systems(std::move(systems), std::move(row_scales));
  out.y.reserve(out.system.rows());
  for (std::size_t s = 0; s < measurements.size(); ++s) {
    const auto &sys = *out.system.systems[s];
    if (measurements[s].size() != sys.rows()) {
      throw DataError("measurement block " + std::to_string(s) + " has " +
                      std::to_string(measurements[s].size()) +
                      " samples, expected " + std::to_string(sys.rows()));
    }
    for (double v : measurements[s]) {
      out.y.push_back(v * out.system.row_scales[s]);
    }
  }
  return out;
}

} // namespace umbir
