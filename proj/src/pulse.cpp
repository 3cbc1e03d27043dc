#include "umbir/pulse.hpp"

#include "umbir/error.hpp"
#include "umbir/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>

namespace umbir {
namespace {

using Spectrum = std::vector<std::complex<double>>;

std::size_t fft_length(std::size_t pulse_samples, std::size_t window_samples,
                       double gamma, double fs) {
  const auto spread = static_cast<std::size_t>(std::ceil(64.0 * gamma * fs));
  return fft::next_pow2(std::max<std::size_t>(
      {8 * pulse_samples, 4 * window_samples, std::size_t{1024}, spread}));
}

// Dispersion-filtered pulse on a grid `oversample` times finer than fs,
// circularly indexed over nfft * oversample samples.
std::vector<double> filtered_dense(const Spectrum &pulse_spectrum,
                                   std::size_t nfft, double fs, double gamma,
                                   std::size_t oversample) {
  const std::size_t half = nfft / 2;
  const std::size_t dense_n = nfft * oversample;
  Spectrum dense(dense_n / 2 + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(nfft);
    dense[k] = pulse_spectrum[k] * std::exp(-gamma * f);
  }
  if (oversample > 1) {
    // Split the Nyquist bin between +fs/2 and -fs/2 of the finer grid.
    dense[half] *= 0.5;
  }
  auto out = fft::inverse_real(dense, dense_n);
  const auto scale = static_cast<double>(oversample);
  for (auto &v : out) {
    v *= scale;
  }
  return out;
}

void cubic_weights(double x, double w[4]) {
  const double xm1 = x - 1.0;
  const double xm2 = x - 2.0;
  const double xp1 = x + 1.0;
  w[0] = -x * xm1 * xm2 / 6.0;
  w[1] = xp1 * xm1 * xm2 / 2.0;
  w[2] = -xp1 * x * xm2 / 2.0;
  w[3] = xp1 * x * xm1 / 6.0;
}

} // namespace

std::size_t PulseSpec::support_samples() const {
  return static_cast<std::size_t>(
      std::ceil(duration * sampling_frequency - 1e-9));
}

void PulseSpec::validate() const {
  std::vector<std::string> errors;
  if (!(sampling_frequency > 0.0) || !std::isfinite(sampling_frequency)) {
    errors.emplace_back("pulse.sampling_frequency: must be > 0");
  }
  if (!(center_frequency > 0.0) ||
      !(center_frequency < sampling_frequency / 2.0)) {
    errors.emplace_back(
        "pulse.center_frequency: must lie in (0, fs/2) (Nyquist)");
  }
  if (!(duration * sampling_frequency >= 2.0)) {
    errors.emplace_back("pulse.duration: must span at least two samples");
  }
  if (!(taper >= 0.0 && taper <= 1.0)) {
    errors.emplace_back("pulse.taper: must lie in [0, 1]");
  }
  if (record_length == 0) {
    errors.emplace_back("pulse.record_length: must be >= 1");
  }
  if (!std::isfinite(record_start)) {
    errors.emplace_back("pulse.record_start: must be finite");
  }
  if (!std::isfinite(amplitude)) {
    errors.emplace_back("pulse.amplitude: must be finite");
  }
  if (!errors.empty()) {
    throw ConfigError(std::move(errors));
  }
}

double tukey(double x, double taper) {
  if (x < 0.0 || x > 1.0) {
    return 0.0;
  }
  if (taper <= 0.0) {
    return 1.0;
  }
  const double edge = taper / 2.0;
  if (x < edge) {
    return 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi / taper * (x - edge)));
  }
  if (x > 1.0 - edge) {
    return 0.5 *
           (1.0 + std::cos(2.0 * std::numbers::pi / taper * (x - 1.0 + edge)));
  }
  return 1.0;
}

double pulse_value(const PulseSpec &spec, double t) {
  if (t < 0.0 || t > spec.duration) {
    return 0.0;
  }
  return spec.amplitude * tukey(t / spec.duration, spec.taper) *
         std::sin(2.0 * std::numbers::pi * spec.center_frequency * t);
}

std::vector<double> make_pulse(const PulseSpec &spec) {
  spec.validate();
  std::vector<double> s(spec.support_samples());
  for (std::size_t n = 0; n < s.size(); ++n) {
    s[n] = pulse_value(spec, static_cast<double>(n) / spec.sampling_frequency);
  }
  return s;
}

double Kernel::at(std::ptrdiff_t n) const {
  const std::ptrdiff_t i = n - first;
  if (i < 0 || i >= static_cast<std::ptrdiff_t>(samples.size())) {
    return 0.0;
  }
  if (static_cast<double>(n) / sample_rate >= support) {
    return 0.0;
  }
  return samples[static_cast<std::size_t>(i)];
}

double Kernel::energy() const {
  double e = 0.0;
  for (double v : samples) {
    e += v * v;
  }
  return e;
}

Kernel dispersion_kernel(const PulseSpec &spec, double gamma,
                         std::size_t oversample) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("dispersion gamma must be finite and >= 0");
  }
  if (oversample == 0) {
    throw ConfigError("kernel oversampling must be >= 1");
  }
  const auto pulse = make_pulse(spec);
  const std::size_t nfft = fft_length(pulse.size(), pulse.size(), gamma,
                                      spec.sampling_frequency);
  const auto spectrum = fft::forward_real(pulse, nfft);
  const auto dense = filtered_dense(spectrum, nfft, spec.sampling_frequency,
                                    gamma, oversample);

  Kernel k;
  k.gamma = gamma;
  k.sample_rate = spec.sampling_frequency * static_cast<double>(oversample);
  const auto dense_n = static_cast<std::ptrdiff_t>(dense.size());
  k.first = -dense_n / 2;
  k.samples.resize(dense.size());
  for (std::ptrdiff_t i = 0; i < dense_n; ++i) {
    const std::ptrdiff_t n = k.first + i;
    k.samples[static_cast<std::size_t>(i)] =
        dense[static_cast<std::size_t>((n + dense_n) % dense_n)];
  }
  k.support = std::numeric_limits<double>::infinity();
  return k;
}

WindowedKernel window_kernel(const Kernel &kernel, double t0,
                             double tail_frac) {
  if (!(t0 > 0.0)) {
    throw ConfigError("kernel window t0 must be > 0");
  }
  const auto end = static_cast<std::ptrdiff_t>(
      std::ceil(t0 * kernel.sample_rate - 1e-9));
  WindowedKernel out;
  out.kernel.gamma = kernel.gamma;
  out.kernel.sample_rate = kernel.sample_rate;
  out.kernel.first = 0;
  out.kernel.support = t0;
  out.kernel.samples.resize(static_cast<std::size_t>(end));
  double kept = 0.0;
  for (std::ptrdiff_t n = 0; n < end; ++n) {
    const std::ptrdiff_t i = n - kernel.first;
    double v = 0.0;
    if (i >= 0 && i < static_cast<std::ptrdiff_t>(kernel.samples.size()) &&
        static_cast<double>(n) / kernel.sample_rate < kernel.support) {
      v = kernel.samples[static_cast<std::size_t>(i)];
    }
    out.kernel.samples[static_cast<std::size_t>(n)] = v;
    kept += v * v;
  }
  const double total = kernel.energy();
  out.discarded_fraction = total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0;
  out.tail_warning = out.discarded_fraction > tail_frac;
  return out;
}

double default_window_length(const PulseSpec &spec, double fraction) {
  const auto pulse = make_pulse(spec);
  double total = 0.0;
  for (double v : pulse) {
    total += v * v;
  }
  double acc = 0.0;
  std::size_t n = 0;
  while (n < pulse.size()) {
    acc += pulse[n] * pulse[n];
    ++n;
    if (acc >= fraction * total) {
      break;
    }
  }
  return static_cast<double>(n) / spec.sampling_frequency;
}

KernelBank::KernelBank(PulseSpec spec, double window, double gamma_step,
                       std::size_t oversample)
    : spec_(spec), window_(window), gamma_step_(gamma_step),
      oversample_(oversample) {
  spec_.validate();
  if (!(window_ > 0.0)) {
    throw ConfigError("kernel window t0 must be > 0");
  }
  if (!(gamma_step_ > 0.0)) {
    throw ConfigError("kernel gamma_step must be > 0");
  }
  if (oversample_ == 0) {
    throw ConfigError("kernel oversampling must be >= 1");
  }
}

std::size_t KernelBank::window_samples() const {
  return static_cast<std::size_t>(
      std::ceil(window_ * spec_.sampling_frequency - 1e-9));
}

std::vector<double> KernelBank::compute_node(std::ptrdiff_t index,
                                             double &discarded) const {
  const double gamma = static_cast<double>(index) * gamma_step_;
  const auto pulse = make_pulse(spec_);
  const std::size_t nfft = fft_length(pulse.size(), window_samples(), gamma,
                                      spec_.sampling_frequency);
  const auto spectrum = fft::forward_real(pulse, nfft);
  const auto dense = filtered_dense(spectrum, nfft, spec_.sampling_frequency,
                                    gamma, oversample_);
  const auto dense_n = static_cast<std::ptrdiff_t>(dense.size());
  const auto end = static_cast<std::ptrdiff_t>(
      std::ceil(window_ * spec_.sampling_frequency *
                    static_cast<double>(oversample_) -
                1e-9));
  std::vector<double> out(static_cast<std::size_t>(end + 2 * kPad));
  for (std::ptrdiff_t n = -kPad; n < end + kPad; ++n) {
    out[static_cast<std::size_t>(n + kPad)] =
        dense[static_cast<std::size_t>(((n % dense_n) + dense_n) % dense_n)];
  }
  double total = 0.0;
  for (double v : dense) {
    total += v * v;
  }
  double kept = 0.0;
  for (std::ptrdiff_t n = 0; n < end; ++n) {
    const double v = out[static_cast<std::size_t>(n + kPad)];
    kept += v * v;
  }
  discarded = total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0;
  return out;
}

const std::vector<double> &KernelBank::node(std::ptrdiff_t index) const {
  {
    const std::shared_lock lock(mutex_);
    const auto it = nodes_.find(index);
    if (it != nodes_.end()) {
      return it->second;
    }
  }
  double discarded = 0.0;
  auto values = compute_node(index, discarded);
  const std::unique_lock lock(mutex_);
  worst_discarded_ = std::max(worst_discarded_, discarded);
  return nodes_.try_emplace(index, std::move(values)).first->second;
}

KernelBank::Sampler KernelBank::sampler(double gamma) const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("dispersion gamma must be finite and >= 0");
  }
  const double pos = gamma / gamma_step_;
  const auto index = static_cast<std::ptrdiff_t>(std::floor(pos));
  Sampler s;
  s.weight_ = pos - static_cast<double>(index);
  s.lo_ = &node(index);
  s.hi_ = s.weight_ > 0.0 ? &node(index + 1) : s.lo_;
  s.rate_ = spec_.sampling_frequency * static_cast<double>(oversample_);
  s.window_ = window_;
  return s;
}

double KernelBank::Sampler::operator()(double tau) const {
  if (!(tau >= 0.0) || tau >= window_) {
    return 0.0;
  }
  const double pos = tau * rate_;
  const double base = std::floor(pos);
  double w[4];
  cubic_weights(pos - base, w);
  const auto i = static_cast<std::size_t>(base) + kPad - 1;
  const auto &a = *lo_;
  const auto &b = *hi_;
  double va = 0.0;
  double vb = 0.0;
  const std::size_t last = a.size();
  for (std::size_t t = 0; t < 4; ++t) {
    if (i + t < last) {
      va += w[t] * a[i + t];
      vb += w[t] * b[i + t];
    }
  }
  return (1.0 - weight_) * va + weight_ * vb;
}

void KernelBank::prepare(const std::vector<double> &gammas) const {
  std::set<std::ptrdiff_t> wanted;
  for (double g : gammas) {
    const auto index = static_cast<std::ptrdiff_t>(std::floor(g / gamma_step_));
    wanted.insert(index);
    wanted.insert(index + 1);
  }
  std::vector<std::ptrdiff_t> missing;
  {
    const std::shared_lock lock(mutex_);
    for (auto index : wanted) {
      if (!nodes_.contains(index)) {
        missing.push_back(index);
      }
    }
  }
  const auto count = static_cast<std::ptrdiff_t>(missing.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    (void)node(missing[static_cast<std::size_t>(i)]);
  }
}

std::size_t KernelBank::cached_nodes() const {
  const std::shared_lock lock(mutex_);
  return nodes_.size();
}

double KernelBank::worst_discarded_fraction() const {
  const std::shared_lock lock(mutex_);
  return worst_discarded_;
}

} // namespace umbir
