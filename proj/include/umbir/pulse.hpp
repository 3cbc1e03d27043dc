#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

namespace umbir {

/// Transmitted narrow-band pulse and the acquisition clock it is recorded on.
struct PulseSpec {
  double center_frequency{};   // f0 [Hz]
  double duration{};           // [s]
  double taper{0.5};           // Tukey taper ratio in [0, 1]
  double sampling_frequency{}; // fs [Hz]
  std::size_t record_length{}; // M samples
  double record_start{};       // T_o [s]; sample m is at t = m / fs + T_o
  double amplitude{1.0};       // [Pa]

  [[nodiscard]] double period() const { return 1.0 / sampling_frequency; }
  [[nodiscard]] double sample_time(std::size_t m) const {
    return static_cast<double>(m) / sampling_frequency + record_start;
  }
  // Samples covering [0, duration).
  [[nodiscard]] std::size_t support_samples() const;

  void validate() const;
};

/// Tukey window on x in [0, 1]; zero outside. taper 0 is rectangular,
/// taper 1 is Hann.
[[nodiscard]] double tukey(double x, double taper);

/// Continuous pulse s(t) = A * tukey(t / duration) * sin(2 pi f0 t).
[[nodiscard]] double pulse_value(const PulseSpec &spec, double t);

/// s(t) sampled at fs over [0, duration). Throws ConfigError on a Nyquist
/// violation or a pulse shorter than two samples.
[[nodiscard]] std::vector<double> make_pulse(const PulseSpec &spec);

/// Sampled impulse response h(gamma, t). Sample i sits at
/// t = (first + i) / sample_rate. Samples at t >= support are zero.
struct Kernel {
  double gamma{};
  double sample_rate{};
  std::ptrdiff_t first{};
  std::vector<double> samples;
  double support{};

  [[nodiscard]] double at(std::ptrdiff_t n) const;
  [[nodiscard]] double energy() const;
};

/// Pulse filtered by the zero-phase dispersion response exp(-gamma |f|),
/// computed on a zero-padded FFT grid and returned over its full two-sided
/// extent. `oversample` > 1 band-limit interpolates onto a finer time grid.
[[nodiscard]] Kernel dispersion_kernel(const PulseSpec &spec, double gamma,
                                       std::size_t oversample = 1);

struct WindowedKernel {
  Kernel kernel;
  double discarded_fraction{}; // energy outside [0, t0) over total energy
  bool tail_warning{false};
};

/// Keeps [0, t0) of `kernel`; everything else is set to zero and dropped.
[[nodiscard]] WindowedKernel window_kernel(const Kernel &kernel, double t0,
                                           double tail_frac = 0.01);

/// Smallest whole-sample window holding `fraction` of the undispersed pulse
/// energy.
[[nodiscard]] double default_window_length(const PulseSpec &spec,
                                           double fraction = 0.999);

/// Windowed kernels h~(gamma, tau) for arbitrary (gamma, tau). Kernels are
/// tabulated on a gamma lattice with spacing `gamma_step`, each on a time grid
/// `oversample` times finer than fs. Lookups interpolate cubically in time
/// and linearly in gamma; the rect window is applied exactly.
///
/// Lattice nodes are computed on first use. Lookups take a shared lock and
/// inserts a unique one, so a bank can be shared across threads.
class KernelBank {
public:
  KernelBank(PulseSpec spec, double window, double gamma_step = 1e-8,
             std::size_t oversample = 8);

  [[nodiscard]] const PulseSpec &spec() const { return spec_; }
  [[nodiscard]] double window() const { return window_; }
  [[nodiscard]] std::size_t window_samples() const;
  [[nodiscard]] double gamma_step() const { return gamma_step_; }
  [[nodiscard]] std::size_t oversample() const { return oversample_; }

  class Sampler {
  public:
    /// h~(gamma, tau); zero outside [0, window).
    [[nodiscard]] double operator()(double tau) const;

  private:
    friend class KernelBank;
    const std::vector<double> *lo_{};
    const std::vector<double> *hi_{};
    double weight_{};
    double rate_{};
    double window_{};
  };

  /// Interpolating view for a fixed gamma.
  [[nodiscard]] Sampler sampler(double gamma) const;

  /// Computes every lattice node the given gammas will touch.
  void prepare(const std::vector<double> &gammas) const;

  [[nodiscard]] std::size_t cached_nodes() const;
  /// Largest discarded-tail fraction seen over computed nodes.
  [[nodiscard]] double worst_discarded_fraction() const;

private:
  static constexpr std::ptrdiff_t kPad = 4; // dense samples kept before 0

  const std::vector<double> &node(std::ptrdiff_t index) const;
  std::vector<double> compute_node(std::ptrdiff_t index,
                                   double &discarded) const;

  PulseSpec spec_;
  double window_;
  double gamma_step_;
  std::size_t oversample_;

  mutable std::shared_mutex mutex_;
  mutable std::map<std::ptrdiff_t, std::vector<double>> nodes_;
  mutable double worst_discarded_{0.0};
};

} // namespace umbir
