// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Heavy fixtures (the CC systems and synthetic data) are
// built once and shared.

#include "oracles.hpp"

#include "umbir/error.hpp"
#include "umbir/io.hpp"
#include "umbir/metrics.hpp"
#include "umbir/panorama.hpp"
#include "umbir/pipeline.hpp"
#include "umbir/prior.hpp"
#include "umbir/pulse.hpp"
#include "umbir/raypath.hpp"
#include "umbir/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace umbir;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
const fs::path kConfigs = UMBIR_CONFIG_DIR;
constexpr std::uint64_t kSeed = 2026; // differs from the tuning seed (101)

// Localization settings, tuned on seed 101 data only. The prior scale is
// sized to the unit reflectivity used by the phantoms, and the data term is
// weighted with three times the measured noise level to cover the mismatch
// between off-grid synthesis and the voxel model.
constexpr double kLocalSigma0 = 0.02;
constexpr double kMismatchFactor = 3.0;

struct Outcome {
  bool pass{};
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double dot(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

double norm(const std::vector<double> &a) { return std::sqrt(dot(a, a)); }

std::vector<double> gaussian(std::size_t n, std::mt19937_64 &rng) {
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto &x : v) {
    x = d(rng);
  }
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared CC fixtures.
struct CcContext {
  Config config;
  DelayTable table;
  std::vector<std::shared_ptr<const SparseSystem>> systems;
  std::map<std::string, MeasurementSet> data;
  std::map<std::string, Image> truth;

  CcContext() : config(load_config(kConfigs / "cc_kwave.json")) {
    table = model_table(config);
    systems = build_systems(config, table, {0, 1, 2});
  }

  const MeasurementSet &dataset(const std::string &profile) {
    if (!data.count(profile)) {
      Config c = config;
      c.synth.phantom = parse_profile(profile);
      data[profile] = synthesize_config(c, kSeed);
      truth[profile] = truth_image(c);
    }
    return data.at(profile);
  }

  std::vector<std::shared_ptr<const SparseSystem>>
  pick(const std::vector<std::size_t> &freqs) const {
    std::vector<std::shared_ptr<const SparseSystem>> out;
    for (std::size_t s : freqs) {
      out.push_back(systems[s]);
    }
    return out;
  }
};

CcContext &cc() {
  static CcContext ctx;
  return ctx;
}

// 1 ---------------------------------------------------------------------
Outcome delay_oracle() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> speed(1000.0, 4000.0);
  std::uniform_real_distribution<double> thick(0.005, 0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int media = 0;
  int skipped = 0;
  while (media < 200) {
    const std::size_t layers = 2 + media % 2;
    std::vector<Layer> ls;
    for (std::size_t l = 0; l < layers; ++l) {
      ls.push_back(Layer::with_density(thick(rng), speed(rng), 0.0, 1000.0));
    }
    const LayeredMedium m(ls);
    ArrayGeometry g;
    g.transmitter = {0.0, 0.0};
    g.receivers = {{0.0, 0.2 * unit(rng)}};
    const double depth = m.top_of(layers - 1) + (0.05 + 0.9 * unit(rng)) * ls.back().thickness;
    const Point2 p{depth, 0.2 * unit(rng) - 0.05};
    const auto e = point_delays(m, g, p, 1e-7);
    if (!e[0].reachable) {
      // beyond the critical angle; draw another medium
      ++skipped;
      continue;
    }
    std::vector<double> th;
    std::vector<double> sp;
    for (std::size_t l = 0; l < layers; ++l) {
      th.push_back(l + 1 < layers ? ls[l].thickness : depth - m.top_of(l));
      sp.push_back(ls[l].speed);
    }
    const double oracle = oracles::fermat_time(th, sp, g.transmitter.height, p.height) +
                          oracles::fermat_time(th, sp, p.height, g.receivers[0].height);
    worst = std::max(worst, std::abs(e[0].delay - oracle));
    ++media;
  }
  return {worst <= 1e-6,
          fmt("200 media, max |delay - fermat| = %.3g s (tol 1e-6), %d unreachable redrawn",
              worst, skipped)};
}

// 2 ---------------------------------------------------------------------
Outcome monotone_reach() {
  const LayeredMedium m({Layer::with_density(0.073, 1500, 0, 997),
                         Layer::with_density(0.006, 2800, 0, 1180),
                         Layer::with_density(0.12, 2620, 0, 1970)});
  bool ok = true;
  std::string detail;
  for (auto dir : {Direction::outbound, Direction::inbound}) {
    const double crit = critical_angle(m, dir);
    double prev = -std::numeric_limits<double>::infinity();
    std::size_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
      const double theta = (crit - kCriticalMargin) * i / 10000.0;
      const double z = vertical_reach(m, theta, dir);
      bad += z > prev ? 0 : 1;
      prev = z;
    }
    ok = ok && bad == 0;
    detail += fmt("%s: %zu violations over 10000 angles below %.4f rad; ",
                  dir == Direction::outbound ? "Z^t" : "Z^r", bad, crit);
  }
  return {ok, detail};
}

// 3 ---------------------------------------------------------------------
Outcome kernel_identity() {
  const Config cfg = load_config(kConfigs / "cc_kwave.json");
  double worst = 0.0;
  bool decreasing = true;
  for (const auto &spec : cfg.pulses) {
    const auto s = make_pulse(spec);
    double peak = 0.0;
    for (double v : s) {
      peak = std::max(peak, std::abs(v));
    }
    const auto k = dispersion_kernel(spec, 0.0, 1);
    for (std::size_t n = 0; n < s.size(); ++n) {
      worst = std::max(worst, std::abs(k.at(static_cast<std::ptrdiff_t>(n)) - s[n]) / peak);
    }
    double prev = k.energy();
    for (double gamma : {1e-8, 1e-7, 1e-6, 5e-6, 2e-5, 1e-4}) {
      const double e = dispersion_kernel(spec, gamma, 1).energy();
      decreasing = decreasing && e < prev;
      prev = e;
    }
  }
  return {worst <= 1e-10 && decreasing,
          fmt("max relative deviation at gamma=0 %.3g (tol 1e-10); energy strictly decreasing: %s",
              worst, decreasing ? "yes" : "no")};
}

// 4 ---------------------------------------------------------------------
Outcome adjoint() {
  const auto t0 = std::chrono::steady_clock::now();
  auto &ctx = cc();
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  auto check = [&](const BlockColumns &m) {
    const auto x = gaussian(m.cols(), rng);
    const auto y = gaussian(m.rows(), rng);
    const double gap = std::abs(dot(m.apply(x), y) - dot(x, m.apply_transpose(y)));
    worst = std::max(worst, gap / (norm(x) * norm(y)));
  };
  for (const auto &s : ctx.systems) {
    check(BlockColumns::single(s->A));
    check(BlockColumns::single(s->D));
  }
  const auto stack = stack_systems(ctx.systems, {1.0, 0.5, 2.0});
  check(stack.A);
  check(stack.D);
  const double took = seconds_since(t0);
  return {worst <= 1e-9 && took < 120.0,
          fmt("140x70 grid, 3 single + 1 stacked: max gap %.3g * |x||y| (tol 1e-9), %.1f s "
              "including build (limit 120 s)",
              worst, took)};
}

// 5 ---------------------------------------------------------------------
Outcome prior_suite() {
  std::size_t convex_bad = 0;
  double deriv_worst = 0.0;
  for (double p : {1.1, 1.5, 1.9}) {
    QggmrfParams prm;
    prm.p = p;
    const double h = 1e-3;
    for (double d = -3.0; d <= 3.0; d += 0.0071) {
      const double second = rho(d + h, 1.0, prm) - 2 * rho(d, 1.0, prm) + rho(d - h, 1.0, prm);
      convex_bad += second >= -1e-12 ? 0 : 1;
    }
    for (double d = -3.0; d <= 3.0; d += 0.0173) {
      if (std::abs(d) < 1e-3) {
        continue;
      }
      const double hh = 1e-6 * std::abs(d);
      const double fd = (rho(d + hh, 0.3, prm) - rho(d - hh, 0.3, prm)) / (2 * hh);
      deriv_worst = std::max(deriv_worst, std::abs(rho_prime(d, 0.3, prm) - fd) / std::abs(fd));
    }
  }
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const QggmrfParams prm;
  std::size_t major_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double d0 = u(rng);
    const double d = u(rng);
    const double b = surrogate_coeff(d0, 0.7, prm);
    const double bound = rho(d0, 0.7, prm) + b * (d * d - d0 * d0);
    major_bad += rho(d, 0.7, prm) <= bound + 1e-12 * (1 + std::abs(bound)) ? 0 : 1;
  }
  return {convex_bad == 0 && deriv_worst <= 1e-6 && major_bad == 0,
          fmt("convexity violations %zu; rho' max rel error %.2g (tol 1e-6); majorization "
              "violations %zu / 1000",
              convex_bad, deriv_worst, major_bad)};
}

// 6 ---------------------------------------------------------------------
Outcome solver_descent() {
  auto &ctx = cc();
  const auto &set = ctx.dataset("cc-notch");
  bool ok = true;
  std::string detail;
  for (const auto &[freqs, limit] :
       std::vector<std::pair<std::vector<std::size_t>, double>>{{{0}, 443.0},
                                                                 {{0, 1, 2}, 2052.0}}) {
    Config c = ctx.config;
    c.solver.iterations = 100;
    auto p = make_problem(c, ctx.pick(freqs), set, freqs);
    const auto t0 = std::chrono::steady_clock::now();
    const auto st = reconstruct(p);
    const double took = seconds_since(t0);
    std::size_t rises = 0;
    for (std::size_t k = 1; k < st.cost_history.size(); ++k) {
      rises += st.cost_history[k] <= st.cost_history[k - 1] * (1.0 + 1e-9) ? 0 : 1;
    }
    ok = ok && rises == 0 && st.cost_history.size() == 101 && took < limit;
    detail += fmt("%s: %zu increases over 100 sweeps, cost %.4g -> %.4g, %.1f s (limit %.0f s); ",
                  freqs.size() == 1 ? "29 kHz" : "MF", rises, st.cost_history.front(),
                  st.cost_history.back(), took, limit);
  }
  return {ok, detail};
}

// 7 ---------------------------------------------------------------------
Outcome toy_optimality() {
  // Real model columns on a 2x2 patch seen by two receivers at one frequency.
  // Voxels 20 mm apart so their echoes do not coincide, which keeps the cost
  // well enough conditioned for a 1e-3 lattice to resolve its minimum.
  const LayeredMedium medium({Layer::with_density(0.02, 1500, 2e-6, 1000),
                              Layer::with_density(0.06, 2600, 30e-6, 2000)});
  ArrayGeometry geometry;
  geometry.transmitter = {0.0, 0.005};
  geometry.pointing_angle = 20.0 * kDeg;
  geometry.receivers = {{0.0, 0.02}, {0.0, 0.035}};
  const ImageGrid grid{2, 2, 0.02, {0.04, 0.0}};
  PulseSpec spec;
  spec.center_frequency = 58e3;
  spec.duration = 50e-6;
  spec.sampling_frequency = 2e6;
  spec.record_length = 300;
  const auto sys = std::make_shared<const SparseSystem>(
      build_system(medium, geometry, grid, spec, BeamParams{8.0, geometry.pointing_angle}));

  ReconProblem p;
  p.A = std::make_shared<const BlockColumns>(BlockColumns::single(sys->A));
  const std::vector<double> x_true{0.8, 0.0, 0.3, -0.2};
  p.y = p.A->apply(x_true);
  std::mt19937_64 rng(kSeed);
  const auto w = gaussian(p.y.size(), rng);
  double peak = 0.0;
  for (double v : p.y) {
    peak = std::max(peak, std::abs(v));
  }
  for (std::size_t i = 0; i < p.y.size(); ++i) {
    p.y[i] += 0.05 * peak * w[i];
  }
  p.sigma = 0.05 * peak;
  QggmrfParams prm;
  prm.T = 0.5;
  p.prior = std::make_shared<const QggmrfPrior>(grid, prm,
                                                variance_field(grid, geometry, 10, 2, 0.5));
  p.options.iterations = 20000;
  p.options.early_exit = true;
  p.options.tolerance = 1e-16;
  const auto st = reconstruct(p);

  auto cost = [&](const std::vector<double> &x) { return map_cost(initial_state(p, x), p); };
  // 21^4 lattice from the origin at spacing 0.1, then two zooms: final step 1e-3.
  const auto best = oracles::lattice_minimize(cost, std::vector<double>(4, 0.0), 0.1, 3);
  const double best_cost = cost(best);
  double dist = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    dist = std::max(dist, std::abs(st.x[i] - best[i]));
  }
  const double icd_cost = cost(st.x);
  return {dist <= 1e-3 && icd_cost <= best_cost + 1e-9 * std::abs(best_cost),
          fmt("ICD (%zu sweeps) vs lattice minimum: max |dx| %.2g (tol 1e-3), cost %.10g vs %.10g",
              st.sweeps, dist, icd_cost, best_cost)};
}

// 8 ---------------------------------------------------------------------
Outcome localization() {
  auto &ctx = cc();
  bool ok = true;
  std::string detail;
  for (const char *profile : {"cc-notch", "cc-no-notch"}) {
    const auto &set = ctx.dataset(profile);
    const auto &truth = ctx.truth.at(profile);
    Config c = ctx.config;
    c.prior.sigma0 = kLocalSigma0;
    c.solver.sigma = 1.0;
    c.solver.frequency_sigmas = set.noise_sigma;
    for (auto &s : c.solver.frequency_sigmas) {
      s *= kMismatchFactor;
    }
    double sf_min_error = std::numeric_limits<double>::infinity();
    bool sf_ok = true;
    std::string sf_text;
    MetricsReport mf;
    for (const auto &freqs : std::vector<std::vector<std::size_t>>{{0}, {1}, {2}, {0, 1, 2}}) {
      const auto st = reconstruct(make_problem(c, ctx.pick(freqs), set, freqs));
      const auto rep = compute_metrics({c.grid, st.x}, truth);
      if (freqs.size() == 1) {
        sf_min_error = std::min(sf_min_error, rep.mean_error);
        sf_ok = sf_ok && rep.within_two >= 0.9;
        sf_text += fmt("%.1fk w2 %.2f err %.2f, ", c.pulses[freqs[0]].center_frequency / 1e3,
                       rep.within_two, rep.mean_error);
      } else {
        mf = rep;
      }
    }
    const auto saft = compute_metrics(saft_image(c, ctx.table, set, {0, 1, 2}), truth);
    const bool mf_ok = mf.within_one >= 0.9;
    const bool order_ok = mf.mean_error <= sf_min_error;
    const bool saft_ok = saft.artifact_energy >= mf.artifact_energy;
    ok = ok && mf_ok && sf_ok && order_ok && saft_ok;
    detail += fmt("[%s] MF w1 %.2f (need 0.90) err %.2f; SF %s(need w2 0.90); "
                  "MF err <= min SF: %s; artifact SAFT %.3f vs MF %.3f] ",
                  profile, mf.within_one, mf.mean_error, sf_text.c_str(),
                  order_ok ? "yes" : "no", saft.artifact_energy, mf.artifact_energy);
  }
  return {ok, detail};
}

// 9 ---------------------------------------------------------------------
Outcome direct_arrival() {
  auto &ctx = cc();
  const std::size_t f = 2;
  const auto g = default_direct_arrivals(1, ctx.config.geometry.receiver_count(), kSeed);
  MeasurementSet set;
  set.pulses = ctx.config.pulses;
  set.receivers = ctx.config.geometry.receiver_count();
  set.traces.resize(3);
  set.traces[f] = BlockColumns::single(ctx.systems[f]->D).apply(g[0]);
  double with_d = 0.0;
  double without_d = 0.0;
  for (bool use_d : {true, false}) {
    const auto st = reconstruct(make_problem(ctx.config, ctx.pick({f}), set, {f}, use_d));
    (use_d ? with_d : without_d) = norm(st.x);
  }
  const double ratio = without_d > 0.0 ? with_d / without_d : 0.0;
  return {without_d > 0.0 && ratio <= 0.01,
          fmt("58 kHz, x_true = 0: |x| with D %.3g, without D %.3g, ratio %.3g (need <= 0.01)",
              with_d, without_d, ratio)};
}

// 10 --------------------------------------------------------------------
Outcome panorama_circle() {
  auto &ctx = cc();
  const std::size_t f = 2;
  Config c = ctx.config;
  c.pulses = {ctx.config.pulses[f]};
  c.synth.phantom = PhantomProfile::cc_no_notch;
  c.synth.offgrid = false;
  c.solver.iterations = 30;
  c.prior.sigma0 = kLocalSigma0;
  const std::vector<std::shared_ptr<const SparseSystem>> sys{ctx.systems[f]};
  const auto &spec = c.panorama;
  std::vector<Image> views;
  for (std::size_t i = 0; i < spec.angles_deg.size(); ++i) {
    c.synth.view_angle_deg = spec.angles_deg[i];
    const auto set = synthesize_config(c, kSeed + i, sys);
    const auto st = reconstruct(make_problem(c, sys, set, {0}));
    views.push_back({c.grid, st.x});
  }
  const auto pano = stitch_panorama(views, spec);
  const auto &pg = pano.grid;
  const double wall = *config_phantom(c, c.grid).wall_depth;
  const double expect =
      spec.radial_offset +
      c.grid.col_depth(static_cast<std::size_t>((wall - c.grid.origin.depth) / c.grid.pitch));
  // Radial argmax along every degree of the covered half circle.
  double worst = 0.0;
  for (int a = 0; a <= 180; ++a) {
    const double ux = std::cos(a * kDeg);
    const double uy = std::sin(a * kDeg);
    double best_r = 0.0;
    double best_v = -1.0;
    for (double r = 0.0; r < -pg.origin.depth; r += pg.pitch / 4) {
      const double x = r * ux - pg.origin.depth;
      const double y = r * uy - pg.origin.height;
      const auto col = static_cast<std::size_t>(x / pg.pitch);
      const auto row = static_cast<std::size_t>(y / pg.pitch);
      if (col >= pg.cols || row >= pg.rows) {
        continue;
      }
      const double v = std::abs(pano.data[pg.index(row, col)]);
      if (v > best_v) {
        best_v = v;
        best_r = r;
      }
    }
    worst = std::max(worst, std::abs(best_r - expect));
  }
  return {worst <= c.grid.pitch,
          fmt("%zu views 0-180 deg at height %.3f m: ridge radius error max %.2f mm over 181 "
              "azimuths (tol %.1f mm), expected radius %.4f m",
              views.size(), spec.height, worst * 1e3, c.grid.pitch * 1e3, expect)};
}

// 11 --------------------------------------------------------------------
std::string file_bytes(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome reproducibility() {
  const auto dir = fs::temp_directory_path() / "umbir_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  nlohmann::ordered_json doc;
  std::ifstream(kConfigs / "cc_kwave.json") >> doc;
  doc["solver"]["iterations"] = 10;
  const auto cfg = dir / "cc.json";
  std::ofstream(cfg) << doc.dump(2);

  std::vector<std::string> compared;
  bool ok = true;
  // Both runs write to the same path (sidecars record it), then move aside.
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / "work";
    const std::string bin = UMBIR_BIN;
    const std::string base = " --config " + cfg.string() + " --seed 7";
    const std::vector<std::string> cmds{
        bin + " synth" + base + " --output " + out.string(),
        bin + " reconstruct" + base + " --input " + (out / "measurements.umbm").string() +
            " --frequencies all --output " + (out / "mf.umbi").string(),
        bin + " saft" + base + " --input " + (out / "measurements.umbm").string() +
            " --output " + (out / "saft.umbi").string()};
    for (const auto &cmd : cmds) {
      if (std::system((cmd + " > /dev/null 2>&1").c_str()) != 0) {
        return {false, "command failed: " + cmd};
      }
    }
    fs::rename(out, dir / ("run" + std::to_string(run)));
  }
  for (const char *name : {"measurements.umbm", "truth.umbi", "manifest.json", "mf.umbi",
                           "mf.umbi.json", "saft.umbi"}) {
    const auto a = file_bytes(dir / "run0" / name);
    const auto b = file_bytes(dir / "run1" / name);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    compared.push_back(std::string(name) + (same ? " identical" : " DIFFERS"));
  }
  std::string detail = "two CLI runs (synth, reconstruct, saft), seed 7: ";
  for (std::size_t i = 0; i < compared.size(); ++i) {
    detail += (i ? ", " : "") + compared[i];
  }
  fs::remove_all(dir);
  return {ok, detail};
}

} // namespace

int main(int argc, char **argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 delay oracle", delay_oracle},
      {"2 reach monotonicity", monotone_reach},
      {"3 kernel identity", kernel_identity},
      {"4 adjoint", adjoint},
      {"5 prior suite", prior_suite},
      {"6 solver descent", solver_descent},
      {"7 toy optimality", toy_optimality},
      {"8 wall localization", localization},
      {"9 direct-arrival rejection", direct_arrival},
      {"10 panorama circle", panorama_circle},
      {"11 reproducibility", reproducibility}};
  // Optional filter: criterion numbers on the command line.
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto &[name, fn] : criteria) {
    const std::string number = name.substr(0, name.find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt("%.1f", seconds_since(t0))
              << " s): " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : fmt("%d criteria failed", failed))
            << std::endl;
  return failed == 0 ? 0 : 1;
}
