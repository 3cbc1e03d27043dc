#pragma once

// Brute-force references shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracles {

// One-way travel time through stacked slabs when the ray crosses interface i
// at height xs[i]. Independent of any angle bookkeeping.
inline double path_time(const std::vector<double> &thick, const std::vector<double> &speed,
                        double h0, double h1, const std::vector<double> &xs) {
  double t = 0.0;
  double prev = h0;
  for (std::size_t l = 0; l < thick.size(); ++l) {
    const double next = l + 1 < thick.size() ? xs[l] : h1;
    t += std::hypot(thick[l], next - prev) / speed[l];
    prev = next;
  }
  return t;
}

// Fermat minimizer: grid search over the crossing heights, refined by
// zooming around the best node.
inline double fermat_time(const std::vector<double> &thick, const std::vector<double> &speed,
                          double h0, double h1) {
  const std::size_t n = thick.size() - 1;
  if (n == 0) {
    return path_time(thick, speed, h0, h1, {});
  }
  std::vector<double> lo(n, std::min(h0, h1));
  std::vector<double> hi(n, std::max(h0, h1));
  std::vector<double> best(n);
  const int nodes = n == 1 ? 2001 : 161;
  for (int round = 0; round < 4; ++round) {
    double best_t = 1e300;
    std::vector<double> xs(n);
    std::function<void(std::size_t)> scan = [&](std::size_t d) {
      if (d == n) {
        const double t = path_time(thick, speed, h0, h1, xs);
        if (t < best_t) {
          best_t = t;
          best = xs;
        }
        return;
      }
      for (int i = 0; i < nodes; ++i) {
        xs[d] = lo[d] + (hi[d] - lo[d]) * i / (nodes - 1);
        scan(d + 1);
      }
    };
    scan(0);
    for (std::size_t d = 0; d < n; ++d) {
      const double step = (hi[d] - lo[d]) / (nodes - 1);
      lo[d] = best[d] - 2 * step;
      hi[d] = best[d] + 2 * step;
    }
  }
  return path_time(thick, speed, h0, h1, best);
}


// Grid search for the minimum of `cost` over R^4: a lattice of 21 nodes per
// axis around the current best point, shrunk tenfold per level. Within a
// level the lattice is re-centered until the best node is interior, so long
// narrow valleys are followed instead of clipped. Returns the best node of
// the finest level (spacing step0 / 10^(levels-1)).
template <class Cost>
std::vector<double> lattice_minimize(Cost &&cost, std::vector<double> start,
                                     double step0, int levels) {
  std::vector<double> best = std::move(start);
  double step = step0;
  for (int level = 0; level < levels; ++level) {
    for (int recenter = 0; recenter < 50; ++recenter) {
      const auto centre = best;
      double best_cost = std::numeric_limits<double>::infinity();
      int edge = 0;
      std::vector<double> x(4);
      for (int a = -10; a <= 10; ++a)
        for (int b = -10; b <= 10; ++b)
          for (int c = -10; c <= 10; ++c)
            for (int d = -10; d <= 10; ++d) {
              x = {centre[0] + a * step, centre[1] + b * step, centre[2] + c * step,
                   centre[3] + d * step};
              const double v = cost(x);
              if (v < best_cost) {
                best_cost = v;
                best = x;
                edge = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}) == 10;
              }
            }
      if (!edge) {
        break;
      }
    }
    step /= 10.0;
  }
  return best;
}

} // namespace oracles
