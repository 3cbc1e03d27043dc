#include "umbir/solver.hpp"

#include "umbir/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <string>

namespace umbir {
namespace {

bool all_finite(const std::vector<double> &v) {
  return std::all_of(v.begin(), v.end(),
                     [](double a) { return std::isfinite(a); });
}

double squared_norm(const std::vector<double> &v) {
  double s = 0.0;
  for (double a : v) {
    s += a * a;
  }
  return s;
}

} // namespace

void ReconProblem::validate() const {
  if (!A) {
    throw DataError("reconstruction problem has no system matrix");
  }
  if (y.size() != A->rows()) {
    throw DataError("measurement length " + std::to_string(y.size()) +
                    " does not match system rows " + std::to_string(A->rows()));
  }
  if (D && D->rows() != A->rows()) {
    throw DataError("direct-arrival matrix rows do not match the system");
  }
  if (prior && prior->size() != A->cols()) {
    throw DataError("prior grid does not match the system columns");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("solver.sigma: must be finite and > 0");
  }
  if (options.iterations == 0) {
    throw ConfigError("solver.iterations: must be >= 1");
  }
  if (!all_finite(y)) {
    throw NumericalError("measurements contain non-finite values");
  }
}

ReconState initial_state(const ReconProblem &problem,
                         std::optional<std::vector<double>> x0) {
  ReconState state;
  state.x = x0 ? std::move(*x0) : std::vector<double>(problem.voxels(), 0.0);
  if (state.x.size() != problem.voxels()) {
    throw DataError("initial image has the wrong number of voxels");
  }
  if (!all_finite(state.x)) {
    throw NumericalError("initial image contains non-finite values");
  }
  state.g.assign(problem.arrivals(), 0.0);
  refresh_residual(state, problem);
  return state;
}

void refresh_residual(ReconState &state, const ReconProblem &problem) {
  state.residual = problem.y;
  std::vector<double> ax(problem.A->rows(), 0.0);
  problem.A->apply_add(state.x, ax);
  if (problem.D) {
    problem.D->apply_add(state.g, ax);
  }
  for (std::size_t i = 0; i < ax.size(); ++i) {
    state.residual[i] -= ax[i];
  }
}

double map_cost_from_residual(const ReconState &state,
                              const ReconProblem &problem) {
  double c = squared_norm(state.residual) / (2.0 * problem.sigma * problem.sigma);
  if (problem.prior) {
    c += problem.prior->cost(state.x);
  }
  return c;
}

double map_cost(const ReconState &state, const ReconProblem &problem) {
  ReconState fresh;
  fresh.x = state.x;
  fresh.g = state.g;
  refresh_residual(fresh, problem);
  return map_cost_from_residual(fresh, problem);
}

std::vector<double> cost_gradient(const ReconState &state,
                                  const ReconProblem &problem) {
  ReconState fresh;
  fresh.x = state.x;
  fresh.g = state.g;
  refresh_residual(fresh, problem);
  const double s2 = problem.sigma * problem.sigma;
  auto gx = problem.A->apply_transpose(fresh.residual);
  for (auto &v : gx) {
    v = -v / s2;
  }
  if (problem.prior) {
    const auto gp = problem.prior->gradient(state.x);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += gp[i];
    }
  }
  if (problem.D) {
    const auto gd = problem.D->apply_transpose(fresh.residual);
    for (double v : gd) {
      gx.push_back(-v / s2);
    }
  }
  return gx;
}

double icd_update_voxel(ReconState &state, const ReconProblem &problem,
                        std::size_t i, double column_norm2) {
  const BlockColumns &A = *problem.A;
  if (column_norm2 < 0.0) {
    column_norm2 = A.norm2(i);
  }
  const double s2 = problem.sigma * problem.sigma;
  const double theta1 = -A.dot(i, state.residual) / s2;
  const double theta2 = column_norm2 / s2;
  const double xi = state.x[i];

  double num = theta2 * xi - theta1;
  double den = theta2;
  if (problem.prior) {
    const auto &prm = problem.prior->params();
    for (const auto &nb : problem.prior->neighbors(i)) {
      const double xr = state.x[nb.index];
      const double bt = nb.weight * surrogate_coeff(xi - xr, nb.sigma, prm);
      num += 2.0 * bt * xr;
      den += 2.0 * bt;
    }
  }
  if (!(den > 0.0)) {
    // No data and no prior: the cost does not depend on x_i.
    return xi;
  }
  const double updated = num / den;
  const double step = updated - xi;
  if (step != 0.0) {
    A.axpy(i, -step, state.residual);
    state.x[i] = updated;
  }
  return updated;
}

void update_direct_arrival(ReconState &state, const ReconProblem &problem) {
  if (!problem.D) {
    return;
  }
  const BlockColumns &D = *problem.D;
  for (std::size_t k = 0; k < D.cols(); ++k) {
    const double n2 = D.norm2(k);
    if (!(n2 > 0.0)) {
      if (state.g[k] != 0.0) {
        state.g[k] = 0.0;
      }
      ++state.degenerate_arrivals;
      continue;
    }
    // Columns of D touch disjoint rows, so each coefficient is solved exactly
    // against the residual with its own contribution added back.
    const double step = D.dot(k, state.residual) / n2;
    if (step != 0.0) {
      D.axpy(k, -step, state.residual);
      state.g[k] += step;
    }
  }
}

ReconState reconstruct(const ReconProblem &problem,
                       std::optional<std::vector<double>> x0) {
  problem.validate();
  ReconState state = initial_state(problem, std::move(x0));
  const std::size_t n = problem.voxels();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = problem.A->norm2(i);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(problem.options.seed);

  state.cost_history.push_back(map_cost_from_residual(state, problem));
  auto *log = problem.options.log;
  if (log) {
    *log << "sweep,cost\n" << std::setprecision(17) << 0 << ','
         << state.cost_history.back() << '\n';
  }
  for (std::size_t sweep = 1; sweep <= problem.options.iterations; ++sweep) {
    if (problem.options.update_direct_arrival) {
      update_direct_arrival(state, problem);
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      icd_update_voxel(state, problem, i, norms[i]);
    }
    refresh_residual(state, problem);
    const double cost = map_cost_from_residual(state, problem);
    if (!std::isfinite(cost)) {
      throw NumericalError("cost became non-finite at sweep " +
                           std::to_string(sweep));
    }
    const double previous = state.cost_history.back();
    state.cost_history.push_back(cost);
    state.sweeps = sweep;
    if (log) {
      *log << sweep << ',' << cost << '\n';
    }
    if (problem.options.early_exit && previous > 0.0 &&
        (previous - cost) / previous < problem.options.tolerance) {
      break;
    }
  }
  return state;
}

} // namespace umbir
