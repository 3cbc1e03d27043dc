#pragma once

#include "umbir/prior.hpp"
#include "umbir/sparse.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

namespace umbir {

struct SolverOptions {
  std::size_t iterations{100};
  std::uint64_t seed{1};
  bool early_exit{false};
  double tolerance{1e-6}; // relative cost decrease per sweep for early exit
  bool update_direct_arrival{true};
  std::ostream *log{nullptr}; // per-sweep cost lines when set
};

/// Everything the MAP estimate depends on. Operators are shared read-only so
/// several reconstructions can run on the same matrices.
struct ReconProblem {
  std::shared_ptr<const BlockColumns> A;
  std::shared_ptr<const BlockColumns> D; // may be null: no direct-arrival term
  std::vector<double> y;
  double sigma{0.1};
  std::shared_ptr<const QggmrfPrior> prior; // may be null: no prior
  SolverOptions options;

  [[nodiscard]] std::size_t voxels() const { return A->cols(); }
  [[nodiscard]] std::size_t arrivals() const { return D ? D->cols() : 0; }
  void validate() const;
};

struct ReconState {
  std::vector<double> x;
  std::vector<double> g;
  std::vector<double> residual; // y - A x - D g
  std::vector<double> cost_history;
  std::size_t sweeps{};
  std::size_t degenerate_arrivals{}; // zero-norm D columns seen
};

/// Zero image and coefficients with the matching residual (= y).
[[nodiscard]] ReconState initial_state(const ReconProblem &problem,
                                       std::optional<std::vector<double>> x0 = {});

/// Recomputes y - A x - D g from scratch.
void refresh_residual(ReconState &state, const ReconProblem &problem);

/// Full MAP cost evaluated from a freshly computed residual.
[[nodiscard]] double map_cost(const ReconState &state,
                              const ReconProblem &problem);

/// Cost using the residual stored in `state`.
[[nodiscard]] double map_cost_from_residual(const ReconState &state,
                                            const ReconProblem &problem);

/// Gradient of the cost with respect to (x, g), concatenated.
[[nodiscard]] std::vector<double> cost_gradient(const ReconState &state,
                                                const ReconProblem &problem);

/// One majorized coordinate update of x_i; keeps the residual in sync.
/// `column_norm2` is ||A_i||^2 (pass a negative value to compute it).
double icd_update_voxel(ReconState &state, const ReconProblem &problem,
                        std::size_t i, double column_norm2 = -1.0);

/// Exact least-squares update of every direct-arrival coefficient given x.
void update_direct_arrival(ReconState &state, const ReconProblem &problem);

/// Runs options.iterations sweeps (g update, then a shuffled voxel pass).
/// cost_history[0] is the starting cost, then one entry per sweep.
[[nodiscard]] ReconState reconstruct(const ReconProblem &problem,
                                     std::optional<std::vector<double>> x0 = {});

} // namespace umbir
