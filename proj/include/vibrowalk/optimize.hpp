#pragma once

// Seeded derivative-free box-constrained minimizer.
//
// Two phases in the normalized box. The global phase is a CMA-ES: sample a
// population from a Gaussian, recombine the elite with log-linear weights
// into the new mean, and adapt the step size and full covariance from the
// evolution paths. The local phase refines the best point with a bounded
// Nelder-Mead simplex, restarting with a smaller simplex when it collapses.
// Dimensions flagged as log-scaled are searched in log space. Candidates are
// proposed sequentially from one RNG stream and batches are evaluated in
// parallel, so the evaluation sequence depends only on the seed.

#include "vibrowalk/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace vibrowalk {

struct OptBudget {
  int max_evals = 300;
  std::uint64_t seed = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> log_scale;  // empty = all linear
  int population = 0;           // 0 = 4 + 3 ln(n) rounded, at least 8
  double elite_fraction = 0.5;
  double initial_spread = 0.3;  // initial sampling radius in normalized units (step size x sqrt(n))
  double min_spread = 1e-6;
  double local_fraction = 0.5;  // share of the budget spent on simplex refinement
  int jobs = 1;

  std::size_t dim() const { return lower.size(); }
  bool is_log(std::size_t i) const;
  void validate() const;
};

struct Evaluation {
  int id = 0;
  std::vector<double> x;
  double value = 0.0;
  bool ok = true;
  std::string message;
};

struct OptResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  int best_id = -1;
  std::vector<Evaluation> trace;
  std::uint64_t seed = 0;
};

/// Objective must be safe to call concurrently. A throw or a non-finite
/// value marks the evaluation as failed (value = +inf).
using Objective = std::function<double(const std::vector<double>&)>;

/// Minimizes `f` inside the budget's box. The first evaluation is `start`
/// (or the box center). Throws Error if every evaluation failed.
OptResult minimize(const Objective& f, const OptBudget& budget,
                   const std::optional<std::vector<double>>& start = std::nullopt);

}  // namespace vibrowalk
