#ifndef ALTDESIGN_OPTIMIZER_HPP
#define ALTDESIGN_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <utility>
#include <vector>

#include "altdesign/core.hpp"
#include "altdesign/design.hpp"
#include "altdesign/rng.hpp"

namespace altdesign {

struct ObjectiveValue {
  double value = inf;
  double se = 0.0;
};

/// A (possibly stochastic) design objective. Stochastic objectives must be
/// pure functions of (design, stream) so common-random-number comparisons
/// are exact.
using ObjectiveFn = std::function<ObjectiveValue(const Design&, const RandomStream&)>;

struct ExchangeConfig {
  int grid_points_per_variable = 21;
  int sweeps_max = 20;
  int restarts = 10;
  double improvement_tolerance = 1e-9;
  double se_tolerance_factor = 0.1;  // stochastic rule: beat by 0.1 * pooled SE
  std::uint64_t root_seed = 0;
  int threads = 1;
};

struct SearchTrace {
  std::vector<double> sweep_best;  // best-so-far value after each sweep
  int accepted_exchanges = 0;
  double final_value = inf;
  bool converged = false;
};

inline std::vector<double> candidate_grid(double lo, double hi, int points) {
  if (points < 2) return {lo};
  std::vector<double> grid(points);
  for (int t = 0; t < points; ++t)
    grid[t] = lo + (hi - lo) * static_cast<double>(t) / (points - 1);
  return grid;
}

/// Grid coordinate exchange with common random numbers: for every
/// coordinate the incumbent and all grid candidates are evaluated under the
/// same substream, and the best candidate is accepted only if it improves
/// by more than the (noise-aware) tolerance.
inline std::pair<Design, SearchTrace> coordinate_exchange(const ObjectiveFn& objective,
                                                          const Design& initial,
                                                          const ExchangeConfig& config) {
  initial.validate();
  const RandomStream base(config.root_seed);
  Design incumbent = initial;
  const ObjectiveValue start = objective(incumbent, base.substream(0));
  if (!std::isfinite(start.value))
    throw infeasible_start("coordinate_exchange: objective not finite at initial design");

  SearchTrace trace;
  double best_so_far = start.value;
  const Eigen::Index n = incumbent.n();
  const Eigen::Index k = incumbent.k();

  std::vector<std::vector<double>> grids(k);
  for (Eigen::Index j = 0; j < k; ++j)
    grids[j] = candidate_grid(incumbent.lo[j], incumbent.hi[j], config.grid_points_per_variable);

  const auto evaluate_candidates = [&](const RandomStream& cmp,
                                       const std::function<Design(std::size_t)>& make_candidate,
                                       std::size_t count) {
    std::vector<ObjectiveValue> vals(count);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(static_cast<std::int64_t>(count), config.threads, [&](std::int64_t t) {
      try {
        vals[static_cast<std::size_t>(t)] =
            objective(make_candidate(static_cast<std::size_t>(t)), cmp);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
    if (failure) std::rethrow_exception(failure);
    return vals;
  };
  const auto accept_threshold = [&](const ObjectiveValue& inc, const ObjectiveValue& cand) {
    const double pooled_se = std::sqrt(inc.se * inc.se + cand.se * cand.se);
    return std::max(config.improvement_tolerance, config.se_tolerance_factor * pooled_se);
  };

  for (int sweep = 0; sweep < config.sweeps_max; ++sweep) {
    bool any_accept = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        // per-coordinate stream, independent of the sweep index so a rerun
        // from a converged design reproduces every comparison
        const RandomStream cmp = base.substream(static_cast<std::uint64_t>(i * k + j) + 1);
        const ObjectiveValue inc = objective(incumbent, cmp);
        const auto& grid = grids[j];
        const double old_coord = incumbent.points(i, j);
        const auto vals = evaluate_candidates(
            cmp,
            [&](std::size_t t) {
              Design candidate = incumbent;
              candidate.points(i, j) = grid[t];
              return candidate;
            },
            grid.size());
        std::size_t best_t = 0;
        for (std::size_t t = 1; t < vals.size(); ++t)
          if (vals[t].value < vals[best_t].value) best_t = t;
        if (std::isfinite(vals[best_t].value) && grid[best_t] != old_coord &&
            inc.value - vals[best_t].value > accept_threshold(inc, vals[best_t])) {
          incumbent.points(i, j) = grid[best_t];
          ++trace.accepted_exchanges;
          any_accept = true;
          best_so_far = std::min(best_so_far, vals[best_t].value);
        }
      }
    }
    // replication pass: each run may become a copy of another run, the move
    // coordinate exchange cannot make without crossing a ridge
    if (n > 1) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const RandomStream cmp = base.substream(0x520000u + static_cast<std::uint64_t>(i));
        const ObjectiveValue inc = objective(incumbent, cmp);
        std::vector<Eigen::Index> sources;
        for (Eigen::Index l = 0; l < n; ++l)
          if (l != i && (incumbent.points.row(l) - incumbent.points.row(i)).cwiseAbs().maxCoeff() > 0.0)
            sources.push_back(l);
        if (sources.empty()) continue;
        const auto vals = evaluate_candidates(
            cmp,
            [&](std::size_t t) {
              Design candidate = incumbent;
              candidate.points.row(i) = incumbent.points.row(sources[t]);
              return candidate;
            },
            sources.size());
        std::size_t best_t = 0;
        for (std::size_t t = 1; t < vals.size(); ++t)
          if (vals[t].value < vals[best_t].value) best_t = t;
        if (std::isfinite(vals[best_t].value) &&
            inc.value - vals[best_t].value > accept_threshold(inc, vals[best_t])) {
          incumbent.points.row(i) = incumbent.points.row(sources[best_t]);
          ++trace.accepted_exchanges;
          any_accept = true;
          best_so_far = std::min(best_so_far, vals[best_t].value);
        }
      }
    }
    trace.sweep_best.push_back(best_so_far);
    if (!any_accept) {
      trace.converged = true;
      break;
    }
  }
  trace.final_value = objective(incumbent, base.substream(0)).value;
  return {incumbent, trace};
}

struct MultistartResult {
  Design best_design;
  SearchTrace best_trace;
  int best_index = -1;
  std::vector<SearchTrace> all_traces;
};

inline MultistartResult multistart(const ObjectiveFn& objective,
                                   const std::function<Design(RandomStream&)>& design_sampler,
                                   const ExchangeConfig& config) {
  if (config.restarts < 1) throw domain_error("multistart: need restarts >= 1");
  const RandomStream base(config.root_seed);
  MultistartResult result;
  double best = inf;
  int feasible = 0;
  for (int r = 0; r < config.restarts; ++r) {
    RandomStream init_stream = base.substream(0x100000 + static_cast<std::uint64_t>(r));
    Design initial = design_sampler(init_stream);
    ExchangeConfig local = config;
    local.root_seed = detail::mix64(config.root_seed ^ detail::mix64(r + 1));
    try {
      auto [design, trace] = coordinate_exchange(objective, initial, local);
      ++feasible;
      result.all_traces.push_back(trace);
      if (trace.final_value < best) {
        best = trace.final_value;
        result.best_design = design;
        result.best_trace = trace;
        result.best_index = r;
      }
    } catch (const infeasible_start&) {
      result.all_traces.push_back(SearchTrace{});
    }
  }
  if (feasible == 0)
    throw infeasible_start("multistart: objective infinite at every sampled initial design");
  return result;
}

/// Uniform-on-grid initial design sampler over the given bounds.
inline std::function<Design(RandomStream&)> grid_design_sampler(Eigen::Index n, Eigen::Index k,
                                                                double lo, double hi,
                                                                int grid_points) {
  return [n, k, lo, hi, grid_points](RandomStream& stream) {
    const std::vector<double> grid = candidate_grid(lo, hi, grid_points);
    Matrix pts(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        pts(i, j) = grid[stream.next_u64() % grid.size()];
    return Design::box(std::move(pts), lo, hi);
  };
}

}  // namespace altdesign

#endif
