#ifndef ALTDESIGN_DESIGN_HPP
#define ALTDESIGN_DESIGN_HPP

#include <algorithm>
#include <functional>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "altdesign/core.hpp"
#include "altdesign/rng.hpp"

namespace altdesign {

/// The optimisation variable: n runs of k controllable variables, with
/// per-column bounds.
struct Design {
  Matrix points;  // n x k
  Vector lo;      // k
  Vector hi;      // k

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index k() const { return points.cols(); }

  static Design box(Matrix pts, double lo_all, double hi_all) {
    Design d;
    d.lo = Vector::Constant(pts.cols(), lo_all);
    d.hi = Vector::Constant(pts.cols(), hi_all);
    d.points = std::move(pts);
    d.validate();
    return d;
  }

  void validate() const {
    if (points.rows() < 1 || points.cols() < 1)
      throw domain_error("Design: need n >= 1 and k >= 1");
    if (lo.size() != points.cols() || hi.size() != points.cols())
      throw dimension_mismatch("Design: bounds size mismatch");
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      for (Eigen::Index i = 0; i < points.rows(); ++i)
        if (points(i, j) < lo[j] - 1e-12 || points(i, j) > hi[j] + 1e-12)
          throw domain_error("Design: entry outside column bounds");
  }
};

enum class LossKind { SelfInformation, SquaredError, Entropy, TraceVariance, PredictiveSquaredError };
enum class LossRole { Generator, Composite };

struct LossSpec {
  LossKind kind;

  LossRole role() const {
    switch (kind) {
      case LossKind::SelfInformation:
      case LossKind::SquaredError:
        return LossRole::Generator;
      default:
        return LossRole::Composite;
    }
  }
};

enum class Compatibility { Disjoint, Compatible, Partial };

struct ParamDraw {
  Vector interest;  // beta / theta
  Vector nuisance;  // e.g. sigma^2 and kernel hyperparameters
};

/// Batched evaluator bound to a fixed design and inner prior-draw set:
/// maps a response vector to the log-likelihood at every inner draw.
using BatchLogLik = std::function<Vector(const Vector& y)>;

/// Probability-model description used by the nested Monte Carlo machinery.
struct ProbModel {
  std::function<ParamDraw(RandomStream&)> sample_prior;
  std::function<Vector(const ParamDraw&, const Design&, RandomStream&)> sample_response;
  std::function<BatchLogLik(const Design&, const std::vector<ParamDraw>&)> make_batch_loglik;
  // Density-based losses need a closed-form fitted posterior.
  std::function<double(const Vector& y, const Vector& theta, const Design&)> si_loss;
  std::function<double(const Vector& y, const Design&)> entropy_loss;
};

/// Build a batch evaluator from a per-draw log-density.
inline std::function<BatchLogLik(const Design&, const std::vector<ParamDraw>&)>
batch_from_pointwise(std::function<double(const Vector&, const ParamDraw&, const Design&)> loglik) {
  return [loglik = std::move(loglik)](const Design& design, const std::vector<ParamDraw>& draws) {
    return [&draws, &design, loglik](const Vector& y) {
      Vector out(static_cast<Eigen::Index>(draws.size()));
      for (std::size_t j = 0; j < draws.size(); ++j)
        out[static_cast<Eigen::Index>(j)] = loglik(y, draws[j], design);
      return out;
    };
  };
}

struct ModelPair {
  ProbModel fitted;
  ProbModel designer;
  Compatibility compatibility = Compatibility::Compatible;
};

struct ExpectedLossEstimate {
  double value = 0.0;
  double mc_standard_error = 0.0;
  int outer_samples = 0;
  int inner_samples = 0;
  std::uint64_t root_seed = 0;
  bool degenerate_se = false;  // B = 1, standard error not estimable
  double min_ess = 0.0;        // smallest inner effective sample size seen
};

struct SnisMoments {
  Vector mean;
  Matrix second_moment;
  double ess = 0.0;
};

/// Self-normalised importance sampling moments of the fitted posterior,
/// computed in log space with max-subtraction.
inline SnisMoments snis_posterior_moments(const std::vector<ParamDraw>& draws,
                                          const Vector& log_lik) {
  if (draws.size() < 2) throw domain_error("snis_posterior_moments: need at least 2 draws");
  if (static_cast<std::size_t>(log_lik.size()) != draws.size())
    throw dimension_mismatch("snis_posterior_moments: draw/log-lik size mismatch");
  const double lmax = log_lik.maxCoeff();
  if (!std::isfinite(lmax)) throw all_weights_degenerate(0.0);
  const Eigen::Index p = draws.front().interest.size();
  Vector mean = Vector::Zero(p);
  Matrix second = Matrix::Zero(p, p);
  double wsum = 0.0, wsq = 0.0;
  for (std::size_t j = 0; j < draws.size(); ++j) {
    const double w = std::exp(log_lik[static_cast<Eigen::Index>(j)] - lmax);
    if (w == 0.0) continue;
    wsum += w;
    wsq += w * w;
    mean += w * draws[j].interest;
    second += w * (draws[j].interest * draws[j].interest.transpose());
  }
  SnisMoments m;
  m.mean = mean / wsum;
  m.second_moment = second / wsum;
  m.ess = wsum * wsum / wsq;
  return m;
}

namespace detail {

inline double loss_from_moments(const LossSpec& loss, const SnisMoments& m, const Vector& theta) {
  switch (loss.kind) {
    case LossKind::SquaredError:
      return (theta - m.mean).squaredNorm();
    case LossKind::TraceVariance:
      return (m.second_moment - m.mean * m.mean.transpose()).trace();
    default:
      throw unsupported_loss("loss_from_moments: density-based loss has no SNIS form");
  }
}

struct McLossConfig {
  int B;
  int B_tilde;
  int threads = 1;
};

// Shared core of the internal/external estimators: `outer` supplies
// (theta_b, y_b); the inner SNIS stage always uses the fitted prior.
inline ExpectedLossEstimate nested_mc_loss(const ModelPair& pair, const LossSpec& loss,
                                           const Design& design, const ProbModel& outer,
                                           const McLossConfig& cfg, const RandomStream& stream) {
  if (cfg.B < 1 || cfg.B_tilde < 2) throw domain_error("nested_mc_loss: need B >= 1, B_tilde >= 2");
  const bool density_loss =
      loss.kind == LossKind::SelfInformation || loss.kind == LossKind::Entropy;
  if (density_loss) {
    const bool have_hook = loss.kind == LossKind::SelfInformation
                               ? static_cast<bool>(pair.fitted.si_loss)
                               : static_cast<bool>(pair.fitted.entropy_loss);
    if (!have_hook)
      throw unsupported_loss("nested_mc_loss: density-based loss needs a closed-form posterior");
  }

  // One inner prior-draw set, reused across all outer samples.
  std::vector<ParamDraw> inner;
  BatchLogLik batch;
  if (!density_loss) {
    RandomStream inner_stream = stream.substream(~std::uint64_t{0});
    inner.reserve(cfg.B_tilde);
    for (int j = 0; j < cfg.B_tilde; ++j) inner.push_back(pair.fitted.sample_prior(inner_stream));
    batch = pair.fitted.make_batch_loglik(design, inner);
  }

  std::vector<double> losses(cfg.B);
  std::vector<double> esses(cfg.B, static_cast<double>(cfg.B_tilde));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(cfg.B, cfg.threads, [&](std::int64_t b) {
    try {
      RandomStream sub = stream.substream(static_cast<std::uint64_t>(b));
      const ParamDraw theta = outer.sample_prior(sub);
      const Vector y = outer.sample_response(theta, design, sub);
      if (density_loss) {
        losses[b] = loss.kind == LossKind::SelfInformation
                        ? pair.fitted.si_loss(y, theta.interest, design)
                        : pair.fitted.entropy_loss(y, design);
      } else {
        const SnisMoments m = snis_posterior_moments(inner, batch(y));
        esses[b] = m.ess;
        losses[b] = loss_from_moments(loss, m, theta.interest);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  ExpectedLossEstimate est;
  est.outer_samples = cfg.B;
  est.inner_samples = density_loss ? 0 : cfg.B_tilde;
  est.root_seed = stream.root_seed();
  est.value = chunked_sum(losses) / cfg.B;
  est.min_ess = *std::min_element(esses.begin(), esses.end());
  if (cfg.B == 1) {
    est.degenerate_se = true;
  } else {
    double ss = 0.0;
    for (double l : losses) ss += (l - est.value) * (l - est.value);
    est.mc_standard_error = std::sqrt(ss / (cfg.B - 1)) / std::sqrt(static_cast<double>(cfg.B));
  }
  return est;
}

}  // namespace detail

/// L_FF: outer samples from the fitted model's own joint distribution.
inline ExpectedLossEstimate mc_internal_loss(const ModelPair& pair, const LossSpec& loss,
                                             const Design& design, int B, int B_tilde,
                                             const RandomStream& stream, int threads = 1) {
  return detail::nested_mc_loss(pair, loss, design, pair.fitted, {B, B_tilde, threads}, stream);
}

/// L_DF: outer samples from the designer joint, inner SNIS under the fitted
/// prior.
inline ExpectedLossEstimate mc_external_loss(const ModelPair& pair, const LossSpec& loss,
                                             const Design& design, int B, int B_tilde,
                                             const RandomStream& stream, int threads = 1) {
  if (loss.kind == LossKind::SquaredError && pair.compatibility == Compatibility::Disjoint)
    throw incompatible_loss("mc_external_loss: squared error needs common interest parameters");
  return detail::nested_mc_loss(pair, loss, design, pair.designer, {B, B_tilde, threads}, stream);
}

enum class EffScale { LogP, Ratio };

/// Percentage efficiency of `candidate` relative to `reference` (the optimum).
inline double efficiency(double reference_loss, double candidate_loss, EffScale scale, int p = 1) {
  if (scale == EffScale::Ratio) {
    if (candidate_loss <= 0.0) throw domain_error("efficiency: nonpositive ratio denominator");
    return 100.0 * reference_loss / candidate_loss;
  }
  if (p < 1) throw domain_error("efficiency: need p >= 1 for log scale");
  return 100.0 * std::exp((reference_loss - candidate_loss) / p);
}

}  // namespace altdesign

#endif
