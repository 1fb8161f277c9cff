#ifndef ALTDESIGN_MICHAELIS_MENTEN_HPP
#define ALTDESIGN_MICHAELIS_MENTEN_HPP

#include <functional>
#include <vector>

#include "altdesign/core.hpp"
#include "altdesign/design.hpp"
#include "altdesign/rng.hpp"

namespace altdesign {

struct MmParams {
  double theta1;
  double theta2;
  double L = 400.0;
};

/// Reaction velocity theta1 x L / (x L + theta2) at scaled concentration x.
inline double mm_eta(const MmParams& params, double x) {
  if (x < 0.0 || x > 1.0) throw domain_error("mm_eta: x outside [0,1]");
  const double xl = x * params.L;
  return params.theta1 * xl / (xl + params.theta2);
}

inline Eigen::Vector2d mm_eta_grad(const MmParams& params, double x) {
  if (x < 0.0 || x > 1.0) throw domain_error("mm_eta_grad: x outside [0,1]");
  const double xl = x * params.L;
  const double denom = xl + params.theta2;
  return {xl / denom, -params.theta1 * xl / (denom * denom)};
}

inline Vector mm_eta_vector(const MmParams& params, const Design& design) {
  Vector eta(design.n());
  for (Eigen::Index i = 0; i < design.n(); ++i) eta[i] = mm_eta(params, design.points(i, 0));
  return eta;
}

/// sigma^2 (I + rho C) with the Matern(5/2) correlation C.
inline Matrix designer_covariance(double sigma_sq, double rho, double alpha,
                                  const Design& design) {
  if (sigma_sq <= 0.0) throw domain_error("designer_covariance: sigma^2 must be positive");
  if (rho < 0.0) throw domain_error("designer_covariance: rho must be nonnegative");
  const Eigen::Index n = design.n();
  Matrix cov = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c =
          matern52(std::abs(design.points(i, 0) - design.points(j, 0)), alpha);
      cov(i, j) = sigma_sq * ((i == j ? 1.0 : 0.0) + rho * c);
    }
  return cov;
}

inline double gaussian_loglik_iid(const Vector& y, const Vector& mean, double sigma_sq) {
  const double n = static_cast<double>(y.size());
  return -0.5 * n * std::log(2.0 * M_PI * sigma_sq) -
         0.5 * (y - mean).squaredNorm() / sigma_sq;
}

inline double gaussian_loglik(const Vector& y, const Vector& mean, const SpdFactor& cov) {
  const double n = static_cast<double>(y.size());
  return -0.5 * n * std::log(2.0 * M_PI) - 0.5 * cov.log_det - 0.5 * cov.quad_inverse(y - mean);
}

struct MmPriors {
  double theta_lo = 20.0;
  double theta_hi = 200.0;
  double sigma_rate = 1.0;  // sigma^2 ~ Exp(1)
  double rho_rate = 1.0;    // designer only
  double alpha_rate = 5.0;  // designer only
  double L = 400.0;
};

/// Fitted model (14): y ~ N(eta(theta), sigma^2 I). Interest = theta,
/// nuisance = sigma^2. The batch log-likelihood caches the eta matrix of all
/// inner draws for the fixed design.
inline ProbModel mm_fitted_model(const MmPriors& priors = {}) {
  ProbModel model;
  model.sample_prior = [priors](RandomStream& stream) {
    ParamDraw draw;
    draw.interest = Vector(2);
    draw.interest[0] = stream.uniform(priors.theta_lo, priors.theta_hi);
    draw.interest[1] = stream.uniform(priors.theta_lo, priors.theta_hi);
    draw.nuisance = Vector(1);
    draw.nuisance[0] = stream.exponential(priors.sigma_rate);
    return draw;
  };
  model.sample_response = [priors](const ParamDraw& draw, const Design& design,
                                   RandomStream& stream) {
    const MmParams params{draw.interest[0], draw.interest[1], priors.L};
    Vector y = mm_eta_vector(params, design);
    const double sd = std::sqrt(draw.nuisance[0]);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * stream.normal();
    return y;
  };
  model.make_batch_loglik = [priors](const Design& design, const std::vector<ParamDraw>& draws) {
    const Eigen::Index m = static_cast<Eigen::Index>(draws.size());
    const Eigen::Index n = design.n();
    Matrix eta(m, n);
    Vector inv_two_sigma(m), log_norm(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& d = draws[static_cast<std::size_t>(j)];
      const MmParams params{d.interest[0], d.interest[1], priors.L};
      eta.row(j) = mm_eta_vector(params, design).transpose();
      inv_two_sigma[j] = 0.5 / d.nuisance[0];
      log_norm[j] = -0.5 * n * std::log(2.0 * M_PI * d.nuisance[0]);
    }
    return [eta = std::move(eta), inv_two_sigma = std::move(inv_two_sigma),
            log_norm = std::move(log_norm)](const Vector& y) {
      const Vector sq = (eta.rowwise() - y.transpose()).rowwise().squaredNorm();
      return Vector(log_norm - inv_two_sigma.cwiseProduct(sq));
    };
  };
  return model;
}

/// Designer model (17): y ~ N(eta(theta), sigma^2 (I + rho C)).
/// `force_zero_rho` collapses the discrepancy so designer = fitted.
inline ProbModel mm_designer_model(const MmPriors& priors = {}, bool force_zero_rho = false) {
  ProbModel model;
  model.sample_prior = [priors, force_zero_rho](RandomStream& stream) {
    ParamDraw draw;
    draw.interest = Vector(2);
    draw.interest[0] = stream.uniform(priors.theta_lo, priors.theta_hi);
    draw.interest[1] = stream.uniform(priors.theta_lo, priors.theta_hi);
    draw.nuisance = Vector(3);  // sigma^2, rho, alpha
    draw.nuisance[0] = stream.exponential(priors.sigma_rate);
    draw.nuisance[1] = force_zero_rho ? 0.0 : stream.exponential(priors.rho_rate);
    draw.nuisance[2] = stream.exponential(priors.alpha_rate);
    return draw;
  };
  model.sample_response = [priors](const ParamDraw& draw, const Design& design,
                                   RandomStream& stream) {
    const MmParams params{draw.interest[0], draw.interest[1], priors.L};
    const Vector eta = mm_eta_vector(params, design);
    if (draw.nuisance[1] == 0.0) {
      Vector y = eta;
      const double sd = std::sqrt(draw.nuisance[0]);
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * stream.normal();
      return y;
    }
    const SpdFactor cov = cholesky_logdet(
        designer_covariance(draw.nuisance[0], draw.nuisance[1], draw.nuisance[2], design));
    return Vector(stream.multivariate_normal(eta, cov));
  };
  model.make_batch_loglik = batch_from_pointwise(
      [priors](const Vector& y, const ParamDraw& draw, const Design& design) {
        const MmParams params{draw.interest[0], draw.interest[1], priors.L};
        const Vector eta = mm_eta_vector(params, design);
        if (draw.nuisance[1] == 0.0) return gaussian_loglik_iid(y, eta, draw.nuisance[0]);
        const SpdFactor cov = cholesky_logdet(
            designer_covariance(draw.nuisance[0], draw.nuisance[1], draw.nuisance[2], design));
        return gaussian_loglik(y, eta, cov);
      });
  return model;
}

inline ModelPair mm_model_pair(const MmPriors& priors = {}, bool force_zero_rho = false) {
  return ModelPair{mm_fitted_model(priors), mm_designer_model(priors, force_zero_rho),
                   Compatibility::Compatible};
}

enum class MmObjective { ExternalSE, ExternalTV, InternalSE };

inline ExpectedLossEstimate mm_objectives(MmObjective kind, const Design& design, int B,
                                          int B_tilde, const RandomStream& stream,
                                          const MmPriors& priors = {}, int threads = 1) {
  const ModelPair pair = mm_model_pair(priors);
  switch (kind) {
    case MmObjective::ExternalSE:
      return mc_external_loss(pair, {LossKind::SquaredError}, design, B, B_tilde, stream, threads);
    case MmObjective::ExternalTV:
      return mc_external_loss(pair, {LossKind::TraceVariance}, design, B, B_tilde, stream, threads);
    case MmObjective::InternalSE:
      return mc_internal_loss(pair, {LossKind::SquaredError}, design, B, B_tilde, stream, threads);
  }
  throw domain_error("mm_objectives: unknown kind");
}

enum class MmAsymptotic { External, Internal };

/// E_theta[ scale * tr( (sum_i grad grad^T)^{-1} ) ]. The scale is
/// sigma_0^2 (1 + rho_0) for the external form and E(sigma^2 | F) for the
/// internal one; under the exponential priors these are analytic.
inline double mm_asymptotic(MmAsymptotic kind, const Design& design, int B,
                            const RandomStream& stream, const MmPriors& priors = {}) {
  const double sigma0 = 1.0 / priors.sigma_rate;
  const double rho0 = 1.0 / priors.rho_rate;
  const double scale = kind == MmAsymptotic::External ? sigma0 * (1.0 + rho0) : sigma0;
  double acc = 0.0;
  for (int b = 0; b < B; ++b) {
    RandomStream sub = stream.substream(static_cast<std::uint64_t>(b));
    const MmParams params{sub.uniform(priors.theta_lo, priors.theta_hi),
                          sub.uniform(priors.theta_lo, priors.theta_hi), priors.L};
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    for (Eigen::Index i = 0; i < design.n(); ++i) {
      const Eigen::Vector2d g = mm_eta_grad(params, design.points(i, 0));
      info += g * g.transpose();
    }
    try {
      acc += scale * trace_inverse(Matrix(info));
    } catch (const not_positive_definite&) {
      return inf;  // singular gradient outer-product sum
    }
  }
  return acc / B;
}

/// Closed-form d(t) of the MM-vs-GP pair: the expectation over the designer
/// responses is analytic, so the KL projection needs no Monte Carlo.
/// t = (t_theta1, t_theta2, t_sigma^2) in natural coordinates.
inline std::function<double(const Vector&)> mm_expected_loglik(const Design& design,
                                                               const MmParams& theta,
                                                               const MmPriors& priors = {}) {
  const double sigma0 = 1.0 / priors.sigma_rate;
  const double rho0 = 1.0 / priors.rho_rate;
  const Vector eta_true = mm_eta_vector(theta, design);
  const double n = static_cast<double>(design.n());
  const double L = priors.L;
  return [design, eta_true, n, sigma0, rho0, L](const Vector& t) {
    if (t.size() != 3) throw dimension_mismatch("mm_expected_loglik: need (t1, t2, t_sigma^2)");
    const double ts = t[2];
    if (ts <= 0.0 || t[0] <= 0.0 || t[1] <= 0.0) return -inf;
    const Vector eta_t = mm_eta_vector(MmParams{t[0], t[1], L}, design);
    return -0.5 * n * std::log(2.0 * M_PI * ts) -
           0.5 * (eta_true - eta_t).squaredNorm() / ts - 0.5 * n * sigma0 * (1.0 + rho0) / ts;
  };
}

}  // namespace altdesign

#endif
