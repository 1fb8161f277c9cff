// Shared test fixtures: sampled probability-model wrappers around the linear
// conjugate setup so the closed forms can be cross-checked against the
// generic nested Monte Carlo machinery.
#ifndef ALTDESIGN_TESTS_HELPERS_HPP
#define ALTDESIGN_TESTS_HELPERS_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "altdesign/design.hpp"
#include "altdesign/linear_gaussian.hpp"
#include "altdesign/michaelis_menten.hpp"
#include "altdesign/rng.hpp"

namespace helpers {

using namespace altdesign;

/// Sampling version of the conjugate linear fitted model:
/// sigma^2 ~ IG(a/2, b/2), gamma | sigma^2 ~ N(mu, sigma^2 V), y ~ N(X gamma, sigma^2 I).
inline ProbModel linear_nig_model(std::function<Matrix(const Design&)> builder, NigPrior prior) {
  if (prior.noninformative)
    throw domain_error("linear_nig_model: sampling needs a proper prior");
  ProbModel model;
  auto shared_builder = std::make_shared<std::function<Matrix(const Design&)>>(std::move(builder));
  const auto v_chol = std::make_shared<SpdFactor>(cholesky_logdet(prior.V));
  model.sample_prior = [prior, v_chol](RandomStream& stream) {
    ParamDraw draw;
    const double sigma_sq = stream.inverse_gamma_halves(prior.a, prior.b);
    draw.nuisance = Vector::Constant(1, sigma_sq);
    draw.interest =
        prior.mu + std::sqrt(sigma_sq) * (v_chol->lower * stream.normal_vector(prior.mu.size()));
    return draw;
  };
  model.sample_response = [shared_builder](const ParamDraw& draw, const Design& design,
                                           RandomStream& stream) {
    const Matrix x = (*shared_builder)(design);
    Vector y = x * draw.interest;
    const double sd = std::sqrt(draw.nuisance[0]);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * stream.normal();
    return y;
  };
  model.make_batch_loglik = [shared_builder](const Design& design,
                                             const std::vector<ParamDraw>& draws) {
    const Matrix x = (*shared_builder)(design);
    const Eigen::Index m = static_cast<Eigen::Index>(draws.size());
    const Eigen::Index n = x.rows();
    Matrix mean(m, n);
    Vector inv_two_sigma(m), log_norm(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& d = draws[static_cast<std::size_t>(j)];
      mean.row(j) = (x * d.interest).transpose();
      inv_two_sigma[j] = 0.5 / d.nuisance[0];
      log_norm[j] = -0.5 * n * std::log(2.0 * M_PI * d.nuisance[0]);
    }
    return [mean = std::move(mean), inv_two_sigma = std::move(inv_two_sigma),
            log_norm = std::move(log_norm)](const Vector& y) {
      const Vector sq = (mean.rowwise() - y.transpose()).rowwise().squaredNorm();
      return Vector(log_norm - inv_two_sigma.cwiseProduct(sq));
    };
  };
  return model;
}

/// Sampling version of the full-treatment designer:
/// sigma^2 ~ IG(a/2, b/2), tau ~ N(0, kappa sigma^2 (Z^T Z)^{-1}), y = Z tau + eps.
inline ProbModel full_treatment_model(double kappa, double a, double b) {
  ProbModel model;
  model.sample_prior = [a, b](RandomStream& stream) {
    ParamDraw draw;
    draw.nuisance = Vector::Constant(1, stream.inverse_gamma_halves(a, b));
    draw.interest = Vector(0);  // treatment means are drawn per-design in sample_response
    return draw;
  };
  model.sample_response = [kappa](const ParamDraw& draw, const Design& design,
                                  RandomStream& stream) {
    const TreatmentStructure ts = treatment_structure(design);
    const double sigma_sq = draw.nuisance[0];
    Vector tau(ts.q);
    for (int j = 0; j < ts.q; ++j)
      tau[j] = stream.normal(0.0, kappa * sigma_sq / ts.replication[static_cast<std::size_t>(j)]);
    Vector y(design.n());
    for (Eigen::Index i = 0; i < design.n(); ++i)
      y[i] = tau[ts.label[static_cast<std::size_t>(i)]] + std::sqrt(sigma_sq) * stream.normal();
    return y;
  };
  model.make_batch_loglik = nullptr;  // designer never plays the inner SNIS role here
  return model;
}

/// Random n-run design on the {-1, 0, 1}^k factorial grid.
inline Design random_factorial_design(int n, int k, RandomStream& stream) {
  Matrix pts(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      pts(i, j) = static_cast<double>(static_cast<int>(stream.next_u64() % 3)) - 1.0;
  return Design::box(std::move(pts), -1.0, 1.0);
}

/// Retry until the second-order model matrix has full column rank.
inline Design random_full_rank_design(int n, int k, RandomStream& stream) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Design d = random_factorial_design(n, k, stream);
    const Matrix x = second_order_model_matrix(d);
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(1e-8);
    if (qr.rank() == x.cols()) return d;
  }
  throw std::runtime_error("random_full_rank_design: no full-rank design found");
}

}  // namespace helpers

#endif
