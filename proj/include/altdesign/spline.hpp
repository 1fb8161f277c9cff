#ifndef ALTDESIGN_SPLINE_HPP
#define ALTDESIGN_SPLINE_HPP

#include <functional>
#include <vector>

#include "altdesign/core.hpp"
#include "altdesign/design.hpp"
#include "altdesign/michaelis_menten.hpp"
#include "altdesign/rng.hpp"

namespace altdesign {

/// Clamped cubic B-spline basis on [0,1] with m - 4 equally spaced interior
/// knots; rows form a partition of unity.
inline Vector spline_basis_row(double x, int m) {
  if (x < 0.0 || x > 1.0) throw domain_error("spline_basis_row: x outside [0,1]");
  if (m < 4) throw domain_error("spline_basis_row: need m >= 4");
  constexpr int order = 4;  // cubic
  std::vector<double> knots(m + order);
  for (int i = 0; i < order; ++i) knots[i] = 0.0;
  for (int i = 0; i < m - order; ++i) knots[order + i] = (i + 1.0) / (m - order + 1.0);
  for (int i = 0; i < order; ++i) knots[m + i] = 1.0;

  // Cox-de Boor with the 0/0 = 0 convention; x = 1 folded into the last span
  std::vector<double> n_prev(m + order - 1, 0.0);
  for (int i = 0; i < m + order - 1; ++i) {
    const bool last_span = knots[i] < 1.0 && knots[i + 1] >= 1.0 && x >= 1.0;
    n_prev[i] = ((x >= knots[i] && x < knots[i + 1]) || last_span) ? 1.0 : 0.0;
  }
  for (int k = 2; k <= order; ++k) {
    std::vector<double> n_cur(m + order - k, 0.0);
    for (int i = 0; i < m + order - k; ++i) {
      double left = 0.0, right = 0.0;
      if (knots[i + k - 1] > knots[i])
        left = (x - knots[i]) / (knots[i + k - 1] - knots[i]) * n_prev[i];
      if (knots[i + k] > knots[i + 1])
        right = (knots[i + k] - x) / (knots[i + k] - knots[i + 1]) * n_prev[i + 1];
      n_cur[i] = left + right;
    }
    n_prev.swap(n_cur);
  }
  Vector row(m);
  for (int i = 0; i < m; ++i) row[i] = n_prev[i];
  return row;
}

inline Matrix basis_matrix(const Design& design, int m) {
  if (design.k() != 1) throw dimension_mismatch("basis_matrix: spline model needs k = 1");
  if (m > design.n()) throw domain_error("basis_matrix: need m <= n");
  Matrix g(design.n(), m);
  for (Eigen::Index i = 0; i < design.n(); ++i)
    g.row(i) = spline_basis_row(design.points(i, 0), m).transpose();
  return g;
}

struct SplinePrior {
  double kappa = 1e6;
  double a = 6.0;
  double b = 4.0;
  // model prior: uniform over m in {4, ..., n}
};

namespace detail {

struct SplineFit {
  std::vector<double> log_post;   // unnormalised log pi(m | y)
  std::vector<Vector> coef;       // posterior mean of gamma^{(m)}
  std::vector<double> prob;       // normalised probabilities
  int m_min = 4;
};

/// Marginal-likelihood pieces via the Woodbury forms
/// log|R_m| = log|I_m + kappa G^T G| and
/// y^T R_m^{-1} y = y^T y - kappa (G^T y)^T (I + kappa G^T G)^{-1} (G^T y).
inline SplineFit spline_fit(const Vector& y, const Design& design, const SplinePrior& prior) {
  const int n = static_cast<int>(design.n());
  if (n < 5) throw domain_error("spline_fit: need n >= 5");
  SplineFit fit;
  for (int m = 4; m <= n; ++m) {
    const Matrix g = basis_matrix(design, m);
    const Matrix gtg = g.transpose() * g;
    const Vector gty = g.transpose() * y;
    const SpdFactor a_fac =
        cholesky_logdet(Matrix::Identity(m, m) + prior.kappa * gtg);
    const double quad = y.squaredNorm() - prior.kappa * gty.dot(a_fac.solve(gty));
    fit.log_post.push_back(-0.5 * a_fac.log_det -
                           0.5 * (prior.a + n) * std::log(prior.b + quad));
    const SpdFactor ridge = cholesky_logdet(
        Matrix::Identity(m, m) / prior.kappa + gtg);
    fit.coef.push_back(ridge.solve(gty));
  }
  const double lmax = *std::max_element(fit.log_post.begin(), fit.log_post.end());
  double total = 0.0;
  for (double lp : fit.log_post) total += std::exp(lp - lmax);
  for (double lp : fit.log_post) fit.prob.push_back(std::exp(lp - lmax) / total);
  return fit;
}

}  // namespace detail

/// Posterior probabilities of the basis count m over {4, ..., n}.
inline std::vector<double> model_posterior(const Vector& y, const Design& design,
                                           const SplinePrior& prior) {
  return detail::spline_fit(y, design, prior).prob;
}

/// Model-averaged fitted posterior mean of mu(x). If `frozen_probs` is given
/// it replaces the recomputed posterior model probabilities.
inline double model_averaged_mean(double x, const Vector& y, const Design& design,
                                  const SplinePrior& prior,
                                  const std::vector<double>* frozen_probs = nullptr) {
  const detail::SplineFit fit = detail::spline_fit(y, design, prior);
  const std::vector<double>& probs = frozen_probs ? *frozen_probs : fit.prob;
  double mean = 0.0;
  for (std::size_t i = 0; i < fit.coef.size(); ++i) {
    const int m = 4 + static_cast<int>(i);
    mean += probs[i] * spline_basis_row(x, m).dot(fit.coef[i]);
  }
  return mean;
}

/// Integrated squared deviation between the truth and the model-averaged
/// posterior mean.
inline double predictive_se_loss(const Vector& y, const std::function<double(double)>& true_mu,
                                 const Design& design, const SplinePrior& prior,
                                 const QuadratureRule& rule) {
  const detail::SplineFit fit = detail::spline_fit(y, design, prior);
  return integrate_unit(
      [&](double x) {
        double mean = 0.0;
        for (std::size_t i = 0; i < fit.coef.size(); ++i) {
          const int m = 4 + static_cast<int>(i);
          mean += fit.prob[i] * spline_basis_row(x, m).dot(fit.coef[i]);
        }
        const double diff = true_mu(x) - mean;
        return diff * diff;
      },
      rule);
}

enum class PseFrame { Internal, External };

struct PseDesignerPriors {
  double theta_lo = 20.0;
  double theta_hi = 200.0;
  double a = 6.0;  // sigma^2 ~ IG(a/2, b/2)
  double b = 4.0;
  double L = 400.0;
};

/// Expected predictive squared-error loss; internally the truth is the
/// spline draw that generated y, externally it is the Michaelis-Menten curve.
inline ExpectedLossEstimate pse_expected_loss(PseFrame frame, const Design& design, int B,
                                              const RandomStream& stream,
                                              const SplinePrior& prior = {},
                                              const PseDesignerPriors& designer = {},
                                              const QuadratureRule& rule = gauss_legendre_unit(),
                                              int threads = 1) {
  const int n = static_cast<int>(design.n());
  if (n < 5) throw domain_error("pse_expected_loss: need n >= 5");
  if (B < 1) throw domain_error("pse_expected_loss: need B >= 1");
  std::vector<double> losses(B);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  parallel_for(B, threads, [&](std::int64_t b) {
    try {
      RandomStream sub = stream.substream(static_cast<std::uint64_t>(b));
      Vector y(n);
      std::function<double(double)> truth;
      if (frame == PseFrame::Internal) {
        const int m = 4 + static_cast<int>(sub.next_u64() % static_cast<std::uint64_t>(n - 3));
        const double sigma_sq = sub.inverse_gamma_halves(prior.a, prior.b);
        Vector gamma(m);
        for (int j = 0; j < m; ++j) gamma[j] = sub.normal(0.0, sigma_sq * prior.kappa);
        const Matrix g = basis_matrix(design, m);
        y = g * gamma;
        for (int i = 0; i < n; ++i) y[i] += std::sqrt(sigma_sq) * sub.normal();
        truth = [m, gamma](double x) { return spline_basis_row(x, m).dot(gamma); };
      } else {
        const MmParams xi{sub.uniform(designer.theta_lo, designer.theta_hi),
                          sub.uniform(designer.theta_lo, designer.theta_hi), designer.L};
        const double sigma_sq = sub.inverse_gamma_halves(designer.a, designer.b);
        y = mm_eta_vector(xi, design);
        for (int i = 0; i < n; ++i) y[i] += std::sqrt(sigma_sq) * sub.normal();
        truth = [xi](double x) { return mm_eta(xi, x); };
      }
      losses[b] = predictive_se_loss(y, truth, design, prior, rule);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  ExpectedLossEstimate est;
  est.outer_samples = B;
  est.root_seed = stream.root_seed();
  est.value = chunked_sum(losses) / B;
  if (B == 1) {
    est.degenerate_se = true;
  } else {
    double ss = 0.0;
    for (double l : losses) ss += (l - est.value) * (l - est.value);
    est.mc_standard_error = std::sqrt(ss / (B - 1)) / std::sqrt(static_cast<double>(B));
  }
  return est;
}

}  // namespace altdesign

#endif
