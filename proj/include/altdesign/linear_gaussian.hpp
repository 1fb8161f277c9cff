#ifndef ALTDESIGN_LINEAR_GAUSSIAN_HPP
#define ALTDESIGN_LINEAR_GAUSSIAN_HPP

#include <functional>
#include <vector>

#include "altdesign/core.hpp"
#include "altdesign/design.hpp"

namespace altdesign {

/// Normal-inverse-gamma prior: gamma | sigma^2 ~ N(mu, sigma^2 V),
/// sigma^2 ~ IG(a/2, b/2). `noninformative` stands for V^{-1} = 0.
struct NigPrior {
  Vector mu;
  Matrix V;
  double a = 0.0;
  double b = 0.0;
  bool noninformative = false;

  static NigPrior flat(Eigen::Index p) {
    NigPrior prior;
    prior.mu = Vector::Zero(p);
    prior.V = Matrix::Zero(p, p);
    prior.noninformative = true;
    return prior;
  }
};

struct NigPosterior {
  Vector mu_hat;
  Matrix V_hat;
  double a_hat = 0.0;
  double b_hat = 0.0;
};

inline NigPosterior nig_posterior(const Matrix& X, const Vector& y, const NigPrior& prior) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw dimension_mismatch("nig_posterior: y/X size mismatch");
  NigPosterior post;
  post.a_hat = prior.a + static_cast<double>(n);
  if (prior.noninformative) {
    const SpdFactor xtx = cholesky_logdet(X.transpose() * X);
    post.V_hat = xtx.solve(Matrix::Identity(p, p));
    post.mu_hat = xtx.solve(X.transpose() * y);
    // b + y^T (I - H_X) y
    post.b_hat = prior.b + y.squaredNorm() - y.dot(X * post.mu_hat);
  } else {
    const SpdFactor vf = cholesky_logdet(prior.V);
    const Matrix v_inv = vf.solve(Matrix::Identity(p, p));
    const SpdFactor precision = cholesky_logdet(X.transpose() * X + v_inv);
    post.V_hat = precision.solve(Matrix::Identity(p, p));
    post.mu_hat = precision.solve(X.transpose() * y + v_inv * prior.mu);
    const SpdFactor sigma_f = cholesky_logdet(
        Matrix::Identity(n, n) + X * prior.V * X.transpose());
    post.b_hat = prior.b + sigma_f.quad_inverse(y - X * prior.mu);
  }
  return post;
}

struct LinearFittedModel {
  std::function<Matrix(const Design&)> model_matrix;
  NigPrior prior;
};

/// Designer model known only through response moments m_D and Sigma_D.
struct MomentDesigner {
  std::function<Vector(const Design&)> mean;
  std::function<Matrix(const Design&)> cov;
};

struct TreatmentStructure {
  Matrix Z;                // n x q indicator matrix
  int q = 0;               // unique treatments
  int d = 0;               // pure error degrees of freedom, n - q
  std::vector<int> replication;  // r_1..r_q
  std::vector<int> label;        // treatment index per run
};

inline TreatmentStructure treatment_structure(const Design& design, double tol = 1e-9) {
  const Eigen::Index n = design.n();
  TreatmentStructure ts;
  ts.label.resize(n);
  std::vector<Eigen::Index> representative;
  for (Eigen::Index i = 0; i < n; ++i) {
    int found = -1;
    for (std::size_t l = 0; l < representative.size(); ++l) {
      if ((design.points.row(i) - design.points.row(representative[l])).cwiseAbs().maxCoeff() <=
          tol) {
        found = static_cast<int>(l);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(representative.size());
      representative.push_back(i);
      ts.replication.push_back(0);
    }
    ts.label[i] = found;
    ++ts.replication[found];
  }
  ts.q = static_cast<int>(representative.size());
  ts.d = static_cast<int>(n) - ts.q;
  ts.Z = Matrix::Zero(n, ts.q);
  for (Eigen::Index i = 0; i < n; ++i) ts.Z(i, ts.label[i]) = 1.0;
  return ts;
}

/// Full-treatment designer model with tau_j ~ N(0, kappa sigma^2 / n_j),
/// i.e. V_D = kappa (Z^T Z)^{-1}, and sigma^2 ~ IG(a/2, b/2).
struct FullTreatmentDesigner {
  double kappa;
  double a = 6.0;
  double b = 4.0;
  double duplicate_tolerance = 1e-9;

  MomentDesigner moments() const {
    if (a <= 2.0) throw degrees_of_freedom_error("FullTreatmentDesigner: need a > 2");
    const double kappa_ = kappa;
    const double scale = b / (a - 2.0);
    const double tol = duplicate_tolerance;
    return MomentDesigner{
        [](const Design& design) -> Vector { return Vector::Zero(design.n()); },
        // explicit return type: Eigen expressions must not escape the lambda
        [kappa_, scale, tol](const Design& design) -> Matrix {
          const TreatmentStructure ts = treatment_structure(design, tol);
          Matrix hz = Matrix::Zero(design.n(), design.n());
          for (Eigen::Index i = 0; i < design.n(); ++i)
            for (Eigen::Index j = 0; j < design.n(); ++j)
              if (ts.label[i] == ts.label[j]) hz(i, j) = 1.0 / ts.replication[ts.label[i]];
          return scale * (Matrix::Identity(design.n(), design.n()) + kappa_ * hz);
        }};
  }
};

enum class ClosedLoss { SI, SE };

/// E_D(b_hat_F) = b_F + ||m_D - X mu_F||^2_{Sigma_F^{-1}} + tr(Sigma_D Sigma_F^{-1}).
inline double expected_bhat(const Matrix& X, const NigPrior& prior, const Vector& m_d,
                            const Matrix& sigma_d) {
  const Eigen::Index n = X.rows();
  if (prior.noninformative) {
    // Sigma_F^{-1} = I - H_X
    const SpdFactor xtx = cholesky_logdet(X.transpose() * X);
    const Matrix proj = X * xtx.solve(X.transpose());
    const Vector centred = m_d - X * prior.mu;
    const double quad = centred.squaredNorm() - centred.dot(proj * centred);
    const double tr = sigma_d.trace() - (proj * sigma_d).trace();
    return prior.b + quad + tr;
  }
  const SpdFactor sigma_f =
      cholesky_logdet(Matrix::Identity(n, n) + X * prior.V * X.transpose());
  const Vector centred = m_d - X * prior.mu;
  return prior.b + sigma_f.quad_inverse(centred) + sigma_f.solve(sigma_d).trace();
}

/// Closed-form external expected loss of the conjugate linear model:
/// SE exactly, SI up to an additive constant and a delta approximation of
/// E(log b_hat) by log E(b_hat).
inline double external_loss_closed(ClosedLoss kind, const Design& design,
                                   const LinearFittedModel& fitted, const MomentDesigner& designer) {
  const Matrix X = fitted.model_matrix(design);
  const Eigen::Index p = X.cols();
  Matrix precision = X.transpose() * X;
  if (!fitted.prior.noninformative)
    precision += cholesky_logdet(fitted.prior.V).solve(Matrix::Identity(p, p));
  const SpdFactor prec_f = cholesky_logdet(precision);
  const double eb = expected_bhat(X, fitted.prior, designer.mean(design), designer.cov(design));
  if (kind == ClosedLoss::SE) {
    const double a_hat = fitted.prior.a + static_cast<double>(X.rows());
    if (a_hat <= 2.0) throw degrees_of_freedom_error("external_loss_closed: a_hat <= 2");
    return eb / (a_hat - 2.0) * trace_inverse(prec_f);
  }
  // log|V_hat| = -log|precision|
  return -0.5 * prec_f.log_det + 0.5 * static_cast<double>(p) * std::log(eb);
}

inline double internal_loss_closed(ClosedLoss kind, const Design& design,
                                   const LinearFittedModel& fitted) {
  const Matrix X = fitted.model_matrix(design);
  const Eigen::Index p = X.cols();
  Matrix precision = X.transpose() * X;
  if (!fitted.prior.noninformative)
    precision += cholesky_logdet(fitted.prior.V).solve(Matrix::Identity(p, p));
  const SpdFactor prec_f = cholesky_logdet(precision);
  if (kind == ClosedLoss::SE) {
    if (fitted.prior.a <= 2.0) throw degrees_of_freedom_error("internal_loss_closed: a_F <= 2");
    return fitted.prior.b / (fitted.prior.a - 2.0) * trace_inverse(prec_f);
  }
  return -0.5 * prec_f.log_det;
}

enum class DesignObjective { DE, AE, D, A, DP, AP };

/// The replication-aware objectives of the full-treatment comparison, plus
/// the classical D/A counterparts. Inadmissible designs map to +inf.
inline double linear_objective(DesignObjective kind, const Design& design,
                               const std::function<Matrix(const Design&)>& builder, double kappa,
                               double alpha = 0.05, double duplicate_tol = 1e-9) {
  const Matrix X = builder(design);
  const double n = static_cast<double>(X.rows());
  const double p = static_cast<double>(X.cols());
  // rank-deficient model matrices are inadmissible; the jitter retry inside
  // cholesky_logdet would otherwise turn them into finite objective values
  if (Eigen::ColPivHouseholderQR<Matrix>(X).rank() < X.cols()) return inf;
  SpdFactor xtx;
  try {
    xtx = cholesky_logdet(X.transpose() * X);
  } catch (const not_positive_definite&) {
    return inf;
  }
  if (kind == DesignObjective::D) return -xtx.log_det;
  if (kind == DesignObjective::A) return trace_inverse(xtx);
  const TreatmentStructure ts = treatment_structure(design, duplicate_tol);
  const double d = static_cast<double>(ts.d);
  switch (kind) {
    case DesignObjective::DE: {
      const double bracket = (1.0 + kappa) * (n - p) - kappa * d;
      if (bracket <= 0.0) return inf;
      return p * std::log(bracket) - xtx.log_det;
    }
    case DesignObjective::AE: {
      const double bracket = (1.0 + kappa) * (n - p) - kappa * d;
      if (bracket <= 0.0) return inf;
      return bracket * trace_inverse(xtx);
    }
    case DesignObjective::DP: {
      if (ts.d < 1) return inf;
      return p * std::log(f_quantile(static_cast<int>(p), ts.d, 1.0 - alpha)) - xtx.log_det;
    }
    case DesignObjective::AP: {
      if (ts.d < 1) return inf;
      return f_quantile(1, ts.d, 1.0 - alpha) * trace_inverse(xtx);
    }
    default:
      return inf;
  }
}

/// E_{y|D}(b_hat_F) under noninformative fitted prior and the full-treatment
/// designer: b_D/(a_D-2) [(1+kappa)(n-p) - kappa d].
inline double expected_bhat_fulltreatment(const Design& design, double kappa, double b_d,
                                          double a_d, int p, double duplicate_tol = 1e-9) {
  if (a_d <= 2.0) throw degrees_of_freedom_error("expected_bhat_fulltreatment: a_D <= 2");
  const TreatmentStructure ts = treatment_structure(design, duplicate_tol);
  const double n = static_cast<double>(design.n());
  return b_d / (a_d - 2.0) * ((1.0 + kappa) * (n - p) - kappa * ts.d);
}

/// Second-order response-surface model on [-1,1]^k: intercept, linear,
/// quadratic and pairwise-interaction columns.
inline Matrix second_order_model_matrix(const Design& design) {
  const Eigen::Index n = design.n();
  const Eigen::Index k = design.k();
  const Eigen::Index p = 1 + 2 * k + k * (k - 1) / 2;
  Matrix X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index c = 0;
    X(i, c++) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) X(i, c++) = design.points(i, j);
    for (Eigen::Index j = 0; j < k; ++j) X(i, c++) = design.points(i, j) * design.points(i, j);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index l = j + 1; l < k; ++l)
        X(i, c++) = design.points(i, j) * design.points(i, l);
  }
  return X;
}

}  // namespace altdesign

#endif
