#ifndef ALTDESIGN_ASYMPTOTIC_HPP
#define ALTDESIGN_ASYMPTOTIC_HPP

#include <algorithm>
#include <functional>
#include <vector>

#include "altdesign/core.hpp"
#include "altdesign/design.hpp"
#include "altdesign/rng.hpp"

namespace altdesign {

struct KlProjection {
  Vector beta_tilde;
  double objective_value = -inf;
  bool converged = false;
  int iterations = 0;
};

/// Derivative-free maximiser of the expected fitted log-likelihood d(t):
/// Nelder-Mead with one shrink-restart. Positivity-constrained coordinates
/// should be passed through a log transform by the caller.
inline KlProjection kl_project(const std::function<double(const Vector&)>& d_evaluator,
                               const Vector& start, double tolerance = 1e-8,
                               int max_iter = 5000) {
  const double d0 = d_evaluator(start);
  if (!std::isfinite(d0)) throw non_finite_value("kl_project: objective not finite at start");
  const Eigen::Index p = start.size();

  KlProjection result;
  result.beta_tilde = start;
  result.objective_value = d0;

  auto run = [&](const Vector& centre, double step) -> bool {
    std::vector<Vector> simplex(p + 1);
    std::vector<double> val(p + 1);
    simplex[0] = centre;
    val[0] = d_evaluator(centre);
    for (Eigen::Index i = 0; i < p; ++i) {
      simplex[i + 1] = centre;
      simplex[i + 1][i] += (centre[i] != 0.0 ? step * std::abs(centre[i]) : step);
      val[i + 1] = d_evaluator(simplex[i + 1]);
    }
    bool converged = false;
    while (result.iterations < max_iter) {
      // order: best first (maximisation)
      std::vector<std::size_t> idx(simplex.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
      std::vector<Vector> s2(simplex.size());
      std::vector<double> v2(simplex.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        s2[i] = simplex[idx[i]];
        v2[i] = val[idx[i]];
      }
      simplex.swap(s2);
      val.swap(v2);

      double diameter = 0.0;
      for (std::size_t i = 1; i < simplex.size(); ++i)
        diameter = std::max(diameter, (simplex[i] - simplex[0]).norm());
      if (diameter < tolerance) {
        converged = true;
        break;
      }

      ++result.iterations;
      Vector centroid = Vector::Zero(p);
      for (Eigen::Index i = 0; i < p; ++i) centroid += simplex[i];
      centroid /= static_cast<double>(p);
      const Vector& worst = simplex[p];

      const Vector refl = centroid + (centroid - worst);
      const double f_refl = d_evaluator(refl);
      if (f_refl > val[0]) {
        const Vector expd = centroid + 2.0 * (centroid - worst);
        const double f_exp = d_evaluator(expd);
        if (f_exp > f_refl) {
          simplex[p] = expd;
          val[p] = f_exp;
        } else {
          simplex[p] = refl;
          val[p] = f_refl;
        }
      } else if (f_refl > val[p - 1]) {
        simplex[p] = refl;
        val[p] = f_refl;
      } else {
        const Vector contr = centroid + 0.5 * ((f_refl > val[p] ? refl : worst) - centroid);
        const double f_con = d_evaluator(contr);
        if (f_con > std::max(val[p], f_refl)) {
          simplex[p] = contr;
          val[p] = f_con;
        } else {
          for (std::size_t i = 1; i < simplex.size(); ++i) {
            simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
            val[i] = d_evaluator(simplex[i]);
          }
        }
      }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      if (val[i] > val[best]) best = i;
    if (val[best] > result.objective_value) {
      result.objective_value = val[best];
      result.beta_tilde = simplex[best];
    }
    return converged;
  };

  const bool first = run(start, 0.1);
  // one shrink-restart from the incumbent with a tighter initial simplex
  const bool second = run(result.beta_tilde, 0.01);
  result.converged = first && second;
  return result;
}

struct SandwichMatrices {
  Matrix I_tilde;
  Matrix J_tilde;
  Matrix K_tilde;  // I^{-1} J I^{-1}
  Matrix I_gg, I_gt, I_tt;
  Matrix K_tt;
  Matrix T_theta;  // (I_tt - I_tg I_gg^{-1} I_gt)^{-1}
  Matrix S_theta;  // I + I_tg I_gg^{-1} I_gg^{-1} I_gt
  int p_gamma = 0;
  int p_theta = 0;
};

/// Assemble all sandwich blocks from the two expectation matrices.
inline SandwichMatrices assemble_sandwich(const Matrix& I_tilde, const Matrix& J_tilde,
                                          int p_gamma) {
  const Eigen::Index p = I_tilde.rows();
  if (J_tilde.rows() != p || J_tilde.cols() != p || I_tilde.cols() != p)
    throw dimension_mismatch("assemble_sandwich: shape mismatch");
  if (p_gamma < 0 || p_gamma > p) throw dimension_mismatch("assemble_sandwich: bad p_gamma");
  SandwichMatrices m;
  m.p_gamma = p_gamma;
  m.p_theta = static_cast<int>(p) - p_gamma;
  m.I_tilde = 0.5 * (I_tilde + I_tilde.transpose());
  m.J_tilde = 0.5 * (J_tilde + J_tilde.transpose());
  const SpdFactor fi = cholesky_logdet(m.I_tilde);  // condition B3
  Matrix k = fi.solve(fi.solve(m.J_tilde).transpose());
  m.K_tilde = 0.5 * (k + k.transpose());
  m.I_gg = m.I_tilde.topLeftCorner(p_gamma, p_gamma);
  m.I_gt = m.I_tilde.topRightCorner(p_gamma, m.p_theta);
  m.I_tt = m.I_tilde.bottomRightCorner(m.p_theta, m.p_theta);
  m.K_tt = m.K_tilde.bottomRightCorner(m.p_theta, m.p_theta);
  if (p_gamma == 0) {
    m.T_theta = cholesky_logdet(m.I_tt).solve(Matrix::Identity(m.p_theta, m.p_theta));
    m.S_theta = Matrix::Identity(m.p_theta, m.p_theta);
  } else {
    const SpdFactor fgg = cholesky_logdet(m.I_gg);
    const Matrix gg_inv_gt = fgg.solve(m.I_gt);  // I_gg^{-1} I_gt
    const Matrix schur = m.I_tt - m.I_gt.transpose() * gg_inv_gt;
    m.T_theta = cholesky_logdet(schur).solve(Matrix::Identity(m.p_theta, m.p_theta));
    m.S_theta = Matrix::Identity(m.p_theta, m.p_theta) +
                gg_inv_gt.transpose() * gg_inv_gt;
  }
  return m;
}

inline SandwichMatrices sandwich(const std::function<Matrix(const Vector&)>& second_deriv,
                                 const std::function<Matrix(const Vector&)>& score_outer,
                                 const Vector& theta_tilde, int p_gamma) {
  return assemble_sandwich(second_deriv(theta_tilde), score_outer(theta_tilde), p_gamma);
}

enum class ApproxForm { GenSI, GenSE, CompEntropy, CompTV, InternalD, InternalA };

/// Closed-form approximate expected losses; the N_SI constant is kept so
/// the generator/composite forms are absolutely comparable.
inline double approx_objective(ApproxForm form, const Vector& theta, const Vector& theta_tilde,
                               const SandwichMatrices& m) {
  const int p = m.p_gamma + m.p_theta;
  const double n_si = 0.5 * p * std::log(2.0 * M_PI);
  if (theta.size() != m.p_theta || theta_tilde.size() != m.p_theta)
    throw dimension_mismatch("approx_objective: theta size mismatch");
  const SpdFactor fi = cholesky_logdet(m.I_tilde);
  switch (form) {
    case ApproxForm::GenSI: {
      const SpdFactor ft = cholesky_logdet(m.T_theta);
      const Vector diff = theta - theta_tilde;
      return n_si - 0.5 * fi.log_det + 0.5 * ft.quad_inverse(diff) +
             0.5 * ft.solve(m.K_tt).trace() + 0.5 * m.p_gamma;
    }
    case ApproxForm::GenSE: {
      const Vector diff = theta - theta_tilde;
      return trace_inverse(fi) + diff.dot(m.S_theta * diff) +
             (m.S_theta * (m.K_tt - m.T_theta)).trace();
    }
    case ApproxForm::CompEntropy:
      return n_si - 0.5 * fi.log_det + 0.5 * p;
    case ApproxForm::CompTV:
      return trace_inverse(fi);
    case ApproxForm::InternalD:
      return n_si - 0.5 * fi.log_det + 0.5 * p;
    case ApproxForm::InternalA:
      return trace_inverse(fi);
  }
  return inf;
}

/// Designer-prior Monte Carlo average of a per-theta approximate objective.
inline ExpectedLossEstimate approx_expected_loss(
    const std::function<Vector(RandomStream&)>& prior_sampler,
    const std::function<double(const Vector&)>& objective_at_theta, int B,
    const RandomStream& stream) {
  if (B < 1) throw domain_error("approx_expected_loss: need B >= 1");
  std::vector<double> vals(B);
  for (int b = 0; b < B; ++b) {
    RandomStream sub = stream.substream(static_cast<std::uint64_t>(b));
    const Vector theta = prior_sampler(sub);
    vals[b] = objective_at_theta(theta);
    if (!std::isfinite(vals[b]))
      throw non_finite_value("approx_expected_loss: objective not finite at sampled theta");
  }
  ExpectedLossEstimate est;
  est.outer_samples = B;
  est.root_seed = stream.root_seed();
  est.value = chunked_sum(vals) / B;
  if (B == 1) {
    est.degenerate_se = true;
  } else {
    double ss = 0.0;
    for (double v : vals) ss += (v - est.value) * (v - est.value);
    est.mc_standard_error = std::sqrt(ss / (B - 1)) / std::sqrt(static_cast<double>(B));
  }
  return est;
}

}  // namespace altdesign

#endif
