#ifndef ALTDESIGN_CORE_HPP
#define ALTDESIGN_CORE_HPP

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace altdesign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct not_positive_definite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct non_finite_value : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct dimension_mismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degrees_of_freedom_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct all_weights_degenerate : std::runtime_error {
  double ess;
  explicit all_weights_degenerate(double e)
      : std::runtime_error("importance weights degenerate, ess=" + std::to_string(e)), ess(e) {}
};
struct unsupported_loss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct incompatible_loss : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct infeasible_start : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Cholesky factor of a symmetric positive-definite matrix together with
/// the log-determinant of the original matrix.
struct SpdFactor {
  Matrix lower;    // L with L L^T = A (possibly after one jitter)
  double log_det;  // log |A|

  Eigen::Index dim() const { return lower.rows(); }

  // A^{-1} b via two triangular solves; accepts any dense Eigen expression
  template <typename Derived>
  typename Derived::PlainObject solve(const Eigen::MatrixBase<Derived>& b) const {
    typename Derived::PlainObject z =
        lower.template triangularView<Eigen::Lower>().solve(b.derived());
    return lower.transpose().template triangularView<Eigen::Upper>().solve(z);
  }

  // ||v||^2_{A^{-1}} = ||L^{-1} v||^2
  double quad_inverse(const Vector& v) const {
    return lower.triangularView<Eigen::Lower>().solve(v).squaredNorm();
  }
};

// Jitter policy: one retry with 1e-10 * mean(diag) * I, then hard error.
inline SpdFactor cholesky_logdet(const Matrix& a) {
  if (a.rows() != a.cols()) throw dimension_mismatch("cholesky_logdet: matrix not square");
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0))
    throw domain_error("cholesky_logdet: matrix not symmetric");
  Matrix sym = 0.5 * (a + a.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-10 * sym.diagonal().mean();
    sym.diagonal().array() += jitter;
    llt.compute(sym);
    if (llt.info() != Eigen::Success)
      throw not_positive_definite("cholesky_logdet: pivot failure after jitter retry");
  }
  SpdFactor f;
  f.lower = llt.matrixL();
  f.log_det = 2.0 * f.lower.diagonal().array().log().sum();
  return f;
}

inline double trace_inverse(const SpdFactor& f) {
  // tr(A^{-1}) = ||L^{-1}||_F^2
  Matrix inv_l = f.lower.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(f.dim(), f.dim()));
  return inv_l.squaredNorm();
}

inline double trace_inverse(const Matrix& a) { return trace_inverse(cholesky_logdet(a)); }

/// 1-prob upper quantile inversion for the F(d1, d2) distribution via the
/// regularized incomplete beta function.
inline double f_quantile(int d1, int d2, double prob) {
  if (d1 < 1 || d2 < 1) throw domain_error("f_quantile: degrees of freedom must be >= 1");
  if (!(prob > 0.0 && prob < 1.0)) throw domain_error("f_quantile: prob must be in (0,1)");
  const double ib = boost::math::ibeta_inv(0.5 * d1, 0.5 * d2, prob);
  return d2 * ib / (d1 * (1.0 - ib));
}

inline double f_cdf(int d1, int d2, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::ibeta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

/// Matern(5/2)-style correlation c(d; alpha) = (1 + d/a + d^2/(3a^2)) exp(-d/a).
inline double matern52(double distance, double alpha) {
  if (distance < 0.0) throw domain_error("matern52: negative distance");
  if (alpha <= 0.0) throw domain_error("matern52: alpha must be positive");
  const double r = distance / alpha;
  return (1.0 + r + r * r / 3.0) * std::exp(-r);
}

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, in [0,1]
  std::vector<double> weights;  // positive, sum to 1
};

/// Gauss-Legendre rule mapped to the unit interval.
inline QuadratureRule gauss_legendre_unit(int n = 32) {
  if (n < 1) throw domain_error("gauss_legendre_unit: need n >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev approximation of the ith root
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

inline double integrate_unit(const std::function<double(double)>& f, const QuadratureRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) throw non_finite_value("integrate_unit: integrand not finite");
    acc += rule.weights[i] * v;
  }
  return acc;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ALTDESIGN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Deterministic parallel loop: every index writes only its own state, so
/// results are identical for any worker count.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::int64_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Fixed-order chunked sum; result independent of how entries were produced.
inline double chunked_sum(const std::vector<double>& v) {
  constexpr std::size_t chunk = 256;
  double total = 0.0;
  for (std::size_t start = 0; start < v.size(); start += chunk) {
    double part = 0.0;
    const std::size_t stop = std::min(v.size(), start + chunk);
    for (std::size_t i = start; i < stop; ++i) part += v[i];
    total += part;
  }
  return total;
}

}  // namespace altdesign

#endif
