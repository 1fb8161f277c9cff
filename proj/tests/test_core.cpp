#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "altdesign/core.hpp"
#include "altdesign/rng.hpp"
#include "oracles.hpp"

using namespace altdesign;

namespace {
Matrix random_spd(int n, std::uint64_t seed) {
  RandomStream s(seed);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = s.normal();
  return m.transpose() * m + Matrix::Identity(n, n);
}
}  // namespace

TEST_CASE("cholesky_logdet basics") {
  CHECK(cholesky_logdet(Matrix::Identity(3, 3)).log_det == Catch::Approx(0.0).margin(1e-14));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  CHECK(cholesky_logdet(d).log_det == Catch::Approx(std::log(36.0)).epsilon(1e-12));

  const Matrix a = random_spd(5, 42);
  const SpdFactor f = cholesky_logdet(a);
  CHECK(f.log_det == Catch::Approx(oracle::lu_log_abs_det(a)).epsilon(1e-8));

  // round-trip L L^T = A
  const Matrix rebuilt = f.lower * f.lower.transpose();
  CHECK((rebuilt - a).cwiseAbs().maxCoeff() <= 1e-10 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("cholesky_logdet rejects bad input") {
  Matrix asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(cholesky_logdet(asym), domain_error);

  Matrix indef = Matrix::Identity(3, 3);
  indef(1, 1) = -2.0;
  CHECK_THROWS_AS(cholesky_logdet(indef), not_positive_definite);

  CHECK_THROWS_AS(cholesky_logdet(Matrix::Zero(2, 3)), dimension_mismatch);
}

TEST_CASE("SpdFactor solve matches Gauss-Jordan inverse") {
  const Matrix a = random_spd(6, 7);
  const SpdFactor f = cholesky_logdet(a);
  const Matrix inv = oracle::gauss_jordan_inverse(a);
  const Matrix solved = f.solve(Matrix::Identity(6, 6));
  CHECK((solved - inv).cwiseAbs().maxCoeff() <= 1e-8);

  RandomStream s(3);
  const Vector b = s.normal_vector(6);
  CHECK((f.solve(b) - inv * b).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(f.quad_inverse(b) == Catch::Approx(b.dot(inv * b)).epsilon(1e-8));
}

TEST_CASE("trace_inverse") {
  CHECK(trace_inverse(Matrix(Matrix::Identity(4, 4))) == Catch::Approx(4.0));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  CHECK(trace_inverse(d) == Catch::Approx(0.75).epsilon(1e-12));
  // c I -> p / c exactly for scalar matrices
  CHECK(trace_inverse(Matrix(2.0 * Matrix::Identity(8, 8))) == Catch::Approx(4.0).epsilon(1e-14));

  const Matrix a = random_spd(6, 11);
  CHECK(trace_inverse(a) ==
        Catch::Approx(oracle::gauss_jordan_inverse(a).trace()).epsilon(1e-8));
}

TEST_CASE("f_quantile") {
  const double med = f_quantile(1, 10, 0.5);
  CHECK(f_cdf(1, 10, med) == Catch::Approx(0.5).margin(1e-8));

  CHECK(f_quantile(1, 10, 0.95) ==
        Catch::Approx(oracle::f_quantile_by_integration(1, 10, 0.95)).margin(1e-6));
  CHECK(f_quantile(10, 6, 0.95) ==
        Catch::Approx(oracle::f_quantile_by_integration(10, 6, 0.95)).margin(1e-6));

  CHECK_THROWS_AS(f_quantile(1, 10, 0.0), domain_error);
  CHECK_THROWS_AS(f_quantile(1, 10, 1.0), domain_error);
  CHECK_THROWS_AS(f_quantile(0, 10, 0.5), domain_error);

  // strictly increasing in prob
  double prev = 0.0;
  for (double p = 0.05; p < 1.0; p += 0.05) {
    const double q = f_quantile(3, 7, p);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("matern52 correlation") {
  CHECK(matern52(0.0, 0.3) == 1.0);
  CHECK(matern52(0.7, 0.7) == Catch::Approx(7.0 / 3.0 * std::exp(-1.0)).epsilon(1e-12));
  double prev = 2.0;
  for (double dist = 0.0; dist <= 2.0 + 1e-12; dist += 0.1) {
    const double c = matern52(dist, 0.2);
    CHECK(c > 0.0);
    CHECK(c <= 1.0);
    CHECK(c < prev);
    prev = c;
  }
  CHECK_THROWS_AS(matern52(-0.1, 0.2), domain_error);
  CHECK_THROWS_AS(matern52(0.1, 0.0), domain_error);
}

TEST_CASE("quadrature rule and integrate_unit") {
  const QuadratureRule rule = gauss_legendre_unit();
  double wsum = 0.0;
  for (double w : rule.weights) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == Catch::Approx(1.0).margin(1e-12));
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);

  CHECK(integrate_unit([](double) { return 1.0; }, rule) == Catch::Approx(1.0).margin(1e-12));
  CHECK(integrate_unit([](double x) { return x * x; }, rule) ==
        Catch::Approx(1.0 / 3.0).margin(1e-10));
  CHECK(integrate_unit([](double x) { return std::exp(x); }, rule) ==
        Catch::Approx(std::exp(1.0) - 1.0).margin(1e-10));
  CHECK_THROWS_AS(integrate_unit([](double) { return altdesign::inf; }, rule), non_finite_value);
}

TEST_CASE("sampler moments") {
  RandomStream s(2024);
  const int n = 100000;

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += s.exponential(1.0);
  mean /= n;
  CHECK(std::abs(mean - 1.0) < 4.0 / std::sqrt(static_cast<double>(n)));  // SD = 1

  // IG(a/2, b/2) with a = 6, b = 4: mean b/(a-2) = 1, variance 2b^2/((a-2)^2(a-4)) = 2
  double ig_mean = 0.0;
  for (int i = 0; i < n; ++i) ig_mean += s.inverse_gamma_halves(6.0, 4.0);
  ig_mean /= n;
  CHECK(std::abs(ig_mean - 1.0) < 4.0 * std::sqrt(2.0 / n));

  CHECK_THROWS_AS(s.exponential(0.0), domain_error);
  CHECK_THROWS_AS(s.uniform(1.0, 1.0), domain_error);
  CHECK_THROWS_AS(s.gamma(-1.0), domain_error);
  CHECK_THROWS_AS(s.inverse_gamma_halves(0.0, 1.0), domain_error);
}

TEST_CASE("multivariate normal matches target covariance") {
  const double sigma_sq = 1.7, rho = 0.8, alpha = 0.25;
  Matrix cov(3, 3);
  const double xs[3] = {0.1, 0.45, 0.9};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      cov(i, j) = sigma_sq * ((i == j ? 1.0 : 0.0) + rho * matern52(std::abs(xs[i] - xs[j]), alpha));
  const SpdFactor f = cholesky_logdet(cov);

  const int n = 10000;
  Matrix draws(n, 3);
  RandomStream s(9001);
  const Vector zero = Vector::Zero(3);
  for (int i = 0; i < n; ++i) draws.row(i) = s.multivariate_normal(zero, f).transpose();
  const auto [emp_mean, emp_cov] = oracle::empirical_moments(draws);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // SE of a covariance entry is ~ sqrt((c_ii c_jj + c_ij^2)/n)
      const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
      CHECK(std::abs(emp_cov(i, j) - cov(i, j)) < 5.0 * se);
    }
}

TEST_CASE("random streams are reproducible and substreams differ") {
  RandomStream a(77), b(77);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomStream s1 = RandomStream(77).substream(1);
  RandomStream s2 = RandomStream(77).substream(2);
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) any_diff |= (s1.next_u64() != s2.next_u64());
  CHECK(any_diff);

  // substreams are independent of draws already taken from the parent
  RandomStream parent(5);
  parent.next_u64();
  parent.next_u64();
  RandomStream c1 = parent.substream(9);
  RandomStream c2 = RandomStream(5).substream(9);
  for (int i = 0; i < 20; ++i) CHECK(c1.next_u64() == c2.next_u64());
}

TEST_CASE("chunked_sum is a plain sum with fixed order") {
  std::vector<double> v(1000);
  RandomStream s(4);
  double plain = 0.0;
  for (auto& x : v) {
    x = s.normal();
  }
  for (double x : v) plain += x;
  CHECK(chunked_sum(v) == Catch::Approx(plain).margin(1e-9));
}

TEST_CASE("parallel_for result independent of worker count") {
  const int n = 257;
  std::vector<double> a(n), b(n);
  parallel_for(n, 1, [&](std::int64_t i) { a[i] = std::sin(static_cast<double>(i)); });
  parallel_for(n, 8, [&](std::int64_t i) { b[i] = std::sin(static_cast<double>(i)); });
  CHECK(a == b);
}
