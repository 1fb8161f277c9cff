#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "altdesign/asymptotic.hpp"
#include "altdesign/michaelis_menten.hpp"
#include "oracles.hpp"

using namespace altdesign;

namespace {

Design concentrations(std::initializer_list<double> xs) {
  Matrix pts(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return Design::box(std::move(pts), 0.0, 1.0);
}

Design random_design(int n, RandomStream& s) {
  Matrix pts(n, 1);
  for (int i = 0; i < n; ++i) pts(i, 0) = s.uniform(0.05, 1.0);
  return Design::box(std::move(pts), 0.0, 1.0);
}

}  // namespace

TEST_CASE("reaction-velocity curve") {
  const MmParams p{100.0, 100.0};
  CHECK(mm_eta(p, 0.0) == 0.0);
  CHECK(mm_eta(p, 1.0) == Catch::Approx(80.0).epsilon(1e-14));
  // at x L = theta2 the velocity is half the maximum
  CHECK(mm_eta(MmParams{140.0, 0.3 * 400.0}, 0.3) == Catch::Approx(70.0).epsilon(1e-14));
  CHECK_THROWS_AS(mm_eta(p, -0.01), domain_error);
  CHECK_THROWS_AS(mm_eta(p, 1.01), domain_error);

  // monotone: increasing in x and theta1, decreasing in theta2
  double prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    const double v = mm_eta(p, i / 20.0);
    CHECK(v >= 0.0);
    CHECK(v > prev);
    prev = v;
  }
  for (double x : {0.1, 0.5, 0.9}) {
    CHECK(mm_eta(MmParams{120.0, 100.0}, x) > mm_eta(MmParams{100.0, 100.0}, x));
    CHECK(mm_eta(MmParams{100.0, 120.0}, x) < mm_eta(MmParams{100.0, 100.0}, x));
  }
}

TEST_CASE("curve gradient") {
  CHECK(mm_eta_grad(MmParams{80.0, 50.0}, 0.0) == Eigen::Vector2d(0.0, 0.0));

  RandomStream s(17);
  for (int rep = 0; rep < 20; ++rep) {
    const MmParams p{s.uniform(20.0, 200.0), s.uniform(20.0, 200.0)};
    const double x = s.uniform(0.05, 1.0);
    const Eigen::Vector2d g = mm_eta_grad(p, x);
    const double h = 1e-5;
    const double fd1 =
        (mm_eta(MmParams{p.theta1 + h, p.theta2}, x) - mm_eta(MmParams{p.theta1 - h, p.theta2}, x)) /
        (2.0 * h);
    const double fd2 =
        (mm_eta(MmParams{p.theta1, p.theta2 + h}, x) - mm_eta(MmParams{p.theta1, p.theta2 - h}, x)) /
        (2.0 * h);
    CHECK(g[0] == Catch::Approx(fd1).epsilon(1e-6));
    CHECK(g[1] == Catch::Approx(fd2).epsilon(1e-6));
    CHECK(g[0] >= 0.0);
    CHECK(g[0] <= 1.0);
  }
}

TEST_CASE("designer covariance") {
  const Design d = concentrations({0.1, 0.4, 0.9});
  SECTION("zero discrepancy collapses to the iid covariance") {
    const Matrix cov = designer_covariance(1.7, 0.0, 0.3, d);
    CHECK((cov - 1.7 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SECTION("replicated points give the rank-one structure") {
    const Design rep = concentrations({0.5, 0.5, 0.5, 0.5});
    const double s2 = 2.0, rho = 0.6;
    const Matrix cov = designer_covariance(s2, rho, 0.25, rep);
    const Matrix expect =
        s2 * (Matrix::Identity(4, 4) + rho * Matrix::Ones(4, 4));
    CHECK((cov - expect).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    CHECK(es.eigenvalues().maxCoeff() == Catch::Approx(s2 * (1.0 + 4.0 * rho)).epsilon(1e-10));
    CHECK(es.eigenvalues().minCoeff() == Catch::Approx(s2).epsilon(1e-10));
  }
  SECTION("diagonal is sigma^2 (1 + rho)") {
    const Matrix cov = designer_covariance(1.3, 0.8, 0.2, d);
    for (int i = 0; i < 3; ++i) CHECK(cov(i, i) == Catch::Approx(1.3 * 1.8).epsilon(1e-12));
  }
  CHECK_THROWS_AS(designer_covariance(0.0, 0.5, 0.2, d), domain_error);
  CHECK_THROWS_AS(designer_covariance(1.0, -0.1, 0.2, d), domain_error);
}

TEST_CASE("gaussian log-likelihoods") {
  const Design d = concentrations({0.1, 0.3, 0.5, 0.7, 0.9});
  const MmParams p{110.0, 70.0};
  const Vector eta = mm_eta_vector(p, d);
  const double s2 = 1.4;

  SECTION("zero residual") {
    CHECK(gaussian_loglik_iid(eta, eta, s2) ==
          Catch::Approx(-2.5 * std::log(2.0 * M_PI * s2)).epsilon(1e-12));
  }
  SECTION("designer with rho = 0 equals the fitted density") {
    RandomStream s(6);
    const Vector y = eta + s.normal_vector(5);
    const SpdFactor cov = cholesky_logdet(designer_covariance(s2, 0.0, 0.3, d));
    CHECK(gaussian_loglik(y, eta, cov) ==
          Catch::Approx(gaussian_loglik_iid(y, eta, s2)).margin(1e-10));
  }
  SECTION("matches a brute-force density with explicit inverse") {
    RandomStream s(7);
    const Vector y = eta + 2.0 * s.normal_vector(5);
    const Matrix cov = designer_covariance(s2, 0.7, 0.25, d);
    const SpdFactor f = cholesky_logdet(cov);
    const Matrix inv = oracle::gauss_jordan_inverse(cov);
    const double brute = -2.5 * std::log(2.0 * M_PI) - 0.5 * oracle::lu_log_abs_det(cov) -
                         0.5 * (y - eta).dot(inv * (y - eta));
    CHECK(gaussian_loglik(y, eta, f) == Catch::Approx(brute).margin(1e-8));
  }
}

TEST_CASE("sampled losses") {
  SECTION("forcing rho = 0 makes external SE agree with internal SE") {
    const Design d = concentrations({0.1, 0.3, 0.6, 1.0});
    const ModelPair collapsed = mm_model_pair({}, true);
    const RandomStream stream(21);
    const auto ext =
        mc_external_loss(collapsed, {LossKind::SquaredError}, d, 3000, 3000, stream);
    const auto intl =
        mc_internal_loss(collapsed, {LossKind::SquaredError}, d, 3000, 3000, stream);
    const double combined = std::sqrt(ext.mc_standard_error * ext.mc_standard_error +
                                      intl.mc_standard_error * intl.mc_standard_error);
    CHECK(std::abs(ext.value - intl.value) <= 3.0 * combined + 0.02 * intl.value);
  }
  SECTION("a single zero concentration leaves the prior untouched") {
    const Design d = concentrations({0.0});
    const auto est =
        mm_objectives(MmObjective::ExternalSE, d, 4000, 4000, RandomStream(12));
    const double prior_risk = 2.0 * (180.0 * 180.0) / 12.0;  // two U[20,200] coordinates
    CHECK(std::abs(est.value - prior_risk) < 3.0 * est.mc_standard_error + 0.02 * prior_risk);
  }
}

TEST_CASE("asymptotic objectives") {
  RandomStream s(2);
  SECTION("external/internal ratio is the constant prior scale") {
    for (int rep = 0; rep < 5; ++rep) {
      const Design d = random_design(6, s);
      const double ext_val = mm_asymptotic(MmAsymptotic::External, d, 50, RandomStream(rep + 1));
      const double int_val = mm_asymptotic(MmAsymptotic::Internal, d, 50, RandomStream(rep + 1));
      CHECK(ext_val == Catch::Approx(2.0 * int_val).epsilon(1e-10));
    }
  }
  SECTION("both forms rank a set of designs identically") {
    std::vector<Design> designs;
    for (int i = 0; i < 10; ++i) designs.push_back(random_design(6, s));
    std::vector<std::size_t> order_ext(10), order_int(10);
    std::vector<double> v_ext, v_int;
    for (const auto& d : designs) {
      v_ext.push_back(mm_asymptotic(MmAsymptotic::External, d, 200, RandomStream(77)));
      v_int.push_back(mm_asymptotic(MmAsymptotic::Internal, d, 200, RandomStream(77)));
    }
    for (std::size_t i = 0; i < 10; ++i) order_ext[i] = order_int[i] = i;
    std::sort(order_ext.begin(), order_ext.end(), [&](auto a, auto b) { return v_ext[a] < v_ext[b]; });
    std::sort(order_int.begin(), order_int.end(), [&](auto a, auto b) { return v_int[a] < v_int[b]; });
    CHECK(order_ext == order_int);
  }
  SECTION("two-point design matches the hand-assembled 2x2 inverse") {
    const Design d = concentrations({0.25, 0.8});
    const RandomStream stream(5);
    // replicate the single prior draw used at B = 1
    RandomStream sub = stream.substream(0);
    const MmParams p{sub.uniform(20.0, 200.0), sub.uniform(20.0, 200.0)};
    Matrix info = Matrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      const Eigen::Vector2d g = mm_eta_grad(p, d.points(i, 0));
      info += Matrix(g * g.transpose());
    }
    const double byhand = oracle::inverse_2x2(info).trace();
    CHECK(mm_asymptotic(MmAsymptotic::Internal, d, 1, stream) == Catch::Approx(byhand).margin(1e-8));
  }
  SECTION("value is invariant to permuting the runs") {
    const Design d = concentrations({0.1, 0.5, 0.9, 0.3});
    const Design perm = concentrations({0.3, 0.9, 0.1, 0.5});
    CHECK(mm_asymptotic(MmAsymptotic::External, d, 40, RandomStream(9)) ==
          Catch::Approx(mm_asymptotic(MmAsymptotic::External, perm, 40, RandomStream(9)))
              .epsilon(1e-12));
  }
  SECTION("all-zero concentrations are singular") {
    const Design d = concentrations({0.0, 0.0, 0.0});
    CHECK(mm_asymptotic(MmAsymptotic::External, d, 10, RandomStream(3)) == altdesign::inf);
  }
}

TEST_CASE("projection of the discrepancy model onto the fitted family") {
  const Design d = concentrations({0.05, 0.15, 0.3, 0.5, 0.7, 0.85, 1.0});
  const MmParams truth{100.0, 100.0};
  const auto d_eval = mm_expected_loglik(d, truth);
  Vector start(3);
  start << 80.0, 80.0, 1.0;
  const KlProjection proj = kl_project(d_eval, start);
  // the curve parameters are recovered and the variance absorbs the discrepancy scale
  CHECK(proj.beta_tilde[0] == Catch::Approx(100.0).margin(1e-3));
  CHECK(proj.beta_tilde[1] == Catch::Approx(100.0).margin(1e-3));
  CHECK(proj.beta_tilde[2] == Catch::Approx(2.0).margin(1e-3));

  CHECK(d_eval(Vector::Constant(3, -1.0)) == -altdesign::inf);
  CHECK_THROWS_AS(d_eval(Vector::Zero(2)), dimension_mismatch);
}

TEST_CASE("sampled and asymptotic objectives agree on the best design", "[slow]") {
  RandomStream s(41);
  std::vector<Design> designs;
  for (int i = 0; i < 10; ++i) designs.push_back(random_design(10, s));
  int agree = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::size_t arg_tv = 0, arg_se = 0;
    double best_tv = altdesign::inf, best_se = altdesign::inf;
    for (std::size_t j = 0; j < designs.size(); ++j) {
      const auto tv = mm_objectives(MmObjective::ExternalTV, designs[j], 5000, 5000,
                                    RandomStream(seed).substream(2 * j));
      const auto se = mm_objectives(MmObjective::InternalSE, designs[j], 5000, 5000,
                                    RandomStream(seed).substream(2 * j + 1));
      if (tv.value < best_tv) { best_tv = tv.value; arg_tv = j; }
      if (se.value < best_se) { best_se = se.value; arg_se = j; }
    }
    if (arg_tv == arg_se) ++agree;
  }
  CHECK(agree >= 8);
}
