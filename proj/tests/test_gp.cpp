#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symkern/gp.hpp"
#include "symkern/oracles.hpp"
#include "testutil.hpp"

using namespace symkern;

namespace {

ManifoldPoint hyp_at(int n, double r) {
  return act(hyperbolic_boost(r, n), hyperbolic_base_point(n));
}

KernelSpec heat_spec(double kappa) {
  KernelSpec s;
  s.kappa = kappa;
  return s;
}

Dataset small_h2_dataset(Rng& rng, int n_points, double noise) {
  Dataset data;
  for (int i = 0; i < n_points; ++i) {
    data.points.push_back(act(random_isometry({Space::hyperbolic, 2}, rng),
                                hyperbolic_base_point(2)));
  }
  data.y.resize(n_points);
  data.noise = Eigen::VectorXd::Constant(n_points, noise);
  for (int i = 0; i < n_points; ++i) data.y[i] = rng.normal();
  return data;
}

KernelFn h3_heat_kernel(double kappa) {
  return [kappa](const ManifoldPoint& a, const ManifoldPoint& b) {
    return heat_h3(dist(a, b), kappa);
  };
}

}  // namespace

TEST_CASE("posterior moments") {
  Rng rng(61);
  const auto kernel = h3_heat_kernel(1.0);
  std::vector<ManifoldPoint> query{hyperbolic_base_point(3), hyp_at(3, 0.7),
                                   hyp_at(3, 1.5)};

  SUBCASE("empty dataset returns the prior") {
    Dataset empty;
    const auto m = posterior_moments(kernel, empty, query);
    CHECK(m.mean.norm() == doctest::Approx(0.0));
    CHECK(m.cov(0, 0) == doctest::Approx(1.0));
    CHECK(m.cov(0, 1) == doctest::Approx(heat_h3(0.7, 1.0)));
  }

  SUBCASE("interpolates training data at tiny noise") {
    Dataset data;
    data.points = {hyp_at(3, 0.5), hyp_at(3, 1.2)};
    data.y.resize(2);
    data.y << 1.3, -0.4;
    data.noise = Eigen::VectorXd::Constant(2, 1e-10);
    const auto m = posterior_moments(kernel, data, data.points);
    CHECK(m.mean[0] == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(m.mean[1] == doctest::Approx(-0.4).epsilon(1e-6));
    CHECK(m.cov(0, 0) < 1e-6);
  }

  SUBCASE("single-point closed form") {
    Dataset data;
    data.points = {hyp_at(3, 0.5)};
    data.y = Eigen::VectorXd::Constant(1, 2.0);
    data.noise = Eigen::VectorXd::Constant(1, 0.3);
    const auto m = posterior_moments(kernel, data, query);
    for (std::size_t i = 0; i < query.size(); ++i) {
      const double kq = kernel(query[i], data.points[0]);
      const double expected = kq * 2.0 / (1.0 + 0.3);
      CHECK(m.mean[i] == doctest::Approx(expected).epsilon(1e-10));
      const double var_expected =
          kernel(query[i], query[i]) - kq * kq / (1.0 + 0.3);
      CHECK(m.cov(i, i) == doctest::Approx(var_expected).epsilon(1e-10));
    }
  }

  SUBCASE("posterior variance never exceeds the prior variance") {
    Rng data_rng(62);
    const auto basis = build_basis(heat_spec(1.0), {Space::hyperbolic, 2}, 512,
                                   SamplingMethod::rejection, data_rng);
    const auto data = small_h2_dataset(data_rng, 6, 0.1);
    std::vector<ManifoldPoint> q2;
    for (int i = 0; i < 4; ++i) {
      q2.push_back(act(random_isometry({Space::hyperbolic, 2}, data_rng),
                         hyperbolic_base_point(2)));
    }
    const auto prior = posterior_moments(basis, Dataset{}, q2);
    const auto post = posterior_moments(basis, data, q2);
    for (int i = 0; i < 4; ++i) {
      CHECK(post.cov(i, i) <= prior.cov(i, i) + 1e-8);
    }
  }

  SUBCASE("invariant under permutation of the training set") {
    Dataset data;
    data.points = {hyp_at(3, 0.4), hyp_at(3, 1.0), hyp_at(3, 1.8)};
    data.y.resize(3);
    data.y << 0.5, -1.0, 0.25;
    data.noise.resize(3);
    data.noise << 0.1, 0.2, 0.15;

    Dataset permuted;
    for (int i : {2, 0, 1}) {
      permuted.points.push_back(data.points[i]);
    }
    permuted.y.resize(3);
    permuted.y << 0.25, 0.5, -1.0;
    permuted.noise.resize(3);
    permuted.noise << 0.15, 0.1, 0.2;

    const auto a = posterior_moments(kernel, data, query);
    const auto b = posterior_moments(kernel, permuted, query);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.cov - b.cov).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(log_marginal_likelihood(kernel, data) ==
          doctest::Approx(log_marginal_likelihood(kernel, permuted))
              .epsilon(1e-12));
  }
}

TEST_CASE("pathwise conditioning") {
  Rng rng(63);
  const auto basis = build_basis(heat_spec(1.0), {Space::hyperbolic, 2}, 1024,
                                 SamplingMethod::rejection, rng);
  const auto data = small_h2_dataset(rng, 6, 0.2);
  std::vector<ManifoldPoint> query{hyperbolic_base_point(2), hyp_at(2, 1.0)};

  SUBCASE("empty dataset reduces to a prior path") {
    Rng r1(64), r2(64);
    const auto path = posterior_sample(basis, Dataset{}, query, r1);
    // Reproduce with the same weight stream through with_fresh_weights.
    const auto fresh = with_fresh_weights(basis, r2);
    const auto prior = prior_sample(fresh, query);
    CHECK((path - prior).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("sample moments match closed-form moments") {
    const int n_paths = 8000;
    Rng path_rng(65);
    const auto paths =
        posterior_sample_batch(basis, data, query, n_paths, path_rng);
    const auto closed = posterior_moments(basis, data, query);

    for (int i = 0; i < 2; ++i) {
      std::vector<double> col(paths.col(i).data(),
                              paths.col(i).data() + n_paths);
      const auto ms = testutil::mean_stderr(col);
      CHECK(std::abs(ms.mean - closed.mean[i]) < 5.0 * ms.std_error);
    }

    // Covariance entries with their empirical standard errors.
    for (int i = 0; i < 2; ++i) {
      for (int j = i; j < 2; ++j) {
        Eigen::ArrayXd ci = paths.col(i).array() - paths.col(i).mean();
        Eigen::ArrayXd cj = paths.col(j).array() - paths.col(j).mean();
        Eigen::ArrayXd prod = ci * cj;
        const double cov = prod.sum() / (n_paths - 1.0);
        const double se = std::sqrt(
            (prod - prod.mean()).square().sum() / (n_paths - 1.0) / n_paths);
        CHECK(std::abs(cov - closed.cov(i, j)) < 5.0 * se);
      }
    }
  }

  SUBCASE("single sample equals the first batch row") {
    Rng r1(66), r2(66);
    const auto one = posterior_sample(basis, data, query, r1);
    const auto batch = posterior_sample_batch(basis, data, query, 3, r2);
    CHECK((one.transpose() - batch.row(0)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("log marginal likelihood") {
  const auto kernel = h3_heat_kernel(1.0);

  SUBCASE("single observation closed form") {
    Dataset data;
    data.points = {hyp_at(3, 0.3)};
    data.y = Eigen::VectorXd::Constant(1, 1.5);
    data.noise = Eigen::VectorXd::Constant(1, 0.4);
    const double v = 1.0 + 0.4;
    const double expected =
        -0.5 * 1.5 * 1.5 / v - 0.5 * std::log(v) - 0.5 * std::log(2.0 * M_PI);
    CHECK(log_marginal_likelihood(kernel, data) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("finite on random data, decreasing in noise for zero targets") {
    Rng rng(67);
    Dataset data = small_h2_dataset(rng, 5, 0.1);
    const auto basis = build_basis(heat_spec(1.0), {Space::hyperbolic, 2}, 256,
                                   SamplingMethod::rejection, rng);
    CHECK(std::isfinite(log_marginal_likelihood(basis, data)));

    data.y.setZero();
    double prev = 1e300;
    for (double noise : {0.01, 0.1, 1.0, 10.0}) {
      data.noise.setConstant(noise);
      const double lml = log_marginal_likelihood(basis, data);
      CHECK(lml < prev);
      prev = lml;
    }
  }

  SUBCASE("duplicate observations stay finite") {
    Dataset data;
    data.points = {hyp_at(3, 0.5), hyp_at(3, 0.5)};
    data.y.resize(2);
    data.y << 1.0, 1.0;
    data.noise = Eigen::VectorXd::Constant(2, 0.05);
    CHECK(std::isfinite(log_marginal_likelihood(kernel, data)));
  }

  CHECK_THROWS_AS(log_marginal_likelihood(kernel, Dataset{}),
                  std::invalid_argument);
}

TEST_CASE("dataset validation") {
  Dataset bad;
  bad.points = {hyp_at(2, 0.5)};
  bad.y = Eigen::VectorXd::Zero(2);
  bad.noise = Eigen::VectorXd::Constant(2, 0.1);
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);

  Dataset neg;
  neg.points = {hyp_at(2, 0.5)};
  neg.y = Eigen::VectorXd::Zero(1);
  neg.noise = Eigen::VectorXd::Constant(1, -0.1);
  CHECK_THROWS_AS(validate(neg), std::invalid_argument);
}
