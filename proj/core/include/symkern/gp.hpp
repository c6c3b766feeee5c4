#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "symkern/features.hpp"
#include "symkern/manifolds.hpp"

namespace symkern {

/// Observations y_i = f(x_i) + eps_i with per-observation noise variances.
struct Dataset {
  std::vector<ManifoldPoint> points;
  Eigen::VectorXd y;
  Eigen::VectorXd noise;

  std::size_t size() const { return points.size(); }
};

void validate(const Dataset& data);

using KernelFn =
    std::function<double(const ManifoldPoint&, const ManifoldPoint&)>;

struct PosteriorMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Closed-form posterior moments via a Cholesky factorization of
/// K_xx + Sigma_eps with jitter escalation 1e-10 -> 1e-6.
PosteriorMoments posterior_moments(const FeatureBasis& basis,
                                   const Dataset& data,
                                   std::span<const ManifoldPoint> query);
PosteriorMoments posterior_moments(const KernelFn& kernel, const Dataset& data,
                                   std::span<const ManifoldPoint> query);

/// One posterior path by pathwise conditioning: a fresh prior path plus the
/// data-driven linear update.
Eigen::VectorXd posterior_sample(const FeatureBasis& basis, const Dataset& data,
                                 std::span<const ManifoldPoint> query,
                                 Rng& rng);

/// Batch of posterior paths sharing one factorization and one feature
/// evaluation; row p is one path over the query points.
Eigen::MatrixXd posterior_sample_batch(const FeatureBasis& basis,
                                       const Dataset& data,
                                       std::span<const ManifoldPoint> query,
                                       int n_paths, Rng& rng);

double log_marginal_likelihood(const FeatureBasis& basis, const Dataset& data);
double log_marginal_likelihood(const KernelFn& kernel, const Dataset& data);

}  // namespace symkern
