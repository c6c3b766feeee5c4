#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "symkern/manifolds.hpp"
#include "symkern/rng.hpp"
#include "symkern/spectral.hpp"

namespace symkern {

enum class SamplingMethod { rejection, importance };
enum class EstimatorMode { psd, plain };

/// Random spherical-Fourier feature basis: L spectral samples, Haar isotropy
/// elements and complex path weights, built once and reused for kernel
/// evaluation and prior sampling. Immutable after construction.
struct FeatureBasis {
  SpaceId space{Space::hyperbolic, 2};
  KernelSpec spec;
  int count = 0;  // L
  SamplingMethod method = SamplingMethod::rejection;
  std::vector<Eigen::VectorXd> lambdas;       // |lambda| scalars for H_n
  std::vector<Eigen::MatrixXd> isotropy;      // SO(n) / O(d) elements
  std::vector<std::complex<double>> weights;  // re, im independent N(0,1)
  std::vector<double> importance_weights;     // empty for rejection bases
  RhoData rho;
  std::uint64_t seed = 0;  // provenance only
};

/// Draws lambdas (exact sampler or importance proposal), Haar isotropy
/// elements, and fresh path weights.
FeatureBasis build_basis(const KernelSpec& spec, SpaceId space, int count,
                         SamplingMethod method, Rng& rng,
                         std::uint64_t seed_provenance = 0);

/// Same basis with newly drawn path weights (for fresh prior paths).
FeatureBasis with_fresh_weights(const FeatureBasis& basis, Rng& rng);

/// Abelian Iwasawa coordinate a(h g_x): length-1 vector t for H_n, the
/// log-diagonal of the RQ R-part for SPD. h is the isotropy element in its
/// native size (n x n or d x d).
Eigen::VectorXd log_feature_exponent(const ManifoldPoint& x,
                                     const Eigen::MatrixXd& h);

/// Feature map entry l: sqrt(sigma2/L) iw_l exp((i lambda_l - rho)^T a_l(x)),
/// with iw_l the importance weight (1 for rejection bases). The PSD kernel
/// estimate is Re <phi(x), phi(x')>.
Eigen::VectorXcd feature_map(const FeatureBasis& basis, const ManifoldPoint& x);

/// Row p holds feature_map(points[p]).
Eigen::MatrixXcd feature_matrix(const FeatureBasis& basis,
                                std::span<const ManifoldPoint> points);

double kernel_estimate(const FeatureBasis& basis, const ManifoldPoint& x,
                       const ManifoldPoint& y,
                       EstimatorMode mode = EstimatorMode::psd);

/// Gram matrix Re(Phi Phi*): symmetric and positive semi-definite by
/// construction.
Eigen::MatrixXd kernel_matrix(const FeatureBasis& basis,
                              std::span<const ManifoldPoint> points);

/// Prior path f(x) = Re sum_l w_l phi_l(x) using the basis's stored weights;
/// deterministic for a fixed basis.
Eigen::VectorXd prior_sample(const FeatureBasis& basis,
                             std::span<const ManifoldPoint> points);

struct McEstimate {
  std::complex<double> value;
  double std_error = 0.0;
};

struct RealEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the zonal spherical function pi^(lambda) at the
/// group element carrying the base point to x.
McEstimate zonal_spherical_mc(const Eigen::VectorXd& lambda,
                              const ManifoldPoint& x, int count, Rng& rng);

/// Poincare-ball boundary-integral form of the H_n zonal function, averaged
/// over uniform unit vectors.
McEstimate zonal_spherical_hyp_ball(double lambda, const Eigen::VectorXd& ball,
                                    int count, Rng& rng);

/// pi^(0) at the pair (x, y): the limiting kernel bounding every normalized
/// stationary kernel from above.
RealEstimate limiting_kernel(const ManifoldPoint& x, const ManifoldPoint& y,
                             int count, Rng& rng);

}  // namespace symkern
