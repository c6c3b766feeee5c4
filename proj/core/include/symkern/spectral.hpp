#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "symkern/manifolds.hpp"
#include "symkern/rng.hpp"

namespace symkern {

enum class Laplacian { ordinary, shifted };

/// Hyperparameters of a heat (nu = inf) or Matern kernel.
struct KernelSpec {
  double nu = std::numeric_limits<double>::infinity();
  double kappa = 1.0;
  double sigma2 = 1.0;
  Laplacian laplacian = Laplacian::ordinary;

  bool is_heat() const { return std::isinf(nu); }
};

void validate(const KernelSpec& spec);

/// Half-sum-of-positive-roots data: scalar (n-1)/2 for H_n, the vector
/// rho_j = j - (d+1)/2 for SPD(d).
struct RhoData {
  Eigen::VectorXd rho;
  double norm_sq = 0.0;
};

RhoData rho_hyperbolic(int n);
RhoData rho_spd(int d);
RhoData rho_of(SpaceId space);

/// Unnormalized |c(lambda)|^{-2} on H_n; parity-dependent polynomial-times-
/// tanh form.
double c_inv_sq_hyp(double lambda, int n);

/// Unnormalized |c(lambda)|^{-2} on SPD(d):
/// prod_{i<j} pi |l_i - l_j| tanh(pi |l_i - l_j| / 2).
double c_inv_sq_spd(const Eigen::VectorXd& lambda);

/// Unnormalized Gaussian (nu = inf) or generalized-t density in lambda;
/// the shifted Laplacian drops the |rho|^2 term.
double base_density(const KernelSpec& spec, const Eigen::VectorXd& lambda,
                    const RhoData& rho, int n_dim);

/// Coefficients of the polynomial part of c_inv_sq_hyp, indexed by the power
/// of |lambda|. Odd powers only for even n, even powers only for odd n.
std::vector<double> hyp_polynomial_coeffs(int n);

/// Sample from the density proportional to sum_j coeffs[j] l^j e^{-k^2 l^2/2}
/// on l > 0 (mixture of scaled chi distributions).
double sample_hyp_heat_mixture(const std::vector<double>& coeffs, double kappa,
                               Rng& rng);

/// Sample from sum_j coeffs[j] l^j (gamma + l^2)^{-nu-n/2} on l > 0 (mixture
/// of transformed beta-prime distributions); gamma = 2nu/kappa^2 + rho^2 for
/// the ordinary Laplacian and 2nu/kappa^2 for the shifted one.
double sample_hyp_matern_mixture(const std::vector<double>& coeffs, double nu,
                                 double kappa, int n, Laplacian laplacian,
                                 Rng& rng);

struct SpectralDraw {
  Eigen::VectorXd lambda;
  long proposals = 0;
};

/// Exact draw from the normalized H_n spectral measure (signed scalar).
SpectralDraw rejection_sample_hyp(const KernelSpec& spec, int n, Rng& rng);

/// Eigenvalues (ascending) of (X + X^T)/2 with X iid standard Gaussian.
Eigen::VectorXd sample_goe_eigs(int d, Rng& rng);

/// Exact draw from the normalized SPD(d) spectral measure.
SpectralDraw rejection_sample_spd(const KernelSpec& spec, int d, Rng& rng);

struct AcceptanceEstimate {
  double rate = 1.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the per-proposal acceptance probability of the
/// rejection sampler for the given spec and space.
AcceptanceEstimate acceptance_rate(const KernelSpec& spec, SpaceId space,
                                   long trials, Rng& rng);

}  // namespace symkern
