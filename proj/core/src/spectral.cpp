#include "symkern/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace symkern {

namespace {

constexpr long kRejectionCap = 1000000;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Mixture weights c_j ~ coeffs[j] / beta_j given log(beta_j), normalized in
// log space.
std::vector<double> mixture_weights(const std::vector<double>& coeffs,
                                    const std::vector<double>& log_beta) {
  std::vector<double> log_w(coeffs.size(),
                            -std::numeric_limits<double>::infinity());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    require(coeffs[j] >= 0.0, "mixture: coefficients must be nonnegative");
    if (coeffs[j] > 0.0) {
      log_w[j] = std::log(coeffs[j]) - log_beta[j];
      top = std::max(top, log_w[j]);
    }
  }
  require(std::isfinite(top), "mixture: all coefficients are zero");
  std::vector<double> w(coeffs.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (std::isfinite(log_w[j])) {
      w[j] = std::exp(log_w[j] - top);
      total += w[j];
    }
  }
  for (auto& x : w) x /= total;
  return w;
}

std::size_t pick_component(const std::vector<double>& w, Rng& rng) {
  double u = rng.uniform();
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    if (u < w[j]) return j;
    u -= w[j];
  }
  return w.size() - 1;
}

double matern_gamma(double nu, double kappa, int n, Laplacian laplacian) {
  const double shift = laplacian == Laplacian::ordinary
                           ? 0.25 * (n - 1.0) * (n - 1.0)
                           : 0.0;
  return 2.0 * nu / (kappa * kappa) + shift;
}

}  // namespace

void validate(const KernelSpec& spec) {
  require(spec.nu > 0.0, "kernel spec: nu must be positive");
  require(spec.kappa > 0.0 && std::isfinite(spec.kappa),
          "kernel spec: kappa must be positive and finite");
  require(spec.sigma2 > 0.0 && std::isfinite(spec.sigma2),
          "kernel spec: sigma2 must be positive and finite");
}

RhoData rho_hyperbolic(int n) {
  require(n >= 2, "rho_hyperbolic: need n >= 2");
  const double r = 0.5 * (n - 1);
  RhoData out;
  out.rho = Eigen::VectorXd::Constant(1, r);
  out.norm_sq = r * r;
  return out;
}

RhoData rho_spd(int d) {
  require(d >= 2, "rho_spd: need d >= 2");
  RhoData out;
  out.rho.resize(d);
  for (int j = 1; j <= d; ++j) out.rho[j - 1] = j - 0.5 * (d + 1);
  out.norm_sq = out.rho.squaredNorm();
  return out;
}

RhoData rho_of(SpaceId space) {
  return space.kind == Space::hyperbolic ? rho_hyperbolic(space.dim)
                                         : rho_spd(space.dim);
}

double c_inv_sq_hyp(double lambda, int n) {
  require(n >= 2, "c_inv_sq_hyp: need n >= 2");
  const double al = std::abs(lambda);
  if (n % 2 == 0) {
    const int m = n / 2;
    double out = al * std::tanh(M_PI * al);
    for (int j = 2; j <= m; ++j) {
      const double h = 0.5 * (2.0 * j - 3.0);
      out *= al * al + h * h;
    }
    return out;
  }
  const int m = (n - 1) / 2;
  double out = 1.0;
  for (int j = 0; j < m; ++j) out *= al * al + static_cast<double>(j) * j;
  return out;
}

double c_inv_sq_spd(const Eigen::VectorXd& lambda) {
  require(lambda.size() >= 2, "c_inv_sq_spd: need d >= 2");
  double out = 1.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    for (Eigen::Index j = i + 1; j < lambda.size(); ++j) {
      const double gap = std::abs(lambda[i] - lambda[j]);
      out *= M_PI * gap * std::tanh(0.5 * M_PI * gap);
    }
  }
  return out;
}

double base_density(const KernelSpec& spec, const Eigen::VectorXd& lambda,
                    const RhoData& rho, int n_dim) {
  validate(spec);
  const double shift =
      spec.laplacian == Laplacian::ordinary ? rho.norm_sq : 0.0;
  const double q = lambda.squaredNorm() + shift;
  if (spec.is_heat()) {
    return std::exp(-0.5 * spec.kappa * spec.kappa * q);
  }
  const double base = 2.0 * spec.nu / (spec.kappa * spec.kappa) + q;
  return std::pow(base, -spec.nu - 0.5 * n_dim);
}

std::vector<double> hyp_polynomial_coeffs(int n) {
  require(n >= 2, "hyp_polynomial_coeffs: need n >= 2");
  // Convolve the quadratic factors (l^2 + h_j^2); coefficients stay exactly
  // representable (integers, or quarters for even n) far beyond any n used
  // in practice.
  std::vector<double> poly{1.0};
  auto mul_factor = [&poly](double h2) {
    std::vector<double> next(poly.size() + 2, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k] += poly[k] * h2;
      next[k + 2] += poly[k];
    }
    poly = std::move(next);
  };
  if (n % 2 == 0) {
    const int m = n / 2;
    for (int j = 2; j <= m; ++j) {
      const double h = 0.5 * (2.0 * j - 3.0);
      mul_factor(h * h);
    }
    // One extra power of |lambda| in front.
    poly.insert(poly.begin(), 0.0);
  } else {
    const int m = (n - 1) / 2;
    for (int j = 0; j < m; ++j) mul_factor(static_cast<double>(j) * j);
  }
  return poly;
}

double sample_hyp_heat_mixture(const std::vector<double>& coeffs, double kappa,
                               Rng& rng) {
  require(!coeffs.empty(), "heat mixture: empty coefficient list");
  require(kappa > 0.0, "heat mixture: kappa must be positive");
  // p_{y_j}(l) = beta_j l^j e^{-k^2 l^2 / 2} with y_j = chi_{j+1} / kappa and
  // beta_j = 2^{(1-j)/2} Gamma((j+1)/2)^{-1} kappa^{j+1}.
  std::vector<double> log_beta(coeffs.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double dj = static_cast<double>(j);
    log_beta[j] = 0.5 * (1.0 - dj) * std::log(2.0) -
                  std::lgamma(0.5 * (dj + 1.0)) + (dj + 1.0) * std::log(kappa);
  }
  const auto w = mixture_weights(coeffs, log_beta);
  const std::size_t j = pick_component(w, rng);
  return rng.chi(static_cast<double>(j) + 1.0) / kappa;
}

double sample_hyp_matern_mixture(const std::vector<double>& coeffs, double nu,
                                 double kappa, int n, Laplacian laplacian,
                                 Rng& rng) {
  require(std::isfinite(nu) && nu > 0.0, "matern mixture: need finite nu > 0");
  require(!coeffs.empty() &&
              coeffs.size() <= static_cast<std::size_t>(n),
          "matern mixture: power range must stay below n");
  const double gamma = matern_gamma(nu, kappa, n, laplacian);
  // p_{y_j}(l) = beta_j l^j (gamma + l^2)^{-nu-n/2}, y_j = sqrt(gamma x_j),
  // x_j ~ BetaPrime((j+1)/2, nu + (n-j-1)/2).
  std::vector<double> log_beta(coeffs.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double dj = static_cast<double>(j);
    const double b = nu + 0.5 * (n - dj - 1.0);
    log_beta[j] = std::log(2.0) - lbeta(0.5 * (dj + 1.0), b) +
                  b * std::log(gamma);
  }
  const auto w = mixture_weights(coeffs, log_beta);
  const std::size_t j = pick_component(w, rng);
  const double a = 0.5 * (static_cast<double>(j) + 1.0);
  const double b = nu + 0.5 * (n - static_cast<double>(j) - 1.0);
  return std::sqrt(gamma * rng.beta_prime(a, b));
}

SpectralDraw rejection_sample_hyp(const KernelSpec& spec, int n, Rng& rng) {
  validate(spec);
  require(n >= 2, "rejection_sample_hyp: need n >= 2");
  const auto coeffs = hyp_polynomial_coeffs(n);
  const bool even = n % 2 == 0;
  SpectralDraw out;
  double lambda = 0.0;
  for (long it = 0; it < kRejectionCap; ++it) {
    lambda = spec.is_heat()
                 ? sample_hyp_heat_mixture(coeffs, spec.kappa, rng)
                 : sample_hyp_matern_mixture(coeffs, spec.nu, spec.kappa, n,
                                             spec.laplacian, rng);
    ++out.proposals;
    if (!even || rng.uniform() < std::tanh(M_PI * lambda)) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      out.lambda = Eigen::VectorXd::Constant(1, sign * lambda);
      return out;
    }
  }
  throw std::runtime_error("rejection_sample_hyp: iteration cap reached");
}

Eigen::VectorXd sample_goe_eigs(int d, Rng& rng) {
  require(d >= 2, "sample_goe_eigs: need d >= 2");
  Eigen::MatrixXd x(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
  const Eigen::MatrixXd m = 0.5 * (x + x.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  return eig.eigenvalues();
}

SpectralDraw rejection_sample_spd(const KernelSpec& spec, int d, Rng& rng) {
  validate(spec);
  require(d >= 2, "rejection_sample_spd: need d >= 2");
  const RhoData rho = rho_spd(d);
  SpectralDraw out;
  for (long it = 0; it < kRejectionCap; ++it) {
    Eigen::VectorXd lambda = sample_goe_eigs(d, rng);
    if (spec.is_heat()) {
      lambda /= spec.kappa;
    } else {
      const double shift =
          spec.laplacian == Laplacian::ordinary ? rho.norm_sq : 0.0;
      const double gamma =
          1.0 / std::sqrt(2.0 * spec.nu / (spec.kappa * spec.kappa) + shift);
      const double y = rng.chi(2.0 * spec.nu);
      lambda = (lambda / gamma) / y;
    }
    ++out.proposals;
    double acc = 1.0;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        acc *= std::tanh(0.5 * M_PI * std::abs(lambda[i] - lambda[j]));
      }
    }
    if (rng.uniform() < acc) {
      // Store unsorted: a uniform shuffle makes the coordinates exchangeable,
      // matching the symmetric target density.
      for (int i = d - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.below(i + 1));
        std::swap(lambda[i], lambda[j]);
      }
      out.lambda = lambda;
      return out;
    }
  }
  throw std::runtime_error("rejection_sample_spd: iteration cap reached");
}

AcceptanceEstimate acceptance_rate(const KernelSpec& spec, SpaceId space,
                                   long trials, Rng& rng) {
  validate(spec);
  require(trials >= 1, "acceptance_rate: need at least one trial");
  if (space.kind == Space::hyperbolic && space.dim % 2 == 1) {
    return {1.0, 0.0};
  }
  long accepted = 0;
  if (space.kind == Space::hyperbolic) {
    const auto coeffs = hyp_polynomial_coeffs(space.dim);
    for (long i = 0; i < trials; ++i) {
      const double lambda =
          spec.is_heat()
              ? sample_hyp_heat_mixture(coeffs, spec.kappa, rng)
              : sample_hyp_matern_mixture(coeffs, spec.nu, spec.kappa,
                                          space.dim, spec.laplacian, rng);
      if (rng.uniform() < std::tanh(M_PI * lambda)) ++accepted;
    }
  } else {
    const int d = space.dim;
    const RhoData rho = rho_spd(d);
    for (long i = 0; i < trials; ++i) {
      Eigen::VectorXd lambda = sample_goe_eigs(d, rng);
      if (spec.is_heat()) {
        lambda /= spec.kappa;
      } else {
        const double shift =
            spec.laplacian == Laplacian::ordinary ? rho.norm_sq : 0.0;
        const double gamma =
            1.0 / std::sqrt(2.0 * spec.nu / (spec.kappa * spec.kappa) + shift);
        lambda = (lambda / gamma) / rng.chi(2.0 * spec.nu);
      }
      double acc = 1.0;
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
          acc *= std::tanh(0.5 * M_PI * std::abs(lambda[a] - lambda[b]));
      if (rng.uniform() < acc) ++accepted;
    }
  }
  const double p = static_cast<double>(accepted) / static_cast<double>(trials);
  const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) /
                              static_cast<double>(trials));
  return {p, se};
}

}  // namespace symkern
