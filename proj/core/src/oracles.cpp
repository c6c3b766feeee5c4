#include "symkern/oracles.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace symkern {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double rho_over_sinh(double rho) {
  if (rho < 1e-8) return 1.0 - rho * rho / 6.0;
  return rho / std::sinh(rho);
}

// exp(-x) is an exact zero at double precision for x beyond this; returning
// zero early keeps inf * 0 out of the quadrature nodes.
bool exp_underflows(double x) { return x > 700.0; }

double integrate_0_inf(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0, l1 = 0.0;
  const double value = integrator.integrate(f, 1e-10, &error, &l1);
  if (!(std::isfinite(value)) || (l1 > 0.0 && error > 1e-8 * l1)) {
    throw std::runtime_error("oracle quadrature did not converge");
  }
  return value;
}

// One term c rho^p cosh^q(rho) sinh^{-m}(rho); a heat-kernel prefactor is a
// sum of these in front of the Gaussian exp(-rho^2 / 2 kappa^2).
struct MillsonTerm {
  double c;
  int p;
  int q;
  int m;
};

std::vector<MillsonTerm> millson_terms(int n, double kappa) {
  // Start from H_3: prefactor rho / sinh(rho).
  std::vector<MillsonTerm> terms{{1.0, 1, 0, 1}};
  const double inv_k2 = 1.0 / (kappa * kappa);
  for (int dim = 5; dim <= n; dim += 2) {
    std::vector<MillsonTerm> next;
    next.reserve(3 * terms.size());
    for (const auto& t : terms) {
      // d/drho of rho^p cosh^q sinh^{-m}, then the Gaussian chain term,
      // then multiply by -1/sinh.
      if (t.p > 0) next.push_back({-t.c * t.p, t.p - 1, t.q, t.m + 1});
      if (t.q > 0) next.push_back({-t.c * t.q, t.p, t.q - 1, t.m});
      next.push_back({t.c * t.m, t.p, t.q + 1, t.m + 2});
      next.push_back({t.c * inv_k2, t.p + 1, t.q, t.m + 1});
    }
    terms = std::move(next);
  }
  return terms;
}

double millson_prefactor(const std::vector<MillsonTerm>& terms, double rho) {
  const double ch = std::cosh(rho);
  const double sh = std::sinh(rho);
  double out = 0.0;
  for (const auto& t : terms) {
    out += t.c * std::pow(rho, t.p) * std::pow(ch, t.q) / std::pow(sh, t.m);
  }
  return out;
}

double millson_unnormalized(const std::vector<MillsonTerm>& terms, double rho,
                            double kappa) {
  return millson_prefactor(terms, rho) *
         std::exp(-rho * rho / (2.0 * kappa * kappa));
}

}  // namespace

double heat_h3(double rho, double kappa) {
  require(rho >= 0.0, "heat_h3: distance must be nonnegative");
  require(kappa > 0.0, "heat_h3: kappa must be positive");
  return rho_over_sinh(rho) * std::exp(-rho * rho / (2.0 * kappa * kappa));
}

double heat_h2(double rho, double kappa) {
  require(rho >= 0.0, "heat_h2: distance must be nonnegative");
  require(kappa > 0.0, "heat_h2: kappa must be positive");
  const double k2 = 2.0 * kappa * kappa;

  auto at_zero = [&]() {
    // cosh s - 1 = 2 sinh^2(s/2)
    return integrate_0_inf([&](double s) {
      if (s < 1e-12) return std::sqrt(2.0);
      if (exp_underflows(s * s / k2)) return 0.0;
      return s * std::exp(-s * s / k2) / (std::sqrt(2.0) * std::sinh(0.5 * s));
    });
  };
  const double norm = at_zero();
  if (rho == 0.0) return 1.0;

  // s = rho + u^2 removes the inverse-square-root endpoint.
  const double value = integrate_0_inf([&](double u) {
    const double s = rho + u * u;
    if (exp_underflows(s * s / k2)) return 0.0;
    const double d = std::cosh(s) - std::cosh(rho);
    if (d <= 0.0) {
      // first-order expansion at the endpoint
      return 2.0 * rho * std::exp(-rho * rho / k2) / std::sqrt(std::sinh(rho));
    }
    return 2.0 * u * s * std::exp(-s * s / k2) / std::sqrt(d);
  });
  return value / norm;
}

double heat_hn_millson(int n, double rho, double kappa) {
  require(n > 3 && n % 2 == 1,
          "heat_hn_millson: only odd dimensions above 3 are supported");
  require(rho >= 0.0, "heat_hn_millson: distance must be nonnegative");
  require(kappa > 0.0, "heat_hn_millson: kappa must be positive");
  const auto terms = millson_terms(n, kappa);
  // Normalize by the rho -> 0 limit, Richardson-extrapolated in rho^2 from
  // two small evaluation points.
  const double r0 = 0.02;
  const double k_half = millson_unnormalized(terms, 0.5 * r0, kappa);
  const double k_full = millson_unnormalized(terms, r0, kappa);
  const double at_zero = (4.0 * k_half - k_full) / 3.0;
  // Below r_min the term evaluation cancels catastrophically; interpolate
  // the even Taylor profile through the r_min value instead.
  const double r_min = 5e-3;
  if (rho < r_min) {
    const double k_min = millson_unnormalized(terms, r_min, kappa) / at_zero;
    const double frac = rho / r_min;
    return 1.0 + (k_min - 1.0) * frac * frac;
  }
  return millson_unnormalized(terms, rho, kappa) / at_zero;
}

double heat_spd2(const SpdPoint& x, const SpdPoint& y, double kappa) {
  require(x.d() == 2 && y.d() == 2, "heat_spd2: inputs must be 2 x 2");
  require(kappa > 0.0, "heat_spd2: kappa must be positive");
  validate(x);
  validate(y);

  // H_i = half the log generalized eigenvalues of (X, Y).
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(x.S, y.S);
  require(eig.info() == Eigen::Success, "heat_spd2: eigensolver failed");
  const Eigen::VectorXd h = 0.5 * eig.eigenvalues().array().log();
  const double h1 = std::max(h[0], h[1]);
  const double h2 = std::min(h[0], h[1]);
  const double alpha = h1 - h2;
  const double k2 = kappa * kappa;

  // s = u^2 removes the sinh^{-1/2} endpoint singularity.
  auto integral = [&](double a) {
    return integrate_0_inf([&](double u) {
      const double s = u * u;
      if (exp_underflows(s * (s + a) / k2)) return 0.0;
      const double body = (2.0 * s + a) * std::exp(-s * (s + a) / k2);
      if (u < 1e-8) {
        const double sa = s + a;
        if (sa < 1e-12) return 4.0 * u;  // a = 0 limit
        return 2.0 * body / std::sqrt(std::sinh(sa));
      }
      return 2.0 * u * body / std::sqrt(std::sinh(s) * std::sinh(s + a));
    });
  };

  const double value =
      std::exp(-(h1 * h1 + h2 * h2) / (2.0 * k2)) * integral(alpha);
  const double norm = integral(0.0);
  return value / norm;
}

double heat_solution_h3(double t, double rho) {
  // t^{-3/2} e^{-t} carries the full time dependence of the H_3 kernel.
  if (exp_underflows(t + rho * rho / (4.0 * t))) return 0.0;
  return std::pow(t, -1.5) * std::exp(-t) * rho_over_sinh(rho) *
         std::exp(-rho * rho / (4.0 * t));
}

double heat_solution_hn_millson(int n, double t, double rho) {
  require(n > 3 && n % 2 == 1,
          "heat_solution_hn_millson: only odd dimensions above 3");
  const double kappa = std::sqrt(2.0 * t);
  const double rho_sq_norm = 0.25 * (n - 1.0) * (n - 1.0);
  const auto terms = millson_terms(n, kappa);
  const double r = std::max(rho, 1e-6);
  if (exp_underflows(t * rho_sq_norm + r * r / (4.0 * t))) return 0.0;
  return std::pow(t, -0.5 * n) * std::exp(-t * rho_sq_norm) *
         millson_prefactor(terms, r) * std::exp(-r * r / (4.0 * t));
}

double matern_from_heat(
    const std::function<double(double, double)>& heat_solution, double nu,
    double kappa, int n_dim, double rho) {
  require(std::isfinite(nu) && nu > 0.0, "matern_from_heat: need finite nu > 0");
  require(kappa > 0.0, "matern_from_heat: kappa must be positive");
  require(rho >= 0.0, "matern_from_heat: distance must be nonnegative");
  const double decay = 2.0 * nu / (kappa * kappa);
  const double power = nu - 1.0 + 0.5 * n_dim;
  auto weighted = [&](double u, double r) {
    if (exp_underflows(decay * u)) return 0.0;
    return std::pow(u, power) * std::exp(-decay * u) * heat_solution(u, r);
  };
  const double value = integrate_0_inf([&](double u) { return weighted(u, rho); });
  const double norm = integrate_0_inf([&](double u) { return weighted(u, 0.0); });
  return value / norm;
}

double matern_h3(double nu, double kappa, double rho) {
  return matern_from_heat(heat_solution_h3, nu, kappa, 3, rho);
}

}  // namespace symkern
