#include "symkern/features.hpp"

#include <cmath>
#include <stdexcept>

namespace symkern {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// exp((i lambda - rho)^T a) for real vectors lambda, rho, a. The -rho
// pairing is the orientation consistent with the NAH/RQ abelian coordinate;
// see the H_n Poincare-ball form, which this reproduces.
std::complex<double> feature_value(const Eigen::VectorXd& lambda,
                                   const Eigen::VectorXd& rho,
                                   const Eigen::VectorXd& a) {
  const double re = -rho.dot(a);
  const double im = lambda.dot(a);
  const double mag = std::exp(re);
  return {mag * std::cos(im), mag * std::sin(im)};
}

// a(h g) for a group element g, general path.
Eigen::VectorXd abelian_of(const Eigen::MatrixXd& h, const GroupElement& g) {
  if (g.space == Space::hyperbolic) {
    const auto n = g.M.rows() - 1;
    // t depends on h g only through (h g) e0 = h (g e0).
    const Eigen::VectorXd x = g.M.col(0);
    const double w = x[0] + h.row(0).dot(x.tail(n));
    return Eigen::VectorXd::Constant(1, std::log(w));
  }
  return rq_decompose(h * g.M).log_u();
}

// Importance proposal lambda ~ p_{nu, kappa} (Gaussian or generalized-t).
Eigen::VectorXd importance_proposal(const KernelSpec& spec, SpaceId space,
                                    const RhoData& rho, Rng& rng) {
  const int n_dim = manifold_dim(space);
  const double shift =
      spec.laplacian == Laplacian::ordinary ? rho.norm_sq : 0.0;
  if (space.kind == Space::hyperbolic) {
    if (spec.is_heat()) {
      return Eigen::VectorXd::Constant(
          1, std::abs(rng.normal()) / spec.kappa);
    }
    // (gamma + l^2)^{-nu-n/2} on l > 0 is the j = 0 mixture component.
    const double gamma = 2.0 * spec.nu / (spec.kappa * spec.kappa) + shift;
    const double b = spec.nu + 0.5 * (n_dim - 1.0);
    return Eigen::VectorXd::Constant(
        1, std::sqrt(gamma * rng.beta_prime(0.5, b)));
  }
  const int d = space.dim;
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z[i] = rng.normal();
  if (spec.is_heat()) return z / spec.kappa;
  const double a = 2.0 * spec.nu / (spec.kappa * spec.kappa) + shift;
  const double dof = 2.0 * spec.nu + (n_dim - d);
  return std::sqrt(a) * z / rng.chi(dof);
}

}  // namespace

FeatureBasis build_basis(const KernelSpec& spec, SpaceId space, int count,
                         SamplingMethod method, Rng& rng,
                         std::uint64_t seed_provenance) {
  validate(spec);
  require(count >= 1, "build_basis: need at least one feature");
  require(space.dim >= 2, "build_basis: need dim >= 2");

  FeatureBasis basis;
  basis.space = space;
  basis.spec = spec;
  basis.count = count;
  basis.method = method;
  basis.rho = rho_of(space);
  basis.seed = seed_provenance;
  basis.lambdas.reserve(count);
  basis.isotropy.reserve(count);
  basis.weights.reserve(count);

  for (int l = 0; l < count; ++l) {
    if (method == SamplingMethod::rejection) {
      Eigen::VectorXd lambda =
          space.kind == Space::hyperbolic
              ? rejection_sample_hyp(spec, space.dim, rng).lambda
              : rejection_sample_spd(spec, space.dim, rng).lambda;
      if (space.kind == Space::hyperbolic) lambda = lambda.cwiseAbs();
      basis.lambdas.push_back(std::move(lambda));
    } else {
      basis.lambdas.push_back(importance_proposal(spec, space, basis.rho, rng));
    }
    basis.isotropy.push_back(haar_isotropy(space, rng));
    basis.weights.push_back(rng.normal_complex());
  }

  if (method == SamplingMethod::importance) {
    // Self-normalized weights |c(l)|^{-1} C''^{-1/2} with
    // C'' = (1/L) sum |c(l)|^{-2}, so the Gram at coincident base points
    // averages to exactly sigma2.
    std::vector<double> c_inv_sq(count);
    double mean = 0.0;
    for (int l = 0; l < count; ++l) {
      c_inv_sq[l] = space.kind == Space::hyperbolic
                        ? c_inv_sq_hyp(basis.lambdas[l][0], space.dim)
                        : c_inv_sq_spd(basis.lambdas[l]);
      mean += c_inv_sq[l];
    }
    mean /= count;
    require(mean > 0.0, "build_basis: degenerate importance weights");
    basis.importance_weights.resize(count);
    for (int l = 0; l < count; ++l) {
      basis.importance_weights[l] = std::sqrt(c_inv_sq[l] / mean);
    }
  }
  return basis;
}

FeatureBasis with_fresh_weights(const FeatureBasis& basis, Rng& rng) {
  FeatureBasis out = basis;
  for (auto& w : out.weights) w = rng.normal_complex();
  return out;
}

Eigen::VectorXd log_feature_exponent(const ManifoldPoint& x,
                                     const Eigen::MatrixXd& h) {
  const SpaceId space = space_of(x);
  require(h.rows() == space.dim && h.cols() == space.dim,
          "log_feature_exponent: isotropy element has the wrong size");
  if (space.kind == Space::hyperbolic) {
    const auto& p = std::get<HyperbolicPoint>(x);
    const double w = p.v[0] + h.row(0).dot(p.v.tail(space.dim));
    return Eigen::VectorXd::Constant(1, std::log(w));
  }
  return abelian_of(h, point_to_group(x));
}

Eigen::VectorXcd feature_map(const FeatureBasis& basis,
                             const ManifoldPoint& x) {
  require(space_of(x) == basis.space, "feature_map: space mismatch");
  const double scale = std::sqrt(basis.spec.sigma2 / basis.count);
  Eigen::VectorXcd phi(basis.count);
  const bool imp = !basis.importance_weights.empty();

  if (basis.space.kind == Space::hyperbolic) {
    const auto& p = std::get<HyperbolicPoint>(x);
    const int n = basis.space.dim;
    const double rho = basis.rho.rho[0];
    const Eigen::VectorXd xv = p.v.tail(n);
    for (int l = 0; l < basis.count; ++l) {
      const double w = p.v[0] + basis.isotropy[l].row(0).dot(xv);
      const double t = std::log(w);
      const double mag = std::exp(-rho * t);
      const double ph = basis.lambdas[l][0] * t;
      std::complex<double> v{mag * std::cos(ph), mag * std::sin(ph)};
      if (imp) v *= basis.importance_weights[l];
      phi[l] = scale * v;
    }
    return phi;
  }

  const GroupElement g = point_to_group(x);
  for (int l = 0; l < basis.count; ++l) {
    const Eigen::VectorXd a = abelian_of(basis.isotropy[l], g);
    std::complex<double> v = feature_value(basis.lambdas[l], basis.rho.rho, a);
    if (imp) v *= basis.importance_weights[l];
    phi[l] = scale * v;
  }
  return phi;
}

Eigen::MatrixXcd feature_matrix(const FeatureBasis& basis,
                                std::span<const ManifoldPoint> points) {
  Eigen::MatrixXcd phi(points.size(), basis.count);
  for (std::size_t i = 0; i < points.size(); ++i) {
    phi.row(i) = feature_map(basis, points[i]).transpose();
  }
  return phi;
}

double kernel_estimate(const FeatureBasis& basis, const ManifoldPoint& x,
                       const ManifoldPoint& y, EstimatorMode mode) {
  require(space_of(x) == basis.space && space_of(y) == basis.space,
          "kernel_estimate: space mismatch");
  if (mode == EstimatorMode::psd) {
    const Eigen::VectorXcd phi_x = feature_map(basis, x);
    const Eigen::VectorXcd phi_y = feature_map(basis, y);
    return phi_y.dot(phi_x).real();  // <phi(x), phi(y)> with Eigen's conj
  }
  // Plain pointwise estimator at the group difference g = g_y^{-1} g_x.
  const GroupElement g =
      compose(inverse(point_to_group(y)), point_to_group(x));
  const bool imp = !basis.importance_weights.empty();
  std::complex<double> acc{0.0, 0.0};
  for (int l = 0; l < basis.count; ++l) {
    const Eigen::VectorXd a = abelian_of(basis.isotropy[l], g);
    std::complex<double> v = feature_value(basis.lambdas[l], basis.rho.rho, a);
    if (imp) {
      const double iw = basis.importance_weights[l];
      v *= iw * iw;
    }
    acc += v;
  }
  return basis.spec.sigma2 * acc.real() / basis.count;
}

Eigen::MatrixXd kernel_matrix(const FeatureBasis& basis,
                              std::span<const ManifoldPoint> points) {
  require(!points.empty(), "kernel_matrix: empty point list");
  const Eigen::MatrixXcd phi = feature_matrix(basis, points);
  Eigen::MatrixXd k = (phi * phi.adjoint()).real();
  return 0.5 * (k + k.transpose());
}

Eigen::VectorXd prior_sample(const FeatureBasis& basis,
                             std::span<const ManifoldPoint> points) {
  require(!points.empty(), "prior_sample: empty point list");
  const Eigen::MatrixXcd phi = feature_matrix(basis, points);
  Eigen::VectorXcd w(basis.count);
  for (int l = 0; l < basis.count; ++l) w[l] = basis.weights[l];
  return (phi * w).real();
}

namespace {

McEstimate mc_from_samples(const std::vector<std::complex<double>>& vals) {
  std::complex<double> mean{0.0, 0.0};
  for (const auto& v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (const auto& v : vals) var += std::norm(v - mean);
  var /= std::max<std::size_t>(1, vals.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(vals.size()))};
}

}  // namespace

McEstimate zonal_spherical_mc(const Eigen::VectorXd& lambda,
                              const ManifoldPoint& x, int count, Rng& rng) {
  require(count >= 1, "zonal_spherical_mc: need at least one sample");
  const SpaceId space = space_of(x);
  const RhoData rho = rho_of(space);
  const GroupElement g = point_to_group(x);
  std::vector<std::complex<double>> vals(count);
  for (int l = 0; l < count; ++l) {
    const Eigen::MatrixXd h = haar_isotropy(space, rng);
    vals[l] = feature_value(lambda, rho.rho, abelian_of(h, g));
  }
  return mc_from_samples(vals);
}

McEstimate zonal_spherical_hyp_ball(double lambda, const Eigen::VectorXd& ball,
                                    int count, Rng& rng) {
  require(count >= 1, "zonal_spherical_hyp_ball: need at least one sample");
  require(ball.squaredNorm() < 1.0,
          "zonal_spherical_hyp_ball: point must lie inside the unit ball");
  const auto n = ball.size();
  const double rho = 0.5 * (static_cast<double>(n) - 1.0);
  const double one_minus = 1.0 - ball.squaredNorm();
  std::vector<std::complex<double>> vals(count);
  Eigen::VectorXd u(n);
  for (int l = 0; l < count; ++l) {
    do {
      for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.normal();
    } while (u.norm() < 1e-12);
    u.normalize();
    const double base = one_minus / (ball - u).squaredNorm();
    const double lt = std::log(base);
    const double mag = std::exp(rho * lt);
    vals[l] = {mag * std::cos(lambda * lt), mag * std::sin(lambda * lt)};
  }
  return mc_from_samples(vals);
}

RealEstimate limiting_kernel(const ManifoldPoint& x, const ManifoldPoint& y,
                             int count, Rng& rng) {
  require(space_of(x) == space_of(y), "limiting_kernel: space mismatch");
  const SpaceId space = space_of(x);
  const RhoData rho = rho_of(space);
  const GroupElement g =
      compose(inverse(point_to_group(y)), point_to_group(x));
  double mean = 0.0, m2 = 0.0;
  for (int l = 1; l <= count; ++l) {
    const Eigen::MatrixXd h = haar_isotropy(space, rng);
    const Eigen::VectorXd a = abelian_of(h, g);
    const double v = std::exp(-rho.rho.dot(a));
    const double delta = v - mean;
    mean += delta / l;
    m2 += delta * (v - mean);
  }
  const double var = count > 1 ? m2 / (count - 1) : 0.0;
  return {mean, std::sqrt(var / count)};
}

}  // namespace symkern
