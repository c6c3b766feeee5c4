#include "symkern/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace symkern {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::MatrixXd cross_kernel(const KernelFn& kernel,
                             std::span<const ManifoldPoint> a,
                             std::span<const ManifoldPoint> b) {
  Eigen::MatrixXd k(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) k(i, j) = kernel(a[i], b[j]);
  return k;
}

Eigen::MatrixXd gram(const KernelFn& kernel,
                     std::span<const ManifoldPoint> pts) {
  Eigen::MatrixXd k(pts.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i; j < pts.size(); ++j) {
      k(i, j) = kernel(pts[i], pts[j]);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

// Cholesky of K + diag(noise), escalating jitter 1e-10 -> 1e-6.
Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& k,
                                      const Eigen::VectorXd& noise) {
  Eigen::MatrixXd a = k;
  a.diagonal() += noise;
  for (double jitter : {0.0, 1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXd aj = a;
    aj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(aj);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw std::runtime_error("gp: factorization failed at maximum jitter");
}

struct GramSet {
  Eigen::MatrixXd k_xx;
  Eigen::MatrixXd k_qx;
  Eigen::MatrixXd k_qq;
};

GramSet grams_from_basis(const FeatureBasis& basis, const Dataset& data,
                         std::span<const ManifoldPoint> query) {
  const Eigen::MatrixXcd phi_x = feature_matrix(basis, data.points);
  const Eigen::MatrixXcd phi_q = feature_matrix(basis, query);
  GramSet g;
  g.k_xx = (phi_x * phi_x.adjoint()).real();
  g.k_qx = (phi_q * phi_x.adjoint()).real();
  g.k_qq = (phi_q * phi_q.adjoint()).real();
  g.k_xx = 0.5 * (g.k_xx + g.k_xx.transpose()).eval();
  g.k_qq = 0.5 * (g.k_qq + g.k_qq.transpose()).eval();
  return g;
}

GramSet grams_from_kernel(const KernelFn& kernel, const Dataset& data,
                          std::span<const ManifoldPoint> query) {
  GramSet g;
  g.k_xx = gram(kernel, data.points);
  g.k_qx = cross_kernel(kernel, query, data.points);
  g.k_qq = gram(kernel, query);
  return g;
}

PosteriorMoments moments_impl(const GramSet& g, const Dataset& data) {
  PosteriorMoments out;
  if (data.size() == 0) {
    out.mean = Eigen::VectorXd::Zero(g.k_qq.rows());
    out.cov = g.k_qq;
    return out;
  }
  const auto llt = factorize(g.k_xx, data.noise);
  out.mean = g.k_qx * llt.solve(data.y);
  out.cov = g.k_qq - g.k_qx * llt.solve(g.k_qx.transpose());
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

double lml_impl(const Eigen::MatrixXd& k_xx, const Dataset& data) {
  const auto llt = factorize(k_xx, data.noise);
  const Eigen::VectorXd alpha = llt.solve(data.y);
  double log_det = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  const double n = static_cast<double>(data.size());
  return -0.5 * data.y.dot(alpha) - 0.5 * log_det - 0.5 * n * std::log(2.0 * M_PI);
}

}  // namespace

void validate(const Dataset& data) {
  require(static_cast<Eigen::Index>(data.size()) == data.y.size() &&
              data.y.size() == data.noise.size(),
          "dataset: points, y and noise lengths must agree");
  require((data.noise.array() > 0.0).all(),
          "dataset: noise variances must be positive");
  if (!data.points.empty()) {
    const SpaceId space = space_of(data.points.front());
    for (const auto& p : data.points) {
      require(space_of(p) == space, "dataset: mixed spaces");
      validate(p);
    }
  }
}

PosteriorMoments posterior_moments(const FeatureBasis& basis,
                                   const Dataset& data,
                                   std::span<const ManifoldPoint> query) {
  validate(data);
  return moments_impl(grams_from_basis(basis, data, query), data);
}

PosteriorMoments posterior_moments(const KernelFn& kernel, const Dataset& data,
                                   std::span<const ManifoldPoint> query) {
  validate(data);
  return moments_impl(grams_from_kernel(kernel, data, query), data);
}

Eigen::MatrixXd posterior_sample_batch(const FeatureBasis& basis,
                                       const Dataset& data,
                                       std::span<const ManifoldPoint> query,
                                       int n_paths, Rng& rng) {
  validate(data);
  require(n_paths >= 1, "posterior_sample_batch: need at least one path");
  const Eigen::MatrixXcd phi_q = feature_matrix(basis, query);
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto m = static_cast<Eigen::Index>(query.size());

  if (n == 0) {
    Eigen::MatrixXd out(n_paths, m);
    for (int p = 0; p < n_paths; ++p) {
      Eigen::VectorXcd w(basis.count);
      for (int l = 0; l < basis.count; ++l) w[l] = rng.normal_complex();
      out.row(p) = (phi_q * w).real().transpose();
    }
    return out;
  }

  const Eigen::MatrixXcd phi_x = feature_matrix(basis, data.points);
  Eigen::MatrixXd k_xx = (phi_x * phi_x.adjoint()).real();
  k_xx = 0.5 * (k_xx + k_xx.transpose()).eval();
  const Eigen::MatrixXd k_qx = (phi_q * phi_x.adjoint()).real();
  const auto llt = factorize(k_xx, data.noise);

  Eigen::MatrixXd out(n_paths, m);
  const Eigen::VectorXd noise_sd = data.noise.array().sqrt();
  for (int p = 0; p < n_paths; ++p) {
    // Fresh prior path, then the data-driven update
    // f(.) + K_(.)x (K_xx + S)^{-1} (y - f(x) - eps).
    Eigen::VectorXcd w(basis.count);
    for (int l = 0; l < basis.count; ++l) w[l] = rng.normal_complex();
    const Eigen::VectorXd f_q = (phi_q * w).real();
    const Eigen::VectorXd f_x = (phi_x * w).real();
    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps[i] = noise_sd[i] * rng.normal();
    const Eigen::VectorXd update = llt.solve(data.y - f_x - eps);
    out.row(p) = (f_q + k_qx * update).transpose();
  }
  return out;
}

Eigen::VectorXd posterior_sample(const FeatureBasis& basis, const Dataset& data,
                                 std::span<const ManifoldPoint> query,
                                 Rng& rng) {
  return posterior_sample_batch(basis, data, query, 1, rng).row(0);
}

double log_marginal_likelihood(const FeatureBasis& basis, const Dataset& data) {
  validate(data);
  require(data.size() > 0, "log_marginal_likelihood: empty dataset");
  const Eigen::MatrixXcd phi_x = feature_matrix(basis, data.points);
  Eigen::MatrixXd k_xx = (phi_x * phi_x.adjoint()).real();
  k_xx = 0.5 * (k_xx + k_xx.transpose()).eval();
  return lml_impl(k_xx, data);
}

double log_marginal_likelihood(const KernelFn& kernel, const Dataset& data) {
  validate(data);
  require(data.size() > 0, "log_marginal_likelihood: empty dataset");
  return lml_impl(gram(kernel, data.points), data);
}

}  // namespace symkern
