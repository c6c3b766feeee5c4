#include "symkern/manifolds.hpp"

#include <cmath>
#include <stdexcept>

namespace symkern {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::MatrixXd minkowski_gram(int n) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n + 1, n + 1);
  b(0, 0) = -1.0;
  return b;
}

}  // namespace

int manifold_dim(SpaceId space) {
  return space.kind == Space::hyperbolic ? space.dim
                                         : space.dim * (space.dim + 1) / 2;
}

SpaceId space_of(const ManifoldPoint& x) {
  if (const auto* h = std::get_if<HyperbolicPoint>(&x)) {
    return {Space::hyperbolic, h->n()};
  }
  return {Space::spd, std::get<SpdPoint>(x).d()};
}

void validate(const HyperbolicPoint& x, double tol) {
  require(x.v.size() >= 3, "hyperbolic point: need n >= 2");
  require(std::abs(minkowski_form(x.v, x.v) + 1.0) <= tol,
          "hyperbolic point: Minkowski norm must be -1");
  require(x.v[0] >= 1.0 - tol, "hyperbolic point: not on the forward sheet");
}

void validate(const SpdPoint& x, double tol) {
  require(x.S.rows() == x.S.cols() && x.S.rows() >= 2, "spd point: need d >= 2");
  require((x.S - x.S.transpose()).cwiseAbs().maxCoeff() <= tol,
          "spd point: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x.S);
  require(eig.eigenvalues().minCoeff() > 0.0,
          "spd point: matrix must be positive definite");
}

void validate(const ManifoldPoint& x) {
  std::visit([](const auto& p) { validate(p); }, x);
}

HyperbolicPoint hyperbolic_base_point(int n) {
  require(n >= 2, "hyperbolic base point: need n >= 2");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n + 1);
  v[0] = 1.0;
  return {v};
}

SpdPoint spd_identity(int d) {
  require(d >= 2, "spd identity: need d >= 2");
  return {Eigen::MatrixXd::Identity(d, d)};
}

ManifoldPoint base_point(SpaceId space) {
  if (space.kind == Space::hyperbolic) {
    return hyperbolic_base_point(space.dim);
  }
  return spd_identity(space.dim);
}

double minkowski_form(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  require(u.size() == v.size(), "minkowski form: dimension mismatch");
  require(u.size() >= 2, "minkowski form: need at least two coordinates");
  return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

double dist_hyperbolic(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  require(x.v.size() == y.v.size(), "dist_hyperbolic: dimension mismatch");
  double c = -minkowski_form(x.v, y.v);
  if (c < 1.0) {
    require(c >= 1.0 - 1e-9, "dist_hyperbolic: arccosh argument below 1");
    c = 1.0;
  }
  return std::acosh(c);
}

HyperbolicPoint ball_to_hyperboloid(const Eigen::VectorXd& b) {
  const double r2 = b.squaredNorm();
  require(r2 < 1.0, "ball_to_hyperboloid: point must lie inside the unit ball");
  Eigen::VectorXd v(b.size() + 1);
  v[0] = (1.0 + r2) / (1.0 - r2);
  v.tail(b.size()) = 2.0 * b / (1.0 - r2);
  return {v};
}

Eigen::VectorXd hyperboloid_to_ball(const HyperbolicPoint& x) {
  return x.v.tail(x.n()) / (1.0 + x.v[0]);
}

double dist_spd(const SpdPoint& s1, const SpdPoint& s2) {
  require(s1.d() == s2.d(), "dist_spd: dimension mismatch");
  validate(s1);
  validate(s2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig1(s1.S);
  const Eigen::MatrixXd inv_sqrt =
      eig1.operatorInverseSqrt();
  Eigen::MatrixXd c = inv_sqrt * s2.S * inv_sqrt;
  c = 0.5 * (c + c.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(c);
  return eig2.eigenvalues().array().log().matrix().norm();
}

double dist(const ManifoldPoint& x, const ManifoldPoint& y) {
  require(space_of(x) == space_of(y), "dist: points live on different spaces");
  if (const auto* h = std::get_if<HyperbolicPoint>(&x)) {
    return dist_hyperbolic(*h, std::get<HyperbolicPoint>(y));
  }
  return dist_spd(std::get<SpdPoint>(x), std::get<SpdPoint>(y));
}

void validate(const GroupElement& g, double tol) {
  const auto n = g.M.rows();
  require(n == g.M.cols(), "group element: matrix must be square");
  if (g.space == Space::hyperbolic) {
    const Eigen::MatrixXd b = minkowski_gram(static_cast<int>(n) - 1);
    require((g.M.transpose() * b * g.M - b).cwiseAbs().maxCoeff() <= tol,
            "group element: does not preserve the Minkowski form");
    require(std::abs(g.M.determinant() - 1.0) <= tol,
            "group element: determinant must be 1");
    require(g.M(0, 0) > 0.0, "group element: not in the identity component");
  } else {
    require(std::abs(g.M.determinant()) > 1e-12,
            "group element: matrix must be invertible");
  }
}

GroupElement identity_element(SpaceId space) {
  const int n = space.kind == Space::hyperbolic ? space.dim + 1 : space.dim;
  return {space.kind, Eigen::MatrixXd::Identity(n, n)};
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  require(a.space == b.space && a.M.rows() == b.M.rows(),
          "compose: mismatched group elements");
  return {a.space, a.M * b.M};
}

GroupElement inverse(const GroupElement& g) {
  if (g.space == Space::hyperbolic) {
    // M^{-1} = B M^T B for Lorentz matrices.
    const Eigen::MatrixXd b = minkowski_gram(static_cast<int>(g.M.rows()) - 1);
    return {g.space, b * g.M.transpose() * b};
  }
  return {g.space, g.M.inverse()};
}

ManifoldPoint act(const GroupElement& g, const ManifoldPoint& x) {
  if (g.space == Space::hyperbolic) {
    const auto& h = std::get<HyperbolicPoint>(x);
    require(g.M.rows() == h.v.size(), "apply: dimension mismatch");
    return HyperbolicPoint{g.M * h.v};
  }
  const auto& s = std::get<SpdPoint>(x);
  require(g.M.rows() == s.S.rows(), "apply: dimension mismatch");
  Eigen::MatrixXd out = g.M * s.S * g.M.transpose();
  return SpdPoint{0.5 * (out + out.transpose())};
}

GroupElement hyperbolic_boost(double t, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n + 1, n + 1);
  m(0, 0) = m(1, 1) = std::cosh(t);
  m(0, 1) = m(1, 0) = std::sinh(t);
  return {Space::hyperbolic, m};
}

Eigen::MatrixXd hyperbolic_unipotent(const Eigen::VectorXd& b) {
  const auto k = b.size();  // n - 1
  const double delta = 0.5 * b.squaredNorm();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k + 2, k + 2);
  m(0, 0) = 1.0 + delta;
  m(0, 1) = delta;
  m(1, 0) = -delta;
  m(1, 1) = 1.0 - delta;
  m.block(0, 2, 1, k) = b.transpose();
  m.block(1, 2, 1, k) = -b.transpose();
  m.block(2, 0, k, 1) = b;
  m.block(2, 1, k, 1) = b;
  return m;
}

Eigen::MatrixXd embed_rotation(const Eigen::MatrixXd& rot) {
  const auto n = rot.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m(0, 0) = 1.0;
  m.block(1, 1, n, n) = rot;
  return m;
}

IwasawaData iwasawa_so1n(const GroupElement& g) {
  require(g.space == Space::hyperbolic, "iwasawa_so1n: hyperbolic elements only");
  validate(g);
  const auto n = g.M.rows() - 1;
  // The horospherical coordinate of x = M e0 determines the decomposition:
  // e^t = x0 + x1 and b = x_rest e^{-t}.
  const Eigen::VectorXd x = g.M.col(0);
  const double et = x[0] + x[1];
  require(et > 0.0, "iwasawa_so1n: degenerate horospherical coordinate");
  const double t = std::log(et);
  const Eigen::VectorXd b = x.tail(n - 1) / et;

  IwasawaData out;
  out.log_a = Eigen::VectorXd::Constant(1, t);
  out.n_part = hyperbolic_unipotent(b);
  out.h_part = hyperbolic_boost(-t, static_cast<int>(n)).M *
               hyperbolic_unipotent(-b) * g.M;
  return out;
}

RqDecomposition rq_decompose(const Eigen::MatrixXd& m) {
  const auto d = m.rows();
  require(d == m.cols() && d >= 1, "rq_decompose: matrix must be square");
  require(std::abs(m.determinant()) > 1e-300, "rq_decompose: singular matrix");

  // M = R Q reduces to a QR factorization of M^T with both index orders
  // reversed: with J the flip permutation, (M^T J) = Q1 R1 gives
  // R = J R1^T J and Q = J Q1^T.
  Eigen::MatrixXd a = m.transpose();
  for (Eigen::Index j = 0; j < d / 2; ++j) a.col(j).swap(a.col(d - 1 - j));

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q1 = qr.householderQ();
  Eigen::MatrixXd r1 = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (r1(i, i) < 0.0) {
      r1.row(i) *= -1.0;
      q1.col(i) *= -1.0;
    }
  }

  auto flip_both = [d](const Eigen::MatrixXd& in) {
    Eigen::MatrixXd out(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) = in(d - 1 - i, d - 1 - j);
    return out;
  };

  RqDecomposition out;
  out.r = flip_both(r1.transpose());
  Eigen::MatrixXd qt = q1.transpose();
  for (Eigen::Index i = 0; i < d / 2; ++i) qt.row(i).swap(qt.row(d - 1 - i));
  out.q = qt;
  return out;
}

Eigen::MatrixXd haar_orthogonal(int n, Rng& rng) {
  require(n >= 1, "haar_orthogonal: need n >= 1");
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  return q;
}

Eigen::MatrixXd haar_rotation(int n, Rng& rng) {
  Eigen::MatrixXd q = haar_orthogonal(n, rng);
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

Eigen::MatrixXd haar_isotropy(SpaceId space, Rng& rng) {
  return space.kind == Space::hyperbolic ? haar_rotation(space.dim, rng)
                                         : haar_orthogonal(space.dim, rng);
}

namespace {

// Rotation in span(e1, u) taking e1 to the unit vector u; identity elsewhere.
Eigen::MatrixXd rotation_e1_to(const Eigen::VectorXd& u) {
  const auto n = u.size();
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n);
  e1[0] = 1.0;
  const double c = u[0];
  Eigen::VectorXd w = u - c * e1;
  const double wn = w.norm();
  if (wn < 1e-14) {
    if (c > 0.0) return Eigen::MatrixXd::Identity(n, n);
    // u = -e1: rotate by pi in the (e1, e2) plane.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    m(0, 0) = -1.0;
    m(1, 1) = -1.0;
    return m;
  }
  w /= wn;
  const double s = wn;  // sin of the angle, since |u| = 1
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  m += (c - 1.0) * (e1 * e1.transpose() + w * w.transpose());
  m += s * (w * e1.transpose() - e1 * w.transpose());
  return m;
}

}  // namespace

GroupElement point_to_group(const ManifoldPoint& x) {
  validate(x);
  if (const auto* h = std::get_if<HyperbolicPoint>(&x)) {
    const int n = h->n();
    const double r = std::acosh(std::max(1.0, h->v[0]));
    if (r < 1e-14) return identity_element({Space::hyperbolic, n});
    const Eigen::VectorXd u = h->v.tail(n).normalized();
    const GroupElement rot{Space::hyperbolic, embed_rotation(rotation_e1_to(u))};
    return compose(rot, hyperbolic_boost(r, n));
  }
  const auto& s = std::get<SpdPoint>(x);
  Eigen::LLT<Eigen::MatrixXd> llt(s.S);
  require(llt.info() == Eigen::Success, "point_to_group: Cholesky failed");
  return {Space::spd, Eigen::MatrixXd(llt.matrixL())};
}

GroupElement random_isometry(SpaceId space, Rng& rng) {
  if (space.kind == Space::hyperbolic) {
    const Eigen::MatrixXd rot = embed_rotation(haar_rotation(space.dim, rng));
    const double t = rng.uniform(0.0, 2.0);
    return {Space::hyperbolic, rot * hyperbolic_boost(t, space.dim).M};
  }
  const int d = space.dim;
  Eigen::MatrixXd a(d, d);
  do {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  } while (std::abs(a.determinant()) <= 1e-6);
  return {Space::spd, a};
}

}  // namespace symkern
