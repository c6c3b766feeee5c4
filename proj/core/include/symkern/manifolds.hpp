#pragma once

#include <Eigen/Dense>
#include <variant>

#include "symkern/rng.hpp"

namespace symkern {

enum class Space { hyperbolic, spd };

/// A concrete symmetric space: H_n (dim = n >= 2) or SPD(d) (dim = d >= 2).
struct SpaceId {
  Space kind;
  int dim;

  bool operator==(const SpaceId&) const = default;
};

/// Manifold dimension: n for H_n, d(d+1)/2 for SPD(d).
int manifold_dim(SpaceId space);

/// Point on the forward hyperboloid sheet {<v,v>_M = -1, v0 >= 1} in R^{n+1}.
struct HyperbolicPoint {
  Eigen::VectorXd v;

  int n() const { return static_cast<int>(v.size()) - 1; }
};

/// Symmetric positive-definite d x d matrix.
struct SpdPoint {
  Eigen::MatrixXd S;

  int d() const { return static_cast<int>(S.rows()); }
};

using ManifoldPoint = std::variant<HyperbolicPoint, SpdPoint>;

SpaceId space_of(const ManifoldPoint& x);

/// Throws std::invalid_argument when the invariants fail.
void validate(const HyperbolicPoint& x, double tol = 1e-10);
void validate(const SpdPoint& x, double tol = 1e-12);
void validate(const ManifoldPoint& x);

HyperbolicPoint hyperbolic_base_point(int n);
SpdPoint spd_identity(int d);
ManifoldPoint base_point(SpaceId space);

/// Minkowski bilinear form -u0 v0 + sum_{i>=1} u_i v_i.
double minkowski_form(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Geodesic distance arccosh(-<x,x'>_M). Arguments of arccosh within 1e-9
/// below 1 are clamped; anything further below is an error.
double dist_hyperbolic(const HyperbolicPoint& x, const HyperbolicPoint& y);

/// Poincare ball -> hyperboloid and back.
HyperbolicPoint ball_to_hyperboloid(const Eigen::VectorXd& b);
Eigen::VectorXd hyperboloid_to_ball(const HyperbolicPoint& x);

/// Affine-invariant distance ||log(S1^{-1/2} S2 S1^{-1/2})||_F.
double dist_spd(const SpdPoint& s1, const SpdPoint& s2);

double dist(const ManifoldPoint& x, const ManifoldPoint& y);

/// Group element acting on the space: SO0(1,n) matrix for H_n, GL(d) for SPD.
struct GroupElement {
  Space space;
  Eigen::MatrixXd M;
};

void validate(const GroupElement& g, double tol = 1e-10);

GroupElement identity_element(SpaceId space);
GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& g);
ManifoldPoint act(const GroupElement& g, const ManifoldPoint& x);

/// The boost A_t in SO0(1,n): geodesic translation of length t through the
/// base point along the first axis.
GroupElement hyperbolic_boost(double t, int n);

/// N_b, the unipotent factor of the SO0(1,n) Iwasawa decomposition.
Eigen::MatrixXd hyperbolic_unipotent(const Eigen::VectorXd& b);

/// Embeds an SO(n) matrix block-diagonally into SO0(1,n).
Eigen::MatrixXd embed_rotation(const Eigen::MatrixXd& rot);

/// Iwasawa data for M in SO0(1,n): M = N_b A_t H with H in the isotropy
/// group. log_a holds the single abelian coordinate t.
struct IwasawaData {
  Eigen::VectorXd log_a;
  Eigen::MatrixXd n_part;
  Eigen::MatrixXd h_part;
};

IwasawaData iwasawa_so1n(const GroupElement& g);

/// M = R Q with R upper triangular, diag(R) > 0, Q orthogonal.
struct RqDecomposition {
  Eigen::MatrixXd r;
  Eigen::MatrixXd q;

  Eigen::VectorXd log_u() const { return r.diagonal().array().log(); }
};

RqDecomposition rq_decompose(const Eigen::MatrixXd& m);

/// Haar-distributed matrix on O(n).
Eigen::MatrixXd haar_orthogonal(int n, Rng& rng);
/// Haar-distributed matrix on SO(n).
Eigen::MatrixXd haar_rotation(int n, Rng& rng);

/// Haar sample of the isotropy group in its native size: SO(n) for H_n,
/// O(d) for SPD(d).
Eigen::MatrixXd haar_isotropy(SpaceId space, Rng& rng);

/// Group element moving the base point to x: Rot(e1 -> u) A_r for H_n, the
/// lower Cholesky factor for SPD.
GroupElement point_to_group(const ManifoldPoint& x);

/// Random isometry: Haar rotation times a boost with t ~ U(0,2) for H_n;
/// Gaussian GL(d) element (|det| > 1e-6) for SPD.
GroupElement random_isometry(SpaceId space, Rng& rng);

}  // namespace symkern
