#pragma once

#include <functional>

#include "symkern/manifolds.hpp"

namespace symkern {

/// Normalized H_3 heat kernel (rho / sinh rho) exp(-rho^2 / 2 kappa^2).
double heat_h3(double rho, double kappa);

/// Normalized H_2 heat kernel by adaptive quadrature of the one-dimensional
/// integral, with the endpoint singularity removed by s = rho + u^2.
double heat_h2(double rho, double kappa);

/// Normalized heat kernel on H_n for odd n > 3 via Millson's recurrence
/// applied symbolically to the H_3 closed form.
double heat_hn_millson(int n, double rho, double kappa);

/// Normalized SPD(2) heat kernel. H_1 >= H_2 are the log singular values of
/// S_Y^{-1} S_X (equivalently half the log generalized eigenvalues of the
/// pair), alpha = H_1 - H_2.
double heat_spd2(const SpdPoint& x, const SpdPoint& y, double kappa);

/// Unnormalized heat solutions P(t, rho) including the full t-dependence,
/// for use inside the Matern integral.
double heat_solution_h3(double t, double rho);
double heat_solution_hn_millson(int n, double t, double rho);

/// Normalized Matern kernel from a heat solution:
/// int_0^inf u^{nu-1+n/2} e^{-2 nu u / kappa^2} P(u, rho) du, divided by the
/// coincident-point value.
double matern_from_heat(const std::function<double(double, double)>& heat_solution,
                        double nu, double kappa, int n_dim, double rho);

/// Matern kernel on H_3 through the heat integral.
double matern_h3(double nu, double kappa, double rho);

}  // namespace symkern
