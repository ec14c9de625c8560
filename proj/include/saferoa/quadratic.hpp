#pragma once

#include "saferoa/dynamics.hpp"
#include "saferoa/zubov.hpp"

#include <Eigen/Dense>

#include <string>

namespace saferoa {

/// Local quadratic certificate around the origin: V_P(x) = x'Px with
/// A'PA - P = -Q, valid radius c1 = min(a1, a2) so that
/// {V_P < c1} lies inside the box [-b_radius, b_radius] and V_P decreases
/// by at least eps*||x||^2 per step there.
struct QuadCert {
  Eigen::MatrixXd A;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd P;
  double eps = 0.0;
  double d = 0.0;  // lambda_min(Q) - eps
  Eigen::VectorXd b_radius;
  Eigen::VectorXd eta;
  double alpha_q = 0.0;  // ||P|| * ||eta||^2 / (4 * lambda_min(P))
  double beta_q = 0.0;   // || |P^1/2| eta || * ||P^1/2 A P^-1/2||
  double a1 = 0.0;
  double a2 = 0.0;
  double c1 = 0.0;
};

/// Spectral radius < 1.
bool is_schur(const Eigen::MatrixXd& A);

/// Solves A'PA - P = -Q by the Kronecker vectorization
/// (I - A' (x) A') vec(P) = vec(Q), then symmetrizes.
/// Throws when A is not Schur stable.
Eigen::MatrixXd solve_dlyap(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// Assembles the local certificate for the box B = [-b_radius, b_radius].
/// Requires B inside the safe set (sup of g over B < 1) and eps < lambda_min(Q).
QuadCert c1_certificate(const SystemDef& sys, const SafetySpec& safety, const Eigen::MatrixXd& P,
                        const Eigen::MatrixXd& Q, double eps, const Eigen::VectorXd& b_radius);

/// Radius search: starts from 0.25 * min(|lo|, hi) componentwise and scales
/// by powers of 1.5, keeping the certificate with the largest c1 among the
/// candidates whose box stays inside the safe set.
QuadCert best_c1_certificate(const SystemDef& sys, const SafetySpec& safety,
                             const Eigen::MatrixXd& Q, double eps_fraction = 0.01);

/// Largest c with {V_P <= c} contained in the domain box:
/// min_i min(-lo_i, hi_i)^2 / (P^-1)_{ii}.
double c2_upper_bound(const Eigen::MatrixXd& P, const Box& domain);

double vp_eval(const Eigen::MatrixXd& P, const Eigen::VectorXd& x);
/// V_P(f(x)) - V_P(x).
double vp_plus(const SystemDef& sys, const Eigen::MatrixXd& P, const Eigen::VectorXd& x);

/// Audit-trail report with P, the intermediate norms and all levels.
std::string certificate_report(const QuadCert& cert, double c2_upper, double c2_certified);

}  // namespace saferoa
