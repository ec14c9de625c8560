#include "saferoa/quadratic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace saferoa {

bool is_schur(const Eigen::MatrixXd& A) {
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues();
  return ev.cwiseAbs().maxCoeff() < 1.0;
}

Eigen::MatrixXd solve_dlyap(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw std::invalid_argument("solve_dlyap: dimension mismatch");
  if (!is_schur(A))
    throw std::runtime_error("origin not exponentially stable under linearization");
  const Eigen::MatrixXd At = A.transpose();
  Eigen::MatrixXd K(n * n, n * n);  // I - A' (x) A'
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n) = -At(i, j) * At;
  K += Eigen::MatrixXd::Identity(n * n, n * n);
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  const Eigen::VectorXd p = K.partialPivLu().solve(q);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(p.data(), n, n);
  return 0.5 * (P + P.transpose());
}

namespace {

double spectral_norm(const Eigen::MatrixXd& M) {
  return M.jacobiSvd().singularValues()(0);
}

// Symmetric positive definite square root via eigendecomposition.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& P) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error("matrix square root: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

QuadCert c1_certificate(const SystemDef& sys, const SafetySpec& safety, const Eigen::MatrixXd& P,
                        const Eigen::MatrixXd& Q, double eps, const Eigen::VectorXd& b_radius) {
  const int n = sys.n;
  if (b_radius.size() != n) throw std::invalid_argument("c1_certificate: radius dimension mismatch");
  if (b_radius.minCoeff() <= 0.0) throw std::invalid_argument("c1_certificate: radius must be positive");

  const Box B = Box::centered(b_radius);
  if (safety.g) {
    const Interval g_range = safety.g->eval(B);
    if (!(g_range.hi < 1.0))
      throw std::runtime_error("c1_certificate: box is not contained in the safe set");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esQ(Q);
  const double lambda_min_q = esQ.eigenvalues().minCoeff();
  if (!(eps > 0.0) || eps >= lambda_min_q)
    throw std::invalid_argument("c1_certificate: need 0 < eps < lambda_min(Q)");

  QuadCert cert;
  cert.A = jacobian_at(sys, Eigen::VectorXd::Zero(n));
  cert.Q = Q;
  cert.P = P;
  cert.eps = eps;
  cert.d = lambda_min_q - eps;
  cert.b_radius = b_radius;
  cert.eta = hessian_eta_bound(sys, B);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esP(P);
  const double lambda_min_p = esP.eigenvalues().minCoeff();
  if (lambda_min_p <= 0.0) throw std::runtime_error("c1_certificate: P is not positive definite");
  const Eigen::MatrixXd Pinv = P.inverse();

  cert.a2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    cert.a2 = std::min(cert.a2, b_radius[i] * b_radius[i] / Pinv(i, i));

  const double eta_norm = cert.eta.norm();
  if (eta_norm == 0.0) {
    cert.alpha_q = 0.0;
    cert.beta_q = 0.0;
    cert.a1 = std::numeric_limits<double>::infinity();
  } else {
    const Eigen::MatrixXd Phalf = spd_sqrt(P);
    const Eigen::MatrixXd Phalf_inv = Phalf.inverse();
    cert.alpha_q = spectral_norm(P) * eta_norm * eta_norm / (4.0 * lambda_min_p);
    cert.beta_q = (Phalf.cwiseAbs() * cert.eta).norm() * spectral_norm(Phalf * cert.A * Phalf_inv);
    // a1 = (-beta + sqrt(beta^2 + 4 alpha d))^2 / (2 alpha)^2, rationalized
    // to avoid the subtraction.
    const double root = std::sqrt(cert.beta_q * cert.beta_q + 4.0 * cert.alpha_q * cert.d);
    cert.a1 = 4.0 * cert.d * cert.d / ((cert.beta_q + root) * (cert.beta_q + root));
  }
  cert.c1 = std::min(cert.a1, cert.a2);
  return cert;
}

QuadCert best_c1_certificate(const SystemDef& sys, const SafetySpec& safety,
                             const Eigen::MatrixXd& Q, double eps_fraction) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esQ(Q);
  const double eps = eps_fraction * esQ.eigenvalues().minCoeff();
  const Eigen::MatrixXd A = jacobian_at(sys, Eigen::VectorXd::Zero(sys.n));
  const Eigen::MatrixXd P = solve_dlyap(A, Q);
  const Eigen::VectorXd r0 =
      0.25 * sys.domain.lo.cwiseAbs().cwiseMin(sys.domain.hi.cwiseAbs());

  std::optional<QuadCert> best;
  for (int k = -2; k <= 5; ++k) {
    const Eigen::VectorXd radius = std::pow(1.5, k) * r0;
    try {
      QuadCert cand = c1_certificate(sys, safety, P, Q, eps, radius);
      if (!best || cand.c1 > best->c1) best = std::move(cand);
    } catch (const std::runtime_error&) {
      // candidate box leaves the safe set; skip it
    }
  }
  if (!best) throw std::runtime_error("best_c1_certificate: no candidate box fits the safe set");
  return *best;
}

double c2_upper_bound(const Eigen::MatrixXd& P, const Box& domain) {
  const Eigen::MatrixXd Pinv = P.inverse();
  double bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < domain.dim(); ++i) {
    const double half = std::min(-domain.lo[i], domain.hi[i]);
    bound = std::min(bound, half * half / Pinv(i, i));
  }
  return bound;
}

double vp_eval(const Eigen::MatrixXd& P, const Eigen::VectorXd& x) { return x.dot(P * x); }

double vp_plus(const SystemDef& sys, const Eigen::MatrixXd& P, const Eigen::VectorXd& x) {
  return vp_eval(P, step(sys, x)) - vp_eval(P, x);
}

std::string certificate_report(const QuadCert& cert, double c2_upper, double c2_certified) {
  std::ostringstream os;
  os.precision(10);
  const int n = static_cast<int>(cert.P.rows());
  os << "quadratic certificate\n";
  os << "  P =\n";
  for (int i = 0; i < n; ++i) {
    os << "   ";
    for (int j = 0; j < n; ++j) os << " " << cert.P(i, j);
    os << "\n";
  }
  os << "  dlyap residual (fro, relative) = "
     << (cert.A.transpose() * cert.P * cert.A - cert.P + cert.Q).norm() / cert.Q.norm() << "\n";
  os << "  eps = " << cert.eps << "\n";
  os << "  d = lambda_min(Q) - eps = " << cert.d << "\n";
  os << "  B radius = " << cert.b_radius.transpose() << "\n";
  os << "  eta = " << cert.eta.transpose() << "\n";
  os << "  alpha_q = " << cert.alpha_q << "\n";
  os << "  beta_q = " << cert.beta_q << "\n";
  os << "  a1 = " << cert.a1 << "\n";
  os << "  a2 = " << cert.a2 << "\n";
  os << "  c1 = " << cert.c1 << "\n";
  os << "  c2 upper bound (domain inclusion) = " << c2_upper << "\n";
  if (c2_certified > 0.0) os << "  c2 certified = " << c2_certified << "\n";
  return os.str();
}

}  // namespace saferoa
