#include "wiplab/care.hpp"

#include <cmath>

#include "wiplab/common.hpp"

namespace wiplab
{

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd & A, const Eigen::MatrixXd & W)
{
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd K(n * n, n * n);
  // vec(A'P + PA) = (I (x) A' + A' (x) I) vec(P)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) = I(i, j) * A.transpose();
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += A.transpose()(i, j) * I;
    }
  }
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(W.data(), n * n);
  const Eigen::VectorXd p = K.fullPivLu().solve(-w);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(p.data(), n, n);
  return 0.5 * (P + P.transpose());
}

double max_real_eigenvalue(const Eigen::MatrixXd & M)
{
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return es.eigenvalues().real().maxCoeff();
}

namespace
{

// Bass' method: K = B' Z^-1 with (A + sI) Z + Z (A + sI)' = 2 B B'
// stabilizes any controllable pair for s > max Re(lambda(A)).
Eigen::MatrixXd stabilizing_gain(const Eigen::MatrixXd & A, const Eigen::MatrixXd & B)
{
  const int n = static_cast<int>(A.rows());
  if (max_real_eigenvalue(A) < 0.0) {
    return Eigen::MatrixXd::Zero(B.cols(), n);
  }
  // any bound on |Re lambda(A)| works; the spectral radius keeps the
  // shifted Gramian far better conditioned than a Frobenius bound
  const double shift =
      Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().cwiseAbs().maxCoeff() + 1.0;
  const Eigen::MatrixXd As = A + shift * Eigen::MatrixXd::Identity(n, n);
  // solve_lyapunov handles A'P + PA = -W; the Bass equation
  // As Z + Z As' = 2 B B' maps to it with argument -As'
  const Eigen::MatrixXd Z = solve_lyapunov(-As.transpose(), 2.0 * B * B.transpose());
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(Z);
  if (!lu.isInvertible()) {
    throw ConvergenceError("solve_care: pair appears uncontrollable (singular Bass Gramian)");
  }
  return B.transpose() * lu.inverse();
}

}  // namespace

Eigen::MatrixXd solve_care(const Eigen::MatrixXd & A, const Eigen::MatrixXd & B,
                           const Eigen::MatrixXd & Q, const Eigen::MatrixXd & R)
{
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd Rinv = R.inverse();
  Eigen::MatrixXd K = stabilizing_gain(A, B);
  if (max_real_eigenvalue(A - B * K) >= 0.0) {
    throw ConvergenceError("solve_care: failed to find a stabilizing initial gain");
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int it = 0; it < 200; ++it) {
    const Eigen::MatrixXd Acl = A - B * K;
    P = solve_lyapunov(Acl, Q + K.transpose() * R * K);
    // Damped update: a full Newton step from a badly conditioned seed can
    // leave the stabilizing set in finite precision, after which the
    // iteration drifts to the anti-stabilizing root.
    const Eigen::MatrixXd K_new = Rinv * B.transpose() * P;
    double alpha = 1.0;
    Eigen::MatrixXd K_next = K_new;
    while (alpha > 1e-12 && max_real_eigenvalue(A - B * K_next) >= 0.0) {
      alpha *= 0.5;
      K_next = K + alpha * (K_new - K);
    }
    if (max_real_eigenvalue(A - B * K_next) >= 0.0) {
      throw ConvergenceError("solve_care: lost the stabilizing gain during iteration");
    }
    K = K_next;
    const Eigen::MatrixXd residual =
        A.transpose() * P + P * A - P * B * Rinv * B.transpose() * P + Q;
    if (alpha == 1.0 && residual.norm() < 1e-10) {
      if (max_real_eigenvalue(A - B * (Rinv * B.transpose() * P)) >= 0.0) {
        throw ConvergenceError("solve_care: converged to a non-stabilizing solution");
      }
      return P;
    }
  }
  throw ConvergenceError("solve_care: Kleinman-Newton iteration did not converge");
}

}  // namespace wiplab
