#ifndef WIPLAB_CARE_HPP_
#define WIPLAB_CARE_HPP_

#include <Eigen/Dense>

namespace wiplab
{

// Solves A'P + PA = -W (continuous Lyapunov) by Kronecker vectorization;
// fine at the 4-state sizes used here.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd & A, const Eigen::MatrixXd & W);

// Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0 by
// Kleinman-Newton iteration seeded with a Bass pole-shift gain.
// Converged when the residual norm drops below 1e-10 (200 iterations max).
Eigen::MatrixXd solve_care(const Eigen::MatrixXd & A, const Eigen::MatrixXd & B,
                           const Eigen::MatrixXd & Q, const Eigen::MatrixXd & R);

double max_real_eigenvalue(const Eigen::MatrixXd & M);

}  // namespace wiplab

#endif  // WIPLAB_CARE_HPP_
