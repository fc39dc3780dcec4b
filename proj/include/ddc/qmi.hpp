#pragma once

#include <Eigen/Dense>

#include "ddc/linalg.hpp"

namespace ddc {

// Solution set of a quadratic matrix inequality in a matrix unknown:
//
//   Z(Pi) = { Z in R^{r x q} : [I_q; Z]^T Pi [I_q; Z] >= 0 }
//
// Pi is symmetric of dimension q+r, partitioned as
//   [ Pi11  Pi12 ]   with Pi11 (q x q), Pi22 (r x r).
//   [ Pi21  Pi22 ]
struct QmiSet {
    int q = 0;
    int r = 0;
    SymMatrix pi;

    QmiSet(int q_, int r_, SymMatrix pi_);

    Eigen::MatrixXd pi11() const { return pi.mat().topLeftCorner(q, q); }
    Eigen::MatrixXd pi12() const { return pi.mat().topRightCorner(q, r); }
    Eigen::MatrixXd pi22() const { return pi.mat().bottomRightCorner(r, r); }
};

// The q x q residual [I; Z]^T Pi [I; Z]; membership means this is PSD.
SymMatrix qmi_residual(const QmiSet& set, const Eigen::MatrixXd& z);

bool qmi_contains(const QmiSet& set, const Eigen::MatrixXd& z, double tol = kPsdTol);

// Regularity class for which duality and the losslessness of the S-procedure
// are available: Pi22 <= 0, the Schur complement Pi11 - Pi12 Pi22^+ Pi21 >= 0,
// and ker(Pi22) contained in ker(Pi12).
bool in_pi_class(const QmiSet& set, double tol = kPsdTol);

// The set of transposes: Z(Pi)^T = Z(dual_qmi(Pi)) with the roles of q and r
// swapped. Requires Pi invertible (throws SingularMatrixError otherwise).
// Applying it twice returns the original matrix.
QmiSet dual_qmi(const QmiSet& set);

// Whether alpha >= 0 certifies the inclusion Z(n) subset-of Z(m) via the
// matrix S-procedure: m.pi - alpha * n.pi >= 0. Both sets must share (q, r).
bool s_lemma_holds(const QmiSet& m, const QmiSet& n, double alpha, double tol = kPsdTol);

}  // namespace ddc
