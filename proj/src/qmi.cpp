#include "ddc/qmi.hpp"

namespace ddc {

QmiSet::QmiSet(int q_, int r_, SymMatrix pi_) : q(q_), r(r_), pi(std::move(pi_)) {
    if (q < 0 || r < 0 || q + r <= 0)
        throw InvalidInputError("QmiSet: partition sizes must be nonnegative and not both zero");
    if (pi.dim() != q + r)
        throw InvalidInputError("QmiSet: Pi dimension does not match q + r");
}

SymMatrix qmi_residual(const QmiSet& set, const Eigen::MatrixXd& z) {
    if (z.rows() != set.r || z.cols() != set.q)
        throw InvalidInputError("qmi_residual: Z must be r x q");
    Eigen::MatrixXd basis(set.q + set.r, set.q);
    basis.topRows(set.q) = Eigen::MatrixXd::Identity(set.q, set.q);
    basis.bottomRows(set.r) = z;
    return SymMatrix(basis.transpose() * set.pi.mat() * basis);
}

bool qmi_contains(const QmiSet& set, const Eigen::MatrixXd& z, double tol) {
    return is_psd(qmi_residual(set, z), tol);
}

bool in_pi_class(const QmiSet& set, double tol) {
    const double scale = psd_scale(set.pi.mat());
    const Eigen::MatrixXd p22 = set.pi22();
    const Eigen::MatrixXd p12 = set.pi12();

    if (set.r > 0) {
        // Pi22 <= 0.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p22, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().maxCoeff() > tol * scale) return false;
    }

    Eigen::MatrixXd p22p = set.r > 0 ? pseudo_inverse(SymMatrix(p22))
                                     : Eigen::MatrixXd::Zero(0, 0);

    // ker(Pi22) inside ker(Pi12): Pi12 annihilated by the kernel projector.
    if (set.r > 0 && set.q > 0) {
        Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(set.r, set.r) - p22p * p22;
        if ((p12 * proj).cwiseAbs().maxCoeff() > tol * scale) return false;
    }

    // Generalized Schur complement Pi11 - Pi12 Pi22^+ Pi21 >= 0.
    Eigen::MatrixXd schur = set.pi11();
    if (set.r > 0) schur -= p12 * p22p * p12.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (schur + schur.transpose()),
                                                      Eigen::EigenvaluesOnly);
    if (set.q > 0 && es.eigenvalues().minCoeff() < -tol * scale) return false;
    return true;
}

QmiSet dual_qmi(const QmiSet& set) {
    const int q = set.q, r = set.r;
    const double rc = rcond_sym(set.pi);
    if (rc < kInvertRcond)
        throw SingularMatrixError("dual_qmi: Pi is numerically singular", rc);
    const Eigen::MatrixXd inv = invert_sym(set.pi, "dual_qmi");

    // Left factor [0 -I_r; I_q 0] is (r+q) x (q+r); the right factor is its
    // transpose with the sign pattern mirrored.
    Eigen::MatrixXd left = Eigen::MatrixXd::Zero(r + q, q + r);
    left.topRightCorner(r, r) = -Eigen::MatrixXd::Identity(r, r);
    left.bottomLeftCorner(q, q) = Eigen::MatrixXd::Identity(q, q);

    Eigen::MatrixXd right = Eigen::MatrixXd::Zero(q + r, r + q);
    right.topRightCorner(q, q) = -Eigen::MatrixXd::Identity(q, q);
    right.bottomLeftCorner(r, r) = Eigen::MatrixXd::Identity(r, r);

    return QmiSet(r, q, SymMatrix(left * inv * right));
}

bool s_lemma_holds(const QmiSet& m, const QmiSet& n, double alpha, double tol) {
    if (m.q != n.q || m.r != n.r)
        throw InvalidInputError("s_lemma_holds: sets must share the (q, r) partition");
    if (alpha < 0.0)
        throw InvalidInputError("s_lemma_holds: multiplier must be nonnegative");
    return is_psd(SymMatrix(m.pi.mat() - alpha * n.pi.mat()), tol);
}

}  // namespace ddc
