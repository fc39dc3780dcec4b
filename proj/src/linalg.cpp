#include "ddc/linalg.hpp"

#include <cmath>

namespace ddc {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw InvalidInputError("SymMatrix: matrix is not square");
    if (!m.allFinite())
        throw InvalidInputError("SymMatrix: matrix has non-finite entries");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (asym > 1e-9 * scale)
        throw InvalidInputError("SymMatrix: matrix is not symmetric (max asymmetry " +
                                std::to_string(asym) + ")");
    m_ = 0.5 * (m + m.transpose());
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == m.cols()) {
        const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
        if (asym == 0.0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
            return es.eigenvalues().cwiseAbs().maxCoeff();
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

double psd_scale(const Eigen::MatrixXd& m) { return std::max(1.0, spectral_norm(m)); }

Inertia inertia(const SymMatrix& m, double tol) {
    Inertia in;
    if (m.dim() == 0) return in;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat(), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = tol * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) <= cut)
            ++in.zero;
        else if (ev(i) < 0.0)
            ++in.negative;
        else
            ++in.positive;
    }
    return in;
}

double min_eigenvalue(const SymMatrix& m) {
    if (m.dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_psd(const SymMatrix& m, double tol) {
    if (m.dim() == 0) return true;
    return min_eigenvalue(m) >= -tol * psd_scale(m.mat());
}

bool is_pd(const SymMatrix& m, double margin) {
    if (m.dim() == 0) return true;
    return min_eigenvalue(m) >= margin * psd_scale(m.mat());
}

Eigen::MatrixXd pseudo_inverse(const SymMatrix& m, double trunc) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat());
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = trunc * (ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > cut) inv(i) = 1.0 / ev(i);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double rcond_sym(const SymMatrix& m) {
    if (m.dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat(), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd a = es.eigenvalues().cwiseAbs();
    const double hi = a.maxCoeff();
    if (hi == 0.0) return 0.0;
    return a.minCoeff() / hi;
}

Eigen::MatrixXd invert_sym(const SymMatrix& m, const char* what) {
    const double rc = rcond_sym(m);
    if (rc < kInvertRcond)
        throw SingularMatrixError(std::string(what) + ": matrix is numerically singular", rc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat());
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m, double floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor).cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd invsqrt_pd(const Eigen::MatrixXd& m, double floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace ddc
