#pragma once

#include <Eigen/Dense>

#include "ddc/errors.hpp"

namespace ddc {

// ============================================================================
// Tolerance policy (shared by every module)
// ============================================================================
//
// All PSD/PD checks are relative to max(1, ||M||_2):
//   nonstrict:  lambda_min >= -kPsdTol   * max(1, ||M||_2)
//   strict:     lambda_min >= +kStrictTol * max(1, ||M||_2)
// Eigenvalues with |lambda| <= kPinvTrunc * |lambda|_max are treated as zero
// when pseudo-inverting. Plain inverses are refused below kInvertRcond.

inline constexpr double kPsdTol = 1e-8;
inline constexpr double kStrictTol = 1e-6;
inline constexpr double kPinvTrunc = 1e-10;
inline constexpr double kInvertRcond = 1e-12;

struct Inertia {
    int negative = 0;
    int zero = 0;
    int positive = 0;

    bool operator==(const Inertia&) const = default;
};

// Symmetric matrix wrapper. Construction validates squareness and finiteness
// and stores the symmetrized part, so downstream code can rely on exact
// symmetry. The raw matrix is rejected if its asymmetry is more than rounding
// noise; this catches transposition bugs instead of hiding them.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Eigen::MatrixXd& m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& mat() const { return m_; }

    static SymMatrix zero(int n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }
    static SymMatrix identity(int n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }

private:
    Eigen::MatrixXd m_;
};

// Largest singular value; for symmetric input this is max |eigenvalue|.
double spectral_norm(const Eigen::MatrixXd& m);

// The relative scale used by the tolerance policy: max(1, ||M||_2).
double psd_scale(const Eigen::MatrixXd& m);

// Signs of the eigenvalues of a symmetric matrix. An eigenvalue counts as
// zero when |lambda| <= tol * max(1, max|lambda|).
Inertia inertia(const SymMatrix& m, double tol = kPsdTol);

bool is_psd(const SymMatrix& m, double tol = kPsdTol);
bool is_pd(const SymMatrix& m, double margin = kStrictTol);

double min_eigenvalue(const SymMatrix& m);

// Moore-Penrose inverse of a symmetric matrix via eigendecomposition.
Eigen::MatrixXd pseudo_inverse(const SymMatrix& m, double trunc = kPinvTrunc);

// Reciprocal condition number |lambda|_min / |lambda|_max of a symmetric
// matrix (0 when the matrix is exactly singular or empty).
double rcond_sym(const SymMatrix& m);

// Inverse of a symmetric matrix; throws SingularMatrixError when
// rcond_sym < kInvertRcond.
Eigen::MatrixXd invert_sym(const SymMatrix& m, const char* what);

// Symmetric square root and inverse square root of a PD matrix (used by the
// SDP engine's scaling; eigenvalues are floored at `floor` to stay finite).
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m, double floor = 0.0);
Eigen::MatrixXd invsqrt_pd(const Eigen::MatrixXd& m, double floor);

}  // namespace ddc
