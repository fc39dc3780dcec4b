#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "ddc/linalg.hpp"
#include "ddc/sdp.hpp"

namespace ddc {

enum class SupplyForm { direct, inverse_block };

// Quadratic supply rate s(v, y) = [v; y]^T S [v; y] for a system with input
// port v of width q and output port y of width p. The rate is stored as the
// block triple (F, G, H), with H the v-block and F the y-block:
//
//   direct:         S = [[H, G^T], [G, F]]
//   inverse_block:  S = [[H, G^T], [G, F]]^{-1}   (must be invertible)
//
// The synthesis pipeline works in the inverse_block form throughout; the
// network-level stability certificates consume (F, G, H) directly.
struct SupplyRate {
    SymMatrix f;        // p x p
    Eigen::MatrixXd g;  // p x q
    SymMatrix h;        // q x q
    SupplyForm form = SupplyForm::direct;

    SupplyRate() = default;
    SupplyRate(SymMatrix f_, Eigen::MatrixXd g_, SymMatrix h_, SupplyForm form_);

    int q() const { return h.dim(); }
    int p() const { return f.dim(); }

    // The block matrix [[H, G^T], [G, F]] (not yet inverted).
    SymMatrix block_matrix() const;
};

// The matrix S with s(v,y) = [v;y]^T S [v;y]. Under inverse_block this
// inverts the block matrix and throws SingularMatrixError when it cannot.
SymMatrix supply_matrix(const SupplyRate& s);

double supply_value(const SupplyRate& s, const Eigen::VectorXd& v, const Eigen::VectorXd& y);

// Positive-definite storage matrix; V(x) = x^T P x.
struct StorageMatrix {
    SymMatrix p;
    explicit StorageMatrix(SymMatrix m);
};

// x(t+1) = A x + B v,  y = C x + D v.
struct LinearSystem {
    Eigen::MatrixXd a, b, c, d;

    LinearSystem(Eigen::MatrixXd a_, Eigen::MatrixXd b_, Eigen::MatrixXd c_, Eigen::MatrixXd d_);

    int n() const { return static_cast<int>(a.rows()); }
    int q() const { return static_cast<int>(b.cols()); }
    int p() const { return static_cast<int>(c.rows()); }
};

// Residual of the dissipation inequality as a quadratic form in (x, v):
//   [I 0; A B]^T diag(P, -P) [I 0; A B] + [0 I; C D]^T S [0 I; C D]
// PSD residual == dissipativity with storage P.
SymMatrix dissipation_lmi_residual(const LinearSystem& sys, const SupplyRate& s,
                                   const StorageMatrix& storage);

// Searches for a PD storage matrix via the SDP layer. Empty optional means
// certified infeasible; an ambiguous solver outcome throws SolverError.
std::optional<StorageMatrix> check_dissipativity(const LinearSystem& sys, const SupplyRate& s,
                                                 const SdpOptions& opts = {});

// Same question posed on the inverse storage Q = P^{-1} (valid only when the
// supply matrix has inertia (p, 0, q); otherwise throws InertiaError).
// Agrees with check_dissipativity on feasibility; returns P = Q^{-1}.
std::optional<StorageMatrix> check_dissipativity_dual(const LinearSystem& sys,
                                                      const SupplyRate& s,
                                                      const SdpOptions& opts = {});

// Samples random (x, v) pairs and checks the pointwise inequality
// V(x+) - V(x) <= s(v, y) + kPsdTol * (1 + ||P|| + ||S||) on every draw.
bool verify_trajectory_dissipation(const LinearSystem& sys, const SupplyRate& s,
                                   const StorageMatrix& storage, int trials,
                                   std::uint64_t seed);

}  // namespace ddc
