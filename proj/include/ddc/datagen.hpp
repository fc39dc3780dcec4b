#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ddc/network.hpp"
#include "ddc/qmi.hpp"

namespace ddc {

// Noise bound in quadratic-matrix-inequality form: the stacked noise W
// (one column per sample, d rows, N columns) is assumed to satisfy
//   [I; W^T]^T [[phi11, phi12], [phi12^T, phi22]] [I; W^T] >= 0.
// The bound matrix must lie in the regularity class (in_pi_class).
struct NoiseBound {
    SymMatrix phi11;
    Eigen::MatrixXd phi12;
    SymMatrix phi22;

    NoiseBound(SymMatrix phi11_, Eigen::MatrixXd phi12_, SymMatrix phi22_);

    // The per-sample ball instance: columns bounded by ||w_t||^2 <= eps,
    // encoded as (N eps I, 0, -I).
    static NoiseBound per_sample_ball(int d, int n, double eps);

    int d() const { return phi11.dim(); }
    int horizon() const { return phi22.dim(); }

    QmiSet as_qmi() const;
    bool contains(const Eigen::MatrixXd& w) const;
    // Recovers eps when this bound has the per-sample-ball shape.
    bool ball_radius(double* eps_out) const;
};

enum class NoiseKind { per_sample_ball };

// One column per time step, each drawn uniformly from the eps-ball; the
// assembled matrix satisfies the bound by construction.
Eigen::MatrixXd sample_noise(const NoiseBound& bound, NoiseKind kind, std::uint64_t seed);

// Local experiment record: states, shifted states, inputs, interconnection
// inputs, and outputs, all over the same N samples.
struct LocalData {
    Eigen::MatrixXd x, x_plus, u, v, y;

    LocalData(Eigen::MatrixXd x_, Eigen::MatrixXd x_plus_, Eigen::MatrixXd u_,
              Eigen::MatrixXd v_, Eigen::MatrixXd y_);

    int n() const { return static_cast<int>(x.rows()); }
    int m() const { return static_cast<int>(u.rows()); }
    int p() const { return static_cast<int>(y.rows()); }
    int samples() const { return static_cast<int>(x.cols()); }
};

// Interconnection experiment record: own coupling input against the stacked
// neighborhood outputs (own node first in the stacking order).
struct InterconnectionData {
    Eigen::MatrixXd v_tilde;  // p x N~
    Eigen::MatrixXd y_tilde;  // p~ x N~
    std::vector<int> neighbor_order;

    InterconnectionData(Eigen::MatrixXd v_tilde_, Eigen::MatrixXd y_tilde_,
                        std::vector<int> order);

    int p() const { return static_cast<int>(v_tilde.rows()); }
    int p_tilde() const { return static_cast<int>(y_tilde.rows()); }
    int samples() const { return static_cast<int>(v_tilde.cols()); }
};

// Runs the subsystem for N steps under the given input and coupling signals
// (m x N and p x N), with process/measurement noise drawn from `bound`
// (d = n + p). The identity [X+; Y] = [A B1 B2; C D1 D2][X; U; V] + W holds
// for the internally sampled W.
LocalData simulate_collect_local(const SubsystemModel& model, const Eigen::MatrixXd& u_signal,
                                 const Eigen::MatrixXd& v_signal, const NoiseBound& bound,
                                 int n_samples, std::uint64_t seed, const Eigen::VectorXd& x0);

// Forms V~ = m_row * Y~ + Xi with Xi drawn from `bound` (d = rows of m_row).
InterconnectionData collect_interconnection(const Eigen::MatrixXd& m_row,
                                            const Eigen::MatrixXd& y_tilde_signal,
                                            const NoiseBound& bound, int n_tilde,
                                            std::uint64_t seed,
                                            std::vector<int> neighbor_order = {});

// Data matrix summarizing every (model, noise) pair consistent with a local
// experiment, as the QMI matrix over stacked parameters:
//   J = [[I, [X+; Y]], [0, [-X; -U; -V]]] Phi [.]^T.
// With `regularize`, a J without positive eigenvalues (noiseless data) gets
// phi11 inflated by 1e-9 * max(1, ||phi11||) and is rebuilt.
struct BuiltJ {
    SymMatrix j;
    bool regularized = false;
};
BuiltJ build_J(const LocalData& data, const NoiseBound& phi, bool regularize);

// Consistency set of neighborhood coupling rows: Theta over [I; m_row^T]
// directions and its dual Theta_hat over [I; m_row] directions. With
// `regularize`, a numerically singular Theta gets psi11 inflated first.
// The dual must come out with inertia (p, 0, p~); anything else throws.
struct ThetaPair {
    SymMatrix theta;      // dim p + p~
    SymMatrix theta_hat;  // dim p~ + p
    bool regularized = false;
};
ThetaPair build_theta_pair(const InterconnectionData& data, const NoiseBound& psi,
                           bool regularize);

// One shared open-loop run of the full interconnected network under held
// piecewise-constant inputs, started from random per-node initial states
// (ball of radius x0_amp): every node's local record uses the first
// n_samples steps and its interconnection record the first n_tilde steps
// of the same trajectory. Noise streams are derived per (seed, node).
struct NetworkData {
    std::vector<LocalData> local;
    std::vector<InterconnectionData> inter;
};
NetworkData collect_network(const std::vector<SubsystemModel>& models,
                            const InterconnectionMatrix& m, double eps_l, double eps_g,
                            int n_samples, int n_tilde, std::uint64_t seed, double u_amp,
                            int u_hold, double x0_amp);

}  // namespace ddc
