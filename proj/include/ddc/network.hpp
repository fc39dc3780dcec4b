#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddc/dissip.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

// Subsystem with an exogenous control input u and an interconnection input v:
//   x+ = A x + B1 u + B2 v,  y = C x + D1 u + D2 v.
struct SubsystemModel {
    Eigen::MatrixXd a, b1, b2, c, d1, d2;

    SubsystemModel(Eigen::MatrixXd a_, Eigen::MatrixXd b1_, Eigen::MatrixXd b2_,
                   Eigen::MatrixXd c_, Eigen::MatrixXd d1_, Eigen::MatrixXd d2_);

    int n() const { return static_cast<int>(a.rows()); }
    int m() const { return static_cast<int>(b1.cols()); }
    int p() const { return static_cast<int>(c.rows()); }
};

// Undirected interconnection structure over k subsystems. Neighbor sets
// include the node itself; adjacency is symmetric. p_dims holds the output
// port width of each node.
struct Topology {
    int k = 0;
    std::vector<std::vector<int>> neighbor_sets;
    std::vector<int> p_dims;

    Topology() = default;
    Topology(int k_, std::vector<std::vector<int>> sets, std::vector<int> p_dims_);

    bool has_edge(int i, int j) const;
    // Neighbors of i without i itself, ascending.
    std::vector<int> others(int i) const;
    // Canonical stacking order for node i's neighborhood: i first, then
    // the remaining neighbors ascending.
    std::vector<int> stacked_order(int i) const;
    // Width of the stacked neighborhood output of node i.
    int p_tilde(int i) const;
    // Offset of node i's ports in the global output vector.
    int port_offset(int i) const;
    int total_ports() const;
};

// Symmetric nonnegative edge weights, zero diagonal.
struct DiffusiveWeights {
    Eigen::MatrixXd a;  // k x k

    explicit DiffusiveWeights(Eigen::MatrixXd w);

    // Weighted degree d_i = sum_j a_ij.
    double degree(int i) const { return a.row(i).sum(); }
};

// Global coupling v = M y with the sparsity pattern of the topology.
struct InterconnectionMatrix {
    Eigen::MatrixXd m;
    Topology topo;

    InterconnectionMatrix(Eigen::MatrixXd m_, Topology topo_);

    // Node i's rows of M restricted to its neighborhood columns in the
    // canonical stacking order (own columns first): p_i x p_tilde_i.
    Eigen::MatrixXd row_restriction(int i) const;
};

// M_ij = a_ij off-diagonal, M_ii = -d_i: the negated weighted graph
// Laplacian. Requires unit output ports on every node.
InterconnectionMatrix diffusive_interconnection(const DiffusiveWeights& w, const Topology& topo);

double spectral_radius(const Eigen::MatrixXd& a);

// Closes u_i = K_i x_i and eliminates the interconnection loop:
//   A_cl = (A + B1 K) + B2 M (I - D2 M)^{-1} (C + D1 K)
// on the block-diagonal stacked system. Returns (A_cl, rho(A_cl)).
std::pair<Eigen::MatrixXd, double> assemble_closed_loop(
    const std::vector<SubsystemModel>& models, const std::vector<Eigen::MatrixXd>& gains,
    const InterconnectionMatrix& m);

// Network-level stability certificate on block-diagonal supply triples:
//   M F M^T - M G - G^T M^T + H > 0 (strict margin) and F <= 0.
bool global_stability_cert(const std::vector<SupplyRate>& supplies,
                           const InterconnectionMatrix& m);

// Certificate matrix for one node's neighborhood: with E = [I_p 0 ... 0],
//   Lambda = [E 0; 0 I]^T [[H - beta I, G^T], [G, F]] [E 0; 0 I].
SymMatrix build_lambda(const SupplyRate& s, double beta, int p_tilde);

// Node-local sufficient condition for the global certificate:
//   [I; m_row]^T Lambda [I; m_row] >= 0 and F <= 0, for some beta > 0.
bool local_stability_cert(const SupplyRate& s, const Eigen::MatrixXd& m_row, double beta);

// Degree-parametrized certificate for unit-port diffusive coupling:
//   G = alpha/2, -1/(2 d') < F < 0, H > 2 d' max(1 - alpha, 0),
// strict inequalities taken with the kStrictTol margin.
bool diffusive_stability_cert(const SupplyRate& s, double d_prime, double alpha);

}  // namespace ddc
