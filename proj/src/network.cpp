#include "ddc/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ddc {

SubsystemModel::SubsystemModel(Eigen::MatrixXd a_, Eigen::MatrixXd b1_, Eigen::MatrixXd b2_,
                               Eigen::MatrixXd c_, Eigen::MatrixXd d1_, Eigen::MatrixXd d2_)
    : a(std::move(a_)), b1(std::move(b1_)), b2(std::move(b2_)), c(std::move(c_)),
      d1(std::move(d1_)), d2(std::move(d2_)) {
    const int nn = static_cast<int>(a.rows());
    if (a.cols() != nn) throw InvalidInputError("SubsystemModel: A must be square");
    if (b1.rows() != nn || b2.rows() != nn)
        throw InvalidInputError("SubsystemModel: B1/B2 row count != n");
    if (c.cols() != nn) throw InvalidInputError("SubsystemModel: C column count != n");
    const int pp = static_cast<int>(c.rows());
    if (d1.rows() != pp || d1.cols() != b1.cols())
        throw InvalidInputError("SubsystemModel: D1 must be p x m");
    if (d2.rows() != pp || d2.cols() != b2.cols() || b2.cols() != pp)
        throw InvalidInputError("SubsystemModel: D2 and B2 must use the p-wide port");
    for (const Eigen::MatrixXd* mm : {&a, &b1, &b2, &c, &d1, &d2})
        if (!mm->allFinite()) throw InvalidInputError("SubsystemModel: non-finite entries");
}

Topology::Topology(int k_, std::vector<std::vector<int>> sets, std::vector<int> p_dims_)
    : k(k_), neighbor_sets(std::move(sets)), p_dims(std::move(p_dims_)) {
    if (k <= 0) throw InvalidInputError("Topology: k must be positive");
    if (static_cast<int>(neighbor_sets.size()) != k || static_cast<int>(p_dims.size()) != k)
        throw InvalidInputError("Topology: per-node lists must have length k");
    for (int i = 0; i < k; ++i) {
        if (p_dims[i] <= 0) throw InvalidInputError("Topology: output widths must be positive");
        auto& s = neighbor_sets[i];
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw InvalidInputError("Topology: duplicate neighbor entries");
        for (int j : s)
            if (j < 0 || j >= k) throw InvalidInputError("Topology: neighbor index out of range");
        if (!std::binary_search(s.begin(), s.end(), i))
            throw InvalidInputError("Topology: node must belong to its own neighbor set");
    }
    for (int i = 0; i < k; ++i)
        for (int j : neighbor_sets[i])
            if (!std::binary_search(neighbor_sets[j].begin(), neighbor_sets[j].end(), i))
                throw InvalidInputError("Topology: adjacency must be symmetric");
}

bool Topology::has_edge(int i, int j) const {
    return std::binary_search(neighbor_sets[i].begin(), neighbor_sets[i].end(), j);
}

std::vector<int> Topology::others(int i) const {
    std::vector<int> out;
    for (int j : neighbor_sets[i])
        if (j != i) out.push_back(j);
    return out;
}

std::vector<int> Topology::stacked_order(int i) const {
    std::vector<int> out{i};
    for (int j : others(i)) out.push_back(j);
    return out;
}

int Topology::p_tilde(int i) const {
    int w = 0;
    for (int j : neighbor_sets[i]) w += p_dims[j];
    return w;
}

int Topology::port_offset(int i) const {
    return std::accumulate(p_dims.begin(), p_dims.begin() + i, 0);
}

int Topology::total_ports() const {
    return std::accumulate(p_dims.begin(), p_dims.end(), 0);
}

DiffusiveWeights::DiffusiveWeights(Eigen::MatrixXd w) : a(std::move(w)) {
    if (a.rows() != a.cols()) throw InvalidInputError("DiffusiveWeights: matrix must be square");
    if (!a.allFinite()) throw InvalidInputError("DiffusiveWeights: non-finite entries");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw InvalidInputError("DiffusiveWeights: weights must be exactly symmetric");
    if (a.diagonal().cwiseAbs().maxCoeff() != 0.0)
        throw InvalidInputError("DiffusiveWeights: self-weights must be zero");
    if (a.minCoeff() < 0.0) throw InvalidInputError("DiffusiveWeights: weights must be nonnegative");
}

InterconnectionMatrix::InterconnectionMatrix(Eigen::MatrixXd m_, Topology topo_)
    : m(std::move(m_)), topo(std::move(topo_)) {
    const int total = topo.total_ports();
    if (m.rows() != total || m.cols() != total)
        throw InvalidInputError("InterconnectionMatrix: size must match total port width");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw InvalidInputError("InterconnectionMatrix: M must be exactly symmetric");
    for (int i = 0; i < topo.k; ++i)
        for (int j = 0; j < topo.k; ++j)
            if (!topo.has_edge(i, j)) {
                const auto blk = m.block(topo.port_offset(i), topo.port_offset(j),
                                         topo.p_dims[i], topo.p_dims[j]);
                if (blk.cwiseAbs().maxCoeff() != 0.0)
                    throw InvalidInputError(
                        "InterconnectionMatrix: nonzero block outside the topology");
            }
}

Eigen::MatrixXd InterconnectionMatrix::row_restriction(int i) const {
    Eigen::MatrixXd out(topo.p_dims[i], topo.p_tilde(i));
    int col = 0;
    for (int j : topo.stacked_order(i)) {
        out.middleCols(col, topo.p_dims[j]) =
            m.block(topo.port_offset(i), topo.port_offset(j), topo.p_dims[i], topo.p_dims[j]);
        col += topo.p_dims[j];
    }
    return out;
}

InterconnectionMatrix diffusive_interconnection(const DiffusiveWeights& w, const Topology& topo) {
    for (int i = 0; i < topo.k; ++i)
        if (topo.p_dims[i] != 1)
            throw UnsupportedConfigurationError(
                "diffusive_interconnection: output ports must be scalar");
    if (w.a.rows() != topo.k)
        throw InvalidInputError("diffusive_interconnection: weight matrix size != k");
    for (int i = 0; i < topo.k; ++i)
        for (int j = 0; j < topo.k; ++j) {
            const bool edge = (i != j) && topo.has_edge(i, j);
            if (edge && w.a(i, j) <= 0.0)
                throw InvalidInputError("diffusive_interconnection: edge weight must be positive");
            if (!edge && w.a(i, j) != 0.0)
                throw InvalidInputError("diffusive_interconnection: weight off the topology");
        }

    Eigen::MatrixXd m = w.a;
    for (int i = 0; i < topo.k; ++i) m(i, i) = -w.degree(i);
    return InterconnectionMatrix(std::move(m), topo);
}

double spectral_radius(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw InvalidInputError("spectral_radius: matrix must be square");
    if (a.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::pair<Eigen::MatrixXd, double> assemble_closed_loop(
    const std::vector<SubsystemModel>& models, const std::vector<Eigen::MatrixXd>& gains,
    const InterconnectionMatrix& m) {
    const int k = static_cast<int>(models.size());
    if (static_cast<int>(gains.size()) != k)
        throw InvalidInputError("assemble_closed_loop: one gain per subsystem required");
    if (m.topo.k != k) throw InvalidInputError("assemble_closed_loop: topology size mismatch");

    int n = 0, p = 0;
    for (int i = 0; i < k; ++i) {
        if (gains[i].rows() != models[i].m() || gains[i].cols() != models[i].n())
            throw InvalidInputError("assemble_closed_loop: gain dimensions must be m_i x n_i");
        if (m.topo.p_dims[i] != models[i].p())
            throw InvalidInputError("assemble_closed_loop: port width mismatch with topology");
        n += models[i].n();
        p += models[i].p();
    }

    Eigen::MatrixXd ahat = Eigen::MatrixXd::Zero(n, n);   // A + B1 K
    Eigen::MatrixXd chat = Eigen::MatrixXd::Zero(p, n);   // C + D1 K
    Eigen::MatrixXd b2 = Eigen::MatrixXd::Zero(n, p);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(p, p);
    int ro = 0, po = 0;
    for (int i = 0; i < k; ++i) {
        const auto& md = models[i];
        ahat.block(ro, ro, md.n(), md.n()) = md.a + md.b1 * gains[i];
        chat.block(po, ro, md.p(), md.n()) = md.c + md.d1 * gains[i];
        b2.block(ro, po, md.n(), md.p()) = md.b2;
        d2.block(po, po, md.p(), md.p()) = md.d2;
        ro += md.n();
        po += md.p();
    }

    const Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(p, p) - d2 * m.m;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(loop, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smax == 0.0 || smin / smax < kInvertRcond)
        throw SingularMatrixError("assemble_closed_loop: algebraic loop I - D2 M is ill-posed",
                                  smax == 0.0 ? 0.0 : smin / smax);

    Eigen::MatrixXd acl = ahat + b2 * m.m * svd.solve(chat);
    const double rho = spectral_radius(acl);
    return {std::move(acl), rho};
}

bool global_stability_cert(const std::vector<SupplyRate>& supplies,
                           const InterconnectionMatrix& m) {
    const int k = static_cast<int>(supplies.size());
    if (m.topo.k != k) throw InvalidInputError("global_stability_cert: one supply per node");
    const int p = m.topo.total_ports();

    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
    int off = 0;
    for (int i = 0; i < k; ++i) {
        const auto& s = supplies[i];
        if (s.p() != m.topo.p_dims[i] || s.q() != m.topo.p_dims[i])
            throw InvalidInputError("global_stability_cert: supply width mismatch");
        // The certificate needs the triple to define a genuine supply rate.
        (void)invert_sym(s.block_matrix(), "global_stability_cert");
        const int w = s.p();
        f.block(off, off, w, w) = s.f.mat();
        g.block(off, off, w, w) = s.g;
        h.block(off, off, w, w) = s.h.mat();
        off += w;
    }

    if (!is_psd(SymMatrix(-f))) return false;
    Eigen::MatrixXd cert = m.m * f * m.m.transpose() - m.m * g - g.transpose() * m.m.transpose() + h;
    return is_pd(SymMatrix(0.5 * (cert + cert.transpose())));
}

SymMatrix build_lambda(const SupplyRate& s, double beta, int p_tilde) {
    if (beta <= 0.0) throw InvalidInputError("build_lambda: beta must be positive");
    const int p = s.p();
    if (s.q() != p) throw InvalidInputError("build_lambda: supply must have square ports");
    if (p_tilde < p) throw InvalidInputError("build_lambda: neighborhood width below own width");

    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(p_tilde + p, p_tilde + p);
    lam.topLeftCorner(p, p) = s.h.mat() - beta * Eigen::MatrixXd::Identity(p, p);
    lam.block(p_tilde, 0, p, p) = s.g;
    lam.block(0, p_tilde, p, p) = s.g.transpose();
    lam.bottomRightCorner(p, p) = s.f.mat();
    return SymMatrix(lam);
}

bool local_stability_cert(const SupplyRate& s, const Eigen::MatrixXd& m_row, double beta) {
    const int p = s.p();
    const int p_tilde = static_cast<int>(m_row.cols());
    if (m_row.rows() != p) throw InvalidInputError("local_stability_cert: m_row must be p x p~");

    if (!is_psd(SymMatrix(-s.f.mat()))) return false;

    Eigen::MatrixXd basis(p_tilde + p, p_tilde);
    basis.topRows(p_tilde) = Eigen::MatrixXd::Identity(p_tilde, p_tilde);
    basis.bottomRows(p) = m_row;
    const Eigen::MatrixXd lam = build_lambda(s, beta, p_tilde).mat();
    return is_psd(SymMatrix(basis.transpose() * lam * basis));
}

bool diffusive_stability_cert(const SupplyRate& s, double d_prime, double alpha) {
    if (s.p() != 1 || s.q() != 1)
        throw UnsupportedConfigurationError("diffusive_stability_cert: scalar ports required");
    if (d_prime <= 0.0) throw InvalidInputError("diffusive_stability_cert: d' must be positive");

    const double f = s.f.mat()(0, 0);
    const double g = s.g(0, 0);
    const double h = s.h.mat()(0, 0);
    if (std::abs(g - 0.5 * alpha) > kPsdTol * std::max(1.0, std::abs(0.5 * alpha))) return false;
    if (!(f <= -kStrictTol)) return false;
    if (!(f >= -1.0 / (2.0 * d_prime) + kStrictTol)) return false;
    const double floor = 2.0 * d_prime * std::max(1.0 - alpha, 0.0);
    return h >= floor + kStrictTol;
}

}  // namespace ddc
