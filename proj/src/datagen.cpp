#include "ddc/datagen.hpp"

#include <cmath>

#include "ddc/rng.hpp"

namespace ddc {

NoiseBound::NoiseBound(SymMatrix phi11_, Eigen::MatrixXd phi12_, SymMatrix phi22_)
    : phi11(std::move(phi11_)), phi12(std::move(phi12_)), phi22(std::move(phi22_)) {
    if (phi12.rows() != phi11.dim() || phi12.cols() != phi22.dim())
        throw InvalidInputError("NoiseBound: phi12 must be d x N");
    if (!phi12.allFinite()) throw InvalidInputError("NoiseBound: non-finite entries");
    if (!in_pi_class(as_qmi()))
        throw InvalidInputError("NoiseBound: bound matrix is outside the regularity class");
}

NoiseBound NoiseBound::per_sample_ball(int d, int n, double eps) {
    if (d <= 0 || n <= 0) throw InvalidInputError("NoiseBound: dimensions must be positive");
    if (eps < 0.0) throw InvalidInputError("NoiseBound: eps must be nonnegative");
    return NoiseBound(SymMatrix(n * eps * Eigen::MatrixXd::Identity(d, d)),
                      Eigen::MatrixXd::Zero(d, n),
                      SymMatrix(-Eigen::MatrixXd::Identity(n, n)));
}

QmiSet NoiseBound::as_qmi() const {
    const int dd = d(), nn = horizon();
    Eigen::MatrixXd phi(dd + nn, dd + nn);
    phi.topLeftCorner(dd, dd) = phi11.mat();
    phi.topRightCorner(dd, nn) = phi12;
    phi.bottomLeftCorner(nn, dd) = phi12.transpose();
    phi.bottomRightCorner(nn, nn) = phi22.mat();
    return QmiSet(dd, nn, SymMatrix(phi));
}

bool NoiseBound::contains(const Eigen::MatrixXd& w) const {
    if (w.rows() != d() || w.cols() != horizon())
        throw InvalidInputError("NoiseBound: matrix must be d x N");
    return qmi_contains(as_qmi(), w.transpose());
}

bool NoiseBound::ball_radius(double* eps_out) const {
    const int dd = d(), nn = horizon();
    const Eigen::MatrixXd& p11 = phi11.mat();
    const double c = p11(0, 0);
    if (c < 0.0) return false;
    if ((p11 - c * Eigen::MatrixXd::Identity(dd, dd)).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + c))
        return false;
    if (phi12.cwiseAbs().maxCoeff() != 0.0) return false;
    if ((phi22.mat() + Eigen::MatrixXd::Identity(nn, nn)).cwiseAbs().maxCoeff() != 0.0)
        return false;
    if (eps_out) *eps_out = c / nn;
    return true;
}

Eigen::MatrixXd sample_noise(const NoiseBound& bound, NoiseKind kind, std::uint64_t seed) {
    if (kind != NoiseKind::per_sample_ball)
        throw UnsupportedConfigurationError("sample_noise: unknown sampling kind");
    double eps = 0.0;
    if (!bound.ball_radius(&eps))
        throw UnsupportedConfigurationError("sample_noise: bound is not of per-sample-ball form");
    Rng rng(seed);
    Eigen::MatrixXd w(bound.d(), bound.horizon());
    const double radius = std::sqrt(eps);
    for (int t = 0; t < w.cols(); ++t) w.col(t) = rng.ball(bound.d(), radius);
    return w;
}

LocalData::LocalData(Eigen::MatrixXd x_, Eigen::MatrixXd x_plus_, Eigen::MatrixXd u_,
                     Eigen::MatrixXd v_, Eigen::MatrixXd y_)
    : x(std::move(x_)), x_plus(std::move(x_plus_)), u(std::move(u_)), v(std::move(v_)),
      y(std::move(y_)) {
    const auto cols = x.cols();
    if (cols < 1) throw InvalidInputError("LocalData: at least one sample required");
    if (x_plus.cols() != cols || u.cols() != cols || v.cols() != cols || y.cols() != cols)
        throw InvalidInputError("LocalData: all matrices must share the sample count");
    if (x_plus.rows() != x.rows()) throw InvalidInputError("LocalData: X and X+ row mismatch");
    if (v.rows() != y.rows()) throw InvalidInputError("LocalData: V and Y row mismatch");
}

InterconnectionData::InterconnectionData(Eigen::MatrixXd v_tilde_, Eigen::MatrixXd y_tilde_,
                                         std::vector<int> order)
    : v_tilde(std::move(v_tilde_)), y_tilde(std::move(y_tilde_)),
      neighbor_order(std::move(order)) {
    if (v_tilde.cols() != y_tilde.cols())
        throw InvalidInputError("InterconnectionData: sample count mismatch");
    if (v_tilde.cols() < 1) throw InvalidInputError("InterconnectionData: empty record");
    if (y_tilde.rows() < v_tilde.rows())
        throw InvalidInputError("InterconnectionData: stacked outputs narrower than own port");
}

LocalData simulate_collect_local(const SubsystemModel& model, const Eigen::MatrixXd& u_signal,
                                 const Eigen::MatrixXd& v_signal, const NoiseBound& bound,
                                 int n_samples, std::uint64_t seed, const Eigen::VectorXd& x0) {
    const int n = model.n(), m = model.m(), p = model.p();
    if (u_signal.rows() != m || u_signal.cols() < n_samples)
        throw InvalidInputError("simulate_collect_local: input signal must be m x N");
    if (v_signal.rows() != p || v_signal.cols() < n_samples)
        throw InvalidInputError("simulate_collect_local: coupling signal must be p x N");
    if (bound.d() != n + p || bound.horizon() != n_samples)
        throw InvalidInputError("simulate_collect_local: noise bound must be (n+p) x N");
    if (x0.size() != n) throw InvalidInputError("simulate_collect_local: x0 dimension != n");

    const Eigen::MatrixXd w = sample_noise(bound, NoiseKind::per_sample_ball, seed);
    Eigen::MatrixXd xs(n, n_samples), xp(n, n_samples), ys(p, n_samples);
    Eigen::VectorXd x = x0;
    for (int t = 0; t < n_samples; ++t) {
        xs.col(t) = x;
        ys.col(t) = model.c * x + model.d1 * u_signal.col(t) + model.d2 * v_signal.col(t) +
                    w.col(t).tail(p);
        xp.col(t) = model.a * x + model.b1 * u_signal.col(t) + model.b2 * v_signal.col(t) +
                    w.col(t).head(n);
        x = xp.col(t);
    }
    return LocalData(std::move(xs), std::move(xp), u_signal.leftCols(n_samples),
                     v_signal.leftCols(n_samples), std::move(ys));
}

InterconnectionData collect_interconnection(const Eigen::MatrixXd& m_row,
                                            const Eigen::MatrixXd& y_tilde_signal,
                                            const NoiseBound& bound, int n_tilde,
                                            std::uint64_t seed, std::vector<int> neighbor_order) {
    const int p = static_cast<int>(m_row.rows());
    if (y_tilde_signal.rows() != m_row.cols() || y_tilde_signal.cols() < n_tilde)
        throw InvalidInputError("collect_interconnection: stacked signal must be p~ x N~");
    if (bound.d() != p || bound.horizon() != n_tilde)
        throw InvalidInputError("collect_interconnection: noise bound must be p x N~");

    const Eigen::MatrixXd xi = sample_noise(bound, NoiseKind::per_sample_ball, seed);
    Eigen::MatrixXd y = y_tilde_signal.leftCols(n_tilde);
    Eigen::MatrixXd v = m_row * y + xi;
    return InterconnectionData(std::move(v), std::move(y), std::move(neighbor_order));
}

namespace {

double reg_epsilon(const Eigen::MatrixXd& phi11) {
    return 1e-9 * std::max(1.0, spectral_norm(phi11));
}

SymMatrix assemble_j(const LocalData& d, const NoiseBound& phi) {
    const int n = d.n(), m = d.m(), p = d.p(), nn = d.samples();
    const int q = n + p, r = n + m + p;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(q + r, q + nn);
    t.topLeftCorner(q, q) = Eigen::MatrixXd::Identity(q, q);
    t.block(0, q, n, nn) = d.x_plus;
    t.block(n, q, p, nn) = d.y;
    t.block(q, q, n, nn) = -d.x;
    t.block(q + n, q, m, nn) = -d.u;
    t.block(q + n + m, q, p, nn) = -d.v;
    const Eigen::MatrixXd j = t * phi.as_qmi().pi.mat() * t.transpose();
    return SymMatrix(0.5 * (j + j.transpose()));
}

SymMatrix assemble_theta(const InterconnectionData& d, const NoiseBound& psi) {
    const int p = d.p(), pt = d.p_tilde(), nn = d.samples();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(p + pt, p + nn);
    t.topLeftCorner(p, p) = Eigen::MatrixXd::Identity(p, p);
    t.block(0, p, p, nn) = d.v_tilde;
    t.block(p, p, pt, nn) = -d.y_tilde;
    const Eigen::MatrixXd th = t * psi.as_qmi().pi.mat() * t.transpose();
    return SymMatrix(0.5 * (th + th.transpose()));
}

NoiseBound inflate(const NoiseBound& b) {
    return NoiseBound(SymMatrix(b.phi11.mat() +
                                reg_epsilon(b.phi11.mat()) *
                                    Eigen::MatrixXd::Identity(b.d(), b.d())),
                      b.phi12, b.phi22);
}

}  // namespace

BuiltJ build_J(const LocalData& data, const NoiseBound& phi, bool regularize) {
    if (phi.d() != data.n() + data.p() || phi.horizon() != data.samples())
        throw InvalidInputError("build_J: bound dimensions do not match the data");
    BuiltJ out{assemble_j(data, phi), false};
    if (regularize && inertia(out.j).positive == 0) {
        out.j = assemble_j(data, inflate(phi));
        out.regularized = true;
    }
    return out;
}

ThetaPair build_theta_pair(const InterconnectionData& data, const NoiseBound& psi,
                           bool regularize) {
    if (psi.d() != data.p() || psi.horizon() != data.samples())
        throw InvalidInputError("build_theta_pair: bound dimensions do not match the data");
    const int p = data.p(), pt = data.p_tilde();

    ThetaPair out{assemble_theta(data, psi), SymMatrix(), false};
    if (regularize && rcond_sym(out.theta) < kInvertRcond) {
        out.theta = assemble_theta(data, inflate(psi));
        out.regularized = true;
    }
    out.theta_hat = dual_qmi(QmiSet(p, pt, out.theta)).pi;

    // The dual is a congruence of -theta^{-1}, so its inertia is that of
    // theta with the sign counts swapped. Classify on theta, whose scale is
    // set by the data, cutting zeros at the invertibility floor; the dual
    // itself can be arbitrarily badly scaled after regularization.
    const Inertia ti = inertia(out.theta, kInvertRcond);
    const Inertia in{ti.positive, ti.zero, ti.negative};
    if (!(in.negative == p && in.zero == 0 && in.positive == pt))
        throw InertiaError("build_theta_pair: dual inertia is (" + std::to_string(in.negative) +
                           "," + std::to_string(in.zero) + "," + std::to_string(in.positive) +
                           "), need (" + std::to_string(p) + ",0," + std::to_string(pt) + ")");
    return out;
}

NetworkData collect_network(const std::vector<SubsystemModel>& models,
                            const InterconnectionMatrix& m, double eps_l, double eps_g,
                            int n_samples, int n_tilde, std::uint64_t seed, double u_amp,
                            int u_hold, double x0_amp) {
    const int k = static_cast<int>(models.size());
    if (m.topo.k != k) throw InvalidInputError("collect_network: topology size mismatch");
    if (n_samples < 1 || n_tilde < 1 || n_tilde > n_samples)
        throw InvalidInputError("collect_network: need 1 <= N~ <= N");
    if (u_hold < 1) throw InvalidInputError("collect_network: hold length must be >= 1");
    if (x0_amp < 0.0) throw InvalidInputError("collect_network: x0 amplitude must be >= 0");

    const int total_p = m.topo.total_ports();
    int total_n = 0;
    for (const auto& md : models) total_n += md.n();

    // Per-node exogenous inputs (held steps), process/measurement noise, and
    // coupling noise, each from its own derived stream.
    std::vector<Eigen::MatrixXd> u(k), w(k), xi(k);
    for (int i = 0; i < k; ++i) {
        const auto& md = models[i];
        Rng ur = Rng::derive(seed, i, 0);
        u[i].resize(md.m(), n_samples);
        for (int t = 0; t < n_samples; ++t) {
            if (t % u_hold == 0)
                for (int a = 0; a < md.m(); ++a) u[i](a, t) = ur.uniform(-u_amp, u_amp);
            else
                u[i].col(t) = u[i].col(t - 1);
        }
        Rng wr = Rng::derive(seed, i, 1);
        w[i].resize(md.n() + md.p(), n_samples);
        for (int t = 0; t < n_samples; ++t)
            w[i].col(t) = wr.ball(md.n() + md.p(), std::sqrt(eps_l));
        Rng xr = Rng::derive(seed, i, 2);
        xi[i].resize(md.p(), n_samples);
        for (int t = 0; t < n_samples; ++t) xi[i].col(t) = xr.ball(md.p(), std::sqrt(eps_g));
    }

    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(total_p, total_p);
    for (int i = 0; i < k; ++i) {
        const int po = m.topo.port_offset(i);
        d2.block(po, po, models[i].p(), models[i].p()) = models[i].d2;
    }
    const Eigen::MatrixXd loop = Eigen::MatrixXd::Identity(total_p, total_p) - d2 * m.m;
    Eigen::PartialPivLU<Eigen::MatrixXd> loop_lu(loop);

    Eigen::MatrixXd xs(total_n, n_samples + 1), ys(total_p, n_samples), vs(total_p, n_samples);
    std::vector<int> noff(k, 0);
    for (int i = 1; i < k; ++i) noff[i] = noff[i - 1] + models[i - 1].n();
    for (int i = 0; i < k; ++i) {
        Rng x0r = Rng::derive(seed, i, 3);
        xs.col(0).segment(noff[i], models[i].n()) = x0r.ball(models[i].n(), x0_amp);
    }

    for (int t = 0; t < n_samples; ++t) {
        Eigen::VectorXd rhs(total_p), xinoise(total_p);
        for (int i = 0; i < k; ++i) {
            const auto& md = models[i];
            const int po = m.topo.port_offset(i);
            rhs.segment(po, md.p()) = md.c * xs.col(t).segment(noff[i], md.n()) +
                                      md.d1 * u[i].col(t) + w[i].col(t).tail(md.p());
            xinoise.segment(po, md.p()) = xi[i].col(t);
        }
        const Eigen::VectorXd y = loop_lu.solve(rhs + d2 * xinoise);
        const Eigen::VectorXd v = m.m * y + xinoise;
        ys.col(t) = y;
        vs.col(t) = v;
        for (int i = 0; i < k; ++i) {
            const auto& md = models[i];
            xs.col(t + 1).segment(noff[i], md.n()) =
                md.a * xs.col(t).segment(noff[i], md.n()) + md.b1 * u[i].col(t) +
                md.b2 * v.segment(m.topo.port_offset(i), md.p()) + w[i].col(t).head(md.n());
        }
    }

    NetworkData out;
    for (int i = 0; i < k; ++i) {
        const auto& md = models[i];
        const int po = m.topo.port_offset(i);
        out.local.emplace_back(xs.block(noff[i], 0, md.n(), n_samples),
                               xs.block(noff[i], 1, md.n(), n_samples), u[i],
                               vs.middleRows(po, md.p()), ys.middleRows(po, md.p()));

        const auto order = m.topo.stacked_order(i);
        Eigen::MatrixXd yt(m.topo.p_tilde(i), n_tilde);
        int row = 0;
        for (int j : order) {
            yt.middleRows(row, m.topo.p_dims[j]) =
                ys.block(m.topo.port_offset(j), 0, m.topo.p_dims[j], n_tilde);
            row += m.topo.p_dims[j];
        }
        out.inter.emplace_back(vs.block(po, 0, md.p(), n_tilde), std::move(yt),
                               std::vector<int>(order));
    }
    return out;
}

}  // namespace ddc
