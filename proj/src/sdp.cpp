#include "ddc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddc {

// ============================================================================
// LmiBlock
// ============================================================================

LmiBlock::LmiBlock(int dim) : dim_(dim), c0_(Eigen::MatrixXd::Zero(dim, dim)) {
    if (dim <= 0) throw InvalidInputError("LmiBlock: dimension must be positive");
}

Eigen::MatrixXd& LmiBlock::comp(int index) {
    auto it = coef_.find(index);
    if (it == coef_.end())
        it = coef_.emplace(index, Eigen::MatrixXd::Zero(dim_, dim_)).first;
    return it->second;
}

void LmiBlock::stamp_const(int r0, int c0, const Eigen::MatrixXd& m) {
    if (r0 < 0 || c0 < 0 || r0 + m.rows() > dim_ || c0 + m.cols() > dim_)
        throw InvalidInputError("LmiBlock: placement exceeds block bounds");
    c0_.block(r0, c0, m.rows(), m.cols()) += m;
    if (r0 != c0) c0_.block(c0, r0, m.cols(), m.rows()) += m.transpose();
}

void LmiBlock::add_const(int r0, int c0, const Eigen::MatrixXd& m) {
    if (r0 == c0 && (m.rows() != m.cols() ||
                     (m.size() && (m - m.transpose()).cwiseAbs().maxCoeff() >
                                      1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff()))))
        throw InvalidInputError("LmiBlock: diagonal placement must be symmetric");
    stamp_const(r0, c0, m);
}

void LmiBlock::add_scalar(int r0, int c0, ScalarVar v, const Eigen::MatrixXd& coefm) {
    if (v.index < 0) throw InvalidInputError("LmiBlock: unregistered scalar variable");
    if (r0 == c0 && (coefm.rows() != coefm.cols() ||
                     (coefm.size() && (coefm - coefm.transpose()).cwiseAbs().maxCoeff() >
                                          1e-9 * std::max(1.0, coefm.cwiseAbs().maxCoeff()))))
        throw InvalidInputError("LmiBlock: diagonal scalar placement must be symmetric");
    if (r0 < 0 || c0 < 0 || r0 + coefm.rows() > dim_ || c0 + coefm.cols() > dim_)
        throw InvalidInputError("LmiBlock: placement exceeds block bounds");
    Eigen::MatrixXd& target = comp(v.index);
    target.block(r0, c0, coefm.rows(), coefm.cols()) += coefm;
    if (r0 != c0) target.block(c0, r0, coefm.cols(), coefm.rows()) += coefm.transpose();
}

void LmiBlock::add_sym(int r0, int c0, SymVar v, double s) {
    if (v.start < 0) throw InvalidInputError("LmiBlock: unregistered symmetric variable");
    const int n = v.n;
    if (r0 < 0 || c0 < 0 || r0 + n > dim_ || c0 + n > dim_)
        throw InvalidInputError("LmiBlock: placement exceeds block bounds");
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int i = std::max(a, b), j = std::min(a, b);
            Eigen::MatrixXd& target = comp(v.start + i * (i + 1) / 2 + j);
            target(r0 + a, c0 + b) += s;
            if (r0 != c0) target(c0 + b, r0 + a) += s;
        }
    }
}

void LmiBlock::add_mat(int r0, int c0, MatVar v, double s, bool transposed) {
    if (v.start < 0) throw InvalidInputError("LmiBlock: unregistered matrix variable");
    const int pr = transposed ? v.cols : v.rows;  // placed rows/cols
    const int pc = transposed ? v.rows : v.cols;
    if (r0 == c0)
        throw InvalidInputError("LmiBlock: rectangular variable on the diagonal is not supported");
    if (r0 < 0 || c0 < 0 || r0 + pr > dim_ || c0 + pc > dim_)
        throw InvalidInputError("LmiBlock: placement exceeds block bounds");
    for (int a = 0; a < pr; ++a) {
        for (int b = 0; b < pc; ++b) {
            const int vr = transposed ? b : a, vc = transposed ? a : b;
            Eigen::MatrixXd& target = comp(v.start + vr * v.cols + vc);
            target(r0 + a, c0 + b) += s;
            target(c0 + b, r0 + a) += s;
        }
    }
}

void LmiBlock::add_congruence(int r0, const Eigen::MatrixXd& t, SymVar v, double s) {
    if (v.start < 0) throw InvalidInputError("LmiBlock: unregistered symmetric variable");
    if (t.rows() != v.n)
        throw InvalidInputError("LmiBlock: congruence factor must have V.n rows");
    const int w = static_cast<int>(t.cols());
    if (r0 < 0 || r0 + w > dim_)
        throw InvalidInputError("LmiBlock: placement exceeds block bounds");
    for (int i = 0; i < v.n; ++i) {
        for (int j = 0; j <= i; ++j) {
            // d(T^T V T)/dV_ij = t_i t_j^T + t_j t_i^T (single term on the diagonal).
            Eigen::MatrixXd contrib =
                t.row(i).transpose() * t.row(j) + t.row(j).transpose() * t.row(i);
            if (i == j) contrib *= 0.5;
            comp(v.start + i * (i + 1) / 2 + j).block(r0, r0, w, w) += s * contrib;
        }
    }
}

void LmiBlock::add_trace(int r0, SymVar v, double s) {
    if (v.start < 0) throw InvalidInputError("LmiBlock: unregistered symmetric variable");
    if (r0 < 0 || r0 >= dim_) throw InvalidInputError("LmiBlock: placement exceeds block bounds");
    for (int i = 0; i < v.n; ++i) comp(v.start + i * (i + 1) / 2 + i)(r0, r0) += s;
}

// ============================================================================
// SdpProblem
// ============================================================================

int SdpProblem::register_components(const std::string& name, int count) {
    const int start = num_vars_;
    for (int i = 0; i < count; ++i) var_names_.push_back(name + "[" + std::to_string(i) + "]");
    num_vars_ += count;
    return start;
}

ScalarVar SdpProblem::scalar(const std::string& name) {
    return ScalarVar{register_components(name, 1)};
}

SymVar SdpProblem::sym(int n, const std::string& name) {
    if (n <= 0) throw InvalidInputError("SdpProblem: symmetric variable needs n > 0");
    return SymVar{register_components(name, n * (n + 1) / 2), n};
}

MatVar SdpProblem::mat(int rows, int cols, const std::string& name) {
    if (rows <= 0 || cols <= 0) throw InvalidInputError("SdpProblem: matrix variable needs size");
    return MatVar{register_components(name, rows * cols), rows, cols};
}

void SdpProblem::require_psd(LmiBlock block, const std::string& label) {
    for (const auto& [idx, c] : block.coefficients()) {
        if (idx >= num_vars_)
            throw InvalidInputError("SdpProblem: block references a foreign variable");
        const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff()))
            throw InvalidInputError("SdpProblem: block coefficient is not symmetric");
    }
    blocks_.push_back(std::move(block));
    labels_.push_back(label);
}

void SdpProblem::maximize(ScalarVar v, double w) {
    if (v.index < 0 || v.index >= num_vars_)
        throw InvalidInputError("SdpProblem: objective references a foreign variable");
    objective_.emplace_back(v.index, w);
}

double SdpProblem::value(const Eigen::VectorXd& x, ScalarVar v) const { return x(v.index); }

Eigen::MatrixXd SdpProblem::value(const Eigen::VectorXd& x, const MatVar& v) const {
    Eigen::MatrixXd m(v.rows, v.cols);
    for (int i = 0; i < v.rows; ++i)
        for (int j = 0; j < v.cols; ++j) m(i, j) = x(v.start + i * v.cols + j);
    return m;
}

SymMatrix SdpProblem::value(const Eigen::VectorXd& x, const SymVar& v) const {
    Eigen::MatrixXd m(v.n, v.n);
    for (int i = 0; i < v.n; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = x(v.start + i * (i + 1) / 2 + j);
    return SymMatrix(m);
}

SymMatrix SdpProblem::eval_block(int k, const Eigen::VectorXd& x) const {
    const LmiBlock& b = blocks_[k];
    Eigen::MatrixXd m = b.constant();
    for (const auto& [idx, c] : b.coefficients()) m += x(idx) * c;
    return SymMatrix(0.5 * (m + m.transpose()));
}

// ============================================================================
// Interior-point engine
// ============================================================================

namespace {

// Internal block in dual form S(y) = C - sum_j y_j A_j.
struct DualBlock {
    int dim = 0;
    Eigen::MatrixXd c;
    std::vector<std::pair<int, Eigen::MatrixXd>> a;
};

// Largest step alpha with M + alpha * D still PSD (M assumed PD).
double max_step(const Eigen::MatrixXd& m, const Eigen::MatrixXd& d) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return 0.0;
    Eigen::MatrixXd t = llt.matrixL().solve(d);
    t = llt.matrixL().solve(t.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()),
                                                      Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    return lo >= 0.0 ? 1e100 : -1.0 / lo;
}

struct Engine {
    const std::vector<DualBlock>& blocks;
    int m;                    // number of unknowns
    Eigen::VectorXd b;        // maximize b^T y
    int total_dim = 0;

    std::vector<Eigen::MatrixXd> X, S;
    Eigen::VectorXd y;

    explicit Engine(const std::vector<DualBlock>& blks, Eigen::VectorXd bb, Eigen::VectorXd y0)
        : blocks(blks), m(static_cast<int>(bb.size())), b(std::move(bb)), y(std::move(y0)) {
        for (const auto& blk : blocks) total_dim += blk.dim;
        refresh_slack();
        X.resize(blocks.size());
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S[k]);
            // Start perfectly centered: X = S^{-1} gives X.S = I in every block.
            X[k] = es.eigenvectors() *
                   es.eigenvalues().cwiseMax(1e-300).cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose();
        }
    }

    void refresh_slack() {
        S.resize(blocks.size());
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            Eigen::MatrixXd s = blocks[k].c;
            for (const auto& [j, a] : blocks[k].a) s -= y(j) * a;
            S[k] = 0.5 * (s + s.transpose());
        }
    }

    double mu() const {
        double v = 0.0;
        for (std::size_t k = 0; k < blocks.size(); ++k)
            v += (X[k].array() * S[k].array()).sum();
        return v / total_dim;
    }

    // r = b - A(X), the equality residual of the primal iterate.
    Eigen::VectorXd residual() const {
        Eigen::VectorXd r = b;
        for (std::size_t k = 0; k < blocks.size(); ++k)
            for (const auto& [j, a] : blocks[k].a) r(j) -= (a.array() * X[k].array()).sum();
        return r;
    }

    // One predictor-corrector step. Returns false when the step stalls.
    bool step() {
        const double mu_now = mu();
        std::vector<Eigen::MatrixXd> W(blocks.size()), Sinv(blocks.size());
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ess(S[k]);
            Eigen::VectorXd ev = ess.eigenvalues().cwiseMax(1e-300);
            Eigen::MatrixXd shalf = ess.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
                                    ess.eigenvectors().transpose();
            Eigen::MatrixXd sinvh = ess.eigenvectors() *
                                    ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                                    ess.eigenvectors().transpose();
            Sinv[k] = sinvh * sinvh;
            Eigen::MatrixXd mid = shalf * X[k] * shalf;
            Eigen::MatrixXd midh = sqrt_psd(0.5 * (mid + mid.transpose()), 1e-300);
            W[k] = sinvh * midh * sinvh;
            W[k] = 0.5 * (W[k] + W[k].transpose());
        }

        // Schur complement M_ij = sum_k tr(A_ki W A_kj W).
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const auto& terms = blocks[k].a;
            std::vector<Eigen::MatrixXd> g(terms.size());
            for (std::size_t u = 0; u < terms.size(); ++u)
                g[u] = W[k] * terms[u].second * W[k];
            for (std::size_t u = 0; u < terms.size(); ++u)
                for (std::size_t v = 0; v <= u; ++v) {
                    const double val = (terms[u].second.array() * g[v].array()).sum();
                    M(terms[u].first, terms[v].first) += val;
                    if (u != v) M(terms[v].first, terms[u].first) += val;
                }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() != Eigen::Success) {
            M.diagonal().array() += 1e-12 * (M.trace() / m + 1.0);
            llt.compute(M);
            if (llt.info() != Eigen::Success) return false;
        }

        Eigen::VectorXd a_of_sinv = Eigen::VectorXd::Zero(m);
        for (std::size_t k = 0; k < blocks.size(); ++k)
            for (const auto& [j, a] : blocks[k].a)
                a_of_sinv(j) += (a.array() * Sinv[k].array()).sum();

        auto directions = [&](double sigma, std::vector<Eigen::MatrixXd>& dX,
                              std::vector<Eigen::MatrixXd>& dS, Eigen::VectorXd& dy) {
            Eigen::VectorXd rhs = b - sigma * mu_now * a_of_sinv;
            dy = llt.solve(rhs);
            dX.resize(blocks.size());
            dS.resize(blocks.size());
            for (std::size_t k = 0; k < blocks.size(); ++k) {
                Eigen::MatrixXd ds = Eigen::MatrixXd::Zero(blocks[k].dim, blocks[k].dim);
                for (const auto& [j, a] : blocks[k].a) ds -= dy(j) * a;
                dS[k] = ds;
                Eigen::MatrixXd dx = sigma * mu_now * Sinv[k] - X[k] - W[k] * ds * W[k];
                dX[k] = 0.5 * (dx + dx.transpose());
            }
        };

        std::vector<Eigen::MatrixXd> dX, dS;
        Eigen::VectorXd dy;

        // Predictor fixes the centering weight, corrector takes the step.
        directions(0.0, dX, dS, dy);
        double ap = 1.0, ad = 1.0;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            ap = std::min(ap, max_step(X[k], dX[k]));
            ad = std::min(ad, max_step(S[k], dS[k]));
        }
        double mu_aff = 0.0;
        for (std::size_t k = 0; k < blocks.size(); ++k)
            mu_aff += ((X[k] + ap * dX[k]).array() * (S[k] + ad * dS[k]).array()).sum();
        mu_aff = std::max(mu_aff / total_dim, 0.0);
        double sigma = std::pow(mu_aff / std::max(mu_now, 1e-300), 3);
        sigma = std::clamp(sigma, 1e-6, 0.9);

        directions(sigma, dX, dS, dy);
        ap = ad = 1e100;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            ap = std::min(ap, max_step(X[k], dX[k]));
            ad = std::min(ad, max_step(S[k], dS[k]));
        }
        ap = std::min(1.0, 0.98 * ap);
        ad = std::min(1.0, 0.98 * ad);
        if (ap < 1e-10 && ad < 1e-10) return false;

        for (std::size_t k = 0; k < blocks.size(); ++k) X[k] += ap * dX[k];
        y += ad * dy;
        refresh_slack();
        return true;
    }
};

}  // namespace

namespace {

struct ScaledProblem {
    // User blocks after normalization: C0 and per-variable coefficients in
    // scaled units; vscale maps scaled x back to original (x = xs / vscale).
    std::vector<Eigen::MatrixXd> c0;
    std::vector<std::vector<std::pair<int, Eigen::MatrixXd>>> coef;
    std::vector<double> vscale;
};

ScaledProblem scale_problem(const std::vector<LmiBlock>& blocks, int nv) {
    ScaledProblem sp;
    const int nb = static_cast<int>(blocks.size());
    sp.c0.resize(nb);
    sp.coef.resize(nb);
    sp.vscale.assign(nv, 0.0);

    for (int k = 0; k < nb; ++k) {
        double s = std::max(1.0, spectral_norm(blocks[k].constant()));
        for (const auto& [j, c] : blocks[k].coefficients())
            s = std::max(s, spectral_norm(c));
        sp.c0[k] = blocks[k].constant() / s;
        for (const auto& [j, c] : blocks[k].coefficients()) sp.coef[k].emplace_back(j, c / s);
    }
    for (int k = 0; k < nb; ++k)
        for (const auto& [j, c] : sp.coef[k])
            sp.vscale[j] = std::max(sp.vscale[j], spectral_norm(c));
    for (double& v : sp.vscale) v = (v == 0.0) ? 1.0 : std::clamp(v, 1e-6, 1e6);
    for (int k = 0; k < nb; ++k)
        for (auto& [j, c] : sp.coef[k]) c /= sp.vscale[j];
    return sp;
}

Eigen::VectorXd unscale(const Eigen::VectorXd& xs, const std::vector<double>& vscale) {
    Eigen::VectorXd x(xs.size());
    for (int j = 0; j < xs.size(); ++j) x(j) = xs(j) / vscale[j];
    return x;
}

// Minimum eigenvalue over the problem's true (unscaled) blocks at x.
double true_margin(const SdpProblem& p, const Eigen::VectorXd& x) {
    double lo = 1e300;
    for (int k = 0; k < p.num_blocks(); ++k)
        lo = std::min(lo, min_eigenvalue(p.eval_block(k, x)));
    return lo;
}

// Weak-duality bound on the phase-I objective: any feasible (x, t) with
// t in [0, cap] satisfies t <= <C, X> + sum_j bound_j |r_j| for every PSD X.
// A negative bound is a certificate that no x inside the box satisfies all
// blocks. X is PSD-projected and trace-normalized before evaluating.
double infeasibility_bound(const Engine& eng, const std::vector<double>& bound) {
    std::vector<Eigen::MatrixXd> xp(eng.X.size());
    double tr = 0.0;
    for (std::size_t k = 0; k < eng.X.size(); ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(eng.X[k]);
        xp[k] = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                es.eigenvectors().transpose();
        tr += xp[k].trace();
    }
    if (tr <= 0.0) return 1e300;
    double obj = 0.0;
    Eigen::VectorXd r = eng.b;
    for (std::size_t k = 0; k < eng.X.size(); ++k) {
        xp[k] /= tr;
        obj += (eng.blocks[k].c.array() * xp[k].array()).sum();
        for (const auto& [j, a] : eng.blocks[k].a) r(j) -= (a.array() * xp[k].array()).sum();
    }
    double slack = 0.0;
    for (int j = 0; j < r.size(); ++j) slack += bound[j] * std::abs(r(j));
    return obj + slack;
}

}  // namespace

SdpResult sdp_solve(const SdpProblem& p, const SdpOptions& opts) {
    SdpResult out;
    const int nv = p.num_vars();

    if (p.num_blocks() == 0) {
        out.status = SdpStatus::feasible;
        out.x = Eigen::VectorXd::Zero(std::max(nv, 0));
        out.detail = "no constraints";
        return out;
    }

    const ScaledProblem sp = scale_problem(p.blocks_, nv);
    const int nb = p.num_blocks();
    const int tvar = nv;  // phase-I shift variable index

    // --- phase-I block list: user blocks with -tI, boxes, t cap ---
    std::vector<DualBlock> blocks;
    std::vector<double> bound(nv + 1, opts.var_box);
    bound[tvar] = opts.t_cap;
    for (int k = 0; k < nb; ++k) {
        DualBlock blk;
        blk.dim = static_cast<int>(sp.c0[k].rows());
        blk.c = sp.c0[k];
        for (const auto& [j, c] : sp.coef[k]) blk.a.emplace_back(j, -c);
        blk.a.emplace_back(tvar, Eigen::MatrixXd::Identity(blk.dim, blk.dim));
        blocks.push_back(std::move(blk));
    }
    for (int j = 0; j < nv; ++j) {
        for (double sgn : {1.0, -1.0}) {
            DualBlock box;
            box.dim = 1;
            box.c = Eigen::MatrixXd::Constant(1, 1, opts.var_box);
            box.a.emplace_back(j, Eigen::MatrixXd::Constant(1, 1, sgn));
            blocks.push_back(std::move(box));
        }
    }
    {
        DualBlock cap;
        cap.dim = 1;
        cap.c = Eigen::MatrixXd::Constant(1, 1, opts.t_cap);
        cap.a.emplace_back(tvar, Eigen::MatrixXd::Constant(1, 1, 1.0));
        blocks.push_back(std::move(cap));
    }

    Eigen::VectorXd b1 = Eigen::VectorXd::Zero(nv + 1);
    b1(tvar) = 1.0;
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(nv + 1);
    double t0 = 0.0;
    for (int k = 0; k < nb; ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sp.c0[k], Eigen::EigenvaluesOnly);
        t0 = std::min(t0, es.eigenvalues().minCoeff());
    }
    y0(tvar) = t0 - 1.0;

    Engine eng(blocks, b1, y0);
    const double mu0 = eng.mu();

    double best_t = -1e300, best_margin = 0.0;
    Eigen::VectorXd best_x;
    int iter = 0;
    std::string stop = "iteration limit";

    for (iter = 0; iter < opts.max_iter; ++iter) {
        const double t = eng.y(tvar);
        if (t > 0.0) {
            const Eigen::VectorXd x = unscale(eng.y.head(nv), sp.vscale);
            const double margin = true_margin(p, x);
            if (margin >= 0.0 && t > best_t) {
                best_t = t;
                best_x = x;
                best_margin = margin;
            }
            if (margin >= 0.0 && t >= opts.feas_target) {
                stop = "margin target reached";
                break;
            }
        }
        if (iter >= 3 && infeasibility_bound(eng, bound) < -opts.infeas_tol) {
            out.status = SdpStatus::infeasible;
            out.iterations = iter;
            out.detail = "weak-duality certificate (box " + std::to_string(opts.var_box) + ")";
            return out;
        }
        if (eng.mu() < 1e-14 * std::max(1.0, mu0) && eng.residual().lpNorm<Eigen::Infinity>() < 1e-12) {
            stop = "converged";
            break;
        }
        if (!eng.step()) {
            stop = "step stalled";
            break;
        }
    }

    if (best_t >= opts.min_accept_margin) {
        out.status = SdpStatus::feasible;
        out.x = best_x;
        out.margin = best_margin;
        out.iterations = iter;
        out.detail = stop;
    } else if (infeasibility_bound(eng, bound) < -opts.infeas_tol) {
        out.status = SdpStatus::infeasible;
        out.iterations = iter;
        out.detail = "weak-duality certificate at " + stop;
        return out;
    } else {
        out.status = SdpStatus::error;
        out.iterations = iter;
        std::ostringstream os;
        os << "no verdict: " << stop << ", t=" << eng.y(tvar) << ", mu=" << eng.mu()
           << ", best_t=" << best_t;
        out.detail = os.str();
        return out;
    }

    // --- optional phase II: maximize the linear objective from the interior ---
    if (!p.objective_.empty() && out.status == SdpStatus::feasible) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
        for (const auto& [j, w] : p.objective_) c(j) += w / sp.vscale[j];

        std::vector<DualBlock> blocks2;
        for (int k = 0; k < nb; ++k) {
            DualBlock blk;
            blk.dim = static_cast<int>(sp.c0[k].rows());
            blk.c = sp.c0[k];
            for (const auto& [j, cf] : sp.coef[k]) blk.a.emplace_back(j, -cf);
            blocks2.push_back(std::move(blk));
        }
        for (int j = 0; j < nv; ++j) {
            for (double sgn : {1.0, -1.0}) {
                DualBlock box;
                box.dim = 1;
                box.c = Eigen::MatrixXd::Constant(1, 1, opts.var_box);
                box.a.emplace_back(j, Eigen::MatrixXd::Constant(1, 1, sgn));
                blocks2.push_back(std::move(box));
            }
        }
        Eigen::VectorXd ys = out.x;
        for (int j = 0; j < nv; ++j) ys(j) *= sp.vscale[j];
        Engine eng2(blocks2, c, ys);
        double lo = 1e300;
        for (const auto& s : eng2.S) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
            lo = std::min(lo, es.eigenvalues().minCoeff());
        }
        if (lo <= 0.0) {
            out.status = SdpStatus::error;
            out.detail = "objective phase: no strict interior at phase-I point";
            return out;
        }
        int it2 = 0;
        for (; it2 < opts.max_iter; ++it2) {
            const double obj = c.dot(eng2.y);
            const double relgap = eng2.mu() * eng2.total_dim / (1.0 + std::abs(obj));
            const double res = eng2.residual().lpNorm<Eigen::Infinity>();
            if (relgap < opts.opt_gap && res < 1e-8 * (1.0 + eng2.b.lpNorm<Eigen::Infinity>()))
                break;
            if (!eng2.step()) break;
        }
        const double relgap = eng2.mu() * eng2.total_dim / (1.0 + std::abs(c.dot(eng2.y)));
        if (relgap > 1e-5) {
            out.status = SdpStatus::error;
            out.detail = "objective phase did not converge (relgap " + std::to_string(relgap) + ")";
            return out;
        }
        out.x = unscale(eng2.y, sp.vscale);
        out.margin = true_margin(p, out.x);
        out.iterations += it2;
        double obj = 0.0;
        for (const auto& [j, w] : p.objective_) obj += w * out.x(j);
        out.objective = obj;
        if (out.margin < 0.0) {
            // The optimizer sits on the boundary; nudge back toward the
            // phase-I interior point until the true blocks are clean again.
            Eigen::VectorXd xin = unscale(ys, sp.vscale);
            for (double w = 1e-9; w <= 0.3; w *= 4.0) {
                Eigen::VectorXd cand = (1.0 - w) * out.x + w * xin;
                if (true_margin(p, cand) >= 0.0) {
                    out.x = cand;
                    out.margin = true_margin(p, cand);
                    obj = 0.0;
                    for (const auto& [j, wj] : p.objective_) obj += wj * cand(j);
                    out.objective = obj;
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace ddc
