#include "ddc/synth.hpp"

#include <cmath>

#include "ddc/network.hpp"

namespace ddc {

namespace {

constexpr double kDelta = kStrictTol;
constexpr double kTraceKappa = 1e6;
constexpr double kExtractRcond = 1e-10;

// The neighborhood certificate bounds the complementary form of the supply
// block, q = y^T (H - beta I) y - y^T G^T v - v^T G y + v^T F v, over the
// data-consistent coupling rows: with the inverse-block supply's (p, 0, p)
// inertia, the supply a node draws is negative exactly where q is positive,
// so q >= 0 across the consistency set makes every node dissipate along the
// true interconnection. Taken literally that condition pins F and G to zero
// whenever a node has neighbors: q has no support on the non-own output
// rows, the dual coupling set restricted to two or more such rows always
// carries a positive direction, and those directions then see only the F
// term, which F <= 0 cannot keep nonnegative. The certificate instead trades
// margins between nodes: each non-own output gets a fixed allowance (the
// form may dip that far below zero there) and in exchange the own-output
// margin must cover the allowances the neighbors grant on this output,
// beta >= degree * allowance + delta. Summing the per-node forms then leaves
// every output a net positive margin, so the global argument survives with
// storages weighted by each supply block's determinant magnitude (nonzero
// whenever the inertia check passes). Allowance zero recovers the literal
// form.
constexpr double kMarginBudget = 0.8;

struct Eq16Vars {
    SymVar p;
    MatVar l;
    ScalarVar alpha;
};

// Group offsets of the gain LMI, ordered (x+, y, x, u, v, slack).
struct Eq16Offsets {
    int y, x, u, v, slack, dim;
};

Eq16Offsets eq16_offsets(int n, int m, int p) {
    return {n, n + p, 2 * n + p, 2 * n + p + m, 2 * n + m + 2 * p, 3 * n + m + 2 * p};
}

// Mhat - alpha * diag(J, 0_n) without the supply-triple entries; the caller
// stamps (F, G, H) as variables or constants.
LmiBlock eq16_core(const SymMatrix& j, int n, int m, int p, const Eq16Vars& core) {
    const Eq16Offsets o = eq16_offsets(n, m, p);
    if (j.dim() != 2 * n + m + 2 * p)
        throw InvalidInputError("synth: J dimension does not match (n, m, p)");
    LmiBlock blk(o.dim);
    blk.add_sym(0, 0, core.p, 1.0);
    blk.add_sym(o.x, o.x, core.p, -1.0);
    blk.add_sym(o.slack, o.slack, core.p, 1.0);
    blk.add_mat(o.x, o.u, core.l, -1.0, true);
    blk.add_mat(o.u, o.slack, core.l, 1.0, false);
    Eigen::MatrixXd nhat = Eigen::MatrixXd::Zero(o.dim, o.dim);
    nhat.topLeftCorner(j.dim(), j.dim()) = j.mat();
    blk.add_scalar(0, 0, core.alpha, -nhat);
    return blk;
}

void add_core_margins(SdpProblem& prob, const Eq16Vars& core, int n) {
    LmiBlock pm(n);
    pm.add_sym(0, 0, core.p, 1.0);
    pm.add_const(0, 0, -kDelta * Eigen::MatrixXd::Identity(n, n));
    prob.require_psd(std::move(pm), "P margin");

    LmiBlock am(1);
    am.add_scalar(0, 0, core.alpha, Eigen::MatrixXd::Identity(1, 1));
    prob.require_psd(std::move(am), "alpha nonneg");
}

void add_scalar_floor(SdpProblem& prob, ScalarVar v, double floor, const std::string& label) {
    LmiBlock blk(1);
    blk.add_scalar(0, 0, v, Eigen::MatrixXd::Identity(1, 1));
    blk.add_const(0, 0, -floor * Eigen::MatrixXd::Identity(1, 1));
    prob.require_psd(std::move(blk), label);
}

// Maps the engine outcome into the result and, on feasibility, extracts
// (P, L, K, alpha). Returns false when the caller should stop.
bool finish_core(const SdpProblem& prob, const SdpResult& res, const Eq16Vars& core,
                 SynthesisResult& out) {
    out.detail = res.detail;
    if (res.status == SdpStatus::infeasible) {
        out.status = SynthStatus::infeasible;
        return false;
    }
    if (res.status == SdpStatus::error) {
        out.status = SynthStatus::solver_error;
        return false;
    }
    SymMatrix pm = prob.value(res.x, core.p);
    if (rcond_sym(pm) < kExtractRcond) {
        out.status = SynthStatus::solver_error;
        out.detail = "storage variable too ill-conditioned for gain extraction";
        return false;
    }
    out.p = pm;
    out.l = prob.value(res.x, core.l);
    out.k = out.l * invert_sym(pm, "synth: P");
    out.alpha = prob.value(res.x, core.alpha);
    out.status = SynthStatus::feasible;
    return true;
}

}  // namespace

bool check_inertia_condition(const SupplyRate& s) {
    return inertia(s.block_matrix()) == Inertia{s.p(), 0, s.q()};
}

double degree_max(const SymMatrix& theta_hat) {
    const int dim = theta_hat.dim();
    if (dim < 2) throw InvalidInputError("degree_max: matrix must be at least 2 x 2");
    const Eigen::MatrixXd& th = theta_hat.mat();
    const int last = dim - 1;
    const double y11 = th(0, 0);
    const double y12 = -th(0, last);
    const double y22 = th(last, last);
    if (y22 >= 0.0) throw UnboundedDegreeError("degree_max: consistent degree set is unbounded");
    const double disc = y12 * y12 - y11 * y22;
    if (disc < 0.0)
        throw InconsistentDataError("degree_max: no own-port weight is consistent with the data");
    return (-y12 - std::sqrt(disc)) / y22;
}

SynthesisResult synth_local_dissipative(const SymMatrix& j, int n, int m, int p,
                                        const std::optional<SupplyRate>& supply,
                                        const SdpOptions& opts) {
    if (n < 1 || m < 1 || p < 1) throw InvalidInputError("synth: dimensions must be positive");
    if (supply) {
        if (supply->form != SupplyForm::inverse_block)
            throw InvalidInputError("synth: fixed supply must be in inverse-block form");
        if (supply->p() != p || supply->q() != p)
            throw InvalidInputError("synth: supply ports must match the coupling width");
    }
    const Eq16Offsets o = eq16_offsets(n, m, p);

    SdpProblem prob;
    Eq16Vars core{prob.sym(n, "P"), prob.mat(m, n, "L"), prob.scalar("alpha")};
    LmiBlock gain = eq16_core(j, n, m, p, core);
    SymVar fv, hv;
    MatVar gv;
    if (supply) {
        gain.add_const(o.y, o.y, -supply->f.mat());
        gain.add_const(o.v, o.v, -supply->h.mat());
        gain.add_const(o.y, o.v, supply->g);
    } else {
        fv = prob.sym(p, "F");
        gv = prob.mat(p, p, "G");
        hv = prob.sym(p, "H");
        gain.add_sym(o.y, o.y, fv, -1.0);
        gain.add_sym(o.v, o.v, hv, -1.0);
        gain.add_mat(o.y, o.v, gv, 1.0, false);
    }
    prob.require_psd(std::move(gain), "gain LMI");
    add_core_margins(prob, core, n);
    if (!supply) {
        LmiBlock cap(1);
        cap.add_const(0, 0, kTraceKappa * p * Eigen::MatrixXd::Identity(1, 1));
        cap.add_trace(0, hv, -1.0);
        prob.require_psd(std::move(cap), "trace(H) cap");
    }

    const SdpResult res = sdp_solve(prob, opts);
    SynthesisResult out;
    if (!finish_core(prob, res, core, out)) return out;
    out.supply = supply ? *supply
                        : SupplyRate(prob.value(res.x, fv), prob.value(res.x, gv),
                                     prob.value(res.x, hv), SupplyForm::inverse_block);
    out.inertia_ok = check_inertia_condition(out.supply);
    return out;
}

SynthesisResult algorithm1_node(const LocalData& local, const InterconnectionData& inter,
                                const NoiseBound& phi, const NoiseBound& psi,
                                const SdpOptions& opts) {
    const int n = local.n(), m = local.m(), p = local.p();
    if (inter.p() != p) throw InvalidInputError("algorithm1_node: port width mismatch");
    const int pt = inter.p_tilde();
    const Eq16Offsets o = eq16_offsets(n, m, p);

    BuiltJ bj = build_J(local, phi, true);
    ThetaPair tp = build_theta_pair(inter, psi, true);

    SdpProblem prob;
    Eq16Vars core{prob.sym(n, "P"), prob.mat(m, n, "L"), prob.scalar("alpha")};
    SymVar fv = prob.sym(p, "F");
    MatVar gv = prob.mat(p, p, "G");
    SymVar hv = prob.sym(p, "H");
    ScalarVar beta = prob.scalar("beta");
    ScalarVar tau = prob.scalar("tau");

    LmiBlock gain = eq16_core(bj.j, n, m, p, core);
    gain.add_sym(o.y, o.y, fv, -1.0);
    gain.add_sym(o.v, o.v, hv, -1.0);
    gain.add_mat(o.y, o.v, gv, 1.0, false);
    prob.require_psd(std::move(gain), "gain LMI");

    LmiBlock fneg(p);
    fneg.add_sym(0, 0, fv, -1.0);
    prob.require_psd(std::move(fneg), "F nonpositive");

    const int degree = static_cast<int>(inter.neighbor_order.size()) - 1;
    // Coupling-set entries grow with the squared data magnitudes; normalize to
    // unit spectral norm so the certificate block is well scaled, and report
    // tau in the original units.
    Eigen::MatrixXd th = tp.theta_hat.mat();
    const double th_scale = th.selfadjointView<Eigen::Lower>().operatorNorm();
    if (th_scale > 0.0) th /= th_scale;
    LmiBlock lam(pt + p);
    lam.add_sym(0, 0, hv, 1.0);
    lam.add_scalar(0, 0, beta, -Eigen::MatrixXd::Identity(p, p));
    lam.add_mat(pt, 0, gv, -1.0, false);
    lam.add_sym(pt, pt, fv, 1.0);
    lam.add_scalar(0, 0, tau, -th);
    if (pt > p)
        lam.add_const(p, p, kMarginBudget * Eigen::MatrixXd::Identity(pt - p, pt - p));
    prob.require_psd(std::move(lam), "neighborhood certificate");

    add_core_margins(prob, core, n);
    add_scalar_floor(prob, beta, degree * kMarginBudget + kDelta, "beta margin");
    add_scalar_floor(prob, tau, 0.0, "tau nonneg");
    LmiBlock cap(1);
    cap.add_const(0, 0, kTraceKappa * p * Eigen::MatrixXd::Identity(1, 1));
    cap.add_trace(0, hv, -1.0);
    prob.require_psd(std::move(cap), "trace(H) cap");

    const SdpResult res = sdp_solve(prob, opts);
    SynthesisResult out;
    out.j_regularized = bj.regularized;
    out.theta_regularized = tp.regularized;
    if (!finish_core(prob, res, core, out)) return out;
    out.supply = SupplyRate(prob.value(res.x, fv), prob.value(res.x, gv),
                            prob.value(res.x, hv), SupplyForm::inverse_block);
    out.beta = prob.value(res.x, beta);
    out.tau = prob.value(res.x, tau) / (th_scale > 0.0 ? th_scale : 1.0);
    out.inertia_ok = check_inertia_condition(out.supply);
    return out;
}

SynthesisResult algorithm2_node(const LocalData& local, const InterconnectionData& inter,
                                const NoiseBound& phi, const NoiseBound& psi,
                                double alpha_param, const SdpOptions& opts) {
    const int n = local.n(), m = local.m(), p = local.p();
    if (p != 1 || inter.p() != 1)
        throw UnsupportedConfigurationError("algorithm2_node: scalar output ports required");
    if (!std::isfinite(alpha_param))
        throw InvalidInputError("algorithm2_node: alpha parameter must be finite");
    const Eq16Offsets o = eq16_offsets(n, m, p);

    BuiltJ bj = build_J(local, phi, true);
    ThetaPair tp = build_theta_pair(inter, psi, true);
    const double d_prime = degree_max(tp.theta_hat);
    if (!(d_prime > 0.0))
        throw InconsistentDataError("algorithm2_node: consistent degree bound is nonpositive");

    const Eigen::MatrixXd ip = Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd g_fixed = 0.5 * alpha_param * ip;

    SdpProblem prob;
    Eq16Vars core{prob.sym(n, "P"), prob.mat(m, n, "L"), prob.scalar("alpha")};
    SymVar fv = prob.sym(p, "F");
    SymVar hv = prob.sym(p, "H");

    LmiBlock gain = eq16_core(bj.j, n, m, p, core);
    gain.add_sym(o.y, o.y, fv, -1.0);
    gain.add_sym(o.v, o.v, hv, -1.0);
    gain.add_const(o.y, o.v, g_fixed);
    prob.require_psd(std::move(gain), "gain LMI");

    LmiBlock fup(p);
    fup.add_sym(0, 0, fv, -1.0);
    fup.add_const(0, 0, -kDelta * ip);
    prob.require_psd(std::move(fup), "F upper window");

    LmiBlock flo(p);
    flo.add_sym(0, 0, fv, 1.0);
    flo.add_const(0, 0, (1.0 / (2.0 * d_prime) - kDelta) * ip);
    prob.require_psd(std::move(flo), "F lower window");

    LmiBlock hfl(p);
    hfl.add_sym(0, 0, hv, 1.0);
    hfl.add_const(0, 0,
                  -(2.0 * d_prime * std::max(1.0 - alpha_param, 0.0) + kDelta) * ip);
    prob.require_psd(std::move(hfl), "H floor");

    add_core_margins(prob, core, n);

    const SdpResult res = sdp_solve(prob, opts);
    SynthesisResult out;
    out.j_regularized = bj.regularized;
    out.theta_regularized = tp.regularized;
    out.d_max = d_prime;
    if (!finish_core(prob, res, core, out)) return out;
    out.supply = SupplyRate(prob.value(res.x, fv), g_fixed, prob.value(res.x, hv),
                            SupplyForm::inverse_block);
    out.inertia_ok = check_inertia_condition(out.supply);
    return out;
}

}  // namespace ddc
