#include "ddc/dissip.hpp"

#include "ddc/rng.hpp"

namespace ddc {

SupplyRate::SupplyRate(SymMatrix f_, Eigen::MatrixXd g_, SymMatrix h_, SupplyForm form_)
    : f(std::move(f_)), g(std::move(g_)), h(std::move(h_)), form(form_) {
    if (g.rows() != f.dim() || g.cols() != h.dim())
        throw InvalidInputError("SupplyRate: G must be p x q");
    if (!g.allFinite()) throw InvalidInputError("SupplyRate: G has non-finite entries");
}

SymMatrix SupplyRate::block_matrix() const {
    const int qq = q(), pp = p();
    Eigen::MatrixXd m(qq + pp, qq + pp);
    m.topLeftCorner(qq, qq) = h.mat();
    m.topRightCorner(qq, pp) = g.transpose();
    m.bottomLeftCorner(pp, qq) = g;
    m.bottomRightCorner(pp, pp) = f.mat();
    return SymMatrix(m);
}

SymMatrix supply_matrix(const SupplyRate& s) {
    const SymMatrix blk = s.block_matrix();
    if (s.form == SupplyForm::direct) return blk;
    return SymMatrix(invert_sym(blk, "supply_matrix"));
}

double supply_value(const SupplyRate& s, const Eigen::VectorXd& v, const Eigen::VectorXd& y) {
    if (v.size() != s.q() || y.size() != s.p())
        throw InvalidInputError("supply_value: port dimensions do not match");
    Eigen::VectorXd z(v.size() + y.size());
    z << v, y;
    return z.dot(supply_matrix(s).mat() * z);
}

StorageMatrix::StorageMatrix(SymMatrix m) : p(std::move(m)) {
    if (!is_pd(p)) throw InvalidInputError("StorageMatrix: matrix is not positive definite");
}

LinearSystem::LinearSystem(Eigen::MatrixXd a_, Eigen::MatrixXd b_, Eigen::MatrixXd c_,
                           Eigen::MatrixXd d_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    if (a.rows() != a.cols()) throw InvalidInputError("LinearSystem: A must be square");
    if (b.rows() != a.rows()) throw InvalidInputError("LinearSystem: B row count != n");
    if (c.cols() != a.rows()) throw InvalidInputError("LinearSystem: C column count != n");
    if (d.rows() != c.rows() || d.cols() != b.cols())
        throw InvalidInputError("LinearSystem: D must be p x q");
    if (!a.allFinite() || !b.allFinite() || !c.allFinite() || !d.allFinite())
        throw InvalidInputError("LinearSystem: non-finite entries");
}

namespace {

void check_ports(const LinearSystem& sys, const SupplyRate& s, const char* what) {
    if (s.q() != sys.q() || s.p() != sys.p())
        throw InvalidInputError(std::string(what) + ": supply ports do not match the system");
}

// [0 I; C D] stacked selector mapping (x, v) to (v, y).
Eigen::MatrixXd output_selector(const LinearSystem& sys) {
    const int n = sys.n(), q = sys.q(), p = sys.p();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(q + p, n + q);
    t.block(0, n, q, q) = Eigen::MatrixXd::Identity(q, q);
    t.block(q, 0, p, n) = sys.c;
    t.block(q, n, p, q) = sys.d;
    return t;
}

}  // namespace

SymMatrix dissipation_lmi_residual(const LinearSystem& sys, const SupplyRate& s,
                                   const StorageMatrix& storage) {
    check_ports(sys, s, "dissipation_lmi_residual");
    if (storage.p.dim() != sys.n())
        throw InvalidInputError("dissipation_lmi_residual: storage dimension != n");
    const int n = sys.n(), q = sys.q();
    const Eigen::MatrixXd& pm = storage.p.mat();

    Eigen::MatrixXd top(n, n + q);  // [I 0]
    top << Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, q);
    Eigen::MatrixXd next(n, n + q);  // [A B]
    next << sys.a, sys.b;

    Eigen::MatrixXd r = top.transpose() * pm * top - next.transpose() * pm * next;
    const Eigen::MatrixXd sel = output_selector(sys);
    r += sel.transpose() * supply_matrix(s).mat() * sel;
    return SymMatrix(0.5 * (r + r.transpose()));
}

std::optional<StorageMatrix> check_dissipativity(const LinearSystem& sys, const SupplyRate& s,
                                                 const SdpOptions& opts) {
    check_ports(sys, s, "check_dissipativity");
    const int n = sys.n(), q = sys.q();

    SdpProblem prob;
    SymVar pvar = prob.sym(n, "P");

    // Dissipation inequality as a quadratic form in (x, v), affine in P.
    LmiBlock main(n + q);
    Eigen::MatrixXd top(n, n + q);
    top << Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, q);
    Eigen::MatrixXd next(n, n + q);
    next << sys.a, sys.b;
    main.add_congruence(0, top, pvar, 1.0);
    main.add_congruence(0, next, pvar, -1.0);
    const Eigen::MatrixXd sel = output_selector(sys);
    main.add_const(0, 0, sel.transpose() * supply_matrix(s).mat() * sel);
    prob.require_psd(std::move(main), "dissipation");

    LmiBlock pd(n);
    pd.add_sym(0, 0, pvar, 1.0);
    pd.add_const(0, 0, -kStrictTol * Eigen::MatrixXd::Identity(n, n));
    prob.require_psd(std::move(pd), "storage PD");

    const SdpResult res = sdp_solve(prob, opts);
    if (res.status == SdpStatus::infeasible) return std::nullopt;
    if (res.status == SdpStatus::error)
        throw SolverError("check_dissipativity: " + res.detail);
    return StorageMatrix(prob.value(res.x, pvar));
}

std::optional<StorageMatrix> check_dissipativity_dual(const LinearSystem& sys,
                                                      const SupplyRate& s,
                                                      const SdpOptions& opts) {
    check_ports(sys, s, "check_dissipativity_dual");
    const int n = sys.n(), q = sys.q(), p = sys.p();

    const SymMatrix sm = supply_matrix(s);
    const Inertia in = inertia(sm);
    if (!(in.negative == p && in.zero == 0 && in.positive == q))
        throw InertiaError("check_dissipativity_dual: supply matrix inertia is (" +
                           std::to_string(in.negative) + "," + std::to_string(in.zero) + "," +
                           std::to_string(in.positive) + "), need (p,0,q)");

    // Constant part: [0 I; B^T D^T]^T * Jhat * S^{-1} * Jcheck * [0 I; B^T D^T],
    // the image of the supply under the storage-inverting change of variables.
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(p + q, n + p);
    u.block(0, n, p, p) = Eigen::MatrixXd::Identity(p, p);
    u.block(p, 0, q, n) = sys.b.transpose();
    u.block(p, n, q, p) = sys.d.transpose();

    Eigen::MatrixXd jhat = Eigen::MatrixXd::Zero(p + q, q + p);
    jhat.topRightCorner(p, p) = -Eigen::MatrixXd::Identity(p, p);
    jhat.bottomLeftCorner(q, q) = Eigen::MatrixXd::Identity(q, q);

    Eigen::MatrixXd jcheck = Eigen::MatrixXd::Zero(q + p, p + q);
    jcheck.topRightCorner(q, q) = -Eigen::MatrixXd::Identity(q, q);
    jcheck.bottomLeftCorner(p, p) = Eigen::MatrixXd::Identity(p, p);

    const Eigen::MatrixXd sinv = invert_sym(sm, "check_dissipativity_dual");
    Eigen::MatrixXd cpart = u.transpose() * jhat * sinv * jcheck * u;
    cpart = 0.5 * (cpart + cpart.transpose());

    SdpProblem prob;
    SymVar qvar = prob.sym(n, "Q");

    LmiBlock main(n + p);
    Eigen::MatrixXd top(n, n + p);  // picks Q itself
    top << Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(n, p);
    Eigen::MatrixXd act(n, n + p);  // [A^T C^T] gives the -[AQA^T AQC^T; .. CQC^T] part
    act << sys.a.transpose(), sys.c.transpose();
    main.add_congruence(0, top, qvar, 1.0);
    main.add_congruence(0, act, qvar, -1.0);
    main.add_const(0, 0, cpart);
    prob.require_psd(std::move(main), "dual dissipation");

    LmiBlock pd(n);
    pd.add_sym(0, 0, qvar, 1.0);
    pd.add_const(0, 0, -kStrictTol * Eigen::MatrixXd::Identity(n, n));
    prob.require_psd(std::move(pd), "inverse storage PD");

    const SdpResult res = sdp_solve(prob, opts);
    if (res.status == SdpStatus::infeasible) return std::nullopt;
    if (res.status == SdpStatus::error)
        throw SolverError("check_dissipativity_dual: " + res.detail);
    const SymMatrix qm = prob.value(res.x, qvar);
    return StorageMatrix(SymMatrix(invert_sym(qm, "check_dissipativity_dual storage")));
}

bool verify_trajectory_dissipation(const LinearSystem& sys, const SupplyRate& s,
                                   const StorageMatrix& storage, int trials,
                                   std::uint64_t seed) {
    check_ports(sys, s, "verify_trajectory_dissipation");
    if (storage.p.dim() != sys.n())
        throw InvalidInputError("verify_trajectory_dissipation: storage dimension != n");

    const Eigen::MatrixXd sm = supply_matrix(s).mat();
    const Eigen::MatrixXd& pm = storage.p.mat();
    const double tol = kPsdTol * (1.0 + spectral_norm(pm) + spectral_norm(sm));

    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd x(sys.n()), v(sys.q());
        for (int i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < v.size(); ++i) v(i) = rng.uniform(-1.0, 1.0);
        const Eigen::VectorXd xp = sys.a * x + sys.b * v;
        const Eigen::VectorXd y = sys.c * x + sys.d * v;
        Eigen::VectorXd z(v.size() + y.size());
        z << v, y;
        const double drop = xp.dot(pm * xp) - x.dot(pm * x);
        if (drop > z.dot(sm * z) + tol) return false;
    }
    return true;
}

}  // namespace ddc
