#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ddc/linalg.hpp"

namespace ddc {

// ============================================================================
// Small dense semidefinite feasibility/optimization engine
// ============================================================================
//
// Problems are stated as a list of affine symmetric blocks that must all be
// PSD, over scalar, rectangular and symmetric matrix variables, plus an
// optional linear objective. The engine is a primal-dual interior-point
// method with Nesterov-Todd scaling, run in a phase-I form
//
//   maximize t   s.t.   Block_k(x) - t I >= 0,  |x_j| <= box,  t <= cap
//
// so that it either exits with a strictly feasible point, proves via a
// weak-duality certificate that no feasible point exists inside the box, or
// reports an honest solver error. It is sized for blocks of dimension a few
// dozen and variable counts in the tens; everything is dense.

struct ScalarVar {
    int index = -1;
};

// Rectangular matrix variable, components stored row-major.
struct MatVar {
    int start = -1;
    int rows = 0;
    int cols = 0;
};

// Symmetric matrix variable, lower triangle packed row by row.
struct SymVar {
    int start = -1;
    int n = 0;
};

// Affine symmetric matrix expression C0 + sum_j x_j Cj. Placements at block
// offset (r0, c0) with r0 != c0 automatically add the mirrored transpose at
// (c0, r0); diagonal placements must be symmetric.
class LmiBlock {
public:
    explicit LmiBlock(int dim);

    int dim() const { return dim_; }

    void add_const(int r0, int c0, const Eigen::MatrixXd& m);
    // x * coef placed at (r0, c0).
    void add_scalar(int r0, int c0, ScalarVar v, const Eigen::MatrixXd& coef);
    // s * V placed at (r0, c0) for a symmetric variable V.
    void add_sym(int r0, int c0, SymVar v, double s);
    // s * V (or s * V^T) placed at (r0, c0) for a rectangular variable.
    void add_mat(int r0, int c0, MatVar v, double s, bool transposed = false);
    // s * T^T V T placed at the diagonal offset (r0, r0); T has V.n rows.
    void add_congruence(int r0, const Eigen::MatrixXd& t, SymVar v, double s);
    // trace(V) * s added to entry (r0, r0).
    void add_trace(int r0, SymVar v, double s);

    const Eigen::MatrixXd& constant() const { return c0_; }
    const std::map<int, Eigen::MatrixXd>& coefficients() const { return coef_; }

private:
    void stamp_const(int r0, int c0, const Eigen::MatrixXd& m);
    Eigen::MatrixXd& comp(int index);

    int dim_;
    Eigen::MatrixXd c0_;
    std::map<int, Eigen::MatrixXd> coef_;
};

struct SdpOptions;
struct SdpResult;

class SdpProblem {
public:
    ScalarVar scalar(const std::string& name);
    SymVar sym(int n, const std::string& name);
    MatVar mat(int rows, int cols, const std::string& name);

    void require_psd(LmiBlock block, const std::string& label);
    // Adds w * v to the (maximized) objective. No call means pure feasibility.
    void maximize(ScalarVar v, double w = 1.0);

    int num_vars() const { return num_vars_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    const std::string& var_name(int j) const { return var_names_[j]; }

    // Value extraction from a solution vector.
    double value(const Eigen::VectorXd& x, ScalarVar v) const;
    Eigen::MatrixXd value(const Eigen::VectorXd& x, const MatVar& v) const;
    SymMatrix value(const Eigen::VectorXd& x, const SymVar& v) const;

    // Numeric block evaluation at a point (used for residual reporting).
    SymMatrix eval_block(int k, const Eigen::VectorXd& x) const;
    const std::string& block_label(int k) const { return labels_[k]; }

private:
    friend SdpResult sdp_solve(const SdpProblem&, const SdpOptions&);

    int register_components(const std::string& name, int count);

    int num_vars_ = 0;
    std::vector<std::string> var_names_;  // one entry per scalar component
    std::vector<LmiBlock> blocks_;
    std::vector<std::string> labels_;
    std::vector<std::pair<int, double>> objective_;
};

enum class SdpStatus { feasible, infeasible, error };

struct SdpOptions {
    int max_iter = 200;
    double feas_target = 1e-5;        // scaled phase-I margin that ends the run
    double min_accept_margin = 1e-9;  // smallest scaled t accepted at a stall
    double var_box = 1e7;             // box half-width on scaled variables
    double t_cap = 1.0;
    double infeas_tol = 1e-9;         // certificate strength threshold
    double opt_gap = 1e-9;            // phase-II relative duality gap
    bool verbose = false;
};

struct SdpResult {
    SdpStatus status = SdpStatus::error;
    Eigen::VectorXd x;      // valid when status == feasible
    double margin = 0.0;    // min over blocks of lambda_min at x (unscaled)
    double objective = 0.0;
    int iterations = 0;
    std::string detail;     // engine trace: why this status

    bool feasible() const { return status == SdpStatus::feasible; }
};

SdpResult sdp_solve(const SdpProblem& problem, const SdpOptions& opts = {});

}  // namespace ddc
