#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ddc/datagen.hpp"
#include "ddc/dissip.hpp"
#include "ddc/sdp.hpp"

namespace ddc {

enum class SynthStatus { feasible, infeasible, solver_error };

// Outcome of one node's controller synthesis. On `feasible`, K = L P^{-1},
// the storage function is x^T P^{-1} x, and `supply` carries the
// inverse-block triple the LMI was solved with. `inertia_ok` reports the
// post-hoc saddle-inertia check on [[H, G^T], [G, F]]; a failed check is
// informational, not an error. beta/tau are present for the coupled design,
// d_max for the degree-bounded one.
struct SynthesisResult {
    SynthStatus status = SynthStatus::solver_error;
    Eigen::MatrixXd k;  // m x n
    Eigen::MatrixXd l;  // m x n
    SymMatrix p;        // n x n, PD when feasible
    SupplyRate supply;  // inverse_block form
    double alpha = 0.0;
    std::optional<double> beta;
    std::optional<double> tau;
    std::optional<double> d_max;
    bool inertia_ok = false;
    bool j_regularized = false;
    bool theta_regularized = false;
    std::string detail;  // engine trace
};

// Whether [[H, G^T], [G, F]] has the saddle inertia (p negative, none zero,
// q positive) required for the inverse-block parametrization to describe a
// meaningful supply rate. The inverse shares this inertia.
bool check_inertia_condition(const SupplyRate& s);

// Largest own-port weight consistent with the dual neighborhood set, for a
// scalar own port stacked first: max d with [1; d]^T Y [1; d] >= 0 where
// Y = [[-e1^T, 0], [0, 1]] Theta_hat [.]^T. Y22 >= 0 means every degree is
// consistent (UnboundedDegreeError); an empty interval means no weight fits
// the data (InconsistentDataError).
double degree_max(const SymMatrix& theta_hat);

// Gain design from one local data matrix J: solves
//   Mhat - alpha * diag(J, 0_n) >= 0,  P >= delta I,  alpha >= 0
// over (P, L, alpha), with the supply triple (F, G, H) either fixed (must be
// inverse_block) or free decision variables when the optional is empty. Free
// supplies get the normalization trace(H) <= 1e6 * p to pin the cone
// scaling. Gain extraction is refused (solver_error) when P's reciprocal
// condition falls below 1e-10.
SynthesisResult synth_local_dissipative(const SymMatrix& j, int n, int m, int p,
                                        const std::optional<SupplyRate>& supply,
                                        const SdpOptions& opts = {});

// Per-node design against an unknown interconnection: joins the gain LMI
// with F <= 0 and Lambda(F, G, H, beta) - tau * Theta_hat >= 0 over
// (F, G, H, P, L, alpha, beta, tau), then checks the inertia condition
// after solving.
SynthesisResult algorithm1_node(const LocalData& local, const InterconnectionData& inter,
                                const NoiseBound& phi, const NoiseBound& psi,
                                const SdpOptions& opts = {});

// Degree-bounded variant for unit-port diffusive coupling: computes
// d' = degree_max(Theta_hat), fixes G = alpha_param/2 * I, and confines F
// and H to the windows that stabilize any diffusive network of weighted
// degree up to d'. degree_max errors propagate.
SynthesisResult algorithm2_node(const LocalData& local, const InterconnectionData& inter,
                                const NoiseBound& phi, const NoiseBound& psi,
                                double alpha_param, const SdpOptions& opts = {});

}  // namespace ddc
