#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddc/datagen.hpp"
#include "ddc/network.hpp"
#include "ddc/synth.hpp"

namespace ddc {

// RLC parameters of one distributed generation unit plus the sampling time.
struct DguParams {
    double r = 0.2;    // line-side resistance, ohms
    double l = 5e-4;   // inductance, henries
    double c = 1e-2;   // bus capacitance, farads
    double y = 0.2;    // load conductance, siemens
    double ts = 1e-4;  // sampling time, seconds
};

// Discrete DGU with state (V, I): bus voltage and inductor current. u is the
// converter command, v the net current injected by neighboring lines, y = V:
//   A  = [[1 - Ts*Y/C, Ts/C], [-Ts/L, -Ts*R/L]],
//   B1 = [0; Ts/L],  B2 = [Ts/C; 0],  C = [1 0],  D1 = D2 = 0.
// With euler_a22, entry (2,2) becomes 1 - Ts*R/L instead.
SubsystemModel dgu_model(const DguParams& p, bool euler_a22 = false);

enum class CampaignAlgorithm { alg1, alg2, both };

// Monte-Carlo campaign over random microgrids: a k-node ring plus
// extra_edges random chords, per-node parameters and line resistances drawn
// uniformly from fixed intervals, one shared open-loop data run per trial.
struct CampaignConfig {
    int k = 50;
    int extra_edges = 20;
    int n_samples = 50;  // local data length N
    int n_tilde = 50;    // interconnection data length
    double eps_l = 0.001;
    double eps_g = 0.001;
    double alpha_param = 1.0;
    int trials = 100;
    std::uint64_t master_seed = 1;
    CampaignAlgorithm algorithm = CampaignAlgorithm::both;
    double ts = 1e-4;
    bool euler_a22 = false;
    double u_amp = 1.0;
    int u_hold = 5;      // steps each random input level is held
    double x0_amp = 1.0;  // initial-state ball radius for data collection
};

struct MicrogridInstance {
    std::vector<SubsystemModel> models;
    std::vector<DguParams> params;
    DiffusiveWeights weights;
    Topology topo;
};

// Deterministic per (master_seed, trial): node parameters, chord choice and
// line weights each come from their own derived stream.
MicrogridInstance generate_microgrid(const CampaignConfig& cfg, int trial);

// Seed the campaign hands collect_network for this trial; exposed so saved
// datasets can be regenerated outside a campaign run.
std::uint64_t trial_data_seed(const CampaignConfig& cfg, int trial);

// Outcome of one (trial, algorithm) cell. `feasible` means every node came
// back feasible with the inertia check passing; rho is the true closed-loop
// spectral radius and is NaN otherwise.
struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;  // data-collection seed for this trial
    CampaignAlgorithm alg = CampaignAlgorithm::alg1;
    bool feasible = false;
    double rho = 0.0;
    double mean_node_ms = 0.0;
    std::vector<SynthesisResult> nodes;
    std::vector<Eigen::MatrixXd> gains;  // one per node when feasible
};

struct CampaignReport {
    CampaignConfig cfg;
    std::vector<TrialRecord> records;  // trial-major; alg1 before alg2
    std::string csv_path;              // empty when no CSV was requested

    double feasibility_pct(CampaignAlgorithm alg) const;
    double mean_node_ms(CampaignAlgorithm alg) const;
    std::vector<double> rhos(CampaignAlgorithm alg) const;
};

enum class ExecutionPolicy { serial, openmp };

bool openmp_available();

// Runs the campaign; trials are pure functions of (cfg, trial), so the
// serial and OpenMP policies produce identical reports apart from the
// timing fields. When out_dir is nonempty, writes campaign.csv there
// (one row per record: trial, seed, alg, feasible, rho, mean_node_ms).
CampaignReport run_campaign(const CampaignConfig& cfg,
                            ExecutionPolicy policy = ExecutionPolicy::serial,
                            const std::string& out_dir = "");

// Everything except the timing fields matches.
bool same_outcomes(const CampaignReport& a, const CampaignReport& b);

struct SimNoise {
    bool enabled = false;
    double eps_l = 0.0;
    double eps_g = 0.0;
    std::uint64_t seed = 0;
};

// Iterates the true closed loop x+ = A_cl x (+ noise) from x0 for t_steps
// steps under u_i = K_i x_i; returns the stacked state trajectory, one
// column per time, t_steps + 1 columns.
Eigen::MatrixXd simulate_closed_loop(const std::vector<SubsystemModel>& models,
                                     const std::vector<Eigen::MatrixXd>& gains,
                                     const InterconnectionMatrix& m, const Eigen::VectorXd& x0,
                                     int t_steps, const SimNoise& noise = {});

// One row per (t, node): t, node, V, I. Requires two-state nodes.
void write_trajectory_csv(const std::string& path, const std::vector<SubsystemModel>& models,
                          const Eigen::MatrixXd& traj);

}  // namespace ddc
