#include "ddc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <utility>

#include "ddc/rng.hpp"

#ifdef DDC_HAVE_OPENMP
#include <omp.h>
#endif

namespace ddc {

namespace {

// Stream labels under (master_seed, trial).
enum : std::uint64_t { kStreamParams = 0, kStreamChords = 1, kStreamLines = 2, kStreamData = 3 };

const char* alg_name(CampaignAlgorithm a) {
    switch (a) {
        case CampaignAlgorithm::alg1: return "alg1";
        case CampaignAlgorithm::alg2: return "alg2";
        default: return "both";
    }
}

void validate_config(const CampaignConfig& cfg) {
    if (cfg.k < 3) throw InvalidInputError("campaign: need at least 3 nodes for a ring");
    if (cfg.trials < 1) throw InvalidInputError("campaign: trials must be >= 1");
    if (cfg.extra_edges < 0 || cfg.extra_edges > cfg.k * (cfg.k - 3) / 2)
        throw InvalidInputError("campaign: extra edge count exceeds the available chords");
    if (cfg.n_samples < 1 || cfg.n_tilde < 1 || cfg.n_tilde > cfg.n_samples)
        throw InvalidInputError("campaign: need 1 <= N~ <= N");
    if (cfg.eps_l < 0.0 || cfg.eps_g < 0.0)
        throw InvalidInputError("campaign: noise levels must be nonnegative");
    if (cfg.ts <= 0.0) throw InvalidInputError("campaign: sampling time must be positive");
    if (cfg.u_hold < 1) throw InvalidInputError("campaign: input hold must be >= 1");
    if (cfg.u_amp < 0.0) throw InvalidInputError("campaign: input amplitude must be nonnegative");
    if (cfg.x0_amp < 0.0)
        throw InvalidInputError("campaign: initial-state amplitude must be nonnegative");
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

SynthesisResult error_result(const std::string& what) {
    SynthesisResult r;
    r.status = SynthStatus::solver_error;
    r.detail = what;
    return r;
}

TrialRecord run_cell(const CampaignConfig& cfg, int trial, CampaignAlgorithm alg,
                     const MicrogridInstance& inst, const InterconnectionMatrix& m,
                     const NetworkData& data, std::uint64_t data_seed) {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = data_seed;
    rec.alg = alg;
    rec.nodes.reserve(static_cast<std::size_t>(cfg.k));

    double total_ms = 0.0;
    bool all_ok = true;
    for (int i = 0; i < cfg.k; ++i) {
        const auto& md = inst.models[static_cast<std::size_t>(i)];
        const NoiseBound phi =
            NoiseBound::per_sample_ball(md.n() + md.p(), cfg.n_samples, cfg.eps_l);
        const NoiseBound psi = NoiseBound::per_sample_ball(md.p(), cfg.n_tilde, cfg.eps_g);
        const auto& loc = data.local[static_cast<std::size_t>(i)];
        const auto& itc = data.inter[static_cast<std::size_t>(i)];

        const auto t0 = std::chrono::steady_clock::now();
        SynthesisResult r;
        try {
            r = alg == CampaignAlgorithm::alg1
                    ? algorithm1_node(loc, itc, phi, psi)
                    : algorithm2_node(loc, itc, phi, psi, cfg.alpha_param);
        } catch (const Error& e) {
            r = error_result(e.what());
        }
        total_ms += elapsed_ms(t0);
        all_ok = all_ok && r.status == SynthStatus::feasible && r.inertia_ok;
        rec.nodes.push_back(std::move(r));
    }
    rec.mean_node_ms = total_ms / cfg.k;
    rec.feasible = all_ok;
    if (all_ok) {
        rec.gains.reserve(rec.nodes.size());
        for (const auto& r : rec.nodes) rec.gains.push_back(r.k);
        rec.rho = assemble_closed_loop(inst.models, rec.gains, m).second;
    } else {
        rec.rho = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

std::vector<TrialRecord> run_trial(const CampaignConfig& cfg, int trial) {
    const MicrogridInstance inst = generate_microgrid(cfg, trial);
    const InterconnectionMatrix m = diffusive_interconnection(inst.weights, inst.topo);
    const std::uint64_t data_seed = trial_data_seed(cfg, trial);
    const NetworkData data = collect_network(inst.models, m, cfg.eps_l, cfg.eps_g,
                                             cfg.n_samples, cfg.n_tilde, data_seed, cfg.u_amp,
                                             cfg.u_hold, cfg.x0_amp);

    std::vector<TrialRecord> out;
    if (cfg.algorithm != CampaignAlgorithm::alg2)
        out.push_back(run_cell(cfg, trial, CampaignAlgorithm::alg1, inst, m, data, data_seed));
    if (cfg.algorithm != CampaignAlgorithm::alg1)
        out.push_back(run_cell(cfg, trial, CampaignAlgorithm::alg2, inst, m, data, data_seed));
    return out;
}

// An escaped exception must not cross a parallel region; it is folded into
// error records instead (one per requested algorithm).
std::vector<TrialRecord> run_trial_guarded(const CampaignConfig& cfg, int trial) {
    try {
        return run_trial(cfg, trial);
    } catch (const std::exception& e) {
        std::vector<TrialRecord> out;
        for (CampaignAlgorithm a : {CampaignAlgorithm::alg1, CampaignAlgorithm::alg2}) {
            if (cfg.algorithm != CampaignAlgorithm::both && cfg.algorithm != a) continue;
            TrialRecord rec;
            rec.trial = trial;
            rec.alg = a;
            rec.feasible = false;
            rec.rho = std::numeric_limits<double>::quiet_NaN();
            rec.nodes.push_back(error_result(e.what()));
            out.push_back(std::move(rec));
        }
        return out;
    }
}

void write_campaign_csv(CampaignReport& rep, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / "campaign.csv").string();
    std::ofstream f(path);
    if (!f) throw Error("campaign: cannot open " + path);
    f << "trial,seed,alg,feasible,rho,mean_node_ms\n";
    f << std::setprecision(17);
    for (const auto& rec : rep.records)
        f << rec.trial << ',' << rec.seed << ',' << alg_name(rec.alg) << ','
          << (rec.feasible ? 1 : 0) << ',' << rec.rho << ',' << rec.mean_node_ms << '\n';
    if (!f.good()) throw Error("campaign: write failed on " + path);
    rep.csv_path = path;
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_optional(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_double(*a, *b);
}

bool same_result(const SynthesisResult& a, const SynthesisResult& b) {
    return a.status == b.status && same_matrix(a.k, b.k) && same_matrix(a.l, b.l) &&
           same_matrix(a.p.mat(), b.p.mat()) && same_matrix(a.supply.f.mat(), b.supply.f.mat()) &&
           same_matrix(a.supply.g, b.supply.g) && same_matrix(a.supply.h.mat(), b.supply.h.mat()) &&
           a.supply.form == b.supply.form && same_double(a.alpha, b.alpha) &&
           same_optional(a.beta, b.beta) && same_optional(a.tau, b.tau) &&
           same_optional(a.d_max, b.d_max) && a.inertia_ok == b.inertia_ok &&
           a.j_regularized == b.j_regularized && a.theta_regularized == b.theta_regularized &&
           a.detail == b.detail;
}

}  // namespace

SubsystemModel dgu_model(const DguParams& p, bool euler_a22) {
    if (p.r <= 0.0 || p.l <= 0.0 || p.c <= 0.0 || p.y <= 0.0 || p.ts <= 0.0)
        throw InvalidInputError("dgu_model: parameters must be strictly positive");
    Eigen::MatrixXd a(2, 2);
    a << 1.0 - p.ts * p.y / p.c, p.ts / p.c,  //
        -p.ts / p.l, -p.ts * p.r / p.l;
    if (euler_a22) a(1, 1) = 1.0 - p.ts * p.r / p.l;
    Eigen::MatrixXd b1(2, 1), b2(2, 1), c(1, 2), d(1, 1);
    b1 << 0.0, p.ts / p.l;
    b2 << p.ts / p.c, 0.0;
    c << 1.0, 0.0;
    d << 0.0;
    return SubsystemModel(a, b1, b2, c, d, d);
}

MicrogridInstance generate_microgrid(const CampaignConfig& cfg, int trial) {
    validate_config(cfg);
    const int k = cfg.k;

    Rng params_rng = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(trial),
                                 kStreamParams);
    std::vector<DguParams> params;
    params.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        DguParams p;
        p.r = params_rng.uniform(0.1, 0.3);
        p.l = params_rng.uniform(4.5e-4, 5.5e-4);
        p.c = params_rng.uniform(9e-3, 1.1e-2);
        p.y = params_rng.uniform(0.18, 0.22);
        p.ts = cfg.ts;
        params.push_back(p);
    }

    // Ring edges plus a uniform choice of extra_edges distinct chords.
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < k; ++i) edges.emplace_back(i, i + 1);
    edges.emplace_back(0, k - 1);
    std::vector<std::pair<int, int>> chords;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const bool ring = j - i == 1 || (i == 0 && j == k - 1);
            if (!ring) chords.emplace_back(i, j);
        }
    Rng chord_rng = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(trial),
                                kStreamChords);
    for (int t = 0; t < cfg.extra_edges; ++t) {
        const int pick = chord_rng.uniform_int(t, static_cast<int>(chords.size()) - 1);
        std::swap(chords[static_cast<std::size_t>(t)], chords[static_cast<std::size_t>(pick)]);
        edges.push_back(chords[static_cast<std::size_t>(t)]);
    }
    std::sort(edges.begin(), edges.end());

    Rng line_rng = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(trial), kStreamLines);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [i, j] : edges) {
        const double a = 1.0 / line_rng.uniform(3.6, 4.4);
        w(i, j) = a;
        w(j, i) = a;
    }

    std::vector<std::vector<int>> sets(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) sets[static_cast<std::size_t>(i)].push_back(i);
    for (const auto& [i, j] : edges) {
        sets[static_cast<std::size_t>(i)].push_back(j);
        sets[static_cast<std::size_t>(j)].push_back(i);
    }
    for (auto& s : sets) std::sort(s.begin(), s.end());

    MicrogridInstance inst{{}, std::move(params), DiffusiveWeights(w),
                           Topology(k, std::move(sets), std::vector<int>(k, 1))};
    inst.models.reserve(inst.params.size());
    for (const auto& p : inst.params) inst.models.push_back(dgu_model(p, cfg.euler_a22));
    return inst;
}

std::uint64_t trial_data_seed(const CampaignConfig& cfg, int trial) {
    return Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(trial), kStreamData).bits();
}

double CampaignReport::feasibility_pct(CampaignAlgorithm alg) const {
    int total = 0, feas = 0;
    for (const auto& rec : records) {
        if (rec.alg != alg) continue;
        ++total;
        feas += rec.feasible ? 1 : 0;
    }
    if (total == 0) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * feas / total;
}

double CampaignReport::mean_node_ms(CampaignAlgorithm alg) const {
    int total = 0;
    double sum = 0.0;
    for (const auto& rec : records) {
        if (rec.alg != alg) continue;
        ++total;
        sum += rec.mean_node_ms;
    }
    if (total == 0) return std::numeric_limits<double>::quiet_NaN();
    return sum / total;
}

std::vector<double> CampaignReport::rhos(CampaignAlgorithm alg) const {
    std::vector<double> out;
    for (const auto& rec : records)
        if (rec.alg == alg && rec.feasible) out.push_back(rec.rho);
    return out;
}

bool openmp_available() {
#ifdef DDC_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

CampaignReport run_campaign(const CampaignConfig& cfg, ExecutionPolicy policy,
                            const std::string& out_dir) {
    validate_config(cfg);
    CampaignReport rep;
    rep.cfg = cfg;

    std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.trials));
    if (policy == ExecutionPolicy::openmp && openmp_available()) {
#ifdef DDC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < cfg.trials; ++t)
            per_trial[static_cast<std::size_t>(t)] = run_trial_guarded(cfg, t);
#endif
    } else {
        for (int t = 0; t < cfg.trials; ++t)
            per_trial[static_cast<std::size_t>(t)] = run_trial_guarded(cfg, t);
    }
    for (auto& recs : per_trial)
        for (auto& rec : recs) rep.records.push_back(std::move(rec));

    if (!out_dir.empty()) write_campaign_csv(rep, out_dir);
    return rep;
}

bool same_outcomes(const CampaignReport& a, const CampaignReport& b) {
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const TrialRecord& ra = a.records[i];
        const TrialRecord& rb = b.records[i];
        if (ra.trial != rb.trial || ra.seed != rb.seed || ra.alg != rb.alg ||
            ra.feasible != rb.feasible || !same_double(ra.rho, rb.rho))
            return false;
        if (ra.nodes.size() != rb.nodes.size() || ra.gains.size() != rb.gains.size())
            return false;
        for (std::size_t j = 0; j < ra.nodes.size(); ++j)
            if (!same_result(ra.nodes[j], rb.nodes[j])) return false;
        for (std::size_t j = 0; j < ra.gains.size(); ++j)
            if (!same_matrix(ra.gains[j], rb.gains[j])) return false;
    }
    return true;
}

Eigen::MatrixXd simulate_closed_loop(const std::vector<SubsystemModel>& models,
                                     const std::vector<Eigen::MatrixXd>& gains,
                                     const InterconnectionMatrix& m, const Eigen::VectorXd& x0,
                                     int t_steps, const SimNoise& noise) {
    const int k = static_cast<int>(models.size());
    if (m.topo.k != k) throw InvalidInputError("simulate: topology size mismatch");
    if (static_cast<int>(gains.size()) != k)
        throw InvalidInputError("simulate: one gain per node required");
    if (t_steps < 0) throw InvalidInputError("simulate: negative horizon");

    const int total_p = m.topo.total_ports();
    int total_n = 0;
    std::vector<int> noff(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) {
        const auto& md = models[static_cast<std::size_t>(i)];
        const auto& g = gains[static_cast<std::size_t>(i)];
        if (g.rows() != md.m() || g.cols() != md.n())
            throw InvalidInputError("simulate: gain dimensions do not match the node");
        noff[static_cast<std::size_t>(i)] = total_n;
        total_n += md.n();
    }
    if (x0.size() != total_n) throw InvalidInputError("simulate: x0 dimension mismatch");

    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(total_p, total_p);
    for (int i = 0; i < k; ++i) {
        const int po = m.topo.port_offset(i);
        const auto& md = models[static_cast<std::size_t>(i)];
        d2.block(po, po, md.p(), md.p()) = md.d2;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> loop_lu(
        Eigen::MatrixXd::Identity(total_p, total_p) - d2 * m.m);

    std::vector<Rng> wstream, xstream;
    if (noise.enabled)
        for (int i = 0; i < k; ++i) {
            wstream.push_back(Rng::derive(noise.seed, static_cast<std::uint64_t>(i), 1));
            xstream.push_back(Rng::derive(noise.seed, static_cast<std::uint64_t>(i), 2));
        }

    Eigen::MatrixXd traj(total_n, t_steps + 1);
    traj.col(0) = x0;
    std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(k));
    for (int t = 0; t < t_steps; ++t) {
        Eigen::VectorXd rhs(total_p), xinoise = Eigen::VectorXd::Zero(total_p);
        for (int i = 0; i < k; ++i) {
            const auto& md = models[static_cast<std::size_t>(i)];
            const int po = m.topo.port_offset(i);
            const Eigen::VectorXd xi = traj.col(t).segment(noff[static_cast<std::size_t>(i)],
                                                           md.n());
            const Eigen::VectorXd ui = gains[static_cast<std::size_t>(i)] * xi;
            w[static_cast<std::size_t>(i)] =
                noise.enabled
                    ? wstream[static_cast<std::size_t>(i)].ball(md.n() + md.p(),
                                                                std::sqrt(noise.eps_l))
                    : Eigen::VectorXd::Zero(md.n() + md.p());
            rhs.segment(po, md.p()) =
                md.c * xi + md.d1 * ui + w[static_cast<std::size_t>(i)].tail(md.p());
            if (noise.enabled)
                xinoise.segment(po, md.p()) =
                    xstream[static_cast<std::size_t>(i)].ball(md.p(), std::sqrt(noise.eps_g));
        }
        const Eigen::VectorXd y = loop_lu.solve(rhs + d2 * xinoise);
        const Eigen::VectorXd v = m.m * y + xinoise;
        for (int i = 0; i < k; ++i) {
            const auto& md = models[static_cast<std::size_t>(i)];
            const Eigen::VectorXd xi = traj.col(t).segment(noff[static_cast<std::size_t>(i)],
                                                           md.n());
            const Eigen::VectorXd ui = gains[static_cast<std::size_t>(i)] * xi;
            traj.col(t + 1).segment(noff[static_cast<std::size_t>(i)], md.n()) =
                md.a * xi + md.b1 * ui + md.b2 * v.segment(m.topo.port_offset(i), md.p()) +
                w[static_cast<std::size_t>(i)].head(md.n());
        }
    }
    return traj;
}

void write_trajectory_csv(const std::string& path, const std::vector<SubsystemModel>& models,
                          const Eigen::MatrixXd& traj) {
    int total_n = 0;
    for (const auto& md : models) {
        if (md.n() != 2)
            throw UnsupportedConfigurationError("trajectory csv: two-state nodes required");
        total_n += md.n();
    }
    if (traj.rows() != total_n) throw InvalidInputError("trajectory csv: row count mismatch");

    std::ofstream f(path);
    if (!f) throw Error("trajectory csv: cannot open " + path);
    f << "t,node,V,I\n";
    f << std::setprecision(17);
    for (int t = 0; t < traj.cols(); ++t)
        for (int i = 0; i < static_cast<int>(models.size()); ++i)
            f << t << ',' << i << ',' << traj(2 * i, t) << ',' << traj(2 * i + 1, t) << '\n';
    if (!f.good()) throw Error("trajectory csv: write failed on " + path);
}

}  // namespace ddc
