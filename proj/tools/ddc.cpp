// Command-line front end: synth / campaign / simulate / verify.
// Exit codes: 0 success, 1 infeasible (or failed verification), 2 error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddc/bench.hpp"
#include "ddc/jsonio.hpp"
#include "ddc/rng.hpp"
#include "ddc/synth.hpp"

namespace {

struct Opts {
    std::string config;
    std::string out = ".";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool euler_a22 = false;
};

ddc::Json apply_overrides(ddc::Json j, const Opts& o) {
    for (const auto& kv : o.sets) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos)
            throw ddc::InvalidInputError("--set expects key=value, got: " + kv);
        const std::string key = kv.substr(0, pos);
        const std::string val = kv.substr(pos + 1);
        ddc::Json v;
        try {
            v = ddc::Json::parse(val);
        } catch (...) {
            v = val;
        }
        j[key] = v;
    }
    if (o.seed_given) j["master_seed"] = o.seed;
    if (o.euler_a22) j["euler_a22"] = true;
    return j;
}

std::string out_file(const Opts& o, const std::string& name) {
    std::filesystem::create_directories(o.out);
    return (std::filesystem::path(o.out) / name).string();
}

const char* status_name(ddc::SynthStatus s) {
    switch (s) {
        case ddc::SynthStatus::feasible: return "feasible";
        case ddc::SynthStatus::infeasible: return "infeasible";
        default: return "solver_error";
    }
}

int cmd_synth(const Opts& o) {
    const ddc::Json j = apply_overrides(ddc::load_json_file(o.config), o);
    const ddc::NodeDataset ds = ddc::dataset_from_json(j);
    const std::string alg = j.value("alg", std::string("alg1"));
    if (alg != "alg1" && alg != "alg2")
        throw ddc::InvalidInputError("synth: alg must be alg1 or alg2");

    const ddc::NoiseBound phi = ddc::NoiseBound::per_sample_ball(
        ds.local.n() + ds.local.p(), ds.local.samples(), ds.eps_l);
    const ddc::NoiseBound psi =
        ddc::NoiseBound::per_sample_ball(ds.inter.p(), ds.inter.samples(), ds.eps_g);

    const ddc::SynthesisResult r =
        alg == "alg1" ? ddc::algorithm1_node(ds.local, ds.inter, phi, psi)
                      : ddc::algorithm2_node(ds.local, ds.inter, phi, psi,
                                             j.value("alpha_param", 1.0));
    const std::string path = out_file(o, "result.json");
    ddc::save_json_file(path, ddc::result_to_json(r));
    std::cout << "synth: " << status_name(r.status) << " (inertia_ok=" << r.inertia_ok
              << "), result written to " << path << "\n";
    if (r.status == ddc::SynthStatus::feasible) return 0;
    if (r.status == ddc::SynthStatus::infeasible) return 1;
    std::cerr << "synth: solver error: " << r.detail << "\n";
    return 2;
}

int cmd_campaign(const Opts& o) {
    const ddc::Json j = apply_overrides(ddc::load_json_file(o.config), o);
    const ddc::CampaignConfig cfg = ddc::config_from_json(j);
    const std::string policy_name = j.value("policy", std::string("serial"));
    if (policy_name != "serial" && policy_name != "openmp")
        throw ddc::InvalidInputError("campaign: policy must be serial or openmp");
    const ddc::ExecutionPolicy policy = policy_name == "openmp" ? ddc::ExecutionPolicy::openmp
                                                                : ddc::ExecutionPolicy::serial;
    const int save_instances = j.value("save_instances", 1);
    const int save_datasets = j.value("save_datasets", 0);

    std::filesystem::create_directories(o.out);
    const ddc::CampaignReport rep = ddc::run_campaign(cfg, policy, o.out);

    ddc::Json summary{{"csv", rep.csv_path}, {"records", rep.records.size()}};
    for (ddc::CampaignAlgorithm a : {ddc::CampaignAlgorithm::alg1, ddc::CampaignAlgorithm::alg2}) {
        if (cfg.algorithm != ddc::CampaignAlgorithm::both && cfg.algorithm != a) continue;
        summary[ddc::alg_name(a)] = ddc::Json{{"feasibility_pct", rep.feasibility_pct(a)},
                                              {"mean_node_ms", rep.mean_node_ms(a)}};
        std::cout << "campaign: " << ddc::alg_name(a) << " feasible "
                  << rep.feasibility_pct(a) << "% of " << cfg.trials << " trials, mean "
                  << rep.mean_node_ms(a) << " ms/node\n";
    }
    ddc::save_json_file(out_file(o, "report.json"), summary);

    int saved = 0;
    for (const auto& rec : rep.records) {
        if (!rec.feasible || saved >= save_instances) continue;
        const ddc::MicrogridInstance inst = ddc::generate_microgrid(cfg, rec.trial);
        ddc::SavedInstance s;
        s.trial = rec.trial;
        s.alg = rec.alg;
        s.ts = cfg.ts;
        s.models = inst.models;
        s.weights = inst.weights;
        s.topo = inst.topo;
        s.gains = rec.gains;
        s.nodes = rec.nodes;
        s.rho = rec.rho;
        const std::string name = "instance_" + std::to_string(rec.trial) + "_" +
                                 ddc::alg_name(rec.alg) + ".json";
        ddc::save_json_file(out_file(o, name), ddc::instance_to_json(s));
        ++saved;
    }

    if (save_datasets > 0) {
        const ddc::MicrogridInstance inst = ddc::generate_microgrid(cfg, 0);
        const ddc::InterconnectionMatrix m =
            ddc::diffusive_interconnection(inst.weights, inst.topo);
        const ddc::NetworkData data =
            ddc::collect_network(inst.models, m, cfg.eps_l, cfg.eps_g, cfg.n_samples,
                                 cfg.n_tilde, ddc::trial_data_seed(cfg, 0), cfg.u_amp,
                                 cfg.u_hold, cfg.x0_amp);
        for (int i = 0; i < std::min(save_datasets, cfg.k); ++i) {
            const ddc::NodeDataset ds{data.local[static_cast<std::size_t>(i)],
                                      data.inter[static_cast<std::size_t>(i)], cfg.eps_l,
                                      cfg.eps_g};
            ddc::save_json_file(out_file(o, "dataset_node" + std::to_string(i) + ".json"),
                                ddc::dataset_to_json(ds));
        }
    }
    return 0;
}

int cmd_simulate(const Opts& o) {
    const ddc::Json j = apply_overrides(ddc::load_json_file(o.config), o);
    const ddc::SavedInstance s = ddc::instance_from_json(j);
    const int t_steps = j.value("t_steps", 500);
    const std::string noise_mode = j.value("noise", std::string("off"));
    if (noise_mode != "off" && noise_mode != "on")
        throw ddc::InvalidInputError("simulate: noise must be off or on");
    const double x0_scale = j.value("x0_scale", 1.0);
    const std::uint64_t seed = o.seed_given ? o.seed : j.value("sim_seed", std::uint64_t{12345});

    int total_n = 0;
    for (const auto& md : s.models) total_n += md.n();
    ddc::Rng rng(seed);
    Eigen::VectorXd x0 = rng.normal_vector(total_n);
    const double nrm = x0.norm();
    if (nrm > 0.0) x0 *= x0_scale / nrm;

    ddc::SimNoise noise;
    if (noise_mode == "on") {
        noise.enabled = true;
        noise.eps_l = j.value("eps_l", 0.001);
        noise.eps_g = j.value("eps_g", 0.001);
        noise.seed = ddc::Rng::derive(seed, 1).bits();
    }

    const ddc::InterconnectionMatrix m = ddc::diffusive_interconnection(s.weights, s.topo);
    const Eigen::MatrixXd traj =
        ddc::simulate_closed_loop(s.models, s.gains, m, x0, t_steps, noise);
    const std::string path =
        out_file(o, "trajectory_" + std::to_string(s.trial) + ".csv");
    ddc::write_trajectory_csv(path, s.models, traj);
    std::cout << "simulate: |x(0)| = " << x0.norm() << ", |x(" << t_steps << ")| = "
              << traj.col(traj.cols() - 1).norm() << ", trajectory written to " << path << "\n";
    return 0;
}

int cmd_verify(const Opts& o) {
    const ddc::Json j = apply_overrides(ddc::load_json_file(o.config), o);
    const ddc::SavedInstance s = ddc::instance_from_json(j);
    const int k = static_cast<int>(s.models.size());
    if (static_cast<int>(s.gains.size()) != k || static_cast<int>(s.nodes.size()) != k)
        throw ddc::InvalidInputError("verify: instance must carry one gain and result per node");

    bool ok = true;
    const auto report = [&ok](const std::string& what, bool pass) {
        std::cout << (pass ? "PASS " : "FAIL ") << what << "\n";
        ok = ok && pass;
    };

    bool statuses = true;
    for (const auto& r : s.nodes)
        statuses = statuses && r.status == ddc::SynthStatus::feasible && r.inertia_ok;
    report("all nodes feasible with inertia check", statuses);

    const ddc::InterconnectionMatrix m = ddc::diffusive_interconnection(s.weights, s.topo);
    const double rho = ddc::assemble_closed_loop(s.models, s.gains, m).second;
    report("spectral radius " + std::to_string(rho) + " <= 1 - 1e-9", rho <= 1.0 - 1e-9);

    bool dissip_ok = true;
    for (int i = 0; i < k; ++i) {
        const auto& md = s.models[static_cast<std::size_t>(i)];
        const auto& r = s.nodes[static_cast<std::size_t>(i)];
        const Eigen::MatrixXd kk = s.gains[static_cast<std::size_t>(i)];
        const ddc::LinearSystem closed(md.a + md.b1 * kk, md.b2, md.c + md.d1 * kk, md.d2);
        const ddc::StorageMatrix storage(
            ddc::SymMatrix(ddc::invert_sym(r.p, "verify: storage")));
        dissip_ok = dissip_ok &&
                    ddc::verify_trajectory_dissipation(closed, r.supply, storage, 10000,
                                                       ddc::Rng::derive(7, i).bits());
    }
    report("per-node trajectory dissipation (10000 samples each)", dissip_ok);

    bool degree_ok = true;
    bool any_degree = false;
    for (int i = 0; i < k; ++i) {
        const auto& r = s.nodes[static_cast<std::size_t>(i)];
        if (!r.d_max) continue;
        any_degree = true;
        degree_ok = degree_ok && s.weights.degree(i) <= *r.d_max;
    }
    if (any_degree) report("consistent degree bound covers the true degrees", degree_ok);

    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-driven decentralized dissipativity-based control pipeline"};
    app.require_subcommand(1);

    Opts o;
    std::vector<CLI::Option*> seed_opts;
    const auto add_common = [&](CLI::App* sc) {
        sc->add_option("--config", o.config, "JSON config / artifact file")->required();
        sc->add_option("--out", o.out, "output directory (default: .)");
        seed_opts.push_back(sc->add_option("--seed", o.seed, "override the master seed"));
        sc->add_option("--set", o.sets, "override a config key, key=value (repeatable)");
        sc->add_flag("--euler-a22", o.euler_a22,
                     "use the 1 - Ts*R/L variant of the DGU A(2,2) entry");
        return sc;
    };
    CLI::App* sc_synth = add_common(
        app.add_subcommand("synth", "run one node's gain design from a dataset file"));
    CLI::App* sc_campaign =
        add_common(app.add_subcommand("campaign", "run a Monte-Carlo feasibility campaign"));
    CLI::App* sc_simulate = add_common(
        app.add_subcommand("simulate", "simulate a saved closed-loop instance"));
    CLI::App* sc_verify = add_common(
        app.add_subcommand("verify", "replay the oracle checks on a saved instance"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    for (const CLI::Option* op : seed_opts) o.seed_given = o.seed_given || op->count() > 0;

    try {
        if (app.got_subcommand(sc_synth)) return cmd_synth(o);
        if (app.got_subcommand(sc_campaign)) return cmd_campaign(o);
        if (app.got_subcommand(sc_simulate)) return cmd_simulate(o);
        if (app.got_subcommand(sc_verify)) return cmd_verify(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand\n";
    return 2;
}
