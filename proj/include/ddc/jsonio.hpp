#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddc/bench.hpp"
#include "ddc/datagen.hpp"
#include "ddc/network.hpp"
#include "ddc/synth.hpp"

// JSON (de)serialization for the artifact files the command-line tool reads
// and writes: campaign configs, per-node datasets, synthesis results, and
// feasible network instances. Matrices are stored row-major as
// {"rows": r, "cols": c, "data": [..]}.

namespace ddc {

using Json = nlohmann::json;

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Eigen::MatrixXd matrix_from_json(const Json& j) {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<int>(data.size()) != rows * cols)
        throw InvalidInputError("json: matrix data length does not match rows*cols");
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int jj = 0; jj < cols; ++jj)
            m(i, jj) = data[static_cast<std::size_t>(i * cols + jj)];
    return m;
}

inline Json model_to_json(const SubsystemModel& m) {
    return Json{{"a", matrix_to_json(m.a)},   {"b1", matrix_to_json(m.b1)},
                {"b2", matrix_to_json(m.b2)}, {"c", matrix_to_json(m.c)},
                {"d1", matrix_to_json(m.d1)}, {"d2", matrix_to_json(m.d2)}};
}

inline SubsystemModel model_from_json(const Json& j) {
    return SubsystemModel(matrix_from_json(j.at("a")), matrix_from_json(j.at("b1")),
                          matrix_from_json(j.at("b2")), matrix_from_json(j.at("c")),
                          matrix_from_json(j.at("d1")), matrix_from_json(j.at("d2")));
}

inline Json topology_to_json(const Topology& t) {
    return Json{{"k", t.k}, {"neighbor_sets", t.neighbor_sets}, {"p_dims", t.p_dims}};
}

inline Topology topology_from_json(const Json& j) {
    return Topology(j.at("k").get<int>(),
                    j.at("neighbor_sets").get<std::vector<std::vector<int>>>(),
                    j.at("p_dims").get<std::vector<int>>());
}

inline Json supply_to_json(const SupplyRate& s) {
    return Json{{"f", matrix_to_json(s.f.mat())},
                {"g", matrix_to_json(s.g)},
                {"h", matrix_to_json(s.h.mat())},
                {"form", s.form == SupplyForm::direct ? "direct" : "inverse_block"}};
}

inline SupplyRate supply_from_json(const Json& j) {
    const std::string form = j.at("form").get<std::string>();
    if (form != "direct" && form != "inverse_block")
        throw InvalidInputError("json: unknown supply form " + form);
    return SupplyRate(SymMatrix(matrix_from_json(j.at("f"))), matrix_from_json(j.at("g")),
                      SymMatrix(matrix_from_json(j.at("h"))),
                      form == "direct" ? SupplyForm::direct : SupplyForm::inverse_block);
}

inline Json result_to_json(const SynthesisResult& r) {
    Json j{{"status", r.status == SynthStatus::feasible     ? "feasible"
                      : r.status == SynthStatus::infeasible ? "infeasible"
                                                            : "solver_error"},
           {"k", matrix_to_json(r.k)},
           {"l", matrix_to_json(r.l)},
           {"p", matrix_to_json(r.p.mat())},
           {"supply", supply_to_json(r.supply)},
           {"alpha", r.alpha},
           {"inertia_ok", r.inertia_ok},
           {"j_regularized", r.j_regularized},
           {"theta_regularized", r.theta_regularized},
           {"detail", r.detail}};
    if (r.beta) j["beta"] = *r.beta;
    if (r.tau) j["tau"] = *r.tau;
    if (r.d_max) j["d_max"] = *r.d_max;
    return j;
}

inline SynthesisResult result_from_json(const Json& j) {
    SynthesisResult r;
    const std::string st = j.at("status").get<std::string>();
    if (st == "feasible")
        r.status = SynthStatus::feasible;
    else if (st == "infeasible")
        r.status = SynthStatus::infeasible;
    else if (st == "solver_error")
        r.status = SynthStatus::solver_error;
    else
        throw InvalidInputError("json: unknown synthesis status " + st);
    r.k = matrix_from_json(j.at("k"));
    r.l = matrix_from_json(j.at("l"));
    r.p = SymMatrix(matrix_from_json(j.at("p")));
    r.supply = supply_from_json(j.at("supply"));
    r.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) r.beta = j.at("beta").get<double>();
    if (j.contains("tau")) r.tau = j.at("tau").get<double>();
    if (j.contains("d_max")) r.d_max = j.at("d_max").get<double>();
    r.inertia_ok = j.at("inertia_ok").get<bool>();
    r.j_regularized = j.at("j_regularized").get<bool>();
    r.theta_regularized = j.at("theta_regularized").get<bool>();
    r.detail = j.value("detail", std::string());
    return r;
}

inline CampaignAlgorithm alg_from_name(const std::string& name) {
    if (name == "alg1") return CampaignAlgorithm::alg1;
    if (name == "alg2") return CampaignAlgorithm::alg2;
    if (name == "both") return CampaignAlgorithm::both;
    throw InvalidInputError("json: unknown algorithm " + name);
}

inline const char* alg_name(CampaignAlgorithm a) {
    switch (a) {
        case CampaignAlgorithm::alg1: return "alg1";
        case CampaignAlgorithm::alg2: return "alg2";
        default: return "both";
    }
}

inline Json config_to_json(const CampaignConfig& c) {
    return Json{{"k", c.k},
                {"extra_edges", c.extra_edges},
                {"n_samples", c.n_samples},
                {"n_tilde", c.n_tilde},
                {"eps_l", c.eps_l},
                {"eps_g", c.eps_g},
                {"alpha_param", c.alpha_param},
                {"trials", c.trials},
                {"master_seed", c.master_seed},
                {"algorithm", alg_name(c.algorithm)},
                {"ts", c.ts},
                {"euler_a22", c.euler_a22},
                {"u_amp", c.u_amp},
                {"u_hold", c.u_hold},
                {"x0_amp", c.x0_amp}};
}

// Absent keys keep their defaults, so minimal configs stay small.
inline CampaignConfig config_from_json(const Json& j) {
    CampaignConfig c;
    c.k = j.value("k", c.k);
    c.extra_edges = j.value("extra_edges", c.extra_edges);
    c.n_samples = j.value("n_samples", c.n_samples);
    c.n_tilde = j.value("n_tilde", c.n_tilde);
    c.eps_l = j.value("eps_l", c.eps_l);
    c.eps_g = j.value("eps_g", c.eps_g);
    c.alpha_param = j.value("alpha_param", c.alpha_param);
    c.trials = j.value("trials", c.trials);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("algorithm")) c.algorithm = alg_from_name(j.at("algorithm").get<std::string>());
    c.ts = j.value("ts", c.ts);
    c.euler_a22 = j.value("euler_a22", c.euler_a22);
    c.u_amp = j.value("u_amp", c.u_amp);
    c.u_hold = j.value("u_hold", c.u_hold);
    c.x0_amp = j.value("x0_amp", c.x0_amp);
    return c;
}

// One node's serialized experiment: enough to rerun either per-node design.
struct NodeDataset {
    LocalData local;
    InterconnectionData inter;
    double eps_l = 0.0;
    double eps_g = 0.0;
};

inline Json dataset_to_json(const NodeDataset& d) {
    return Json{{"kind", "dataset"},
                {"x", matrix_to_json(d.local.x)},
                {"x_plus", matrix_to_json(d.local.x_plus)},
                {"u", matrix_to_json(d.local.u)},
                {"v", matrix_to_json(d.local.v)},
                {"y", matrix_to_json(d.local.y)},
                {"v_tilde", matrix_to_json(d.inter.v_tilde)},
                {"y_tilde", matrix_to_json(d.inter.y_tilde)},
                {"neighbor_order", d.inter.neighbor_order},
                {"eps_l", d.eps_l},
                {"eps_g", d.eps_g}};
}

inline NodeDataset dataset_from_json(const Json& j) {
    return NodeDataset{
        LocalData(matrix_from_json(j.at("x")), matrix_from_json(j.at("x_plus")),
                  matrix_from_json(j.at("u")), matrix_from_json(j.at("v")),
                  matrix_from_json(j.at("y"))),
        InterconnectionData(matrix_from_json(j.at("v_tilde")), matrix_from_json(j.at("y_tilde")),
                            j.value("neighbor_order", std::vector<int>())),
        j.at("eps_l").get<double>(), j.at("eps_g").get<double>()};
}

// A solved network instance with everything `simulate` and `verify` need.
struct SavedInstance {
    int trial = 0;
    CampaignAlgorithm alg = CampaignAlgorithm::alg1;
    double ts = 0.0;
    std::vector<SubsystemModel> models;
    DiffusiveWeights weights{Eigen::MatrixXd::Zero(1, 1)};
    Topology topo;
    std::vector<Eigen::MatrixXd> gains;
    std::vector<SynthesisResult> nodes;
    double rho = 0.0;
};

inline Json instance_to_json(const SavedInstance& s) {
    Json models = Json::array(), gains = Json::array(), nodes = Json::array();
    for (const auto& m : s.models) models.push_back(model_to_json(m));
    for (const auto& g : s.gains) gains.push_back(matrix_to_json(g));
    for (const auto& r : s.nodes) nodes.push_back(result_to_json(r));
    return Json{{"kind", "instance"},
                {"trial", s.trial},
                {"alg", alg_name(s.alg)},
                {"ts", s.ts},
                {"models", models},
                {"weights", matrix_to_json(s.weights.a)},
                {"topology", topology_to_json(s.topo)},
                {"gains", gains},
                {"nodes", nodes},
                {"rho", s.rho}};
}

inline SavedInstance instance_from_json(const Json& j) {
    SavedInstance s;
    s.trial = j.at("trial").get<int>();
    s.alg = alg_from_name(j.at("alg").get<std::string>());
    s.ts = j.at("ts").get<double>();
    for (const auto& m : j.at("models")) s.models.push_back(model_from_json(m));
    s.weights = DiffusiveWeights(matrix_from_json(j.at("weights")));
    s.topo = topology_from_json(j.at("topology"));
    for (const auto& g : j.at("gains")) s.gains.push_back(matrix_from_json(g));
    for (const auto& r : j.at("nodes")) s.nodes.push_back(result_from_json(r));
    s.rho = j.at("rho").get<double>();
    return s;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInputError("cannot open " + path);
    Json j;
    f >> j;
    return j;
}

inline void save_json_file(const std::string& path, const Json& j) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
    if (!f.good()) throw Error("write failed on " + path);
}

}  // namespace ddc
