// Times the same campaign under the serial and the OpenMP execution policy
// and checks that both produce identical outcomes (timing fields aside).

#include <chrono>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ddc/bench.hpp"
#include "ddc/jsonio.hpp"

#ifdef DDC_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

double run_timed(const ddc::CampaignConfig& cfg, ddc::ExecutionPolicy policy,
                 ddc::CampaignReport& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = ddc::run_campaign(cfg, policy);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP campaign benchmark"};
    std::string config_path;
    app.add_option("--config", config_path, "campaign config JSON (default: built-in small)");
    CLI11_PARSE(app, argc, argv);

    ddc::CampaignConfig cfg;
    cfg.k = 6;
    cfg.extra_edges = 3;
    cfg.n_samples = 40;
    cfg.n_tilde = 40;
    cfg.trials = 8;
    cfg.algorithm = ddc::CampaignAlgorithm::both;
    if (!config_path.empty()) cfg = ddc::config_from_json(ddc::load_json_file(config_path));

    int threads = 1;
#ifdef DDC_HAVE_OPENMP
    threads = omp_get_max_threads();
#endif
    std::cout << "campaign: k=" << cfg.k << " trials=" << cfg.trials
              << " algorithm=" << ddc::alg_name(cfg.algorithm) << "\n";
    std::cout << "openmp compiled in: " << (ddc::openmp_available() ? "yes" : "no")
              << ", max threads: " << threads << "\n";

    try {
        ddc::CampaignReport serial_rep, parallel_rep;
        const double ts = run_timed(cfg, ddc::ExecutionPolicy::serial, serial_rep);
        std::cout << "serial:  " << ts << " s\n";
        const double tp = run_timed(cfg, ddc::ExecutionPolicy::openmp, parallel_rep);
        std::cout << "openmp:  " << tp << " s\n";
        std::cout << "speedup: " << (tp > 0.0 ? ts / tp : 0.0) << "x\n";

        const bool same = ddc::same_outcomes(serial_rep, parallel_rep);
        std::cout << "outcomes identical: " << (same ? "yes" : "NO") << "\n";
        return same ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
