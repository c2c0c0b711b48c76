#include "aoiris/config.hpp"
#include "aoiris/selftest.hpp"
#include "aoiris/sim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

void log_run_header(const aoiris::ScenarioConfig& cfg) {
    aoiris::log_info(std::string("version ") + aoiris::version());
    aoiris::log_info("seed " + std::to_string(cfg.seed));
    if (aoiris::log_level() >= aoiris::LogLevel::debug) {
        aoiris::log_debug("resolved config:\n" + aoiris::serialize_config(cfg));
    }
}

void print_metrics(const aoiris::RunMetrics& m) {
    std::printf("policy              %s\n", aoiris::to_string(m.config.policy));
    std::printf("slots x reps        %d x %d\n", m.config.slots, m.config.reps);
    std::printf("mean sum AoI        %.6f\n", m.mean_sum_aoi);
    std::printf("time-avg sum AoI    %.6f\n", m.time_avg_sum_aoi);
    for (size_t i = 0; i < m.per_stream_time_avg.size(); ++i) {
        std::printf("  stream %zu avg AoI %.6f\n", i, m.per_stream_time_avg[i]);
    }
    std::printf("delivery rate       %.6f\n", m.delivery_rate);
    if (m.config.sizes.n_eu > 0) {
        const double dbm = m.mean_harvest_w > 0.0
                               ? 10.0 * std::log10(m.mean_harvest_w * 1e3)
                               : -std::numeric_limits<double>::infinity();
        std::printf("mean harvest        %.6g W (%.2f dBm)\n", m.mean_harvest_w, dbm);
    }
    std::printf("infeasible slots    %lld\n", m.infeasible_slots);
    std::printf("solver calls        %lld (%.1f iters/solve)\n", m.stats.solves,
                m.stats.solves > 0 ? static_cast<double>(m.stats.iterations) / m.stats.solves
                                   : 0.0);
    std::printf("loop peaks          ao %d/%d, phase sca %d/%d, beam sca %d/%d, penalty %d/%d\n",
                m.stats.max_ao_rounds, m.config.sca.max_ao_rounds, m.stats.max_phase_sca_iters,
                m.config.sca.max_phase_iters, m.stats.max_beam_sca_iters,
                m.config.sca.max_beam_iters, m.stats.max_penalty_rounds,
                m.config.sca.penalty_rounds);
    const int total_slots = m.config.slots * m.config.reps;
    std::printf("optimize wall/slot  %.3f ms\n",
                1e3 * m.stats.optimize_seconds / std::max(1, total_slots));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slot-level simulator and optimizer for a reflecting-surface "
                 "downlink that serves both status updates and wireless power"};
    app.require_subcommand(1);

    std::string config_path, spec_path, out_path;
    std::uint64_t seed_override = 0;
    bool has_seed = false;

    auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
    run_cmd->add_option("--config", config_path, "config file (omit for defaults)");
    run_cmd->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { has_seed = true; });

    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep and emit CSV");
    sweep_cmd->add_option("--spec", spec_path, "sweep spec file")->required();
    sweep_cmd->add_option("--out", out_path, "output CSV path")->required();

    app.add_subcommand("selftest", "run the built-in oracle and property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            aoiris::ScenarioConfig cfg =
                config_path.empty() ? aoiris::ScenarioConfig{} : aoiris::load_config(config_path);
            if (has_seed) cfg.seed = seed_override;
            cfg.validate();
            log_run_header(cfg);
            const auto t0 = std::chrono::steady_clock::now();
            const auto metrics = aoiris::run(cfg);
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            print_metrics(metrics);
            aoiris::log_info("wall clock " + std::to_string(wall) + " s, per slot " +
                             std::to_string(1e3 * wall / (cfg.slots * cfg.reps)) + " ms");
        } else if (sweep_cmd->parsed()) {
            const auto spec = aoiris::load_sweep_spec(spec_path);
            log_run_header(spec.base);
            const std::string csv = aoiris::run_sweep(spec, out_path);
            std::fputs(csv.c_str(), stdout);
            aoiris::log_info("wrote " + out_path);
        } else {
            return aoiris::run_selftest(std::cout) == 0 ? 0 : 2;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
