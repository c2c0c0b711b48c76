#include "aoiris/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

namespace aoiris {

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("config: " + key + " " + why);
    };
    if (sizes.n_tx < 1) fail("n_tx", "must be at least 1");
    if (sizes.n_ris < 0) fail("n_ris", "must be nonnegative");
    if (sizes.n_iu < 1) fail("n_iu", "must be at least 1");
    if (sizes.n_eu < 0) fail("n_eu", "must be nonnegative");
    if (max_scheduled < 1) fail("max_scheduled", "must be at least 1");
    if (max_scheduled > sizes.n_iu) fail("max_scheduled", "cannot exceed n_iu");
    if (noise_power <= 0.0) fail("noise_power", "must be positive");
    if (gamma_th < 0.0) fail("snr_threshold", "must be nonnegative");
    if (harvest_min < 0.0) fail("harvest_min", "must be nonnegative");
    if (power_budget <= 0.0) fail("power_budget", "must be positive");
    if (slots < 1) fail("slots", "must be at least 1");
    if (reps < 1) fail("reps", "must be at least 1");
    if (pathloss.a0 <= 0.0 || pathloss.a0 > 1.0) fail("ref_gain", "must be in (0,1]");
    if (pathloss.d0 <= 0.0) fail("ref_distance", "must be positive");
    if (pathloss.d_ap_iu <= 0.0) fail("d_ap_iu", "must be positive");
    if (pathloss.d_ap_eu <= 0.0) fail("d_ap_eu", "must be positive");
    if (pathloss.d_ap_ris <= 0.0) fail("d_ap_ris", "must be positive");
    if (pathloss.min_ris_user_distance <= 0.0) fail("min_ris_user_distance", "must be positive");
    if (!lambdas.empty() && static_cast<int>(lambdas.size()) != 1 &&
        static_cast<int>(lambdas.size()) != sizes.n_iu) {
        fail("arrival_prob", "needs one value or one per information user");
    }
    for (double l : lambdas) {
        if (l < 0.0 || l > 1.0) fail("arrival_prob", "entries must be in [0,1]");
    }
    if (af.n_antennas < 1) fail("af_antennas", "must be at least 1");
    if (af.relay_power_share <= 0.0 || af.relay_power_share >= 1.0) {
        fail("af_power_share", "must be in (0,1)");
    }
    if (threads < 0) fail("threads", "must be nonnegative");
    try {
        sca.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

ScenarioConfig ScenarioConfig::resolved() const {
    ScenarioConfig out = *this;
    if (out.lambdas.empty()) {
        out.lambdas.assign(static_cast<size_t>(sizes.n_iu), 0.6);
    } else if (out.lambdas.size() == 1) {
        out.lambdas.assign(static_cast<size_t>(sizes.n_iu), out.lambdas[0]);
    }
    return out;
}

void SolverStats::absorb(const SlotDecision& dec) {
    int phase_run = 0, beam_run = 0;
    int prev_ao = -1, prev_pen = -1;
    for (const auto& rec : dec.trace) {
        ++solves;
        iterations += rec.solver_iterations;
        switch (rec.phase) {
            case IterationRecord::Phase::phase_schedule:
                if (rec.ao_round != prev_ao || rec.penalty_round != prev_pen) {
                    phase_run = 0;
                    prev_ao = rec.ao_round;
                    prev_pen = rec.penalty_round;
                }
                ++phase_run;
                max_phase_sca_iters = std::max(max_phase_sca_iters, phase_run);
                max_penalty_rounds = std::max(max_penalty_rounds, rec.penalty_round);
                break;
            case IterationRecord::Phase::beamforming:
            case IterationRecord::Phase::final_resolve:
                beam_run = rec.sca_iter;
                max_beam_sca_iters = std::max(max_beam_sca_iters, beam_run);
                break;
            case IterationRecord::Phase::restoration:
                ++restorations;
                break;
        }
    }
    max_ao_rounds = std::max(max_ao_rounds, dec.ao_rounds);
}

void SolverStats::merge(const SolverStats& other) {
    solves += other.solves;
    iterations += other.iterations;
    max_phase_sca_iters = std::max(max_phase_sca_iters, other.max_phase_sca_iters);
    max_beam_sca_iters = std::max(max_beam_sca_iters, other.max_beam_sca_iters);
    max_penalty_rounds = std::max(max_penalty_rounds, other.max_penalty_rounds);
    max_ao_rounds = std::max(max_ao_rounds, other.max_ao_rounds);
    restorations += other.restorations;
    optimize_seconds += other.optimize_seconds;
}

namespace {

// Sub-stream ids per repetition: arrivals, channels, policy randomness.
constexpr std::uint64_t kStreamsPerRep = 4;

SlotProblem make_slot_problem(const ScenarioConfig& cfg, const ChannelRealization& real,
                              const AoiState& state, bool drop_eu) {
    SlotProblem slot;
    const int ui = cfg.sizes.n_iu;
    const int ue = drop_eu ? 0 : cfg.sizes.n_eu;
    slot.weights.resize(static_cast<size_t>(ui));
    for (int i = 0; i < ui; ++i) {
        slot.weights[static_cast<size_t>(i)] =
            static_cast<double>(state.buffered[static_cast<size_t>(i)]) *
            static_cast<double>(state.age[static_cast<size_t>(i)] -
                                state.system_time[static_cast<size_t>(i)]);
    }
    slot.iu.reserve(static_cast<size_t>(ui));
    for (int i = 0; i < ui; ++i) slot.iu.push_back(composite_factor_iu(real, i));
    slot.eu.reserve(static_cast<size_t>(ue));
    for (int j = 0; j < ue; ++j) slot.eu.push_back(composite_factor_eu(real, j));
    slot.max_scheduled = cfg.max_scheduled;
    slot.power_budget = cfg.power_budget;
    slot.gamma_th = cfg.gamma_th;
    slot.noise_power = cfg.noise_power;
    slot.harvest_min = drop_eu ? 0.0 : cfg.harvest_min;
    return slot;
}

SlotDecision decide_slot(const ScenarioConfig& cfg, const SlotProblem& slot,
                         RngStream& policy_rng) {
    switch (cfg.policy) {
        case BaselineKind::proposed:
        case BaselineKind::no_eu:
            return alternating_optimize(slot, cfg.sca, policy_rng);
        case BaselineKind::random_phase: {
            const ComplexVec rho = random_phases(slot.n_ris(), policy_rng);
            return optimize_with_fixed_phase(slot, rho, cfg.sca);
        }
        case BaselineKind::mrt: {
            const ComplexVec rho = random_phases(slot.n_ris(), policy_rng);
            SlotDecision dec;
            const int ui = slot.num_iu(), ue = slot.num_eu(), nt = slot.n_tx();
            dec.ris_phase = rho;
            dec.alpha_relaxed.assign(static_cast<size_t>(ui), 0.0);
            for (int i = 0; i < ui; ++i) {
                dec.alpha_relaxed[static_cast<size_t>(i)] = slot.buffered(i) ? 1.0 : 0.0;
            }
            dec.alpha = round_schedule(dec.alpha_relaxed, slot.weights, slot.max_scheduled);
            const auto split = mrt_power_split(slot, rho, dec.alpha);
            if (!split.has_value()) {
                dec.alpha.assign(static_cast<size_t>(ui), 0);
                dec.iu_beams.assign(static_cast<size_t>(ui), ComplexVec::Zero(nt));
                dec.eu_beams.assign(static_cast<size_t>(ue), ComplexVec::Zero(nt));
                dec.feasible = false;
                return dec;
            }
            auto beams = mrt_beamformers(slot, rho, *split);
            dec.iu_beams = std::move(beams.iu_beams);
            dec.eu_beams = std::move(beams.eu_beams);
            dec.feasible = true;
            for (int i = 0; i < ui; ++i) {
                dec.objective += slot.weights[static_cast<size_t>(i)] *
                                 dec.alpha[static_cast<size_t>(i)];
            }
            return dec;
        }
        case BaselineKind::af_relay:
            throw std::logic_error("decide_slot: relay policy handled separately");
    }
    throw std::logic_error("decide_slot: unreachable");
}

RepResult run_rep(const ScenarioConfig& cfg, int rep) {
    RngStream base(cfg.seed, 0);
    RngStream arrivals_rng = base.substream(static_cast<std::uint64_t>(rep) * kStreamsPerRep);
    RngStream channel_rng = base.substream(static_cast<std::uint64_t>(rep) * kStreamsPerRep + 1);
    RngStream policy_rng = base.substream(static_cast<std::uint64_t>(rep) * kStreamsPerRep + 2);

    AoiState state = AoiState::initial(cfg.lambdas);
    RepResult rr;
    const int ui = cfg.sizes.n_iu;
    const int ue = cfg.sizes.n_eu;
    const bool af = (cfg.policy == BaselineKind::af_relay);
    const bool drop_eu = (cfg.policy == BaselineKind::no_eu);
    const double slack = cfg.sca.feasibility_slack;

    for (int t = 0; t < cfg.slots; ++t) {
        const std::vector<int> arrivals = sample_arrivals(state, arrivals_rng);
        for (int a : arrivals) rr.arrivals += a;

        SlotOutcome outcome;
        outcome.scheduled.assign(static_cast<size_t>(ui), 0);
        outcome.delivered.assign(static_cast<size_t>(ui), 0);
        outcome.snr.assign(static_cast<size_t>(ui), 0.0);
        outcome.harvested.assign(static_cast<size_t>(ue), 0.0);

        SlotRecord rec;
        rec.arrivals = arrivals;

        const auto t0 = std::chrono::steady_clock::now();
        if (af) {
            const AfChannels ch = draw_af_channels(cfg.pathloss, cfg.sizes, cfg.af.n_antennas,
                                                   channel_rng);
            std::vector<double> weights(static_cast<size_t>(ui));
            for (int i = 0; i < ui; ++i) {
                weights[static_cast<size_t>(i)] =
                    static_cast<double>(state.buffered[static_cast<size_t>(i)]) *
                    static_cast<double>(state.age[static_cast<size_t>(i)] -
                                        state.system_time[static_cast<size_t>(i)]);
            }
            const AfSlot afs = af_relay_slot(ch, weights, cfg.max_scheduled, cfg.power_budget,
                                             cfg.noise_power, cfg.harvest_min, cfg.af);
            rec.feasible = afs.feasible;
            rr.infeasible_slots += afs.feasible ? 0 : 1;
            for (int i = 0; i < ui; ++i) {
                outcome.scheduled[static_cast<size_t>(i)] = afs.scheduled[static_cast<size_t>(i)];
                outcome.snr[static_cast<size_t>(i)] = afs.iu_snr[static_cast<size_t>(i)];
                outcome.delivered[static_cast<size_t>(i)] =
                    afs.scheduled[static_cast<size_t>(i)] &&
                    state.buffered[static_cast<size_t>(i)] &&
                    afs.iu_snr[static_cast<size_t>(i)] >= cfg.gamma_th * (1.0 - slack);
            }
            for (int j = 0; j < ue; ++j) {
                outcome.harvested[static_cast<size_t>(j)] =
                    afs.feasible ? afs.eu_energy[static_cast<size_t>(j)] : 0.0;
            }
        } else {
            const ChannelRealization real = draw_channels(cfg.pathloss, cfg.sizes, channel_rng);
            const SlotProblem slot = make_slot_problem(cfg, real, state, drop_eu);
            SlotDecision dec = decide_slot(cfg, slot, policy_rng);
            rr.stats.absorb(dec);
            rec.feasible = dec.feasible;
            rec.solver_calls = static_cast<int>(dec.trace.size());
            for (const auto& tr : dec.trace) rec.solver_iterations += tr.solver_iterations;
            rr.infeasible_slots += dec.feasible ? 0 : 1;

            for (int i = 0; i < ui; ++i) {
                const int a = dec.alpha[static_cast<size_t>(i)];
                outcome.scheduled[static_cast<size_t>(i)] = a;
                if (a == 1 && state.buffered[static_cast<size_t>(i)] == 1) {
                    const ComplexVec h = slot.iu[static_cast<size_t>(i)].composite(dec.ris_phase);
                    const double snr = realized_snr(h, dec.iu_beams[static_cast<size_t>(i)],
                                                    cfg.noise_power);
                    outcome.snr[static_cast<size_t>(i)] = snr;
                    outcome.delivered[static_cast<size_t>(i)] =
                        snr >= cfg.gamma_th * (1.0 - slack);
                }
            }
            // energy users harvest whatever the slot actually radiates, also
            // under the no-eu policy where nothing is aimed at them
            for (int j = 0; j < ue; ++j) {
                const ComplexVec g = composite_factor_eu(real, j).composite(dec.ris_phase);
                ComplexVec v = ComplexVec::Zero(cfg.sizes.n_tx);
                if (!drop_eu && j < static_cast<int>(dec.eu_beams.size())) {
                    v = dec.eu_beams[static_cast<size_t>(j)];
                }
                outcome.harvested[static_cast<size_t>(j)] = harvested_energy(g, v);
            }
            if (cfg.record_traces) {
                rec.ris_phase = dec.ris_phase;
                rec.iu_beams = dec.iu_beams;
                rec.eu_beams = dec.eu_beams;
            }
        }
        rr.stats.optimize_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        state = step_aoi(state, outcome);
        for (int i = 0; i < ui; ++i) {
            rr.sum_age += state.age[static_cast<size_t>(i)];
            rr.deliveries += outcome.delivered[static_cast<size_t>(i)];
        }
        for (int j = 0; j < ue; ++j) rr.harvested_sum += outcome.harvested[static_cast<size_t>(j)];

        if (cfg.record_traces) {
            rec.scheduled = outcome.scheduled;
            rec.delivered = outcome.delivered;
            rec.snr = outcome.snr;
            rec.harvested = outcome.harvested;
            rec.age = state.age;
            rr.slots.push_back(std::move(rec));
        }
    }
    return rr;
}

}  // namespace

RunMetrics run(const ScenarioConfig& config) {
    config.validate();
    const ScenarioConfig cfg = config.resolved();

    std::vector<RepResult> reps(static_cast<size_t>(cfg.reps));
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int nthreads = std::max(1, std::min(cfg.reps, cfg.threads > 0 ? cfg.threads
                                                                        : std::max(1, hw)));
    if (nthreads == 1) {
        for (int r = 0; r < cfg.reps; ++r) reps[static_cast<size_t>(r)] = run_rep(cfg, r);
    } else {
        std::vector<std::future<RepResult>> futures;
        futures.reserve(static_cast<size_t>(cfg.reps));
        for (int r = 0; r < cfg.reps; ++r) {
            futures.push_back(std::async(std::launch::async, run_rep, std::cref(cfg), r));
        }
        for (int r = 0; r < cfg.reps; ++r) reps[static_cast<size_t>(r)] = futures[static_cast<size_t>(r)].get();
    }

    RunMetrics m;
    m.config = cfg;
    m.per_stream_time_avg.assign(static_cast<size_t>(cfg.sizes.n_iu), 0.0);
    long long arrivals = 0, deliveries = 0;
    for (const auto& rr : reps) {
        m.mean_sum_aoi += static_cast<double>(rr.sum_age);
        arrivals += rr.arrivals;
        deliveries += rr.deliveries;
        m.infeasible_slots += rr.infeasible_slots;
        m.mean_harvest_w += rr.harvested_sum;
        m.stats.merge(rr.stats);
    }
    m.mean_sum_aoi /= cfg.reps;
    m.time_avg_sum_aoi = m.mean_sum_aoi / cfg.slots;
    m.delivery_rate = arrivals > 0 ? static_cast<double>(deliveries) / arrivals : 0.0;
    m.mean_harvest_w = (cfg.sizes.n_eu > 0)
                           ? m.mean_harvest_w / (static_cast<double>(cfg.reps) * cfg.slots *
                                                 cfg.sizes.n_eu)
                           : 0.0;
    if (cfg.record_traces) {
        for (const auto& rr : reps) {
            for (const auto& rec : rr.slots) {
                for (int i = 0; i < cfg.sizes.n_iu; ++i) {
                    m.per_stream_time_avg[static_cast<size_t>(i)] +=
                        static_cast<double>(rec.age[static_cast<size_t>(i)]);
                }
            }
        }
        for (auto& v : m.per_stream_time_avg) {
            v /= static_cast<double>(cfg.reps) * cfg.slots;
        }
    }
    m.reps = std::move(reps);

    // the loop structure cannot run past the caps; fail loudly if it ever does
    if (m.stats.max_phase_sca_iters > cfg.sca.max_phase_iters ||
        m.stats.max_beam_sca_iters > cfg.sca.max_beam_iters ||
        m.stats.max_penalty_rounds > cfg.sca.penalty_rounds ||
        m.stats.max_ao_rounds > cfg.sca.max_ao_rounds) {
        throw std::logic_error("run: an optimizer loop exceeded its configured cap");
    }
    return m;
}

std::vector<CompareRow> compare(const std::vector<CompareItem>& items) {
    std::vector<CompareRow> rows;
    rows.reserve(items.size());
    for (const auto& item : items) {
        CompareRow row;
        row.policy_label = item.policy_label;
        row.swept_param = item.swept_param;
        row.swept_value = item.swept_value;
        row.metrics = run(item.config);
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* version() {
#ifdef AOIRIS_VERSION
    return AOIRIS_VERSION;
#else
    return "0.1.0";
#endif
}

}  // namespace aoiris
