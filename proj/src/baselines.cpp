#include "aoiris/baselines.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace aoiris {

const char* to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::proposed: return "proposed";
        case BaselineKind::mrt: return "mrt";
        case BaselineKind::random_phase: return "random-phase";
        case BaselineKind::no_eu: return "no-eu";
        case BaselineKind::af_relay: return "af-relay";
    }
    return "unknown";
}

BaselineKind baseline_from_string(const std::string& s) {
    if (s == "proposed") return BaselineKind::proposed;
    if (s == "mrt") return BaselineKind::mrt;
    if (s == "random-phase") return BaselineKind::random_phase;
    if (s == "no-eu") return BaselineKind::no_eu;
    if (s == "af-relay") return BaselineKind::af_relay;
    throw std::invalid_argument("unknown policy: " + s);
}

ComplexVec random_phases(int n_ris, RngStream& rng) {
    ComplexVec rho(n_ris);
    for (int n = 0; n < n_ris; ++n) {
        const double theta = 2.0 * M_PI * rng.uniform();
        rho[n] = cxd(std::cos(theta), std::sin(theta));
    }
    return rho;
}

std::optional<PowerSplit> mrt_power_split(const SlotProblem& slot, const ComplexVec& rho,
                                          const std::vector<int>& scheduled) {
    const int ui = slot.num_iu(), ue = slot.num_eu();
    if (static_cast<int>(scheduled.size()) != ui) {
        throw std::invalid_argument("mrt_power_split: schedule size mismatch");
    }
    int n_sched = 0;
    for (int a : scheduled) n_sched += (a != 0);

    std::vector<double> eu_gain(static_cast<size_t>(ue));
    for (int j = 0; j < ue; ++j) {
        eu_gain[static_cast<size_t>(j)] = slot.eu[static_cast<size_t>(j)].composite(rho).squaredNorm();
    }

    const int shares = n_sched + ue;
    PowerSplit split;
    split.iu_power.assign(static_cast<size_t>(ui), 0.0);
    split.eu_power.assign(static_cast<size_t>(ue), 0.0);
    if (shares == 0) return split;

    const double equal = slot.power_budget / shares;
    auto harvest_ok = [&](double eu_factor) {
        for (int j = 0; j < ue; ++j) {
            if (equal * eu_factor * eu_gain[static_cast<size_t>(j)] <
                slot.harvest_min * (1.0 - 1e-12)) {
                return false;
            }
        }
        return true;
    };
    // grow every EU share by a common factor until the floors hold; the factor
    // is capped by the full budget with nothing left for the IUs
    double factor = 1.0;
    if (ue > 0 && !harvest_ok(factor)) {
        const double factor_max = slot.power_budget / (equal * ue);
        if (!harvest_ok(factor_max)) return std::nullopt;
        double lo = 1.0, hi = factor_max;
        for (int it = 0; it < 200 && (hi - lo) > 1e-12 * factor_max; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (harvest_ok(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        factor = hi;
    }
    const double eu_total = equal * factor * ue;
    const double iu_each = (n_sched > 0) ? (slot.power_budget - eu_total) / n_sched : 0.0;
    for (int i = 0; i < ui; ++i) {
        if (scheduled[static_cast<size_t>(i)]) split.iu_power[static_cast<size_t>(i)] = iu_each;
    }
    for (int j = 0; j < ue; ++j) split.eu_power[static_cast<size_t>(j)] = equal * factor;
    return split;
}

MrtBeams mrt_beamformers(const SlotProblem& slot, const ComplexVec& rho,
                         const PowerSplit& split) {
    const int ui = slot.num_iu(), ue = slot.num_eu(), nt = slot.n_tx();
    if (static_cast<int>(split.iu_power.size()) != ui ||
        static_cast<int>(split.eu_power.size()) != ue) {
        throw std::invalid_argument("mrt_beamformers: split size mismatch");
    }
    double total = 0.0;
    for (double p : split.iu_power) total += p;
    for (double q : split.eu_power) total += q;
    if (total > slot.power_budget * (1.0 + 1e-9)) {
        throw std::invalid_argument("mrt_beamformers: split exceeds the power budget");
    }

    MrtBeams beams;
    beams.iu_beams.assign(static_cast<size_t>(ui), ComplexVec::Zero(nt));
    beams.eu_beams.assign(static_cast<size_t>(ue), ComplexVec::Zero(nt));
    for (int i = 0; i < ui; ++i) {
        const double p = split.iu_power[static_cast<size_t>(i)];
        if (p <= 0.0) continue;
        const ComplexVec h = slot.iu[static_cast<size_t>(i)].composite(rho);
        const double nrm = h.norm();
        if (nrm > 0.0) beams.iu_beams[static_cast<size_t>(i)] = std::sqrt(p) / nrm * h;
    }
    for (int j = 0; j < ue; ++j) {
        const double q = split.eu_power[static_cast<size_t>(j)];
        if (q <= 0.0) continue;
        const ComplexVec g = slot.eu[static_cast<size_t>(j)].composite(rho);
        const double nrm = g.norm();
        if (nrm > 0.0) beams.eu_beams[static_cast<size_t>(j)] = std::sqrt(q) / nrm * g;
    }
    return beams;
}

AfChannels draw_af_channels(const PathLossParams& params, const NetworkSizes& sizes,
                            int n_antennas, RngStream& rng) {
    if (n_antennas < 1) throw std::invalid_argument("draw_af_channels: need at least one antenna");
    AfChannels c;
    const double a_ap_relay = amplitude_gain(params, params.d_ap_ris, params.exp_ap_ris);
    const double a_relay_iu = amplitude_gain(params, params.ris_iu_distance(), params.exp_ris_iu);
    const double a_relay_eu = amplitude_gain(params, params.ris_eu_distance(), params.exp_ris_eu);
    c.ap_relay = a_ap_relay * sample_cn(n_antennas, sizes.n_tx, rng);
    c.relay_iu.reserve(static_cast<size_t>(sizes.n_iu));
    for (int i = 0; i < sizes.n_iu; ++i) {
        c.relay_iu.push_back(a_relay_iu * sample_cn(n_antennas, 1, rng).col(0));
    }
    c.relay_eu.reserve(static_cast<size_t>(sizes.n_eu));
    for (int j = 0; j < sizes.n_eu; ++j) {
        c.relay_eu.push_back(a_relay_eu * sample_cn(n_antennas, 1, rng).col(0));
    }
    return c;
}

double af_cascade_snr(double snr1, double snr2) {
    if (snr1 < 0.0 || snr2 < 0.0) throw std::invalid_argument("af_cascade_snr: negative SNR");
    if (std::isinf(snr1)) return snr2;
    if (std::isinf(snr2)) return snr1;
    return snr1 * snr2 / (snr1 + snr2 + 1.0);
}

AfSlot af_relay_slot(const AfChannels& channels, const std::vector<double>& weights,
                     int max_scheduled, double power_budget, double noise_power,
                     double harvest_min, const AfConfig& cfg) {
    if (cfg.relay_power_share <= 0.0 || cfg.relay_power_share >= 1.0) {
        throw std::invalid_argument("af_relay_slot: relay power share must be in (0,1)");
    }
    if (noise_power <= 0.0) throw std::invalid_argument("af_relay_slot: nonpositive noise power");
    const int ui = static_cast<int>(channels.relay_iu.size());
    const int ue = static_cast<int>(channels.relay_eu.size());
    if (static_cast<int>(weights.size()) != ui) {
        throw std::invalid_argument("af_relay_slot: weight size mismatch");
    }

    AfSlot out;
    out.iu_snr.assign(static_cast<size_t>(ui), 0.0);
    out.eu_energy.assign(static_cast<size_t>(ue), 0.0);

    std::vector<double> alpha(weights.size());
    for (size_t i = 0; i < weights.size(); ++i) alpha[i] = weights[i] > 0.0 ? 1.0 : 0.0;
    out.scheduled = round_schedule(alpha, weights, max_scheduled);

    int n_sched = 0;
    for (int a : out.scheduled) n_sched += a;

    const double ap_budget = (1.0 - cfg.relay_power_share) * power_budget;
    const double relay_budget = cfg.relay_power_share * power_budget;

    // relay side feeds the energy users; grow their share like the MRT split
    std::vector<double> eu_gain(static_cast<size_t>(ue));
    for (int j = 0; j < ue; ++j) eu_gain[static_cast<size_t>(j)] = channels.relay_eu[static_cast<size_t>(j)].squaredNorm();

    const int relay_shares = n_sched + ue;
    std::vector<double> relay_iu_power(static_cast<size_t>(ui), 0.0);
    std::vector<double> relay_eu_power(static_cast<size_t>(ue), 0.0);
    out.feasible = true;
    if (relay_shares > 0) {
        const double equal = relay_budget / relay_shares;
        auto harvest_ok = [&](double f) {
            for (int j = 0; j < ue; ++j) {
                if (equal * f * eu_gain[static_cast<size_t>(j)] < harvest_min * (1.0 - 1e-12)) return false;
            }
            return true;
        };
        double factor = 1.0;
        if (ue > 0 && !harvest_ok(factor)) {
            const double factor_max = relay_budget / (equal * ue);
            if (!harvest_ok(factor_max)) {
                out.feasible = false;
                out.scheduled.assign(static_cast<size_t>(ui), 0);
                return out;
            }
            double lo = 1.0, hi = factor_max;
            for (int it = 0; it < 200 && (hi - lo) > 1e-12 * factor_max; ++it) {
                const double mid = 0.5 * (lo + hi);
                (harvest_ok(mid) ? hi : lo) = mid;
            }
            factor = hi;
        }
        const double eu_total = equal * factor * ue;
        const double iu_each = (n_sched > 0) ? (relay_budget - eu_total) / n_sched : 0.0;
        for (int i = 0; i < ui; ++i) {
            if (out.scheduled[static_cast<size_t>(i)]) relay_iu_power[static_cast<size_t>(i)] = iu_each;
        }
        for (int j = 0; j < ue; ++j) relay_eu_power[static_cast<size_t>(j)] = equal * factor;
    }

    const double ap_each = (n_sched > 0) ? ap_budget / n_sched : 0.0;
    const double hop1_gain = [&] {
        Eigen::JacobiSVD<ComplexMat> svd(channels.ap_relay);
        const double s = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
        return s * s;  // best rank-one power gain through the AP-relay matrix
    }();

    for (int i = 0; i < ui; ++i) {
        if (!out.scheduled[static_cast<size_t>(i)]) continue;
        const double snr1 = ap_each * hop1_gain / noise_power;
        const double snr2 = relay_iu_power[static_cast<size_t>(i)] *
                            channels.relay_iu[static_cast<size_t>(i)].squaredNorm() / noise_power;
        out.iu_snr[static_cast<size_t>(i)] = af_cascade_snr(snr1, snr2);
    }
    for (int j = 0; j < ue; ++j) {
        out.eu_energy[static_cast<size_t>(j)] =
            relay_eu_power[static_cast<size_t>(j)] * eu_gain[static_cast<size_t>(j)];
    }
    return out;
}

}  // namespace aoiris
