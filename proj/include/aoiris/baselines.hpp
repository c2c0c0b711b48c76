#pragma once

#include "aoiris/sca.hpp"

#include <optional>
#include <string>

namespace aoiris {

enum class BaselineKind { proposed, mrt, random_phase, no_eu, af_relay };

const char* to_string(BaselineKind k);
BaselineKind baseline_from_string(const std::string& s);

/// i.i.d. uniform phases, exactly unit modulus.
ComplexVec random_phases(int n_ris, RngStream& rng);

struct PowerSplit {
    std::vector<double> iu_power;  // watts, zero for unscheduled streams
    std::vector<double> eu_power;
};

/// Equal split of the budget among scheduled IUs and all EUs, then the EU
/// share factor is grown by bisection until every EU meets the harvest floor.
/// nullopt when even the full budget cannot satisfy the floors.
std::optional<PowerSplit> mrt_power_split(const SlotProblem& slot, const ComplexVec& rho,
                                          const std::vector<int>& scheduled);

struct MrtBeams {
    std::vector<ComplexVec> iu_beams;
    std::vector<ComplexVec> eu_beams;
};

/// Maximum-ratio beams on the composite channels: w_i = sqrt(p_i) h_i / ||h_i||.
/// A zero-norm channel yields a zero beamformer.
MrtBeams mrt_beamformers(const SlotProblem& slot, const ComplexVec& rho,
                         const PowerSplit& split);

// ---- amplify-and-forward relay stand-in ----------------------------------------
//
// The relay sits at the RIS position with its own antenna array. The first hop
// ships each stream through the AP-relay matrix at the best rank-one gain; the
// second hop retransmits with maximum-ratio beams. AP and relay power sum to
// the same total budget as the reflecting setup. Direct AP-user links are not
// combined.

struct AfConfig {
    int n_antennas = 4;
    double relay_power_share = 0.5;  // fraction of the budget spent at the relay
};

struct AfChannels {
    ComplexMat ap_relay;               // n_antennas x n_tx
    std::vector<ComplexVec> relay_iu;  // n_antennas, per IU
    std::vector<ComplexVec> relay_eu;
};

AfChannels draw_af_channels(const PathLossParams& params, const NetworkSizes& sizes,
                            int n_antennas, RngStream& rng);

/// Standard cascade SNR of a two-hop amplify-and-forward link.
double af_cascade_snr(double snr1, double snr2);

struct AfSlot {
    std::vector<int> scheduled;
    std::vector<double> iu_snr;     // end-to-end cascade SNR per IU
    std::vector<double> eu_energy;  // watts per EU
    bool feasible = false;
};

AfSlot af_relay_slot(const AfChannels& channels, const std::vector<double>& weights,
                     int max_scheduled, double power_budget, double noise_power,
                     double harvest_min, const AfConfig& cfg);

}  // namespace aoiris
