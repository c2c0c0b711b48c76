#pragma once

#include "aoiris/numerics.hpp"

#include <vector>

namespace aoiris {

// Per-stream freshness state. age counts slots since the generation of the
// last delivered update; system_time counts slots since the generation of the
// freshest buffered packet; buffered says whether an undelivered packet is
// waiting. The buffer keeps only the latest packet: a new arrival overwrites
// anything undelivered.
struct AoiState {
    std::vector<long long> age;
    std::vector<long long> system_time;
    std::vector<int> buffered;
    std::vector<double> arrival_prob;

    static AoiState initial(std::vector<double> arrival_prob);
    int num_streams() const { return static_cast<int>(age.size()); }
};

struct SlotOutcome {
    std::vector<int> scheduled;    // alpha_i
    std::vector<int> delivered;    // requires scheduled and buffered
    std::vector<double> snr;       // realized linear SNR per IU
    std::vector<double> harvested; // watts per EU
};

/// Bernoulli arrivals; an arrival marks the stream buffered and resets its
/// system time, otherwise the system time advances. Returns the indicators.
std::vector<int> sample_arrivals(AoiState& state, RngStream& rng);

/// |h^H w|^2 / noise_power.
double realized_snr(const ComplexVec& h, const ComplexVec& w, double noise_power);

/// |g^H v|^2.
double harvested_energy(const ComplexVec& g, const ComplexVec& v);

/// One step of the age recursion. A delivery pulls the age down to
/// system_time + 1 and empties the buffer; otherwise the age grows by one.
AoiState step_aoi(const AoiState& state, const SlotOutcome& outcome);

}  // namespace aoiris
