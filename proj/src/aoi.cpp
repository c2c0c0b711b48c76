#include "aoiris/aoi.hpp"

#include <stdexcept>

namespace aoiris {

AoiState AoiState::initial(std::vector<double> arrival_prob) {
    for (double p : arrival_prob) {
        if (p < 0.0 || p > 1.0) {
            throw std::invalid_argument("AoiState: arrival probability outside [0,1]");
        }
    }
    AoiState s;
    const size_t n = arrival_prob.size();
    s.age.assign(n, 1);
    s.system_time.assign(n, 0);
    s.buffered.assign(n, 0);
    s.arrival_prob = std::move(arrival_prob);
    return s;
}

std::vector<int> sample_arrivals(AoiState& state, RngStream& rng) {
    std::vector<int> arrivals(state.age.size(), 0);
    for (size_t i = 0; i < state.age.size(); ++i) {
        const bool arrived = rng.uniform() < state.arrival_prob[i];
        if (arrived) {
            arrivals[i] = 1;
            state.buffered[i] = 1;
            state.system_time[i] = 0;  // freshest packet replaces anything waiting
        } else {
            state.system_time[i] += 1;
        }
    }
    return arrivals;
}

double realized_snr(const ComplexVec& h, const ComplexVec& w, double noise_power) {
    if (noise_power <= 0.0) {
        throw std::invalid_argument("realized_snr: nonpositive noise power");
    }
    return std::norm(hermitian_product(h, w)) / noise_power;
}

double harvested_energy(const ComplexVec& g, const ComplexVec& v) {
    return std::norm(hermitian_product(g, v));
}

AoiState step_aoi(const AoiState& state, const SlotOutcome& outcome) {
    const size_t n = state.age.size();
    if (outcome.scheduled.size() != n || outcome.delivered.size() != n) {
        throw std::invalid_argument("step_aoi: outcome size mismatch");
    }
    AoiState next = state;
    for (size_t i = 0; i < n; ++i) {
        const long long a = outcome.scheduled[i];
        const long long k = state.buffered[i];
        const long long age = state.age[i];
        const long long z = state.system_time[i];
        if (outcome.delivered[i] && !(a == 1 && k == 1)) {
            throw std::invalid_argument("step_aoi: delivered stream must be scheduled and buffered");
        }
        if (outcome.delivered[i]) {
            // four-term recursion; with a = k = 1 only the first term survives
            next.age[i] = a * k * z + (1 - a) * (1 - k) * age + (1 - a) * k * age +
                          a * (1 - k) * age + 1;
            next.buffered[i] = 0;  // refilled by the next arrival, if any
        } else {
            next.age[i] = age + 1;
        }
    }
    return next;
}

}  // namespace aoiris
