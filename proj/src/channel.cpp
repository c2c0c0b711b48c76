#include "aoiris/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace aoiris {

double PathLossParams::ris_iu_distance() const {
    if (d_ris_iu > 0.0) return d_ris_iu;
    return std::max(std::abs(d_ap_iu - d_ap_ris), min_ris_user_distance);
}

double PathLossParams::ris_eu_distance() const {
    if (d_ris_eu > 0.0) return d_ris_eu;
    return std::max(std::abs(d_ap_eu - d_ap_ris), min_ris_user_distance);
}

double amplitude_gain(const PathLossParams& params, double d, double exponent) {
    if (d <= 0.0) {
        throw std::invalid_argument("amplitude_gain: nonpositive distance");
    }
    return std::sqrt(params.a0 * std::pow(d / params.d0, -exponent));
}

ChannelRealization draw_channels(const PathLossParams& params,
                                 const NetworkSizes& sizes, RngStream& rng) {
    if (sizes.n_tx < 1 || sizes.n_ris < 0 || sizes.n_iu < 0 || sizes.n_eu < 0) {
        throw std::invalid_argument("draw_channels: invalid sizes");
    }
    ChannelRealization r;
    const double a_ap_iu = amplitude_gain(params, params.d_ap_iu, params.exp_ap_iu);
    const double a_ris_iu = amplitude_gain(params, params.ris_iu_distance(), params.exp_ris_iu);
    const double a_ap_eu = amplitude_gain(params, params.d_ap_eu, params.exp_ap_eu);
    const double a_ris_eu = amplitude_gain(params, params.ris_eu_distance(), params.exp_ris_eu);
    const double a_ap_ris = amplitude_gain(params, params.d_ap_ris, params.exp_ap_ris);

    r.ap_iu.reserve(sizes.n_iu);
    r.ris_iu.reserve(sizes.n_iu);
    for (int i = 0; i < sizes.n_iu; ++i) {
        r.ap_iu.push_back(a_ap_iu * sample_cn(sizes.n_tx, 1, rng).col(0));
        r.ris_iu.push_back(a_ris_iu * sample_cn(sizes.n_ris, 1, rng).col(0));
    }
    r.ap_eu.reserve(sizes.n_eu);
    r.ris_eu.reserve(sizes.n_eu);
    for (int j = 0; j < sizes.n_eu; ++j) {
        r.ap_eu.push_back(a_ap_eu * sample_cn(sizes.n_tx, 1, rng).col(0));
        r.ris_eu.push_back(a_ris_eu * sample_cn(sizes.n_ris, 1, rng).col(0));
    }
    r.ap_ris = a_ap_ris * sample_cn(sizes.n_ris, sizes.n_tx, rng);
    return r;
}

ComplexVec CompositeFactor::composite(const ComplexVec& rho) const {
    if (rho.size() != reflect.rows()) {
        throw std::invalid_argument("CompositeFactor::composite: rho length mismatch");
    }
    return reflect.adjoint() * rho + direct;
}

CompositeFactor composite_factor_iu(const ChannelRealization& real, int i) {
    if (i < 0 || i >= static_cast<int>(real.ap_iu.size())) {
        throw std::out_of_range("composite_factor_iu: index out of range");
    }
    CompositeFactor f;
    f.reflect = real.ris_iu[static_cast<size_t>(i)].conjugate().asDiagonal() * real.ap_ris;
    f.direct = real.ap_iu[static_cast<size_t>(i)];
    return f;
}

CompositeFactor composite_factor_eu(const ChannelRealization& real, int j) {
    if (j < 0 || j >= static_cast<int>(real.ap_eu.size())) {
        throw std::out_of_range("composite_factor_eu: index out of range");
    }
    CompositeFactor f;
    f.reflect = real.ris_eu[static_cast<size_t>(j)].conjugate().asDiagonal() * real.ap_ris;
    f.direct = real.ap_eu[static_cast<size_t>(j)];
    return f;
}

}  // namespace aoiris
