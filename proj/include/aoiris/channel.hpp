#pragma once

#include "aoiris/numerics.hpp"

#include <vector>

namespace aoiris {

struct NetworkSizes {
    int n_tx = 4;       // AP transmit antennas
    int n_ris = 40;     // RIS reflecting elements
    int n_iu = 3;       // information users
    int n_eu = 3;       // energy users
};

// Large-scale path loss. Geometry defaults: AP at the origin, RIS on the
// x-axis at d_ap_ris, users on the same line beyond the RIS; RIS-to-user
// distances may be overridden, otherwise they are derived from that layout
// with a 0.5 m near-field floor so a user sitting at the RIS position does
// not degenerate.
struct PathLossParams {
    double a0 = 1e-3;    // linear power gain at the reference distance
    double d0 = 1.0;     // reference distance, m

    double exp_ap_iu = 2.2;
    double exp_ris_iu = 2.2;
    double exp_ap_eu = 2.2;
    double exp_ris_eu = 2.2;
    double exp_ap_ris = 3.5;

    double d_ap_iu = 31.0;   // m
    double d_ap_eu = 3.0;    // m
    double d_ap_ris = 3.0;   // m
    double d_ris_iu = -1.0;  // <0: derive from the collinear layout
    double d_ris_eu = -1.0;
    double min_ris_user_distance = 0.5;

    double ris_iu_distance() const;
    double ris_eu_distance() const;
};

// One coherence slot: five independent Rayleigh blocks.
struct ChannelRealization {
    std::vector<ComplexVec> ap_iu;   // per IU, length n_tx
    std::vector<ComplexVec> ris_iu;  // per IU, length n_ris
    std::vector<ComplexVec> ap_eu;   // per EU, length n_tx
    std::vector<ComplexVec> ris_eu;  // per EU, length n_ris
    ComplexMat ap_ris;               // n_ris x n_tx
};

/// Amplitude (not power) scale factor sqrt(a0 * (d/d0)^-n).
double amplitude_gain(const PathLossParams& params, double d, double exponent);

/// Fresh i.i.d. realization; every block is amplitude_gain x CN(0,1) entries.
ChannelRealization draw_channels(const PathLossParams& params,
                                 const NetworkSizes& sizes, RngStream& rng);

// Linear factorization of the composite channel: for a reflection vector rho
// (row convention rho^H), the composite row is rho^H * reflect + direct^H.
struct CompositeFactor {
    ComplexMat reflect;  // n_ris x n_tx
    ComplexVec direct;   // n_tx

    /// Composite channel as a column vector h, so h^H w = rho^H reflect w + direct^H w.
    ComplexVec composite(const ComplexVec& rho) const;
};

CompositeFactor composite_factor_iu(const ChannelRealization& real, int i);
CompositeFactor composite_factor_eu(const ChannelRealization& real, int j);

}  // namespace aoiris
