// SPDX-License-Identifier: Apache-2.0
//
// Received subframe synthesis directly in the frequency domain.

#pragma once

#include <vector>

#include "pnc/config.hpp"
#include "pnc/fading_channel.hpp"
#include "pnc/lte_grid.hpp"
#include "pnc/phase_noise.hpp"
#include "pnc/rng.hpp"
#include "pnc/signal_model.hpp"

namespace pnc {

/// SNR convention: average received signal power per receive antenna (nt
/// with unit-power PDP and unit-energy symbols) over per-element noise
/// variance, so sigma_w^2 = nt / 10^(snr_db / 10).
double snr_to_noise_var(double snr_db, int nt);

inline constexpr const char* kSnrDefinition =
    "sigma_w^2 = nt / 10^(snr_db/10): per-receive-antenna signal power over per-element noise variance";

struct RxSubframe {
    int nc = 0;
    int nr = 0;
    std::vector<CVector> y;  ///< per symbol, nc * nr, tone-major
    double noise_var = 0.0;
};

/// Per-tone channel matrices of symbol l.
ToneChannels tone_channels(const ChannelRealization& ch, int l);

/// y_l = (cir(a_l) (x) I_nr) H_l x_l + w_l for every symbol.
///
/// `pn == nullptr` means no phase noise (a_l = e_0). Noise is drawn even
/// when noise_var == 0 so the random stream layout is fixed.
RxSubframe receive(const ResourceGrid& grid, const ChannelRealization& ch,
                   const PnRealization* pn, double noise_var, Rng& rng);

RxSubframe receive(const ResourceGrid& grid, const ChannelRealization& ch,
                   const PnRealization* pn, const SimConfig& cfg, Rng& rng);

}  // namespace pnc
