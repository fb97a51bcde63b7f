// SPDX-License-Identifier: Apache-2.0

#include "pnc/transceiver.hpp"

#include <cmath>
#include <stdexcept>

namespace pnc {

double snr_to_noise_var(double snr_db, int nt) {
    return nt / std::pow(10.0, snr_db / 10.0);
}

ToneChannels tone_channels(const ChannelRealization& ch, int l) {
    if (!ch.has_freq()) {
        throw std::invalid_argument("tone_channels: frequency response not computed");
    }
    const auto nc = static_cast<int>(ch.freq(0, 0, l).size());
    ToneChannels h = zero_channels(nc, ch.nr(), ch.nt());
    for (int j = 0; j < ch.nr(); ++j) {
        for (int i = 0; i < ch.nt(); ++i) {
            const CVector& f = ch.freq(j, i, l);
            for (int k = 0; k < nc; ++k) h[static_cast<std::size_t>(k)](j, i) = f(k);
        }
    }
    return h;
}

RxSubframe receive(const ResourceGrid& grid, const ChannelRealization& ch,
                   const PnRealization* pn, double noise_var, Rng& rng) {
    const GridLayout& g = grid.layout();
    if (ch.nt() != g.nt() || ch.no() != g.no() || !ch.has_freq() ||
        ch.freq(0, 0, 0).size() != g.nc()) {
        throw std::invalid_argument("receive: channel and grid dimensions disagree");
    }
    if (pn != nullptr && (pn->spectral.size() != static_cast<std::size_t>(g.no()) ||
                          pn->spectral.front().size() != g.nc())) {
        throw std::invalid_argument("receive: phase noise and grid dimensions disagree");
    }
    if (!(noise_var >= 0.0)) {
        throw std::invalid_argument("receive: negative noise variance");
    }
    RxSubframe rx;
    rx.nc = g.nc();
    rx.nr = ch.nr();
    rx.noise_var = noise_var;
    rx.y.reserve(static_cast<std::size_t>(g.no()));

    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = std::sqrt(noise_var / 2.0);
    for (int l = 0; l < g.no(); ++l) {
        const CVector z = mimo_apply(tone_channels(ch, l), grid.symbol_vector(l));
        CVector y = pn != nullptr ? pn_apply(pn->spectral[static_cast<std::size_t>(l)], z, rx.nr) : z;
        for (Eigen::Index e = 0; e < y.size(); ++e) {
            const double re = normal(rng);
            const double im = normal(rng);
            y(e) += sigma * cd(re, im);
        }
        rx.y.push_back(std::move(y));
    }
    return rx;
}

RxSubframe receive(const ResourceGrid& grid, const ChannelRealization& ch,
                   const PnRealization* pn, const SimConfig& cfg, Rng& rng) {
    return receive(grid, ch, pn, snr_to_noise_var(cfg.snr_db, cfg.nt), rng);
}

}  // namespace pnc
