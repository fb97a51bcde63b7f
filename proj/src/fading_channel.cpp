// SPDX-License-Identifier: Apache-2.0

#include "pnc/fading_channel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pnc {

PowerDelayProfile make_pdp(std::vector<double> delays_us, std::vector<double> powers_db,
                           double ts_s, int min_length) {
    if (!(ts_s > 0.0)) {
        throw std::invalid_argument("make_pdp: ts must be positive");
    }
    if (delays_us.empty() || delays_us.size() != powers_db.size()) {
        throw std::invalid_argument("make_pdp: delays and powers must be non-empty and equal length");
    }
    PowerDelayProfile pdp;
    pdp.delays_us = std::move(delays_us);
    pdp.powers_db = std::move(powers_db);
    for (std::size_t t = 0; t < pdp.delays_us.size(); ++t) {
        const int idx = static_cast<int>(std::lround(pdp.delays_us[t] * 1e-6 / ts_s));
        if (t == 0 && idx != 0) {
            throw std::invalid_argument("make_pdp: first tap must sit at delay 0");
        }
        if (t > 0 && idx <= pdp.tap_indices.back()) {
            throw std::invalid_argument("make_pdp: taps " + std::to_string(t - 1) + " and " +
                                        std::to_string(t) + " round to the same sample");
        }
        pdp.tap_indices.push_back(idx);
        pdp.gamma.push_back(std::pow(10.0, pdp.powers_db[t] / 10.0));
    }
    const double total = std::accumulate(pdp.gamma.begin(), pdp.gamma.end(), 0.0);
    for (double& g : pdp.gamma) g /= total;
    pdp.length = std::max(pdp.tap_indices.back() + 1, min_length);
    return pdp;
}

PowerDelayProfile pedb_profile(double ts_s) {
    return make_pdp({0.0, 0.2, 0.8, 1.2, 2.3, 3.7}, {0.0, -0.9, -4.9, -8.0, -7.8, -23.9}, ts_s);
}

RVector pdp_lag_powers(const PowerDelayProfile& pdp) {
    RVector g = RVector::Zero(pdp.length);
    for (std::size_t t = 0; t < pdp.tap_indices.size(); ++t) {
        g(pdp.tap_indices[t]) = pdp.gamma[t];
    }
    return g;
}

ChannelRealization::ChannelRealization(int nr, int nt, int no, int length)
    : nr_(nr), nt_(nt), no_(no), length_(length),
      taps_(static_cast<std::size_t>(nr) * nt * no, CVector::Zero(length)) {}

void ChannelRealization::freq_response(int nc) {
    if (length_ > nc) {
        throw std::invalid_argument("freq_response: channel longer than the DFT size");
    }
    const CMatrix f = dft_columns(nc, length_);
    freq_.resize(taps_.size());
    for (std::size_t t = 0; t < taps_.size(); ++t) {
        freq_[t] = f * taps_[t];
    }
}

RMatrix jakes_correlation(double fd_hz, double to_s, int no) {
    RMatrix r(no, no);
    for (int l = 0; l < no; ++l) {
        for (int m = 0; m < no; ++m) {
            r(l, m) = bessel_j0(2.0 * kPi * fd_hz * std::abs(l - m) * to_s);
        }
    }
    return r;
}

FadingChannelModel::FadingChannelModel(PowerDelayProfile pdp, double fd_hz, double to_s,
                                       int no, int nt, int nr)
    : pdp_(std::move(pdp)), no_(no), nt_(nt), nr_(nr) {
    if (!(fd_hz >= 0.0) || no < 1 || nt < 1 || nr < 1) {
        throw std::invalid_argument("FadingChannelModel: need fd >= 0 and positive dimensions");
    }
    temporal_factor_ = cholesky(jakes_correlation(fd_hz, to_s, no).cast<cd>());
}

ChannelRealization FadingChannelModel::generate(Rng& rng, int nc) const {
    ChannelRealization ch(nr_, nt_, no_, pdp_.length);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CVector z(no_);
    for (int j = 0; j < nr_; ++j) {
        for (int i = 0; i < nt_; ++i) {
            for (std::size_t t = 0; t < pdp_.tap_indices.size(); ++t) {
                for (int l = 0; l < no_; ++l) z(l) = cd(normal(rng), normal(rng));
                const CVector path = std::sqrt(pdp_.gamma[t]) * (temporal_factor_ * z);
                for (int l = 0; l < no_; ++l) {
                    ch.taps(j, i, l)(pdp_.tap_indices[t]) = path(l);
                }
            }
        }
    }
    ch.freq_response(nc);
    return ch;
}

}  // namespace pnc
