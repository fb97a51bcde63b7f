// SPDX-License-Identifier: Apache-2.0
//
// Pilot-aided 2D (time x frequency) MMSE estimation of the effective
// channel a_l[0] H_l, optionally using the CPE second-order statistics.

#pragma once

#include <memory>
#include <vector>

#include "pnc/config.hpp"
#include "pnc/fading_channel.hpp"
#include "pnc/lte_grid.hpp"
#include "pnc/signal_model.hpp"
#include "pnc/transceiver.hpp"

namespace pnc {

struct CorrelationModel {
    CMatrix r_f;           ///< n_used x n_used frequency correlation F Gamma F^H
    RMatrix r_t;           ///< no x no temporal correlation (Doppler times CPE)
    bool use_cpe_stats = false;
    double mu = 1.0 / 1.8;  ///< E{1/|x_p|^2} for corner pilots
    double sigma2 = 0.0;    ///< lumped noise variance
};

/// Frequency correlation over the used tones for a PDP.
CMatrix frequency_correlation(const PowerDelayProfile& pdp, const std::vector<int>& used_tones, int nc);

/// Temporal correlation J0(2 pi fd |l-m| To) E{a_l[0] a_m*[0]} (or the J0
/// term alone when use_cpe_stats is false).
RMatrix temporal_correlation(const SimConfig& cfg, bool use_cpe_stats);

CorrelationModel build_correlation_model(const SimConfig& cfg, const PowerDelayProfile& pdp,
                                         const GridLayout& layout, bool use_cpe_stats);

/// Effective channel on the used tones of every symbol.
class EffectiveChannelEstimate {
public:
    EffectiveChannelEstimate() = default;
    EffectiveChannelEstimate(int nr, int nt, int no, int n_used);

    int nr() const { return nr_; }
    int nt() const { return nt_; }
    int no() const { return no_; }
    int n_used() const { return n_used_; }

    cd& at(int j, int i, int l, int u) { return values_[index(j, i, l, u)]; }
    cd at(int j, int i, int l, int u) const { return values_[index(j, i, l, u)]; }

    /// Per-tone matrices for symbol l over all nc tones; guard and DC tones are zero.
    ToneChannels tone_channels(int l, const GridLayout& layout) const;

private:
    std::size_t index(int j, int i, int l, int u) const {
        return ((static_cast<std::size_t>(j) * nt_ + i) * no_ + l) * n_used_ + u;
    }
    int nr_ = 0, nt_ = 0, no_ = 0, n_used_ = 0;
    std::vector<cd> values_;
};

/// y / x on the pilots of `port` at receive antenna `rx_ant`, in the
/// frequency-first unrolled order of GridLayout::pilots().
CVector ls_pilot_estimates(const RxSubframe& rx, const GridLayout& layout, int port, int rx_ant);

/// MMSE interpolation matrix R_{h,p} (R_{p,p} + mu sigma2 I)^{-1} for the
/// given pilots; rows follow the unrolled index l * n_used + u. With
/// sigma2 = 0, or loading too small to factor, the inverse is the
/// minimum-norm pseudo-inverse.
CMatrix mmse_weights(const CorrelationModel& model, const std::vector<PilotPosition>& pilots);

/// Applies precomputed weights to one antenna pair's pilot LS estimates.
CVector mmse_estimate(const CMatrix& weights, const CVector& pilot_ls);

/// Mean received power on the guard tones: noise plus ICI leakage.
double guard_band_noise(const RxSubframe& rx, const GridLayout& layout);

/// Holds the per-port MMSE matrices for one (config, PDP, beta, SNR) point.
class ChannelEstimator {
public:
    ChannelEstimator(CorrelationModel model, std::shared_ptr<const GridLayout> layout);

    /// Uses the model's sigma2.
    EffectiveChannelEstimate estimate(const RxSubframe& rx) const;

    /// Rebuilds the weights for a different lumped noise variance.
    EffectiveChannelEstimate estimate(const RxSubframe& rx, double sigma2) const;

    const CorrelationModel& model() const { return model_; }
    const CMatrix& weights(int port) const { return weights_[static_cast<std::size_t>(port)]; }

private:
    EffectiveChannelEstimate apply(const RxSubframe& rx, const std::vector<CMatrix>& weights) const;

    CorrelationModel model_;
    std::shared_ptr<const GridLayout> layout_;
    std::vector<CMatrix> weights_;
};

}  // namespace pnc
