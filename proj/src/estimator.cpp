// SPDX-License-Identifier: Apache-2.0

#include "pnc/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "pnc/phase_noise.hpp"

namespace pnc {

CMatrix frequency_correlation(const PowerDelayProfile& pdp, const std::vector<int>& used_tones, int nc) {
    const RVector gamma = pdp_lag_powers(pdp);
    const auto n = static_cast<Eigen::Index>(used_tones.size());
    CMatrix f(n, pdp.length);
    for (Eigen::Index u = 0; u < n; ++u) {
        for (int lag = 0; lag < pdp.length; ++lag) {
            const long r = (static_cast<long>(used_tones[static_cast<std::size_t>(u)]) * lag) % nc;
            f(u, lag) = std::polar(1.0, -2.0 * kPi * static_cast<double>(r) / nc);
        }
    }
    return f * gamma.cast<cd>().asDiagonal() * f.adjoint();
}

RMatrix temporal_correlation(const SimConfig& cfg, bool use_cpe_stats) {
    RMatrix r = jakes_correlation(cfg.fd_hz, cfg.to_s, cfg.no);
    if (!use_cpe_stats) {
        return r;
    }
    const PnParams pn = cfg.pn_params();
    for (int l = 0; l < cfg.no; ++l) {
        for (int m = 0; m < cfg.no; ++m) {
            r(l, m) *= (l == m) ? cpe_self_power(pn, cfg.pn_formula, cfg.nt)
                                : cpe_cross_correlation(l, m, pn);
        }
    }
    return r;
}

CorrelationModel build_correlation_model(const SimConfig& cfg, const PowerDelayProfile& pdp,
                                         const GridLayout& layout, bool use_cpe_stats) {
    CorrelationModel m;
    m.r_f = frequency_correlation(pdp, layout.used_tones(), layout.nc());
    m.r_t = temporal_correlation(cfg, use_cpe_stats);
    m.use_cpe_stats = use_cpe_stats;
    m.mu = 1.0 / 1.8;
    m.sigma2 = snr_to_noise_var(cfg.snr_db, cfg.nt);
    if (use_cpe_stats) {
        m.sigma2 += ici_variance(cfg.pn_params(), cfg.nt, cfg.pn_formula);
    }
    return m;
}

EffectiveChannelEstimate::EffectiveChannelEstimate(int nr, int nt, int no, int n_used)
    : nr_(nr), nt_(nt), no_(no), n_used_(n_used),
      values_(static_cast<std::size_t>(nr) * nt * no * n_used, cd(0.0, 0.0)) {}

ToneChannels EffectiveChannelEstimate::tone_channels(int l, const GridLayout& layout) const {
    ToneChannels h = zero_channels(layout.nc(), nr_, nt_);
    const auto& tones = layout.used_tones();
    for (int u = 0; u < n_used_; ++u) {
        CMatrix& hk = h[static_cast<std::size_t>(tones[static_cast<std::size_t>(u)])];
        for (int j = 0; j < nr_; ++j) {
            for (int i = 0; i < nt_; ++i) hk(j, i) = at(j, i, l, u);
        }
    }
    return h;
}

CVector ls_pilot_estimates(const RxSubframe& rx, const GridLayout& layout, int port, int rx_ant) {
    const auto& pilots = layout.pilots(port);
    if (pilots.empty()) {
        throw std::invalid_argument("ls_pilot_estimates: port has no pilots");
    }
    CVector out(static_cast<Eigen::Index>(pilots.size()));
    for (std::size_t p = 0; p < pilots.size(); ++p) {
        const PilotPosition& pp = pilots[p];
        if (pp.value == cd(0.0, 0.0)) {
            throw std::invalid_argument("ls_pilot_estimates: zero pilot symbol");
        }
        const cd y = rx.y[static_cast<std::size_t>(pp.symbol)](static_cast<Eigen::Index>(pp.tone) * rx.nr + rx_ant);
        out(static_cast<Eigen::Index>(p)) = y / pp.value;
    }
    return out;
}

CMatrix mmse_weights(const CorrelationModel& model, const std::vector<PilotPosition>& pilots) {
    const Eigen::Index n_used = model.r_f.rows();
    const Eigen::Index no = model.r_t.rows();
    const auto np = static_cast<Eigen::Index>(pilots.size());

    // R_{h'h'} = R_T (x) R_F with the frequency index running fastest.
    CMatrix r_hp(no * n_used, np);
    for (Eigen::Index p = 0; p < np; ++p) {
        const PilotPosition& pp = pilots[static_cast<std::size_t>(p)];
        for (Eigen::Index l = 0; l < no; ++l) {
            const double t = model.r_t(l, pp.symbol);
            r_hp.block(l * n_used, p, n_used, 1) = t * model.r_f.col(pp.used_index);
        }
    }
    CMatrix r_pp(np, np);
    for (Eigen::Index p = 0; p < np; ++p) {
        const PilotPosition& pp = pilots[static_cast<std::size_t>(p)];
        r_pp.row(p) = r_hp.row(pp.symbol * n_used + pp.used_index);
    }

    if (model.sigma2 > 0.0) {
        CMatrix reg = r_pp;
        reg.diagonal().array() += model.mu * model.sigma2;
        const Eigen::LLT<CMatrix> llt(reg);
        if (llt.info() == Eigen::Success) return llt.solve(r_hp.adjoint()).adjoint();
        // loading below round-off: treat as noiseless
    }
    // Noiseless limit: minimum-norm solution on the pilot correlation's range.
    const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(r_pp);
    return cod.solve(r_hp.adjoint()).adjoint();
}

CVector mmse_estimate(const CMatrix& weights, const CVector& pilot_ls) {
    if (weights.cols() != pilot_ls.size()) {
        throw std::invalid_argument("mmse_estimate: pilot count mismatch");
    }
    return weights * pilot_ls;
}

double guard_band_noise(const RxSubframe& rx, const GridLayout& layout) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const CVector& y : rx.y) {
        for (int tone : layout.guard_tones()) {
            for (int j = 0; j < rx.nr; ++j) {
                sum += std::norm(y(static_cast<Eigen::Index>(tone) * rx.nr + j));
                ++count;
            }
        }
    }
    if (count == 0) {
        throw std::invalid_argument("guard_band_noise: layout has no guard tones");
    }
    return sum / static_cast<double>(count);
}

ChannelEstimator::ChannelEstimator(CorrelationModel model, std::shared_ptr<const GridLayout> layout)
    : model_(std::move(model)), layout_(std::move(layout)) {
    for (int port = 0; port < layout_->nt(); ++port) {
        weights_.push_back(mmse_weights(model_, layout_->pilots(port)));
    }
}

EffectiveChannelEstimate ChannelEstimator::estimate(const RxSubframe& rx) const {
    return apply(rx, weights_);
}

EffectiveChannelEstimate ChannelEstimator::estimate(const RxSubframe& rx, double sigma2) const {
    CorrelationModel m = model_;
    m.sigma2 = sigma2;
    std::vector<CMatrix> w;
    for (int port = 0; port < layout_->nt(); ++port) {
        w.push_back(mmse_weights(m, layout_->pilots(port)));
    }
    return apply(rx, w);
}

EffectiveChannelEstimate ChannelEstimator::apply(const RxSubframe& rx,
                                                 const std::vector<CMatrix>& weights) const {
    const GridLayout& g = *layout_;
    EffectiveChannelEstimate est(rx.nr, g.nt(), g.no(), g.n_used());
    for (int j = 0; j < rx.nr; ++j) {
        for (int i = 0; i < g.nt(); ++i) {
            const CVector h = mmse_estimate(weights[static_cast<std::size_t>(i)],
                                            ls_pilot_estimates(rx, g, i, j));
            for (int l = 0; l < g.no(); ++l) {
                for (int u = 0; u < g.n_used(); ++u) {
                    est.at(j, i, l, u) = h(static_cast<Eigen::Index>(l) * g.n_used() + u);
                }
            }
        }
    }
    return est;
}

}  // namespace pnc
