// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pnc/estimator.hpp"
#include "pnc/harness.hpp"

using namespace pnc;

namespace {

// Mean |h_est - a_l[0] H_l|^2 over all antenna pairs, symbols and used tones.
double effective_mse(const EffectiveChannelEstimate& est, const LinkSimulator::Realization& r,
                     const GridLayout& g) {
    double e = 0.0;
    long n = 0;
    for (int l = 0; l < g.no(); ++l) {
        const cd a0 = r.pn.spectral.empty() ? cd(1.0, 0.0) : r.pn.spectral[static_cast<std::size_t>(l)](0);
        for (int j = 0; j < est.nr(); ++j) {
            for (int i = 0; i < est.nt(); ++i) {
                const CVector& f = r.channel.freq(j, i, l);
                for (int u = 0; u < g.n_used(); ++u) {
                    e += std::norm(est.at(j, i, l, u) - a0 * f(g.used_tones()[static_cast<std::size_t>(u)]));
                    ++n;
                }
            }
        }
    }
    return e / static_cast<double>(n);
}

SimConfig small_config() {
    SimConfig c;
    c.nc = 32;
    c.n_used = 12;
    c.ts_s = 1.0 / (15000.0 * 32);
    c.pdp_delays_us = {0.0, 2.0};
    c.pdp_powers_db = {0.0, -3.0};
    c.channel_length = 2;
    c.m_anchors = 8;
    return c;
}

}  // namespace

TEST_CASE("frequency correlation is F Gamma F^H over the used tones") {
    const PowerDelayProfile pdp = pedb_profile(1.0 / 3.84e6);
    const std::vector<int> tones{1, 2, 200, 255};
    const CMatrix r = frequency_correlation(pdp, tones, 256);
    const RVector gamma = pdp_lag_powers(pdp);
    for (std::size_t a = 0; a < tones.size(); ++a) {
        for (std::size_t b = 0; b < tones.size(); ++b) {
            cd ref = 0.0;
            for (int n = 0; n < pdp.length; ++n) {
                ref += gamma(n) * std::polar(1.0, -2.0 * kPi * (tones[a] - tones[b]) * n / 256.0);
            }
            CHECK(std::abs(r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) - ref) < 1e-12);
        }
        CHECK(r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)).real() == doctest::Approx(1.0));
    }
}

TEST_CASE("temporal correlation carries the CPE statistics") {
    SimConfig cfg;
    cfg.beta_hz = 100.0;
    const RMatrix blind = temporal_correlation(cfg, false);
    const RMatrix aware = temporal_correlation(cfg, true);
    const PnParams p = cfg.pn_params();
    CHECK(aware(0, 3) == doctest::Approx(blind(0, 3) * cpe_cross_correlation(0, 3, p)).epsilon(1e-14));
    CHECK(aware(5, 5) == doctest::Approx(cpe_self_power(p, cfg.pn_formula, cfg.nt)).epsilon(1e-14));
    CHECK(aware(2, 9) == aware(9, 2));

    const auto layout = std::make_shared<const GridLayout>(cfg.nc, cfg.n_used, cfg.no, cfg.nt, cfg.pilot_seed);
    const PowerDelayProfile pdp = pedb_profile(cfg.ts_s);
    const CorrelationModel mb = build_correlation_model(cfg, pdp, *layout, false);
    const CorrelationModel ma = build_correlation_model(cfg, pdp, *layout, true);
    CHECK(mb.sigma2 == doctest::Approx(snr_to_noise_var(30.0, 2)));
    CHECK(ma.sigma2 == doctest::Approx(mb.sigma2 + ici_variance(p, 2, cfg.pn_formula)));
    CHECK(ma.mu == doctest::Approx(1.0 / 1.8));
}

TEST_CASE("weights match the explicit Kronecker construction") {
    SimConfig cfg = small_config();
    cfg.beta_hz = 400.0;
    const auto layout = std::make_shared<const GridLayout>(cfg.nc, cfg.n_used, cfg.no, cfg.nt, cfg.pilot_seed);
    const PowerDelayProfile pdp = make_pdp(cfg.pdp_delays_us, cfg.pdp_powers_db, cfg.ts_s);
    const CorrelationModel m = build_correlation_model(cfg, pdp, *layout, true);

    const CMatrix full = oracle::kron(m.r_t.cast<cd>(), m.r_f);
    for (int port = 0; port < 2; ++port) {
        const auto& pilots = layout->pilots(port);
        const auto np = static_cast<Eigen::Index>(pilots.size());
        CMatrix r_hp(full.rows(), np), r_pp(np, np);
        for (Eigen::Index p = 0; p < np; ++p) {
            const auto& pp = pilots[static_cast<std::size_t>(p)];
            r_hp.col(p) = full.col(pp.symbol * cfg.n_used + pp.used_index);
        }
        for (Eigen::Index p = 0; p < np; ++p) {
            const auto& pp = pilots[static_cast<std::size_t>(p)];
            r_pp.row(p) = r_hp.row(pp.symbol * cfg.n_used + pp.used_index);
        }
        r_pp += m.mu * m.sigma2 * CMatrix::Identity(np, np);
        const CMatrix ref = r_hp * r_pp.inverse();
        CHECK((mmse_weights(m, pilots) - ref).norm() < 1e-9 * ref.norm());
    }
}

TEST_CASE("noiseless flat static channel is recovered exactly") {
    SimConfig cfg = small_config();
    cfg.pdp_delays_us = {0.0};
    cfg.pdp_powers_db = {0.0};
    cfg.channel_length = 1;
    cfg.beta_hz = 0.0;
    cfg.freeze_channel = true;
    const auto layout = std::make_shared<const GridLayout>(cfg.nc, cfg.n_used, cfg.no, cfg.nt, cfg.pilot_seed);
    const PowerDelayProfile pdp = make_pdp(cfg.pdp_delays_us, cfg.pdp_powers_db, cfg.ts_s);
    CorrelationModel m = build_correlation_model(cfg, pdp, *layout, false);
    m.r_t = jakes_correlation(0.0, cfg.to_s, cfg.no);
    m.sigma2 = 0.0;
    const ChannelEstimator est(m, layout);

    const FadingChannelModel model(pdp, 0.0, cfg.to_s, cfg.no, cfg.nt, cfg.nr);
    Rng rng = derive_rng(5, 0, Stream::Channel);
    const ChannelRealization ch = model.generate(rng, cfg.nc);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(layout->total_data_count()) * 4, 1);
    const ResourceGrid grid = build_subframe(layout, bits);
    Rng noise = derive_rng(5, 0, Stream::Noise);
    const RxSubframe rx = receive(grid, ch, nullptr, 0.0, noise);

    const EffectiveChannelEstimate h = est.estimate(rx);
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            for (int l = 0; l < cfg.no; ++l) {
                for (int u = 0; u < cfg.n_used; ++u) {
                    CHECK(std::abs(h.at(j, i, l, u) - ch.taps(j, i, 0)(0)) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("estimate is linear in the pilot observations") {
    SimConfig cfg = small_config();
    const auto layout = std::make_shared<const GridLayout>(cfg.nc, cfg.n_used, cfg.no, cfg.nt, cfg.pilot_seed);
    const PowerDelayProfile pdp = make_pdp(cfg.pdp_delays_us, cfg.pdp_powers_db, cfg.ts_s);
    const CMatrix w = mmse_weights(build_correlation_model(cfg, pdp, *layout, true), layout->pilots(0));
    CVector p1(w.cols()), p2(w.cols());
    for (Eigen::Index t = 0; t < w.cols(); ++t) {
        p1(t) = cd(std::sin(t), 0.5);
        p2(t) = cd(0.1 * t, std::cos(2.0 * t));
    }
    const cd s(0.3, -1.2);
    CHECK((mmse_estimate(w, s * p1 + p2) - (s * mmse_estimate(w, p1) + mmse_estimate(w, p2))).norm() < 1e-12);
    CHECK_THROWS(mmse_estimate(w, CVector::Zero(3)));
}

TEST_CASE("zero PN bandwidth makes the aware estimator identical to the blind one") {
    SimConfig cfg = small_config();
    cfg.beta_hz = 0.0;
    const auto layout = std::make_shared<const GridLayout>(cfg.nc, cfg.n_used, cfg.no, cfg.nt, cfg.pilot_seed);
    const PowerDelayProfile pdp = make_pdp(cfg.pdp_delays_us, cfg.pdp_powers_db, cfg.ts_s);
    const CorrelationModel a = build_correlation_model(cfg, pdp, *layout, true);
    const CorrelationModel b = build_correlation_model(cfg, pdp, *layout, false);
    CHECK((a.r_t - b.r_t).norm() == 0.0);
    CHECK(a.sigma2 == b.sigma2);
    CHECK((mmse_weights(a, layout->pilots(1)) - mmse_weights(b, layout->pilots(1))).norm() == 0.0);
}

TEST_CASE("LS pilot estimates divide by the pilot symbol") {
    SimConfig cfg = small_config();
    const auto layout = std::make_shared<const GridLayout>(cfg.nc, cfg.n_used, cfg.no, cfg.nt, cfg.pilot_seed);
    RxSubframe rx;
    rx.nc = cfg.nc;
    rx.nr = 2;
    for (int l = 0; l < cfg.no; ++l) {
        CVector y(cfg.nc * 2);
        for (int e = 0; e < y.size(); ++e) y(e) = cd(l + 1.0, e);
        rx.y.push_back(y);
    }
    const CVector ls = ls_pilot_estimates(rx, *layout, 1, 1);
    const auto& pp = layout->pilots(1)[3];
    CHECK(ls(3) == rx.y[static_cast<std::size_t>(pp.symbol)](pp.tone * 2 + 1) / pp.value);
}

TEST_CASE("guard band power measures the noise floor") {
    SimConfig cfg;
    LinkSimulator sim(cfg);
    const auto r = sim.realize(3, 0, false);
    const double g = guard_band_noise(r.rx, sim.layout());
    const long n = 14L * 75 * 2;
    CHECK(std::abs(g - r.rx.noise_var) < 4.0 * r.rx.noise_var / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("MMSE beats nearest-pilot interpolation") {
    SimConfig cfg;
    cfg.beta_hz = 0.0;
    LinkSimulator sim(cfg);
    const GridLayout& g = sim.layout();
    double mmse = 0.0, nn = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        const auto r = sim.realize(7, static_cast<std::uint64_t>(trial));
        mmse += effective_mse(sim.estimate(r.rx, false), r, g);

        EffectiveChannelEstimate near(2, 2, g.no(), g.n_used());
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) {
                const CVector ls = ls_pilot_estimates(r.rx, g, i, j);
                const auto& pilots = g.pilots(i);
                for (int l = 0; l < g.no(); ++l) {
                    for (int u = 0; u < g.n_used(); ++u) {
                        std::size_t best = 0;
                        int best_d = 1 << 30;
                        for (std::size_t p = 0; p < pilots.size(); ++p) {
                            const int d = 16 * std::abs(pilots[p].symbol - l) + std::abs(pilots[p].used_index - u);
                            if (d < best_d) {
                                best_d = d;
                                best = p;
                            }
                        }
                        near.at(j, i, l, u) = ls(static_cast<Eigen::Index>(best));
                    }
                }
            }
        }
        nn += effective_mse(near, r, g);
    }
    CHECK(mmse < 0.5 * nn);
}

TEST_CASE("CPE-aware estimate has lower MSE than the blind one under strong PN") {
    SimConfig cfg;
    cfg.beta_hz = 100.0;
    LinkSimulator sim(cfg);
    const GridLayout& g = sim.layout();
    double aware = 0.0, blind = 0.0;
    const int n = 30;
    for (int trial = 0; trial < n; ++trial) {
        const auto r = sim.realize(11, static_cast<std::uint64_t>(trial));
        aware += effective_mse(sim.estimate(r.rx, true), r, g);
        blind += effective_mse(sim.estimate(r.rx, false), r, g);
    }
    MESSAGE("aware " << aware / n << " blind " << blind / n);
    CHECK(aware < blind);
}

TEST_CASE("estimator with an explicit noise variance") {
    SimConfig cfg;
    LinkSimulator sim(cfg);
    const auto r = sim.realize(2, 0);
    const ChannelEstimator& est = sim.estimator(true);
    const EffectiveChannelEstimate a = est.estimate(r.rx);
    const EffectiveChannelEstimate b = est.estimate(r.rx, est.model().sigma2);
    CHECK(std::abs(a.at(1, 0, 6, 33) - b.at(1, 0, 6, 33)) < 1e-12);
    const ToneChannels h = a.tone_channels(6, sim.layout());
    CHECK(h[0].norm() == 0.0);
    CHECK(h[128].norm() == 0.0);
    CHECK(h[1](1, 0) == a.at(1, 0, 6, sim.layout().used_index(1)));
}
