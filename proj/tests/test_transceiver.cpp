// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pnc/transceiver.hpp"

using namespace pnc;

namespace {

struct Setup {
    SimConfig cfg;
    std::shared_ptr<const GridLayout> layout;
    ResourceGrid grid;
    ChannelRealization ch;
    PnRealization pn;
};

Setup make_setup(std::uint64_t seed, double beta = 400.0) {
    SimConfig cfg;
    cfg.beta_hz = beta;
    auto layout = std::make_shared<const GridLayout>(cfg.nc, cfg.n_used, cfg.no, cfg.nt, cfg.pilot_seed);
    Rng bits_rng = derive_rng(seed, 0, Stream::Payload);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(layout->total_data_count()) * 4);
    for (auto& b : bits) b = static_cast<std::uint8_t>(bits_rng() & 1u);
    ResourceGrid grid = build_subframe(layout, bits);
    const FadingChannelModel model(pedb_profile(cfg.ts_s), cfg.fd_hz, cfg.to_s, cfg.no, cfg.nt, cfg.nr);
    Rng ch_rng = derive_rng(seed, 0, Stream::Channel);
    ChannelRealization ch = model.generate(ch_rng, cfg.nc);
    Rng pn_rng = derive_rng(seed, 0, Stream::PhaseNoise);
    PnRealization pn = generate_phase_noise(cfg.pn_params(), pn_rng);
    return {cfg, layout, std::move(grid), std::move(ch), std::move(pn)};
}

}  // namespace

TEST_CASE("SNR convention") {
    CHECK(snr_to_noise_var(30.0, 2) == doctest::Approx(2e-3).epsilon(1e-12));
    CHECK(snr_to_noise_var(0.0, 1) == doctest::Approx(1.0));
    CHECK(std::string(kSnrDefinition).find("nt / 10^(snr_db/10)") != std::string::npos);
}

TEST_CASE("signal model kernels") {
    const int nc = 8, n = 2;
    CVector a = CVector::Zero(nc);
    for (int k = 0; k < nc; ++k) a(k) = cd(0.1 * k, -0.05 * k * k);
    CVector z(nc * n);
    for (int e = 0; e < nc * n; ++e) z(e) = cd(std::cos(e), std::sin(3.0 * e));
    const CVector y = pn_apply(a, z, n);
    for (int j = 0; j < n; ++j) {
        CVector zj(nc);
        for (int k = 0; k < nc; ++k) zj(k) = z(k * n + j);
        const CVector ref = oracle::circular_convolve(a, zj);
        for (int k = 0; k < nc; ++k) CHECK(std::abs(y(k * n + j) - ref(k)) < 1e-13);
    }
    // circulant-Kronecker form
    CHECK((kron(circulant(a), CMatrix::Identity(n, n)) * z - y).norm() < 1e-12);
    CHECK((ici_term(a, z, n) - (y - a(0) * z)).norm() < 1e-14);
    CHECK((pn_apply(identity_spectrum(nc), z, n) - z).norm() == 0.0);
    CHECK_THROWS(pn_apply(a, z, 3));

    ToneChannels h = zero_channels(nc, 2, 3);
    h[3](1, 2) = cd(2.0, 1.0);
    CVector x = CVector::Zero(nc * 3);
    x(3 * 3 + 2) = cd(0.0, 1.0);
    const CVector hx = mimo_apply(h, x);
    CHECK(hx(3 * 2 + 1) == cd(-1.0, 2.0));
    CHECK(hx.norm() == doctest::Approx(std::sqrt(5.0)));
    CHECK_THROWS(mimo_apply(h, CVector::Zero(5)));
}

TEST_CASE("frequency-domain synthesis equals the time-domain OFDM chain") {
    Setup s = make_setup(21);
    Rng noise = derive_rng(21, 0, Stream::Noise);
    const RxSubframe rx = receive(s.grid, s.ch, &s.pn, 0.0, noise);
    const int nc = s.cfg.nc;
    const CMatrix f = dft_matrix(nc);
    for (int l : {0, 5, 13}) {
        // time domain: IDFT per port, circular convolution with the taps
        // (cyclic prefix longer than the channel), PN rotation, DFT
        for (int j = 0; j < s.cfg.nr; ++j) {
            CVector r = CVector::Zero(nc);
            for (int i = 0; i < s.cfg.nt; ++i) {
                CVector xi(nc);
                for (int k = 0; k < nc; ++k) xi(k) = s.grid.value(i, l, k);
                const CVector si = f.adjoint() * xi / static_cast<double>(nc);
                CVector taps = CVector::Zero(nc);
                taps.head(s.ch.length()) = s.ch.taps(j, i, l);
                r += oracle::circular_convolve(taps, si);
            }
            for (int t = 0; t < nc; ++t) r(t) *= std::polar(1.0, s.pn.phi[static_cast<std::size_t>(l) * nc + t]);
            const CVector yj = oracle::dft(r);
            for (int k = 0; k < nc; ++k) {
                CHECK(std::abs(rx.y[static_cast<std::size_t>(l)](k * s.cfg.nr + j) - yj(k)) < 1e-10);
            }
        }
    }
}

TEST_CASE("without phase noise each tone sees only its own channel") {
    Setup s = make_setup(22);
    Rng noise = derive_rng(22, 0, Stream::Noise);
    const RxSubframe rx = receive(s.grid, s.ch, nullptr, 0.0, noise);
    const ToneChannels h = tone_channels(s.ch, 6);
    const CVector x = s.grid.symbol_vector(6);
    for (int k : {1, 50, 200}) {
        const CVector expect = h[static_cast<std::size_t>(k)] * x.segment(2 * k, 2);
        CHECK((rx.y[6].segment(2 * k, 2) - expect).norm() < 1e-12);
    }
}

TEST_CASE("noise variance and stream layout") {
    Setup s = make_setup(23);
    Rng n1 = derive_rng(23, 0, Stream::Noise);
    Rng n2 = derive_rng(23, 0, Stream::Noise);
    const double var = snr_to_noise_var(20.0, 2);
    const RxSubframe clean = receive(s.grid, s.ch, &s.pn, 0.0, n1);
    const RxSubframe noisy = receive(s.grid, s.ch, &s.pn, s.cfg, n2);
    CHECK(noisy.noise_var == doctest::Approx(snr_to_noise_var(30.0, 2)));
    double e = 0.0;
    long n = 0;
    for (std::size_t l = 0; l < clean.y.size(); ++l) {
        e += (noisy.y[l] - clean.y[l]).squaredNorm();
        n += clean.y[l].size();
    }
    const double measured = e / n;
    CHECK(std::abs(measured - noisy.noise_var) < 4.0 * noisy.noise_var / std::sqrt(static_cast<double>(n)));

    // the same noise draws scale with sigma
    Rng n3 = derive_rng(23, 0, Stream::Noise);
    Rng n4 = derive_rng(23, 0, Stream::Noise);
    const RxSubframe a = receive(s.grid, s.ch, &s.pn, var, n3);
    const RxSubframe b = receive(s.grid, s.ch, &s.pn, 4.0 * var, n4);
    CHECK(((b.y[3] - clean.y[3]) - 2.0 * (a.y[3] - clean.y[3])).norm() < 1e-12);
}

TEST_CASE("receive checks dimensions") {
    Setup s = make_setup(24);
    Rng rng = derive_rng(24, 0, Stream::Noise);
    CHECK_THROWS(receive(s.grid, s.ch, &s.pn, -1.0, rng));
    PnRealization short_pn = s.pn;
    short_pn.spectral.pop_back();
    CHECK_THROWS(receive(s.grid, s.ch, &short_pn, 0.0, rng));
    ChannelRealization no_freq(2, 2, 14, 15);
    CHECK_THROWS(receive(s.grid, no_freq, nullptr, 0.0, rng));
}
