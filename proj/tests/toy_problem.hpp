// SPDX-License-Identifier: Apache-2.0
//
// Small single-antenna IDE problems with a known answer: nc = 8, L = 2,
// M = 4, tone 0 a known pilot, phase noise generated inside the span of the
// piecewise-linear interpolator. The anchors follow a Wiener walk; the
// default step is the phase diffusion of the full-size link (beta = 25 Hz,
// 3.84 MHz) over one anchor spacing of 64 samples.

#pragma once

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pnc/ide.hpp"
#include "pnc/lte_grid.hpp"
#include "pnc/rng.hpp"

struct ToyProblem {
    pnc::SymbolProblem prob;
    pnc::CVector x;                    // transmitted, pilot included
    std::vector<std::uint8_t> labels;  // 0 on the pilot
    pnc::CVector a_prime;
    pnc::CVector taps_eff;             // a[0] h
    pnc::ToneChannels h_eff;
};

inline const double kToyAnchorStep = std::sqrt(4.0 * pnc::kPi * 25.0 / 3.84e6 * 64.0);

inline ToyProblem make_toy_problem(std::uint64_t seed, double anchor_step = kToyAnchorStep, double noise_sd = 0.0) {
    using namespace pnc;
    constexpr int nc = 8, m = 4, len = 2;
    Rng rng = derive_rng(seed, 0, Stream::Aux);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> label(0, 15);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    ToyProblem t;
    t.prob.nc = nc;
    t.prob.nt = 1;
    t.prob.nr = 1;
    t.prob.known = CVector::Zero(nc);
    t.prob.known(0) = cd(3.0, 3.0) / std::sqrt(10.0);
    t.prob.is_data.assign(nc, 1);
    t.prob.is_data[0] = 0;
    t.x = t.prob.known;
    t.labels.assign(nc, 0);
    for (int k = 1; k < nc; ++k) {
        t.labels[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(label(rng));
        t.x(k) = qam16_map(t.labels[static_cast<std::size_t>(k)]);
    }

    // Anchor samples exp(j theta_m); the interpolated waveform is P c.
    const double theta0 = 2.0 * kPi * (0.5 + 0.5 * unit(rng));
    CVector c(m);
    double theta = theta0;
    for (int a = 0; a < m; ++a) {
        c(a) = std::polar(1.0, theta);
        theta += anchor_step * normal(rng);
    }
    CVector wave = CVector::Zero(nc);
    for (int a = 0; a < m; ++a) {
        const int lo = a * nc / m, hi = (a + 1) * nc / m;
        for (int n = lo; n < hi; ++n) {
            const double alpha = static_cast<double>(n - lo) / (hi - lo);
            wave(n) = (1.0 - alpha) * c(a) + alpha * c((a + 1) % m);
        }
    }
    const CVector a_full = oracle::dft(wave) / static_cast<double>(nc);
    t.a_prime = a_full / a_full(0);

    CVector taps(len);
    for (int n = 0; n < len; ++n) taps(n) = cd(normal(rng), normal(rng)) * std::sqrt(0.5 / (n + 1));
    t.taps_eff = a_full(0) * taps;
    CVector padded = CVector::Zero(nc);
    padded.head(len) = t.taps_eff;
    const CVector hf = oracle::dft(padded);
    t.h_eff = zero_channels(nc, 1, 1);
    for (int k = 0; k < nc; ++k) t.h_eff[static_cast<std::size_t>(k)](0, 0) = hf(k);

    t.prob.y = oracle::circular_convolve(t.a_prime, hf.cwiseProduct(t.x));
    for (int k = 0; k < nc; ++k) t.prob.y(k) += noise_sd * cd(normal(rng), normal(rng));
    return t;
}
