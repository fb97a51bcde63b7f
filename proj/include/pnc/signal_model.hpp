// SPDX-License-Identifier: Apache-2.0
//
// Frequency-domain MIMO-OFDM signal model y = (cir(a) (x) I_nr) H x + w.
// Vectors over one OFDM symbol are stacked tone-major: entry k * n + j.

#pragma once

#include <vector>

#include "pnc/numerics.hpp"

namespace pnc {

/// Block-diagonal channel: one nr x nt matrix per tone.
using ToneChannels = std::vector<CMatrix>;

ToneChannels zero_channels(int nc, int nr, int nt);

/// H x for block-diagonal H; x has nc * nt entries, result nc * nr.
CVector mimo_apply(const ToneChannels& h, const CVector& x);

/// (cir(a) (x) I_n) z, i.e. y[k] = sum_r a[k - r] z[r] per stream.
CVector pn_apply(const CVector& a, const CVector& z, int n);

/// (cir(a) (x) I_n) z - a[0] z: the inter-carrier interference term.
CVector ici_term(const CVector& a, const CVector& z, int n);

}  // namespace pnc
