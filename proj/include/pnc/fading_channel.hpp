// SPDX-License-Identifier: Apache-2.0
//
// Time-correlated Rayleigh multipath for spatially independent MIMO links.

#pragma once

#include <vector>

#include "pnc/numerics.hpp"
#include "pnc/rng.hpp"

namespace pnc {

struct PowerDelayProfile {
    std::vector<double> delays_us;
    std::vector<double> powers_db;
    std::vector<int> tap_indices;  ///< round(delay / ts), strictly increasing from 0
    std::vector<double> gamma;     ///< linear tap powers, sum 1
    int length = 0;                ///< channel length L in samples (>= last index + 1)
};

/// Builds a profile from delays (us) and powers (dB) sampled at `ts_s`.
///
/// `min_length` extends L beyond last index + 1 when nonzero. Throws
/// std::invalid_argument if two taps round to the same sample.
PowerDelayProfile make_pdp(std::vector<double> delays_us, std::vector<double> powers_db,
                           double ts_s, int min_length = 0);

/// ITU Pedestrian B.
PowerDelayProfile pedb_profile(double ts_s);

/// Linear tap power at every lag 0..L-1 (zero between taps).
RVector pdp_lag_powers(const PowerDelayProfile& pdp);

/// Taps and frequency response for every (rx j, tx i, symbol l).
class ChannelRealization {
public:
    ChannelRealization() = default;
    ChannelRealization(int nr, int nt, int no, int length);

    int nr() const { return nr_; }
    int nt() const { return nt_; }
    int no() const { return no_; }
    int length() const { return length_; }

    CVector& taps(int j, int i, int l) { return taps_[index(j, i, l)]; }
    const CVector& taps(int j, int i, int l) const { return taps_[index(j, i, l)]; }

    /// Empty until freq_response() has been called.
    const CVector& freq(int j, int i, int l) const { return freq_[index(j, i, l)]; }
    bool has_freq() const { return !freq_.empty(); }

    /// Per-tone DFT of the zero-padded taps over `nc` tones. Requires L <= nc.
    void freq_response(int nc);

private:
    std::size_t index(int j, int i, int l) const {
        return (static_cast<std::size_t>(j) * nt_ + i) * no_ + l;
    }
    int nr_ = 0, nt_ = 0, no_ = 0, length_ = 0;
    std::vector<CVector> taps_;
    std::vector<CVector> freq_;
};

/// Draws channels whose taps follow gamma_i J0(2 pi fd |l - m| To) in time.
///
/// The temporal factor is computed once; each generate() call is then a
/// matrix-vector product per tap.
class FadingChannelModel {
public:
    FadingChannelModel(PowerDelayProfile pdp, double fd_hz, double to_s, int no, int nt, int nr);

    ChannelRealization generate(Rng& rng, int nc) const;

    const PowerDelayProfile& pdp() const { return pdp_; }
    const CMatrix& temporal_factor() const { return temporal_factor_; }

private:
    PowerDelayProfile pdp_;
    int no_, nt_, nr_;
    CMatrix temporal_factor_;
};

/// No x no Jakes correlation J0(2 pi fd |l - m| To).
RMatrix jakes_correlation(double fd_hz, double to_s, int no);

}  // namespace pnc
