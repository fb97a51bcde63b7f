// SPDX-License-Identifier: Apache-2.0
//
// Wiener oscillator phase noise: trajectories, per-symbol spectra, and the
// second-order statistics of the common phase error (CPE) used by the
// channel estimator.

#pragma once

#include <string_view>
#include <vector>

#include "pnc/numerics.hpp"
#include "pnc/rng.hpp"

namespace pnc {

struct PnParams {
    double beta_hz = 25.0;          ///< single-sided 3 dB Lorentzian bandwidth
    double ts_s = 1.0 / 3840000.0;  ///< sampling period
    int nc = 256;                   ///< samples (tones) per OFDM symbol
    int no = 14;                    ///< OFDM symbols per subframe

    void validate() const;
};

/// Large-Nc approximations for E|a[0]|^2 and the ICI variance.
///
/// `PrintedNt` carries N_t where the textbook result carries N_c;
/// `LargeNc` is the variant confirmed by Monte-Carlo and is the default.
enum class PnFormula { LargeNc, PrintedNt };

std::string_view to_string(PnFormula f);
PnFormula pn_formula_from_string(std::string_view s);

struct PnRealization {
    std::vector<double> phi;         ///< no*nc samples, symbol l occupies [l*nc, (l+1)*nc)
    std::vector<CVector> spectral;   ///< a_l[k], k = 0..nc-1, one vector per symbol
};

/// Variance 4 pi beta Ts of one Wiener increment.
double increment_variance(const PnParams& p);

/// Draws phi[0] ~ U[0, 2 pi) and a continuous random walk over the subframe.
PnRealization generate_phase_noise(const PnParams& p, Rng& rng);

/// Per-symbol spectrum a[k] = (1/nc) sum_n exp(j phi[n]) exp(-j 2 pi k n / nc).
CVector pn_spectrum(const double* phi, int nc);

/// Spectrum with all energy in the CPE bin: the PN-free case.
CVector identity_spectrum(int nc);

/// E{a_l[0] a_m*[0]} for l != m, exact for the Wiener model.
///
/// Throws std::invalid_argument for l == m (use cpe_self_power).
double cpe_cross_correlation(int l, int m, const PnParams& p);

/// Cos-ratio form of the same correlation. It drifts from the exact sum and
/// is kept only to report the discrepancy; the estimator does not use it.
double cpe_cross_correlation_printed(int l, int m, const PnParams& p);

/// Approximate E{|a_l[0]|^2}.
double cpe_self_power(const PnParams& p, PnFormula formula, int nt);

/// Lumped per-receive-element ICI variance for nt unit-power streams.
double ici_variance(const PnParams& p, int nt, PnFormula formula);

/// Empirical CPE power and ICI power over `n_symbols` OFDM symbols with a
/// unit-modulus flat channel and unit-energy i.i.d. symbols on every tone.
struct PnPowerMeasurement {
    double cpe_power = 0.0;      ///< mean |a[0]|^2
    double ici_power = 0.0;      ///< mean |ICI|^2 per receive element
    double ici_std_error = 0.0;
    double cpe_std_error = 0.0;
};

PnPowerMeasurement measure_pn_power(const PnParams& p, int nt, int n_symbols, Rng& rng);

}  // namespace pnc
