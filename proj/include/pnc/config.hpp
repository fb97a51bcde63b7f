// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pnc/phase_noise.hpp"

namespace pnc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Where the estimator's lumped noise variance comes from.
enum class NoiseSource { Analytic, GuardBand };

/// Link-level parameters. Defaults reproduce the 3 MHz LTE, 2x2 PedB setup.
struct SimConfig {
    int nc = 256;
    int n_used = 180;
    int no = 14;
    int nt = 2;
    int nr = 2;
    double beta_hz = 25.0;
    double snr_db = 30.0;
    double fd_hz = (5.0 / 3.6) * 2.0e9 / 3.0e8;  // v fc / c at 5 km/h, 2 GHz
    double ts_s = 1.0 / (15000.0 * 256.0);
    double to_s = 1.0e-3 / 14.0;
    int m_anchors = 50;
    int channel_length = 15;
    int max_iter = 5;
    double ide_tolerance = 1e-3;
    std::uint64_t seed = 1;
    std::uint64_t pilot_seed = 0x5eedULL;
    PnFormula pn_formula = PnFormula::LargeNc;
    NoiseSource noise_source = NoiseSource::Analytic;
    bool freeze_channel = false;  ///< hold taps constant over the subframe
    std::vector<double> pdp_delays_us{0.0, 0.2, 0.8, 1.2, 2.3, 3.7};
    std::vector<double> pdp_powers_db{0.0, -0.9, -4.9, -8.0, -7.8, -23.9};

    PnParams pn_params() const { return {beta_hz, ts_s, nc, no}; }

    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

/// Canonical single-line JSON form.
std::string dump_config(const SimConfig& c);

/// Applies a flat JSON object on top of `base`. Missing keys keep their
/// values; unknown keys are rejected with ConfigError.
SimConfig parse_config(std::string_view text, SimConfig base = {});

/// Reads a flat JSON object on top of `base`.
SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});

/// 16 hex digits of FNV-1a over the canonical JSON form.
std::string config_hash(const SimConfig& c);

std::string_view to_string(NoiseSource s);

}  // namespace pnc
