// SPDX-License-Identifier: Apache-2.0

#include "pnc/phase_noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace pnc {

namespace {

double two_pi_beta_ts(const PnParams& p) {
    return 2.0 * kPi * p.beta_hz * p.ts_s;
}

}  // namespace

void PnParams::validate() const {
    if (!(beta_hz >= 0.0) || !(ts_s > 0.0) || nc < 2 || no < 1) {
        throw std::invalid_argument("PnParams: need beta >= 0, ts > 0, nc >= 2, no >= 1");
    }
}

std::string_view to_string(PnFormula f) {
    return f == PnFormula::LargeNc ? "large_nc" : "printed_nt";
}

PnFormula pn_formula_from_string(std::string_view s) {
    if (s == "large_nc") return PnFormula::LargeNc;
    if (s == "printed_nt") return PnFormula::PrintedNt;
    throw std::invalid_argument("unknown pn formula '" + std::string(s) + "'");
}

double increment_variance(const PnParams& p) {
    return 4.0 * kPi * p.beta_hz * p.ts_s;
}

CVector pn_spectrum(const double* phi, int nc) {
    // plan caches are not shareable across threads
    thread_local Eigen::FFT<double> fft;
    std::vector<cd> carrier(static_cast<std::size_t>(nc));
    for (int n = 0; n < nc; ++n) carrier[static_cast<std::size_t>(n)] = std::polar(1.0, phi[n]);
    std::vector<cd> spec;
    fft.fwd(spec, carrier);
    CVector a(nc);
    for (int k = 0; k < nc; ++k) a(k) = spec[static_cast<std::size_t>(k)] / static_cast<double>(nc);
    return a;
}

CVector identity_spectrum(int nc) {
    CVector a = CVector::Zero(nc);
    a(0) = 1.0;
    return a;
}

PnRealization generate_phase_noise(const PnParams& p, Rng& rng) {
    p.validate();
    const std::size_t total = static_cast<std::size_t>(p.no) * static_cast<std::size_t>(p.nc);
    const double sigma = std::sqrt(increment_variance(p));

    std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
    std::normal_distribution<double> normal(0.0, 1.0);

    PnRealization out;
    out.phi.resize(total);
    out.phi[0] = uniform(rng);
    // Standard normals are drawn even at beta = 0 so the stream layout does not
    // depend on beta; sweeps over beta then share the underlying draws.
    for (std::size_t n = 1; n < total; ++n) {
        out.phi[n] = out.phi[n - 1] + sigma * normal(rng);
    }
    out.spectral.reserve(static_cast<std::size_t>(p.no));
    for (int l = 0; l < p.no; ++l) {
        out.spectral.push_back(pn_spectrum(out.phi.data() + static_cast<std::size_t>(l) * p.nc, p.nc));
    }
    return out;
}

double cpe_cross_correlation(int l, int m, const PnParams& p) {
    if (l == m) {
        throw std::invalid_argument("cpe_cross_correlation: l == m, use cpe_self_power");
    }
    const double x = two_pi_beta_ts(p);
    if (x == 0.0) {
        return 1.0;
    }
    const double nc = p.nc;
    // sum_p e^{xp} sum_q e^{-xq} = (cosh(x nc) - 1) / (cosh(x) - 1)
    //                            = (sinh(x nc / 2) / sinh(x / 2))^2
    const double ratio = std::sinh(0.5 * x * nc) / (nc * std::sinh(0.5 * x));
    return std::exp(-x * nc * std::abs(m - l)) * ratio * ratio;
}

double cpe_cross_correlation_printed(int l, int m, const PnParams& p) {
    if (l == m) {
        throw std::invalid_argument("cpe_cross_correlation_printed: l == m");
    }
    const double x = two_pi_beta_ts(p);
    if (x == 0.0) {
        return 1.0;
    }
    const double nc = p.nc;
    // (1 - cos(x nc)) / (1 - cos x) written as a ratio of squared sines.
    const double ratio = std::sin(0.5 * x * nc) / (nc * std::sin(0.5 * x));
    return std::exp(-x * nc * std::abs(m - l)) * ratio * ratio;
}

double cpe_self_power(const PnParams& p, PnFormula formula, int nt) {
    const double x = two_pi_beta_ts(p);
    const double n = formula == PnFormula::LargeNc ? p.nc : nt;
    return 1.0 - x * n / 3.0;
}

double ici_variance(const PnParams& p, int nt, PnFormula formula) {
    const double x = two_pi_beta_ts(p);
    if (formula == PnFormula::LargeNc) {
        return nt * x * p.nc / 3.0;
    }
    return x * nt / 3.0;
}

PnPowerMeasurement measure_pn_power(const PnParams& p, int nt, int n_symbols, Rng& rng) {
    p.validate();
    if (nt < 1 || n_symbols < 2) {
        throw std::invalid_argument("measure_pn_power: need nt >= 1 and n_symbols >= 2");
    }
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
    const int nc = p.nc;

    double cpe_sum = 0.0, cpe_sq = 0.0, ici_sum = 0.0, ici_sq = 0.0;
    int done = 0;
    std::vector<cd> z(static_cast<std::size_t>(nc));
    while (done < n_symbols) {
        const PnRealization pn = generate_phase_noise(p, rng);
        for (int l = 0; l < p.no && done < n_symbols; ++l, ++done) {
            const CVector& a = pn.spectral[static_cast<std::size_t>(l)];
            // One receive element: z[r] = sum_i H_i x_i[r] with |H_i| = |x_i[r]| = 1.
            std::vector<cd> h(static_cast<std::size_t>(nt));
            for (auto& hi : h) hi = std::polar(1.0, uniform(rng));
            for (int r = 0; r < nc; ++r) {
                cd acc = 0.0;
                for (int i = 0; i < nt; ++i) acc += h[static_cast<std::size_t>(i)] * std::polar(1.0, uniform(rng));
                z[static_cast<std::size_t>(r)] = acc;
            }
            double ici = 0.0;
            for (int k = 0; k < nc; ++k) {
                cd acc = 0.0;
                for (int r = 0; r < nc; ++r) {
                    if (r != k) acc += a((k - r + nc) % nc) * z[static_cast<std::size_t>(r)];
                }
                ici += std::norm(acc);
            }
            ici /= nc;
            const double cpe = std::norm(a(0));
            cpe_sum += cpe;
            cpe_sq += cpe * cpe;
            ici_sum += ici;
            ici_sq += ici * ici;
        }
    }
    const double n = n_symbols;
    PnPowerMeasurement m;
    m.cpe_power = cpe_sum / n;
    m.ici_power = ici_sum / n;
    m.cpe_std_error = std::sqrt(std::max(0.0, cpe_sq / n - m.cpe_power * m.cpe_power) / (n - 1.0));
    m.ici_std_error = std::sqrt(std::max(0.0, ici_sq / n - m.ici_power * m.ici_power) / (n - 1.0));
    return m;
}

}  // namespace pnc
