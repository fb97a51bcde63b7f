// SPDX-License-Identifier: Apache-2.0
//
// pnsim: Monte-Carlo BER sweeps for phase-noise compensation in MIMO-OFDM.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pnc/config.hpp"
#include "pnc/harness.hpp"
#include "pnc/phase_noise.hpp"
#include "pnc/rng.hpp"

namespace {

enum ExitCode { kOk = 0, kSelftestFailed = 1, kConfigError = 2, kIoError = 3 };

struct CommonFlags {
    std::string config_path;
    std::vector<double> beta;
    std::vector<double> snr;
    std::vector<int> iters;
    std::optional<int> subframes;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> algorithms;
    std::string out;
    std::string diagnostics;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_algorithms) {
    cmd->add_option("--config", f.config_path, "JSON file with SimConfig fields")->check(CLI::ExistingFile);
    cmd->add_option("--beta", f.beta, "PN 3 dB bandwidth(s) in Hz")->delimiter(',');
    cmd->add_option("--snr", f.snr, "SNR value(s) in dB")->delimiter(',');
    cmd->add_option("--subframes", f.subframes, "subframes per sweep point")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "master seed");
    if (with_algorithms) {
        cmd->add_option("--algorithms", f.algorithms, "no_comp,cpe_plain,cpe_a0,ide,no_pn")->delimiter(',');
    }
    cmd->add_option("--out", f.out, "output CSV path");
    cmd->add_option("--diagnostics", f.diagnostics, "per-symbol IDE diagnostics CSV path");
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

pnc::SimConfig load_base(const CommonFlags& f) {
    pnc::SimConfig cfg;
    if (!f.config_path.empty()) cfg = pnc::load_config(f.config_path);
    return cfg;
}

double single(const std::vector<double>& v, double fallback, const char* name) {
    if (v.empty()) return fallback;
    if (v.size() > 1) throw pnc::ConfigError(std::string("--") + name + " takes a single value for this sweep");
    return v.front();
}

int run_sweep(pnc::SweepKind kind, const CommonFlags& f) {
    pnc::ExperimentSpec spec;
    spec.sweep = kind;
    spec.config = load_base(f);
    spec.seed = f.seed.value_or(spec.config.seed);
    spec.n_subframes = f.subframes.value_or(100);
    spec.threads = f.threads;

    switch (kind) {
        case pnc::SweepKind::Snr:
            spec.values = f.snr.empty() ? std::vector<double>{10, 15, 20, 25, 30, 35} : f.snr;
            spec.config.beta_hz = single(f.beta, spec.config.beta_hz, "beta");
            break;
        case pnc::SweepKind::Beta:
            spec.values = f.beta.empty() ? std::vector<double>{25, 50, 100, 200, 400} : f.beta;
            spec.config.snr_db = single(f.snr, spec.config.snr_db, "snr");
            break;
        case pnc::SweepKind::Iterations:
            if (f.iters.empty()) {
                for (int i = 1; i <= spec.config.max_iter; ++i) spec.values.push_back(i);
            } else {
                for (int i : f.iters) spec.values.push_back(i);
            }
            spec.config.beta_hz = single(f.beta, spec.config.beta_hz, "beta");
            spec.config.snr_db = single(f.snr, spec.config.snr_db, "snr");
            break;
    }
    if (kind == pnc::SweepKind::Iterations) {
        spec.algorithms = {pnc::Algorithm::Ide};
    } else if (f.algorithms.empty()) {
        spec.algorithms = pnc::all_algorithms();
    } else {
        for (const auto& a : f.algorithms) spec.algorithms.push_back(pnc::algorithm_from_string(a));
    }
    spec.config.seed = spec.seed;
    spec.config.validate();

    std::vector<pnc::SymbolDiagnostics> diags;
    const auto records = pnc::run_experiment(spec, f.diagnostics.empty() ? nullptr : &diags);
    for (const auto& r : records) {
        std::printf("%-9s %8g  %-9s  ber=%.4e  (+/- %.1e)  bits=%llu  erasures=%llu\n", r.sweep_name.c_str(),
                    r.sweep_value, std::string(pnc::to_string(r.algorithm)).c_str(), r.ber, r.std_error(),
                    static_cast<unsigned long long>(r.bits), static_cast<unsigned long long>(r.erasures));
    }
    if (!f.out.empty()) {
        pnc::write_csv(records, f.out, spec.config);
        std::printf("wrote %s\n", f.out.c_str());
    }
    if (!f.diagnostics.empty()) {
        pnc::write_diagnostics_csv(diags, pnc::sweep_name(kind), f.diagnostics);
        std::printf("wrote %s (%zu symbols)\n", f.diagnostics.c_str(), diags.size());
    }
    return kOk;
}

// Brute-force double sum over the sample pairs of symbols l and m.
double cpe_double_sum(int l, int m, const pnc::PnParams& p) {
    const double x = 2.0 * pnc::kPi * p.beta_hz * p.ts_s;
    const long base = static_cast<long>(p.nc) * (m - l);
    double s = 0.0;
    for (int d = -(p.nc - 1); d <= p.nc - 1; ++d) {
        s += (p.nc - std::abs(d)) * std::exp(-x * static_cast<double>(std::labs(base + d)));
    }
    return s / (static_cast<double>(p.nc) * p.nc);
}

int run_selftest(const CommonFlags& f) {
    const pnc::SimConfig base = load_base(f);
    bool ok = true;

    std::printf("CPE cross-correlation, closed form vs double sum\n");
    for (double beta : {25.0, 100.0, 400.0}) {
        pnc::PnParams p = base.pn_params();
        p.beta_hz = beta;
        for (int d : {1, 3, 13}) {
            const double cf = pnc::cpe_cross_correlation(0, d, p);
            const double ds = cpe_double_sum(0, d, p);
            const double rel = std::abs(cf - ds) / ds;
            const bool pass = rel <= 1e-9;
            ok = ok && pass;
            std::printf("  %s beta=%5.0f |m-l|=%2d  closed=%.10f  sum=%.10f  rel=%.1e\n", pass ? "PASS" : "FAIL",
                        beta, d, cf, ds, rel);
        }
    }

    std::printf("CPE/ICI power formula variants (%d symbols per beta)\n", 1000);
    bool variant_ok[2] = {true, true};
    const pnc::PnFormula variants[2] = {pnc::PnFormula::LargeNc, pnc::PnFormula::PrintedNt};
    for (double beta : {25.0, 100.0}) {
        pnc::PnParams p = base.pn_params();
        p.beta_hz = beta;
        pnc::Rng rng = pnc::derive_rng(base.seed, 0, pnc::Stream::Aux);
        const auto meas = pnc::measure_pn_power(p, base.nt, 1000, rng);
        for (int v = 0; v < 2; ++v) {
            const double ici = pnc::ici_variance(p, base.nt, variants[v]);
            const double deficit = 1.0 - pnc::cpe_self_power(p, variants[v], base.nt);
            const double meas_deficit = 1.0 - meas.cpe_power;
            const bool ici_pass = std::abs(ici - meas.ici_power) <= 0.2 * meas.ici_power;
            const bool cpe_pass = std::abs(deficit - meas_deficit) <= 0.1 * meas_deficit;
            variant_ok[v] = variant_ok[v] && ici_pass && cpe_pass;
            std::printf("  %-10s beta=%5.0f  ici %.3e vs %.3e %s  deficit %.3e vs %.3e %s\n",
                        std::string(pnc::to_string(variants[v])).c_str(), beta, ici, meas.ici_power,
                        ici_pass ? "ok" : "miss", deficit, meas_deficit, cpe_pass ? "ok" : "miss");
        }
    }
    for (int v = 0; v < 2; ++v) {
        std::printf("  variant %-10s %s\n", std::string(pnc::to_string(variants[v])).c_str(),
                    variant_ok[v] ? "PASS" : "FAIL");
    }
    if (!variant_ok[0] && !variant_ok[1]) {
        std::printf("FAIL: no formula variant matches the measurements\n");
        ok = false;
    }
    const bool configured_ok = variant_ok[base.pn_formula == pnc::PnFormula::LargeNc ? 0 : 1];
    std::printf("  configured variant %s %s\n", std::string(pnc::to_string(base.pn_formula)).c_str(),
                configured_ok ? "matches" : "does NOT match");

    if (!f.out.empty()) {
        pnc::ExperimentSpec spec;
        spec.sweep = pnc::SweepKind::Snr;
        spec.config = base;
        spec.seed = f.seed.value_or(base.seed);
        spec.config.seed = spec.seed;
        spec.values = f.snr.empty() ? std::vector<double>{20, 30} : f.snr;
        spec.n_subframes = f.subframes.value_or(2);
        spec.algorithms = pnc::all_algorithms();
        spec.threads = f.threads;
        pnc::write_csv(pnc::run_experiment(spec), f.out, spec.config);
        std::printf("wrote fixture %s\n", f.out.c_str());
    }

    std::printf("selftest %s\n", ok ? "PASSED" : "FAILED");
    return ok ? kOk : kSelftestFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-noise compensation BER simulator"};
    app.require_subcommand(1);

    CommonFlags snr_flags, beta_flags, iter_flags, self_flags;
    auto* snr_cmd = app.add_subcommand("sweep-snr", "BER versus SNR");
    add_common(snr_cmd, snr_flags, true);
    auto* beta_cmd = app.add_subcommand("sweep-beta", "BER versus PN bandwidth");
    add_common(beta_cmd, beta_flags, true);
    auto* iter_cmd = app.add_subcommand("sweep-iters", "IDE BER versus iteration count");
    add_common(iter_cmd, iter_flags, false);
    iter_cmd->add_option("--iters", iter_flags.iters, "iteration counts")->delimiter(',');
    auto* self_cmd = app.add_subcommand("selftest", "check PN statistics; optionally write a fixture CSV");
    add_common(self_cmd, self_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*snr_cmd) return run_sweep(pnc::SweepKind::Snr, snr_flags);
        if (*beta_cmd) return run_sweep(pnc::SweepKind::Beta, beta_flags);
        if (*iter_cmd) return run_sweep(pnc::SweepKind::Iterations, iter_flags);
        if (*self_cmd) return run_selftest(self_flags);
    } catch (const pnc::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
    return kOk;
}
