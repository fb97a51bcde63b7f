// SPDX-License-Identifier: Apache-2.0

#include "pnc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pnc/phase_noise.hpp"
#include "pnc/rng.hpp"
#include "pnc/transceiver.hpp"

namespace pnc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

SimConfig effective_config(SimConfig cfg) {
    if (cfg.freeze_channel) cfg.fd_hz = 0.0;
    return cfg;
}

PowerDelayProfile config_pdp(const SimConfig& cfg) {
    return make_pdp(cfg.pdp_delays_us, cfg.pdp_powers_db, cfg.ts_s, cfg.channel_length);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::NoComp: return "no_comp";
        case Algorithm::CpePlain: return "cpe_plain";
        case Algorithm::CpeA0: return "cpe_a0";
        case Algorithm::Ide: return "ide";
        case Algorithm::NoPn: return "no_pn";
    }
    return "?";
}

Algorithm algorithm_from_string(std::string_view s) {
    for (Algorithm a : all_algorithms()) {
        if (to_string(a) == s) return a;
    }
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> all{Algorithm::NoComp, Algorithm::CpePlain, Algorithm::CpeA0,
                                            Algorithm::Ide, Algorithm::NoPn};
    return all;
}

std::string_view sweep_name(SweepKind k) {
    switch (k) {
        case SweepKind::Snr: return "snr_db";
        case SweepKind::Beta: return "beta_hz";
        case SweepKind::Iterations: return "iteration";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (n_subframes < 1) throw std::invalid_argument("experiment: n_subframes must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("experiment: no algorithm selected");
    if (values.empty()) throw std::invalid_argument("experiment: empty sweep");
    if (sweep == SweepKind::Iterations) {
        if (algorithms.size() != 1 || algorithms.front() != Algorithm::Ide) {
            throw std::invalid_argument("experiment: the iteration sweep only runs ide");
        }
        for (double v : values) {
            if (v < 1.0 || v != std::floor(v)) {
                throw std::invalid_argument("experiment: iteration values must be positive integers");
            }
        }
    }
    config.validate();
}

double BerRecord::std_error() const {
    if (bits == 0) return 0.0;
    return std::sqrt(ber * (1.0 - ber) / static_cast<double>(bits));
}

BitCount& BitCount::operator+=(const BitCount& o) {
    bits += o.bits;
    errors += o.errors;
    erasures += o.erasures;
    seconds += o.seconds;
    return *this;
}

BitCount count_errors(const ResourceGrid& grid, const std::vector<const DetectionResult*>& per_symbol) {
    const GridLayout& g = grid.layout();
    if (per_symbol.size() != static_cast<std::size_t>(g.no())) {
        throw std::invalid_argument("count_errors: need one detection per symbol");
    }
    BitCount c;
    const auto& truth = grid.data_labels();
    std::size_t next = 0;
    for (int port = 0; port < g.nt(); ++port) {
        for (int l = 0; l < g.no(); ++l) {
            const DetectionResult& d = *per_symbol[static_cast<std::size_t>(l)];
            for (int tone : g.used_tones()) {
                if (g.kind(port, l, tone) != ReKind::Data) continue;
                const std::size_t e = static_cast<std::size_t>(tone) * g.nt() + port;
                const std::uint8_t tx = truth[next++];
                c.bits += kBitsPerSymbol;
                if (d.erased[e]) {
                    ++c.erasures;
                    c.errors += kBitsPerSymbol;
                } else {
                    c.errors += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(tx ^ d.labels[e])));
                }
            }
        }
    }
    return c;
}

LinkSimulator::LinkSimulator(const SimConfig& cfg)
    : cfg_(effective_config(cfg)),
      layout_(std::make_shared<const GridLayout>(cfg_.nc, cfg_.n_used, cfg_.no, cfg_.nt, cfg_.pilot_seed)),
      pdp_(config_pdp(cfg_)),
      channel_(pdp_, cfg_.fd_hz, cfg_.to_s, cfg_.no, cfg_.nt, cfg_.nr),
      blind_(build_correlation_model(cfg_, pdp_, *layout_, false), layout_),
      aware_(build_correlation_model(cfg_, pdp_, *layout_, true), layout_),
      ide_(cfg_.nc, cfg_.m_anchors, cfg_.channel_length) {
    cfg_.validate();
}

LinkSimulator::Realization LinkSimulator::realize(std::uint64_t seed, std::uint64_t trial, bool with_pn) const {
    Rng ch_rng = derive_rng(seed, trial, Stream::Channel);
    Rng pn_rng = derive_rng(seed, trial, Stream::PhaseNoise);
    Rng bit_rng = derive_rng(seed, trial, Stream::Payload);
    Rng noise_rng = derive_rng(seed, trial, Stream::Noise);

    ChannelRealization ch = channel_.generate(ch_rng, cfg_.nc);
    PnRealization pn = generate_phase_noise(cfg_.pn_params(), pn_rng);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(layout_->total_data_count()) * kBitsPerSymbol);
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& b : bits) b = static_cast<std::uint8_t>(coin(bit_rng));
    ResourceGrid grid = build_subframe(layout_, bits);
    RxSubframe rx = receive(grid, ch, with_pn ? &pn : nullptr, snr_to_noise_var(cfg_.snr_db, cfg_.nt), noise_rng);
    return {std::move(grid), std::move(ch), std::move(pn), std::move(rx)};
}

EffectiveChannelEstimate LinkSimulator::estimate(const RxSubframe& rx, bool use_cpe_stats) const {
    const ChannelEstimator& est = estimator(use_cpe_stats);
    if (cfg_.noise_source == NoiseSource::GuardBand) {
        return est.estimate(rx, guard_band_noise(rx, *layout_));
    }
    return est.estimate(rx);
}

LinkSimulator::TrialResult LinkSimulator::run_trial(std::uint64_t seed, std::uint64_t trial,
                                                    const std::vector<Algorithm>& algorithms,
                                                    bool per_iteration) const {
    const GridLayout& g = *layout_;
    const auto has = [&](Algorithm a) {
        return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end();
    };
    const bool need_pn_rx = std::any_of(algorithms.begin(), algorithms.end(),
                                        [](Algorithm a) { return a != Algorithm::NoPn; });

    TrialResult out;
    out.algorithms.resize(algorithms.size());

    Realization real = realize(seed, trial, true);
    std::vector<SymbolProblem> problems;
    EffectiveChannelEstimate blind_est, aware_est;
    if (need_pn_rx) {
        for (int l = 0; l < g.no(); ++l) problems.push_back(make_symbol_problem(real.rx, g, l));
        if (has(Algorithm::NoComp) || has(Algorithm::CpePlain)) blind_est = estimate(real.rx, false);
        if (has(Algorithm::CpeA0) || has(Algorithm::Ide)) aware_est = estimate(real.rx, true);
    }

    for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
        const Algorithm alg = algorithms[ai];
        const auto t0 = Clock::now();
        std::vector<DetectionResult> dets;
        dets.reserve(static_cast<std::size_t>(g.no()));
        std::vector<const DetectionResult*> view;

        switch (alg) {
            case Algorithm::NoComp:
            case Algorithm::CpePlain:
            case Algorithm::CpeA0: {
                const EffectiveChannelEstimate& est = alg == Algorithm::CpeA0 ? aware_est : blind_est;
                for (int l = 0; l < g.no(); ++l) {
                    const ToneChannels h = est.tone_channels(l, g);
                    const SymbolProblem& p = problems[static_cast<std::size_t>(l)];
                    dets.push_back(alg == Algorithm::CpePlain ? common_phase_detect(p, h)
                                                              : cpe_compensation_detect(p, h));
                }
                break;
            }
            case Algorithm::NoPn: {
                const Realization clean = realize(seed, trial, false);
                const EffectiveChannelEstimate est = estimate(clean.rx, false);
                for (int l = 0; l < g.no(); ++l) {
                    dets.push_back(cpe_compensation_detect(make_symbol_problem(clean.rx, g, l),
                                                           est.tone_channels(l, g)));
                }
                break;
            }
            case Algorithm::Ide: {
                IdeOptions opt;
                opt.max_iter = cfg_.max_iter;
                opt.tolerance = cfg_.ide_tolerance;
                std::vector<IdeResult> runs;
                runs.reserve(static_cast<std::size_t>(g.no()));
                for (int l = 0; l < g.no(); ++l) {
                    runs.push_back(run_ide(problems[static_cast<std::size_t>(l)], aware_est.tone_channels(l, g),
                                           ide_, opt));
                }
                for (int l = 0; l < g.no(); ++l) {
                    const IdeResult& r = runs[static_cast<std::size_t>(l)];
                    view.push_back(&r.at_iteration(cfg_.max_iter));
                    SymbolDiagnostics d;
                    d.trial = trial;
                    d.symbol = l;
                    d.iterations = r.iterations();
                    d.converged = r.converged;
                    d.erasures = r.detections.back().erasures;
                    d.objective_history = r.objective_history;
                    out.ide_symbols.push_back(std::move(d));
                }
                out.algorithms[ai] = count_errors(real.grid, view);
                if (per_iteration) {
                    for (int it = 1; it <= cfg_.max_iter; ++it) {
                        std::vector<const DetectionResult*> v;
                        for (const IdeResult& r : runs) v.push_back(&r.at_iteration(it));
                        out.iterations.push_back(count_errors(real.grid, v));
                    }
                }
                out.algorithms[ai].seconds = seconds_since(t0);
                continue;
            }
        }
        for (const DetectionResult& d : dets) view.push_back(&d);
        out.algorithms[ai] = count_errors(real.grid, view);
        out.algorithms[ai].seconds = seconds_since(t0);
    }
    return out;
}

std::vector<BerRecord> run_experiment(const ExperimentSpec& spec, std::vector<SymbolDiagnostics>* diagnostics) {
    spec.validate();
    const int threads = spec.threads > 0
                            ? spec.threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    // IDE iteration sweeps share one run at the largest iteration count.
    std::vector<double> points = spec.values;
    if (spec.sweep == SweepKind::Iterations) points = {*std::max_element(points.begin(), points.end())};

    std::vector<BerRecord> records;
    for (double value : points) {
        SimConfig cfg = spec.config;
        cfg.seed = spec.seed;
        if (spec.sweep == SweepKind::Snr) cfg.snr_db = value;
        if (spec.sweep == SweepKind::Beta) cfg.beta_hz = value;
        if (spec.sweep == SweepKind::Iterations) cfg.max_iter = static_cast<int>(value);
        const LinkSimulator sim(cfg);
        const bool per_iteration = spec.sweep == SweepKind::Iterations;

        std::vector<LinkSimulator::TrialResult> results(static_cast<std::size_t>(spec.n_subframes));
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (int t = next++; t < spec.n_subframes; t = next++) {
                try {
                    results[static_cast<std::size_t>(t)] =
                        sim.run_trial(spec.seed, static_cast<std::uint64_t>(t), spec.algorithms, per_iteration);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        const int n_workers = std::min(threads, spec.n_subframes);
        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (failure) std::rethrow_exception(failure);
        if (diagnostics) {
            for (auto& tr : results) {
                for (auto& d : tr.ide_symbols) {
                    d.sweep_value = value;
                    diagnostics->push_back(std::move(d));
                }
            }
        }

        const std::string hash = config_hash(cfg);
        auto make_record = [&](double sweep_value, Algorithm alg, const BitCount& c) {
            BerRecord r;
            r.sweep_name = std::string(sweep_name(spec.sweep));
            r.sweep_value = sweep_value;
            r.algorithm = alg;
            r.bits = c.bits;
            r.errors = c.errors;
            r.ber = c.bits > 0 ? static_cast<double>(c.errors) / static_cast<double>(c.bits) : 0.0;
            r.subframes = spec.n_subframes;
            r.erasures = c.erasures;
            r.seed = spec.seed;
            r.config_hash = hash;
            r.walltime_s = c.seconds;
            return r;
        };

        if (per_iteration) {
            for (double it : spec.values) {
                BitCount total;
                for (const auto& tr : results) total += tr.iterations[static_cast<std::size_t>(it) - 1];
                records.push_back(make_record(it, Algorithm::Ide, total));
            }
        } else {
            for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
                BitCount total;
                for (const auto& tr : results) total += tr.algorithms[ai];
                records.push_back(make_record(value, spec.algorithms[ai], total));
            }
        }
    }
    std::stable_sort(records.begin(), records.end(), [](const BerRecord& a, const BerRecord& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        return static_cast<int>(a.algorithm) < static_cast<int>(b.algorithm);
    });
    return records;
}

void write_csv(const std::vector<BerRecord>& records, const std::filesystem::path& path, const SimConfig& cfg) {
    if (records.empty()) {
        throw std::invalid_argument("write_csv: no records");
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_csv: cannot open " + path.string());
    }
    out << "# pnsim BER results\n";
    out << "# snr_definition: " << kSnrDefinition << "\n";
    out << "# pn_formula: " << to_string(cfg.pn_formula) << "\n";
    out << "# noise_source: " << to_string(cfg.noise_source) << "\n";
    out << "# config: " << dump_config(cfg) << "\n";
    out << kCsvHeader << "\n";
    for (const BerRecord& r : records) {
        out << r.sweep_name << ',' << format_double(r.sweep_value) << ',' << to_string(r.algorithm) << ','
            << r.bits << ',' << r.errors << ',' << format_double(r.ber) << ',' << r.subframes << ','
            << r.erasures << ',' << r.seed << ',' << r.config_hash << ',' << format_double(r.walltime_s)
            << "\n";
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write_csv: write failed for " + path.string());
    }
}

std::vector<BerRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_csv: cannot open " + path.string());
    }
    std::vector<BerRecord> records;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader) throw std::runtime_error("read_csv: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 11) throw std::runtime_error("read_csv: expected 11 fields in '" + line + "'");
        BerRecord r;
        try {
            r.sweep_name = f[0];
            r.sweep_value = std::stod(f[1]);
            r.algorithm = algorithm_from_string(f[2]);
            r.bits = std::stoull(f[3]);
            r.errors = std::stoull(f[4]);
            r.ber = std::stod(f[5]);
            r.subframes = std::stoi(f[6]);
            r.erasures = std::stoull(f[7]);
            r.seed = std::stoull(f[8]);
            r.config_hash = f[9];
            r.walltime_s = std::stod(f[10]);
        } catch (const std::logic_error&) {
            throw std::runtime_error("read_csv: malformed row '" + line + "'");
        }
        records.push_back(std::move(r));
    }
    if (!header_seen) throw std::runtime_error("read_csv: missing header");
    return records;
}

void write_diagnostics_csv(const std::vector<SymbolDiagnostics>& diags, std::string_view sweep_name,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_diagnostics_csv: cannot open " + path.string());
    }
    out << "# pnsim IDE diagnostics, one row per symbol\n";
    out << kDiagnosticsHeader << "\n";
    for (const SymbolDiagnostics& d : diags) {
        out << sweep_name << ',' << format_double(d.sweep_value) << ',' << d.trial << ',' << d.symbol << ','
            << d.iterations << ',' << (d.converged ? 1 : 0) << ',' << d.erasures << ',';
        for (std::size_t k = 0; k < d.objective_history.size(); ++k) {
            if (k > 0) out << ';';
            out << format_double(d.objective_history[k]);
        }
        out << "\n";
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write_diagnostics_csv: write failed for " + path.string());
    }
}

std::vector<SymbolDiagnostics> read_diagnostics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_diagnostics_csv: cannot open " + path.string());
    }
    std::vector<SymbolDiagnostics> diags;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kDiagnosticsHeader) {
                throw std::runtime_error("read_diagnostics_csv: unexpected header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() == 7 && line.back() == ',') f.emplace_back();
        if (f.size() != 8) throw std::runtime_error("read_diagnostics_csv: expected 8 fields in '" + line + "'");
        SymbolDiagnostics d;
        try {
            d.sweep_value = std::stod(f[1]);
            d.trial = std::stoull(f[2]);
            d.symbol = std::stoi(f[3]);
            d.iterations = std::stoi(f[4]);
            d.converged = std::stoi(f[5]) != 0;
            d.erasures = std::stoi(f[6]);
            std::stringstream hs(f[7]);
            while (std::getline(hs, cell, ';')) d.objective_history.push_back(std::stod(cell));
        } catch (const std::logic_error&) {
            throw std::runtime_error("read_diagnostics_csv: malformed row '" + line + "'");
        }
        diags.push_back(std::move(d));
    }
    if (!header_seen) throw std::runtime_error("read_diagnostics_csv: missing header");
    return diags;
}

}  // namespace pnc
