// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo BER driver and the results CSV format.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pnc/config.hpp"
#include "pnc/estimator.hpp"
#include "pnc/fading_channel.hpp"
#include "pnc/ide.hpp"
#include "pnc/lte_grid.hpp"

namespace pnc {

/// no_comp:   per-tone detection on the CPE-blind MMSE estimate.
/// cpe_plain: CPE-blind estimate, decision-directed common phase correction.
/// cpe_a0:    per-tone detection on the CPE-aware estimate (IDE's first iteration).
/// ide:       CPE-aware estimate refined by IDE.
/// no_pn:     the same realization received without phase noise, CPE-blind estimate.
enum class Algorithm { NoComp, CpePlain, CpeA0, Ide, NoPn };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);
const std::vector<Algorithm>& all_algorithms();

enum class SweepKind { Snr, Beta, Iterations };

/// Column value of sweep_name: "snr_db", "beta_hz" or "iteration".
std::string_view sweep_name(SweepKind k);

struct ExperimentSpec {
    SweepKind sweep = SweepKind::Snr;
    std::vector<double> values;
    SimConfig config;
    int n_subframes = 100;
    std::vector<Algorithm> algorithms;
    std::uint64_t seed = 1;
    int threads = 0;  ///< 0 = hardware concurrency

    void validate() const;
};

struct BerRecord {
    std::string sweep_name;
    double sweep_value = 0.0;
    Algorithm algorithm = Algorithm::NoComp;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber = 0.0;
    int subframes = 0;
    std::uint64_t erasures = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    double walltime_s = 0.0;

    /// sqrt(p (1 - p) / bits).
    double std_error() const;
};

/// Per-symbol IDE diagnostics; sweep_value is filled in by run_experiment.
struct SymbolDiagnostics {
    double sweep_value = 0.0;
    std::uint64_t trial = 0;
    int symbol = 0;
    int iterations = 0;
    bool converged = false;
    int erasures = 0;  ///< of the final detection
    std::vector<double> objective_history;
};

/// Bit and erasure counts of one or more detections.
struct BitCount {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t erasures = 0;
    double seconds = 0.0;

    BitCount& operator+=(const BitCount& o);
};

/// Compares detected labels against the transmitted grid. `per_symbol`
/// holds one detection per OFDM symbol; erased REs count 4 bit errors.
BitCount count_errors(const ResourceGrid& grid, const std::vector<const DetectionResult*>& per_symbol);

/// Draws and processes one trial. Immutable after construction, so one
/// instance serves all worker threads of a sweep point.
class LinkSimulator {
public:
    explicit LinkSimulator(const SimConfig& cfg);

    struct TrialResult {
        std::vector<BitCount> algorithms;  ///< aligned with the requested algorithms
        std::vector<BitCount> iterations;  ///< IDE after 1, 2, ... max_iter iterations
        std::vector<SymbolDiagnostics> ide_symbols;
    };

    /// The random streams depend only on (seed, trial), so results for
    /// different sweep values share channel, PN, payload and noise draws.
    TrialResult run_trial(std::uint64_t seed, std::uint64_t trial, const std::vector<Algorithm>& algorithms,
                          bool per_iteration = false) const;

    const SimConfig& config() const { return cfg_; }
    const GridLayout& layout() const { return *layout_; }
    std::shared_ptr<const GridLayout> layout_ptr() const { return layout_; }
    const FadingChannelModel& channel_model() const { return channel_; }
    const ChannelEstimator& estimator(bool use_cpe_stats) const { return use_cpe_stats ? aware_ : blind_; }
    const IdeContext& ide_context() const { return ide_; }

    struct Realization {
        ResourceGrid grid;
        ChannelRealization channel;
        PnRealization pn;
        RxSubframe rx;
    };

    /// Realization of (seed, trial); `with_pn = false` reuses the same
    /// channel, payload and noise draws without phase noise.
    Realization realize(std::uint64_t seed, std::uint64_t trial, bool with_pn = true) const;

    EffectiveChannelEstimate estimate(const RxSubframe& rx, bool use_cpe_stats) const;

private:
    SimConfig cfg_;
    std::shared_ptr<const GridLayout> layout_;
    PowerDelayProfile pdp_;
    FadingChannelModel channel_;
    ChannelEstimator blind_;
    ChannelEstimator aware_;
    IdeContext ide_;
};

/// Runs every sweep point; when `diagnostics` is given, the IDE symbol
/// records of all trials are appended to it in (sweep value, trial, symbol)
/// order.
std::vector<BerRecord> run_experiment(const ExperimentSpec& spec,
                                      std::vector<SymbolDiagnostics>* diagnostics = nullptr);

/// Header comments (lines starting with '#') carry the SNR definition, the
/// PN formula variant and the base configuration; then the column header
/// and one row per record. Throws std::invalid_argument on an empty record
/// list and std::runtime_error when the file cannot be written.
void write_csv(const std::vector<BerRecord>& records, const std::filesystem::path& path,
               const SimConfig& cfg = {});

/// Parses a file produced by write_csv.
std::vector<BerRecord> read_csv(const std::filesystem::path& path);

/// Companion file of the results CSV, one row per IDE symbol run; the
/// objective history is ';'-separated.
void write_diagnostics_csv(const std::vector<SymbolDiagnostics>& diags, std::string_view sweep_name,
                           const std::filesystem::path& path);
std::vector<SymbolDiagnostics> read_diagnostics_csv(const std::filesystem::path& path);

inline constexpr const char* kDiagnosticsHeader =
    "sweep_name,sweep_value,trial,symbol,iterations,converged,erasures,objective_history";

inline constexpr const char* kCsvHeader =
    "sweep_name,sweep_value,algorithm,bits,errors,ber,subframes,erasures,seed,config_hash,walltime_s";

}  // namespace pnc
