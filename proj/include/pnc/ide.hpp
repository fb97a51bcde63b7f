// SPDX-License-Identifier: Apache-2.0
//
// Iterative detection and estimation (IDE) for one OFDM symbol:
// alternating least-squares updates of the data symbols x, the normalized
// phase-noise spectrum a' = a / a[0] and the time-domain effective channel,
// all against ||y - (cir(a') (x) I_nr) H' x||^2.

#pragma once

#include <cstdint>
#include <vector>

#include "pnc/lte_grid.hpp"
#include "pnc/numerics.hpp"
#include "pnc/signal_model.hpp"
#include "pnc/transceiver.hpp"

namespace pnc {

/// Everything IDE needs about one received OFDM symbol.
struct SymbolProblem {
    int nc = 0;
    int nt = 0;
    int nr = 0;
    CVector y;                          ///< nc * nr, tone-major
    CVector known;                      ///< nc * nt, known values (zero on data REs)
    std::vector<std::uint8_t> is_data;  ///< nc * nt, entry k * nt + i

    int data_count() const;
};

SymbolProblem make_symbol_problem(const RxSubframe& rx, const GridLayout& layout, int symbol);

/// Piecewise-linear cyclic interpolation from M anchor samples to nc samples.
struct InterpolationMatrix {
    RMatrix p;                 ///< nc x M
    std::vector<int> anchors;  ///< floor(m * nc / M)
};

InterpolationMatrix build_interp_matrix(int nc, int m);

/// Matrices shared by every symbol with the same (nc, M, L).
class IdeContext {
public:
    IdeContext(int nc, int m_anchors, int channel_length);

    int nc() const { return nc_; }
    int m_anchors() const { return m_; }
    int channel_length() const { return l_; }

    const CMatrix& dft() const { return f_; }
    const InterpolationMatrix& interp() const { return interp_; }
    /// (1/nc) F P: maps anchor samples to the PN spectrum.
    const CMatrix& q() const { return q_; }
    /// First L DFT columns.
    const CMatrix& fh() const { return fh_; }

    struct Entry {
        int row;
        int col;
        double w;
    };
    /// Nonzeros of P, row-major.
    const std::vector<Entry>& p_nonzeros() const { return p_nonzeros_; }

private:
    int nc_, m_, l_;
    CMatrix f_;
    InterpolationMatrix interp_;
    CMatrix q_;
    CMatrix fh_;
    std::vector<Entry> p_nonzeros_;
};

enum class DetectMode { Auto, PerTone, Global };

struct DetectionResult {
    CVector x_ls;                       ///< unsliced LS values on data REs, known values elsewhere
    CVector x_sliced;                   ///< sliced data, known values elsewhere; erased REs are 0
    std::vector<std::uint8_t> labels;   ///< 4-bit labels of data REs
    std::vector<std::uint8_t> erased;   ///< 1 where a data RE could not be resolved
    int erasures = 0;
    bool global = false;
};

/// True when a equals e_0 exactly, i.e. cir(a) = I.
bool is_identity_spectrum(const CVector& a);

/// LS over the data REs with known REs clamped, then slicing. Auto solves
/// per tone when a' = e_0 and the coupled system otherwise. A rank-deficient
/// tone erases its data REs; a rank-deficient coupled system erases every
/// data RE of the symbol.
DetectionResult detect(const SymbolProblem& prob, const CVector& a_prime, const ToneChannels& h,
                       DetectMode mode = DetectMode::Auto);

struct PnEstimate {
    CVector a_prime;   ///< normalized so a_prime[0] = 1
    CVector a_raw;     ///< (1/nc) F P c before normalization
    CVector c;         ///< anchor samples
    bool degenerate = false;
};

/// LS fit of the anchor samples c with y ~ cir(H' x) (1/nc) F P c.
/// On a singular system or |a_raw[0]| < 1e-6, `degenerate` is set and
/// a_prime is left empty.
PnEstimate estimate_pn(const SymbolProblem& prob, const ToneChannels& h, const CVector& x,
                       const IdeContext& ctx);

struct ChannelUpdate {
    ToneChannels h;   ///< per-tone H' over all nc tones
    CVector taps;     ///< L * nt * nr, index (j * nt + i) * L + n
    bool ok = false;
};

/// LS fit of L taps per antenna pair with A' and x held fixed.
ChannelUpdate update_channel(const SymbolProblem& prob, const CVector& a_prime, const CVector& x,
                             const IdeContext& ctx);

/// ||y - (cir(a') (x) I_nr) H' x||^2.
double objective(const SymbolProblem& prob, const CVector& a_prime, const ToneChannels& h,
                 const CVector& x);

struct IdeOptions {
    int max_iter = 5;
    double tolerance = 1e-3;
    DetectMode mode = DetectMode::Auto;
    bool record_steps = false;
};

/// One least-squares step and the objective just before and after it, with
/// the other two quantities held fixed. `prior_in_span` is false when the
/// previous value could not be represented by the step's parameterization
/// (the initial MMSE channel is not an L-tap channel).
struct StepRecord {
    enum class Kind { Detect, PhaseNoise, Channel };
    Kind kind;
    int iteration;
    double before;
    double after;
    bool prior_in_span;
    bool applied;
};

struct IdeResult {
    std::vector<DetectionResult> detections;  ///< detection k is iteration k + 1
    std::vector<double> objective_history;    ///< after detection 1, then after each full iteration
    int degenerate_pn = 0;
    int channel_failures = 0;
    int non_monotone = 0;
    bool converged = false;
    CVector a_prime;
    ToneChannels h;
    std::vector<StepRecord> steps;

    int iterations() const { return static_cast<int>(detections.size()); }

    /// Output after `iteration` (1-based); repeats the last detection when
    /// the loop stopped earlier.
    const DetectionResult& at_iteration(int iteration) const;
};

IdeResult run_ide(const SymbolProblem& prob, const ToneChannels& initial, const IdeContext& ctx,
                  const IdeOptions& opt = {});

/// Per-tone detection with a' = e_0: IDE's first iteration.
DetectionResult cpe_compensation_detect(const SymbolProblem& prob, const ToneChannels& h);

/// Per-tone detection, a decision-directed common phase estimate
/// arg sum conj(H' x) y over the symbol, then per-tone re-detection with
/// the de-rotated channel.
DetectionResult common_phase_detect(const SymbolProblem& prob, const ToneChannels& h);

}  // namespace pnc
