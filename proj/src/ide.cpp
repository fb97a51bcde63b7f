// SPDX-License-Identifier: Apache-2.0

#include "pnc/ide.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pnc/phase_noise.hpp"

namespace pnc {

int SymbolProblem::data_count() const {
    return static_cast<int>(std::count(is_data.begin(), is_data.end(), std::uint8_t{1}));
}

SymbolProblem make_symbol_problem(const RxSubframe& rx, const GridLayout& layout, int symbol) {
    if (symbol < 0 || symbol >= layout.no() || rx.nc != layout.nc()) {
        throw std::invalid_argument("make_symbol_problem: symbol or dimensions out of range");
    }
    SymbolProblem p;
    p.nc = layout.nc();
    p.nt = layout.nt();
    p.nr = rx.nr;
    p.y = rx.y[static_cast<std::size_t>(symbol)];
    p.known = CVector::Zero(static_cast<Eigen::Index>(p.nc) * p.nt);
    p.is_data.assign(static_cast<std::size_t>(p.nc) * p.nt, 0);
    for (int k = 0; k < p.nc; ++k) {
        for (int i = 0; i < p.nt; ++i) {
            const std::size_t e = static_cast<std::size_t>(k) * p.nt + i;
            if (layout.kind(i, symbol, k) == ReKind::Data) {
                p.is_data[e] = 1;
            } else {
                p.known(static_cast<Eigen::Index>(e)) = layout.known_value(i, symbol, k);
            }
        }
    }
    return p;
}

InterpolationMatrix build_interp_matrix(int nc, int m) {
    if (m < 2 || m > nc) {
        throw std::invalid_argument("build_interp_matrix: need 2 <= M <= nc");
    }
    InterpolationMatrix out;
    out.p = RMatrix::Zero(nc, m);
    out.anchors.resize(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        out.anchors[static_cast<std::size_t>(a)] =
            static_cast<int>((static_cast<long>(a) * nc) / m);
    }
    for (int a = 0; a < m; ++a) {
        const int lo = out.anchors[static_cast<std::size_t>(a)];
        const int hi = a + 1 < m ? out.anchors[static_cast<std::size_t>(a + 1)] : nc;
        const int next = (a + 1) % m;
        for (int n = lo; n < hi; ++n) {
            const double alpha = static_cast<double>(n - lo) / (hi - lo);
            out.p(n, a) += 1.0 - alpha;
            if (alpha > 0.0) out.p(n, next) += alpha;
        }
    }
    return out;
}

IdeContext::IdeContext(int nc, int m_anchors, int channel_length)
    : nc_(nc), m_(m_anchors), l_(channel_length) {
    if (channel_length < 1 || channel_length > nc) {
        throw std::invalid_argument("IdeContext: need 1 <= L <= nc");
    }
    f_ = dft_matrix(nc);
    interp_ = build_interp_matrix(nc, m_anchors);
    q_ = f_ * interp_.p.cast<cd>() / static_cast<double>(nc);
    fh_ = f_.leftCols(channel_length);
    for (int n = 0; n < nc; ++n) {
        for (int a = 0; a < m_anchors; ++a) {
            if (interp_.p(n, a) != 0.0) p_nonzeros_.push_back({n, a, interp_.p(n, a)});
        }
    }
}

bool is_identity_spectrum(const CVector& a) {
    if (a.size() == 0 || a(0) != cd(1.0, 0.0)) return false;
    for (Eigen::Index k = 1; k < a.size(); ++k) {
        if (a(k) != cd(0.0, 0.0)) return false;
    }
    return true;
}

namespace {

DetectionResult blank_result(const SymbolProblem& prob) {
    DetectionResult r;
    r.x_ls = prob.known;
    r.x_sliced = prob.known;
    r.labels.assign(prob.is_data.size(), 0);
    r.erased.assign(prob.is_data.size(), 0);
    return r;
}

void slice_all(const SymbolProblem& prob, DetectionResult& r) {
    r.erasures = 0;
    for (std::size_t e = 0; e < prob.is_data.size(); ++e) {
        if (!prob.is_data[e]) continue;
        const auto idx = static_cast<Eigen::Index>(e);
        if (r.erased[e]) {
            r.x_ls(idx) = 0.0;
            r.x_sliced(idx) = 0.0;
            ++r.erasures;
            continue;
        }
        const SliceResult s = qam16_slice(r.x_ls(idx));
        r.x_sliced(idx) = s.point;
        r.labels[e] = s.label;
    }
}

void check_shapes(const SymbolProblem& prob, const CVector& a, const ToneChannels& h) {
    const auto nc = static_cast<Eigen::Index>(prob.nc);
    if (prob.y.size() != nc * prob.nr || prob.known.size() != nc * prob.nt ||
        prob.is_data.size() != static_cast<std::size_t>(nc * prob.nt)) {
        throw std::invalid_argument("ide: inconsistent symbol problem");
    }
    if (a.size() != nc || h.size() != static_cast<std::size_t>(nc) || h.front().rows() != prob.nr ||
        h.front().cols() != prob.nt) {
        throw std::invalid_argument("ide: a' or H' has the wrong shape");
    }
}

DetectionResult detect_per_tone(const SymbolProblem& prob, const ToneChannels& h) {
    DetectionResult r = blank_result(prob);
    const int nt = prob.nt;
    const int nr = prob.nr;
    std::vector<int> cols;
    for (int k = 0; k < prob.nc; ++k) {
        cols.clear();
        for (int i = 0; i < nt; ++i) {
            if (prob.is_data[static_cast<std::size_t>(k) * nt + i]) cols.push_back(i);
        }
        if (cols.empty()) continue;
        const CMatrix& hk = h[static_cast<std::size_t>(k)];
        CVector rhs = prob.y.segment(static_cast<Eigen::Index>(k) * nr, nr) -
                      hk * prob.known.segment(static_cast<Eigen::Index>(k) * nt, nt);
        CMatrix a(nr, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) a.col(static_cast<Eigen::Index>(c)) = hk.col(cols[c]);
        try {
            const CVector xk = solve_ls(a, rhs);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                r.x_ls(static_cast<Eigen::Index>(k) * nt + cols[c]) = xk(static_cast<Eigen::Index>(c));
            }
        } catch (const SingularMatrixError&) {
            for (int i : cols) r.erased[static_cast<std::size_t>(k) * nt + i] = 1;
        }
    }
    slice_all(prob, r);
    return r;
}

DetectionResult detect_global(const SymbolProblem& prob, const CVector& a, const ToneChannels& h) {
    DetectionResult r = blank_result(prob);
    r.global = true;
    const int nc = prob.nc;
    const int nt = prob.nt;
    const int nr = prob.nr;
    std::vector<int> cols;
    for (std::size_t e = 0; e < prob.is_data.size(); ++e) {
        if (prob.is_data[e]) cols.push_back(static_cast<int>(e));
    }
    if (cols.empty()) {
        slice_all(prob, r);
        return r;
    }
    const CVector rhs = prob.y - pn_apply(a, mimo_apply(h, prob.known), nr);
    // B(k' nr + j, col(k, i)) = a'[k' - k] H[k](j, i)
    CMatrix b(static_cast<Eigen::Index>(nc) * nr, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const int k = cols[c] / nt;
        const int i = cols[c] % nt;
        const CMatrix& hk = h[static_cast<std::size_t>(k)];
        auto col = b.col(static_cast<Eigen::Index>(c));
        for (int kp = 0; kp < nc; ++kp) {
            const cd ad = a((kp - k + nc) % nc);
            for (int j = 0; j < nr; ++j) col(static_cast<Eigen::Index>(kp) * nr + j) = ad * hk(j, i);
        }
    }
    try {
        const CVector x = solve_ls(b, rhs);
        for (std::size_t c = 0; c < cols.size(); ++c) r.x_ls(cols[c]) = x(static_cast<Eigen::Index>(c));
    } catch (const SingularMatrixError&) {
        for (int e : cols) r.erased[static_cast<std::size_t>(e)] = 1;
    }
    slice_all(prob, r);
    return r;
}

}  // namespace

DetectionResult detect(const SymbolProblem& prob, const CVector& a_prime, const ToneChannels& h,
                       DetectMode mode) {
    check_shapes(prob, a_prime, h);
    const bool per_tone = mode == DetectMode::PerTone ||
                          (mode == DetectMode::Auto && is_identity_spectrum(a_prime));
    return per_tone ? detect_per_tone(prob, h) : detect_global(prob, a_prime, h);
}

PnEstimate estimate_pn(const SymbolProblem& prob, const ToneChannels& h, const CVector& x,
                       const IdeContext& ctx) {
    const int nc = prob.nc;
    const int nr = prob.nr;
    if (ctx.nc() != nc || x.size() != static_cast<Eigen::Index>(nc) * prob.nt) {
        throw std::invalid_argument("estimate_pn: dimension mismatch");
    }
    const CVector z = mimo_apply(h, x);
    const CMatrix& f = ctx.dft();

    // Column r of cir(z)_nr is z shifted down by r * nr, and the
    // circular convolution with (1/nc) F P c equals F diag(t_j) P c per
    // receive antenna, t_j = (1/nc) F^H z_j.
    CMatrix d = CMatrix::Zero(static_cast<Eigen::Index>(nc) * nr, ctx.m_anchors());
    CVector zj(nc);
    for (int j = 0; j < nr; ++j) {
        for (int k = 0; k < nc; ++k) zj(k) = z(static_cast<Eigen::Index>(k) * nr + j);
        const CVector t = f.adjoint() * zj / static_cast<double>(nc);
        for (const auto& nz : ctx.p_nonzeros()) {
            const cd s = t(nz.row) * nz.w;
            for (int k = 0; k < nc; ++k) {
                d(static_cast<Eigen::Index>(k) * nr + j, nz.col) += f(k, nz.row) * s;
            }
        }
    }

    PnEstimate out;
    try {
        out.c = solve_ls(d, prob.y);
    } catch (const SingularMatrixError&) {
        out.degenerate = true;
        return out;
    }
    out.a_raw = ctx.q() * out.c;
    if (std::abs(out.a_raw(0)) < 1e-6) {
        out.degenerate = true;
        return out;
    }
    out.a_prime = out.a_raw / out.a_raw(0);
    out.a_prime(0) = 1.0;
    return out;
}

ChannelUpdate update_channel(const SymbolProblem& prob, const CVector& a_prime, const CVector& x,
                             const IdeContext& ctx) {
    const int nc = prob.nc;
    const int nt = prob.nt;
    const int nr = prob.nr;
    const int len = ctx.channel_length();
    if (ctx.nc() != nc || a_prime.size() != nc || x.size() != static_cast<Eigen::Index>(nc) * nt) {
        throw std::invalid_argument("update_channel: dimension mismatch");
    }
    const CMatrix& fh = ctx.fh();

    // Receive antennas decouple: y_j = sum_i cir(a') diag(x_i) F_h h_ji.
    CMatrix g(nc, static_cast<Eigen::Index>(nt) * len);
    for (int i = 0; i < nt; ++i) {
        for (int k = 0; k < nc; ++k) {
            g.block(k, static_cast<Eigen::Index>(i) * len, 1, len) =
                x(static_cast<Eigen::Index>(k) * nt + i) * fh.row(k);
        }
    }
    if (!is_identity_spectrum(a_prime)) {
        g = circulant(a_prime) * g;
    }

    ChannelUpdate out;
    out.taps = CVector::Zero(static_cast<Eigen::Index>(len) * nt * nr);
    const Eigen::HouseholderQR<CMatrix> qr(g);
    if (g.rows() < g.cols()) return out;
    const auto rdiag = qr.matrixQR().diagonal().cwiseAbs();
    if (rdiag.minCoeff() < 1e-12 * rdiag.maxCoeff() || rdiag.maxCoeff() == 0.0) return out;

    CVector yj(nc);
    for (int j = 0; j < nr; ++j) {
        for (int k = 0; k < nc; ++k) yj(k) = prob.y(static_cast<Eigen::Index>(k) * nr + j);
        const CVector theta = qr.solve(yj);
        out.taps.segment(static_cast<Eigen::Index>(j) * nt * len, static_cast<Eigen::Index>(nt) * len) = theta;
    }
    out.h = zero_channels(nc, nr, nt);
    for (int j = 0; j < nr; ++j) {
        for (int i = 0; i < nt; ++i) {
            const CVector hf = fh * out.taps.segment((static_cast<Eigen::Index>(j) * nt + i) * len, len);
            for (int k = 0; k < nc; ++k) out.h[static_cast<std::size_t>(k)](j, i) = hf(k);
        }
    }
    out.ok = true;
    return out;
}

double objective(const SymbolProblem& prob, const CVector& a_prime, const ToneChannels& h,
                 const CVector& x) {
    const CVector z = mimo_apply(h, x);
    if (is_identity_spectrum(a_prime)) return (prob.y - z).squaredNorm();
    return (prob.y - pn_apply(a_prime, z, prob.nr)).squaredNorm();
}

const DetectionResult& IdeResult::at_iteration(int iteration) const {
    if (detections.empty() || iteration < 1) {
        throw std::out_of_range("IdeResult::at_iteration: no such iteration");
    }
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(iteration), detections.size()) - 1;
    return detections[idx];
}

IdeResult run_ide(const SymbolProblem& prob, const ToneChannels& initial, const IdeContext& ctx,
                  const IdeOptions& opt) {
    if (opt.max_iter < 1) {
        throw std::invalid_argument("run_ide: max_iter must be at least 1");
    }
    IdeResult r;
    r.a_prime = identity_spectrum(prob.nc);
    r.h = initial;
    check_shapes(prob, r.a_prime, r.h);
    CVector x = prob.known;
    bool h_in_span = false;
    bool last_round = false;

    using Kind = StepRecord::Kind;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const double before_det = opt.record_steps ? objective(prob, r.a_prime, r.h, x) : 0.0;
        DetectionResult det = detect(prob, r.a_prime, r.h, opt.mode);
        if (opt.record_steps) {
            r.steps.push_back({Kind::Detect, it, before_det, objective(prob, r.a_prime, r.h, det.x_ls), true,
                               det.erasures == 0});
        }
        x = det.x_sliced;
        r.detections.push_back(std::move(det));
        if (it == 1) r.objective_history.push_back(objective(prob, r.a_prime, r.h, x));
        if (it == opt.max_iter || last_round) break;

        const double before_pn = opt.record_steps ? objective(prob, r.a_prime, r.h, x) : 0.0;
        PnEstimate pn = estimate_pn(prob, r.h, x, ctx);
        if (pn.degenerate) {
            ++r.degenerate_pn;
            if (opt.record_steps) r.steps.push_back({Kind::PhaseNoise, it, before_pn, before_pn, true, false});
        } else {
            if (opt.record_steps) {
                r.steps.push_back({Kind::PhaseNoise, it, before_pn, objective(prob, pn.a_raw, r.h, x), true, true});
            }
            r.a_prime = std::move(pn.a_prime);
        }

        const double before_ch = opt.record_steps ? objective(prob, r.a_prime, r.h, x) : 0.0;
        ChannelUpdate ch = update_channel(prob, r.a_prime, x, ctx);
        if (!ch.ok) {
            ++r.channel_failures;
            if (opt.record_steps) r.steps.push_back({Kind::Channel, it, before_ch, before_ch, h_in_span, false});
        } else {
            if (opt.record_steps) {
                r.steps.push_back({Kind::Channel, it, before_ch, objective(prob, r.a_prime, ch.h, x), h_in_span, true});
            }
            r.h = std::move(ch.h);
            h_in_span = true;
        }

        const double obj = objective(prob, r.a_prime, r.h, x);
        const double prev = r.objective_history.back();
        if (obj > prev) ++r.non_monotone;
        r.objective_history.push_back(obj);
        if (!(prev > 0.0) || (prev - obj) / prev < opt.tolerance) {
            r.converged = true;
            last_round = true;
        }
    }
    return r;
}

DetectionResult cpe_compensation_detect(const SymbolProblem& prob, const ToneChannels& h) {
    return detect(prob, identity_spectrum(prob.nc), h, DetectMode::PerTone);
}

DetectionResult common_phase_detect(const SymbolProblem& prob, const ToneChannels& h) {
    DetectionResult first = cpe_compensation_detect(prob, h);
    const CVector z = mimo_apply(h, first.x_sliced);
    const cd s = z.dot(prob.y);  // z^H y
    if (std::abs(s) == 0.0) return first;
    const cd rot = s / std::abs(s);
    ToneChannels hr = h;
    for (CMatrix& hk : hr) hk *= rot;
    return cpe_compensation_detect(prob, hr);
}

}  // namespace pnc
