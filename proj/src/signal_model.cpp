// SPDX-License-Identifier: Apache-2.0

#include "pnc/signal_model.hpp"

#include <stdexcept>

namespace pnc {

ToneChannels zero_channels(int nc, int nr, int nt) {
    return ToneChannels(static_cast<std::size_t>(nc), CMatrix::Zero(nr, nt));
}

CVector mimo_apply(const ToneChannels& h, const CVector& x) {
    if (h.empty()) {
        throw std::invalid_argument("mimo_apply: empty channel");
    }
    const auto nc = static_cast<Eigen::Index>(h.size());
    const Eigen::Index nr = h.front().rows();
    const Eigen::Index nt = h.front().cols();
    if (x.size() != nc * nt) {
        throw std::invalid_argument("mimo_apply: x has wrong length");
    }
    CVector z(nc * nr);
    for (Eigen::Index k = 0; k < nc; ++k) {
        z.segment(k * nr, nr).noalias() = h[static_cast<std::size_t>(k)] * x.segment(k * nt, nt);
    }
    return z;
}

CVector pn_apply(const CVector& a, const CVector& z, int n) {
    const Eigen::Index nc = a.size();
    if (n < 1 || z.size() != nc * n) {
        throw std::invalid_argument("pn_apply: z must hold nc blocks of n entries");
    }
    CVector y = CVector::Zero(z.size());
    for (Eigen::Index d = 0; d < nc; ++d) {
        const cd ad = a(d);
        if (ad == cd(0.0, 0.0)) continue;
        // y[k] += a[d] z[k - d]
        for (Eigen::Index k = 0; k < nc; ++k) {
            const Eigen::Index r = (k - d + nc) % nc;
            for (int j = 0; j < n; ++j) {
                y(k * n + j) += ad * z(r * n + j);
            }
        }
    }
    return y;
}

CVector ici_term(const CVector& a, const CVector& z, int n) {
    return pn_apply(a, z, n) - a(0) * z;
}

}  // namespace pnc
