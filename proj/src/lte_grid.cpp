// SPDX-License-Identifier: Apache-2.0

#include "pnc/lte_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pnc/rng.hpp"

namespace pnc {

namespace {

const double kQamScale = 1.0 / std::sqrt(10.0);

// Gray pair (b_hi, b_lo) -> amplitude level.
constexpr std::array<int, 4> kLevelOfPair{-3, -1, 3, 1};  // 00, 01, 10, 11

std::uint8_t pair_of_level(double v) {
    if (v <= -2.0) return 0b00;
    if (v <= 0.0) return 0b01;
    if (v <= 2.0) return 0b11;
    return 0b10;
}

}  // namespace

std::string_view to_string(ReKind k) {
    switch (k) {
        case ReKind::Data: return "data";
        case ReKind::Pilot: return "pilot";
        case ReKind::Muted: return "muted";
        case ReKind::Guard: return "guard";
        case ReKind::Dc: return "dc";
    }
    return "?";
}

cd qam16_map(std::uint8_t label) {
    const int re = kLevelOfPair[(label >> 2) & 0b11];
    const int im = kLevelOfPair[label & 0b11];
    return cd(re, im) * kQamScale;
}

SliceResult qam16_slice(cd z) {
    const std::uint8_t hi = pair_of_level(z.real() / kQamScale);
    const std::uint8_t lo = pair_of_level(z.imag() / kQamScale);
    const auto label = static_cast<std::uint8_t>((hi << 2) | lo);
    return {qam16_map(label), label};
}

const std::array<cd, 16>& qam16_points() {
    static const std::array<cd, 16> points = [] {
        std::array<cd, 16> p{};
        for (std::uint8_t l = 0; l < 16; ++l) p[l] = qam16_map(l);
        return p;
    }();
    return points;
}

std::uint8_t bits_to_label(std::span<const std::uint8_t> bits) {
    if (bits.size() != kBitsPerSymbol) {
        throw std::invalid_argument("bits_to_label: need exactly 4 bits");
    }
    return static_cast<std::uint8_t>((bits[0] << 3) | (bits[1] << 2) | (bits[2] << 1) | bits[3]);
}

GridLayout::GridLayout(int nc, int n_used, int no, int nt, std::uint64_t pilot_seed, int v_shift)
    : nc_(nc), no_(no), nt_(nt) {
    if (nc < 4 || n_used < 12 || n_used % 2 != 0 || n_used > nc - 1) {
        throw std::invalid_argument("GridLayout: need even n_used with n_used <= nc - 1");
    }
    if (no < 12) {
        throw std::invalid_argument("GridLayout: subframe needs at least 12 symbols");
    }
    if (nt < 1 || nt > 2) {
        throw std::invalid_argument("GridLayout: one or two antenna ports supported");
    }
    const int half = n_used / 2;
    for (int u = 0; u < half; ++u) used_tones_.push_back(nc - half + u);
    for (int u = 0; u < half; ++u) used_tones_.push_back(u + 1);

    used_index_.assign(static_cast<std::size_t>(nc), -1);
    for (int u = 0; u < n_used; ++u) used_index_[static_cast<std::size_t>(used_tones_[u])] = u;
    for (int k = 1; k < nc; ++k) {
        if (used_index_[static_cast<std::size_t>(k)] < 0) guard_tones_.push_back(k);
    }

    const std::size_t cells = static_cast<std::size_t>(nt) * no * nc;
    kinds_.assign(cells, ReKind::Guard);
    known_.assign(cells, cd(0.0, 0.0));
    pilots_.resize(static_cast<std::size_t>(nt));
    data_count_.assign(static_cast<std::size_t>(nt), 0);

    // Pilot offset (mod 6) for a given port on a given pilot symbol.
    auto offset = [&](int port, int symbol) -> int {
        const bool first_of_slot = (symbol == 0 || symbol == 7);
        const int base = (first_of_slot == (port == 0)) ? 0 : 3;
        return (base + v_shift) % 6;
    };
    auto is_pilot_symbol = [](int symbol) {
        return std::find(kPilotSymbols.begin(), kPilotSymbols.end(), symbol) != kPilotSymbols.end();
    };

    Rng rng(splitmix64(pilot_seed));
    std::uniform_int_distribution<int> corner(0, 3);
    const std::array<cd, 4> corners{cd(-3, -3) * kQamScale, cd(-3, 3) * kQamScale,
                                    cd(3, -3) * kQamScale, cd(3, 3) * kQamScale};

    for (int port = 0; port < nt; ++port) {
        for (int l = 0; l < no; ++l) {
            kinds_[cell(port, l, 0)] = ReKind::Dc;
            for (int u = 0; u < n_used; ++u) {
                const int tone = used_tones_[static_cast<std::size_t>(u)];
                ReKind kind = ReKind::Data;
                if (is_pilot_symbol(l)) {
                    if (u % 6 == offset(port, l)) {
                        kind = ReKind::Pilot;
                    } else if (nt == 2 && u % 6 == offset(1 - port, l)) {
                        kind = ReKind::Muted;
                    }
                }
                kinds_[cell(port, l, tone)] = kind;
                if (kind == ReKind::Pilot) {
                    const cd v = corners[static_cast<std::size_t>(corner(rng))];
                    known_[cell(port, l, tone)] = v;
                    pilots_[static_cast<std::size_t>(port)].push_back({l, u, tone, v});
                } else if (kind == ReKind::Data) {
                    ++data_count_[static_cast<std::size_t>(port)];
                }
            }
        }
    }
}

int GridLayout::total_data_count() const {
    int n = 0;
    for (int c : data_count_) n += c;
    return n;
}

ResourceGrid::ResourceGrid(std::shared_ptr<const GridLayout> layout)
    : layout_(std::move(layout)),
      values_(static_cast<std::size_t>(layout_->nt()) * layout_->no() * layout_->nc()) {
    for (int p = 0; p < layout_->nt(); ++p) {
        for (int l = 0; l < layout_->no(); ++l) {
            for (int k = 0; k < layout_->nc(); ++k) {
                values_[cell(p, l, k)] = layout_->known_value(p, l, k);
            }
        }
    }
}

CVector ResourceGrid::symbol_vector(int symbol) const {
    const int nc = layout_->nc();
    const int nt = layout_->nt();
    CVector x(static_cast<Eigen::Index>(nc) * nt);
    for (int k = 0; k < nc; ++k) {
        for (int i = 0; i < nt; ++i) {
            x(k * nt + i) = value(i, symbol, k);
        }
    }
    return x;
}

ResourceGrid build_subframe(std::shared_ptr<const GridLayout> layout,
                            std::span<const std::uint8_t> bits) {
    const std::size_t needed = static_cast<std::size_t>(layout->total_data_count()) * kBitsPerSymbol;
    if (bits.size() < needed) {
        throw std::invalid_argument("build_subframe: need " + std::to_string(needed) +
                                    " payload bits, got " + std::to_string(bits.size()));
    }
    ResourceGrid grid(layout);
    auto& labels = grid.data_labels();
    labels.reserve(static_cast<std::size_t>(layout->total_data_count()));
    std::size_t pos = 0;
    for (int p = 0; p < layout->nt(); ++p) {
        for (int l = 0; l < layout->no(); ++l) {
            for (int tone : layout->used_tones()) {
                if (layout->kind(p, l, tone) != ReKind::Data) continue;
                const std::uint8_t label = bits_to_label(bits.subspan(pos, kBitsPerSymbol));
                pos += kBitsPerSymbol;
                labels.push_back(label);
                grid.value(p, l, tone) = qam16_map(label);
            }
        }
    }
    return grid;
}

void write_grid_csv(const ResourceGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_grid_csv: cannot open " + path.string());
    }
    out.precision(17);
    out << "tone,symbol,port,kind,re,im\n";
    const GridLayout& g = grid.layout();
    for (int p = 0; p < g.nt(); ++p) {
        for (int l = 0; l < g.no(); ++l) {
            for (int k = 0; k < g.nc(); ++k) {
                const cd v = grid.value(p, l, k);
                out << k << ',' << l << ',' << p << ',' << to_string(g.kind(p, l, k)) << ','
                    << v.real() << ',' << v.imag() << '\n';
            }
        }
    }
    if (!out) {
        throw std::runtime_error("write_grid_csv: write failed for " + path.string());
    }
}

}  // namespace pnc
