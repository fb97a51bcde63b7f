// SPDX-License-Identifier: Apache-2.0
//
// LTE downlink subframe grid: two-port cell-specific reference symbols,
// 16-QAM data, guard band and DC.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pnc/numerics.hpp"

namespace pnc {

enum class ReKind : std::uint8_t { Data, Pilot, Muted, Guard, Dc };

std::string_view to_string(ReKind k);

// 16-QAM, unit average energy. Label bits b0 b1 b2 b3 (b0 = MSB of the
// 4-bit label) Gray-map per axis: b0 b1 -> I, b2 b3 -> Q with
//   00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3   (then scaled by 1/sqrt(10)).
// So label 0000 is (-3 - 3j)/sqrt(10).
inline constexpr int kBitsPerSymbol = 4;

cd qam16_map(std::uint8_t label);

struct SliceResult {
    cd point;
    std::uint8_t label;
};

/// Nearest constellation point. Ties go to the smaller real part, then the
/// smaller imaginary part.
SliceResult qam16_slice(cd z);

const std::array<cd, 16>& qam16_points();

/// Pack 4 bits (each 0/1, MSB first) into a label.
std::uint8_t bits_to_label(std::span<const std::uint8_t> bits);

struct PilotPosition {
    int symbol;
    int used_index;  ///< position in used_tones()
    int tone;
    cd value;
};

/// Static subframe structure shared by transmitter and receiver.
class GridLayout {
public:
    /// Pilot symbols are {0, 4, 7, 11} (normal cyclic prefix), so no must be
    /// at least 12. n_used must be even and leave room for DC.
    GridLayout(int nc, int n_used, int no, int nt, std::uint64_t pilot_seed, int v_shift = 0);

    int nc() const { return nc_; }
    int no() const { return no_; }
    int nt() const { return nt_; }
    int n_used() const { return static_cast<int>(used_tones_.size()); }

    /// Tones ordered by frequency: negative half first, then positive half.
    const std::vector<int>& used_tones() const { return used_tones_; }
    const std::vector<int>& guard_tones() const { return guard_tones_; }

    /// -1 for guard or DC tones.
    int used_index(int tone) const { return used_index_[static_cast<std::size_t>(tone)]; }

    ReKind kind(int port, int symbol, int tone) const {
        return kinds_[cell(port, symbol, tone)];
    }

    /// Pilots of one port, unrolled frequency-first then time.
    const std::vector<PilotPosition>& pilots(int port) const {
        return pilots_[static_cast<std::size_t>(port)];
    }

    /// Known transmitted value of a non-data RE (pilot value or zero).
    cd known_value(int port, int symbol, int tone) const {
        return known_[cell(port, symbol, tone)];
    }

    int data_count(int port) const { return data_count_[static_cast<std::size_t>(port)]; }
    int total_data_count() const;

    static constexpr std::array<int, 4> kPilotSymbols{0, 4, 7, 11};

private:
    std::size_t cell(int port, int symbol, int tone) const {
        return (static_cast<std::size_t>(port) * no_ + symbol) * nc_ + tone;
    }

    int nc_, no_, nt_;
    std::vector<int> used_tones_;
    std::vector<int> guard_tones_;
    std::vector<int> used_index_;
    std::vector<ReKind> kinds_;
    std::vector<cd> known_;
    std::vector<std::vector<PilotPosition>> pilots_;
    std::vector<int> data_count_;
};

/// One transmitted subframe for every port.
class ResourceGrid {
public:
    explicit ResourceGrid(std::shared_ptr<const GridLayout> layout);

    const GridLayout& layout() const { return *layout_; }
    std::shared_ptr<const GridLayout> layout_ptr() const { return layout_; }

    cd value(int port, int symbol, int tone) const { return values_[cell(port, symbol, tone)]; }
    cd& value(int port, int symbol, int tone) { return values_[cell(port, symbol, tone)]; }

    /// Transmitted labels of data REs, port-major, then symbol, then used tone.
    const std::vector<std::uint8_t>& data_labels() const { return labels_; }
    std::vector<std::uint8_t>& data_labels() { return labels_; }

    /// x for one symbol stacked tone-major: entry k * nt + i.
    CVector symbol_vector(int symbol) const;

private:
    std::size_t cell(int port, int symbol, int tone) const {
        return (static_cast<std::size_t>(port) * layout_->no() + symbol) * layout_->nc() + tone;
    }

    std::shared_ptr<const GridLayout> layout_;
    std::vector<cd> values_;
    std::vector<std::uint8_t> labels_;
};

/// Fills data REs from `bits` (0/1 values, 4 per RE) in label order.
/// Throws std::invalid_argument if fewer than 4 * total_data_count() bits.
ResourceGrid build_subframe(std::shared_ptr<const GridLayout> layout,
                            std::span<const std::uint8_t> bits);

/// Debug dump: header `tone,symbol,port,kind,re,im`, one row per RE.
void write_grid_csv(const ResourceGrid& grid, const std::filesystem::path& path);

}  // namespace pnc
