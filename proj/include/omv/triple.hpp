#pragma once

#include <omv/bitcore.hpp>

#include <compare>
#include <cstdint>
#include <vector>

namespace omv {

/// A matrix position.
struct Cell {
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// A past brute-forced query rectangle together with every 1-entry of the
/// matrix inside it.
struct ExtractedTriple {
    IndexSet rows;
    IndexSet cols;
    std::vector<Cell> ones;
};

}  // namespace omv
