#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fraclab/field.hpp"
#include "fraclab/summation.hpp"

namespace fraclab::detail {

// Mean of the values over `cells`, anchored at the first cell so that a
// constant field reproduces its value exactly.
inline std::vector<double> cell_mean(const FieldMap& field, std::span<const std::size_t> cells) {
    const int N = field.components();
    std::vector<double> m(N, 0.0);
    if (cells.empty()) return m;
    const auto anchor = field.value(cells.front());
    for (int c = 0; c < N; ++c) {
        CompensatedSum acc;
        for (std::size_t i : cells) acc.add(field.value(i)[c] - anchor[c]);
        m[c] = anchor[c] + acc.value() / static_cast<double>(cells.size());
    }
    return m;
}

}  // namespace fraclab::detail
