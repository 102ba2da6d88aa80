#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Values u_i in R^N on every cell of a grid, plus a frozen mask. By default
/// the collar is frozen (exterior Dirichlet data) and the interior is free.
class FieldMap {
public:
    FieldMap(Grid grid, int components);

    const Grid& grid() const { return grid_; }
    int components() const { return components_; }
    std::size_t size() const { return grid_.size(); }

    std::span<double> value(std::size_t i) { return {values_.data() + i * components_, static_cast<std::size_t>(components_)}; }
    std::span<const double> value(std::size_t i) const {
        return {values_.data() + i * components_, static_cast<std::size_t>(components_)};
    }
    void set_value(std::size_t i, std::span<const double> v);

    /// Flat storage, cell-major with the component index fastest.
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool frozen(std::size_t i) const { return frozen_[i] != 0; }
    void set_frozen(std::size_t i, bool f) { frozen_[i] = f ? 1 : 0; }
    const std::vector<std::uint8_t>& frozen_mask() const { return frozen_; }

    /// Unfrozen cell indices, ascending.
    std::vector<std::size_t> free_cells() const;

    /// Same grid lattice, component count, values and mask (bitwise).
    bool identical(const FieldMap& other) const;

private:
    Grid grid_;
    int components_;
    std::vector<double> values_;
    std::vector<std::uint8_t> frozen_;
};

}  // namespace fraclab
