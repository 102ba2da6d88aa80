#include "fraclab/field.hpp"

#include <algorithm>
#include <cstring>

#include "fraclab/errors.hpp"

namespace fraclab {

FieldMap::FieldMap(Grid grid, int components)
    : grid_(std::move(grid)), components_(components) {
    if (components < 1) throw ValidationError("field needs at least one component");
    values_.assign(grid_.size() * static_cast<std::size_t>(components_), 0.0);
    frozen_.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) frozen_[i] = grid_.is_interior(i) ? 0 : 1;
}

void FieldMap::set_value(std::size_t i, std::span<const double> v) {
    if (v.size() != static_cast<std::size_t>(components_)) {
        throw ValidationError("set_value: expected " + std::to_string(components_) + " components");
    }
    std::copy(v.begin(), v.end(), values_.begin() + static_cast<std::ptrdiff_t>(i * components_));
}

std::vector<std::size_t> FieldMap::free_cells() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < frozen_.size(); ++i) {
        if (!frozen_[i]) out.push_back(i);
    }
    return out;
}

bool FieldMap::identical(const FieldMap& other) const {
    return grid_.same_lattice(other.grid_) && components_ == other.components_ && frozen_ == other.frozen_ &&
           values_.size() == other.values_.size() &&
           std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(double)) == 0;
}

}  // namespace fraclab
