#pragma once

#include <string>
#include <vector>

#include "fraclab/field.hpp"
#include "fraclab/manifold.hpp"

namespace fraclab {

/// Boundary-data presets. Each fills every cell (interior cells get the
/// same formula, which serves as the initial guess).
///   constant         u = value
///   radial-degree-1  u = (x - center)/|x - center|, padded with zeros
///   smooth-bump      u = (sin t, 0, ..., cos t), t = amplitude exp(-|x-center|^2/width^2)
///   holder-power     u = (cos t, sin t, 0, ...), t = kappa |x-center|^alpha
///   file             values and mask from a field snapshot
struct PresetSpec {
    std::string name = "constant";
    std::vector<double> value;  // constant; defaults to the last unit vector
    Point center{};
    double amplitude = 1.0;
    double width = 1.0;
    double alpha = 0.5;
    double kappa = 1.0;
    std::string path;
};

bool is_known_preset(const std::string& name);

/// Throws ValidationError for unknown names or values off the target.
FieldMap make_preset(const Grid& grid, const ManifoldSpec& manifold, const PresetSpec& spec);

}  // namespace fraclab
