#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "fraclab/field.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/manifold.hpp"
#include "fraclab/rng.hpp"
#include "json.hpp"

namespace fraclab {

struct ComparisonOptions {
    /// Cutoff eta = 1 on B_{inner_radius}, 0 outside the ball, linear in between.
    double inner_radius = 0.0;  // 0 means ball.radius / 2
    int shift_samples = 64;
    /// Shifts a are drawn uniformly from B_{shift_radius}(0) in R^N.
    double shift_radius = 0.5;
    /// Rounds of fresh shifts when every shift of a round hits the singular set.
    int retry_cap = 8;
};

struct ComparisonResult {
    FieldMap field;        // w on the target, equal to the input outside the ball
    FieldMap interpolant;  // v = eta mean + (1 - eta) u
    Eigen::VectorXd shift;
    double energy_w = 0.0;  // sum_{i in ball} sum_j w(i,j)|w_i - w_j|^p
    double energy_v = 0.0;
    /// energy_w / energy_v, or 0 when both vanish.
    double c_meas = 0.0;
    bool c_meas_defined = true;
    int samples_tried = 0;
    int singular_hits = 0;
    int rounds = 0;
};

/// Comparison map w = P_a^{-1} o P_a o v inside the ball, with the shift a
/// chosen as the lowest-energy of `shift_samples` random shifts. Frozen cells
/// and cells outside the ball keep their input values.
ComparisonResult comparison_map(const FieldMap& field, const KernelTable& kernel, const ManifoldSpec& manifold,
                                const BallSpec& ball, const BallSpec& mean_ball, const ComparisonOptions& options,
                                Rng& rng);

nlohmann::json to_json(const ComparisonResult& r);

}  // namespace fraclab
