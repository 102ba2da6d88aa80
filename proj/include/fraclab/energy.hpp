#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/field.hpp"
#include "fraclab/kernel.hpp"
#include "json.hpp"

namespace fraclab {

/// Sum over i in a, j in b of w(i,j) |u_i - u_j|^p, in index order with
/// compensated summation. Both orderings of a pair count when a and b
/// overlap, so (all, all) counts each unordered pair twice.
double gagliardo_energy(const FieldMap& field, const KernelTable& kernel, std::span<const std::size_t> a,
                        std::span<const std::size_t> b);

/// r_i = sum_j w(i,j) |u_i - u_j|^p for every cell.
std::vector<double> row_energies(const FieldMap& field, const KernelTable& kernel);

/// The common value of all collar cells, if they share one.
std::optional<std::vector<double>> constant_exterior_value(const FieldMap& field);

struct LocalizedEnergy {
    BallSpec ball;
    double value = 0.0;       // grid_part + tail
    double grid_part = 0.0;   // sum over i in ball, j anywhere on the grid
    double tail = 0.0;        // beyond-collar correction (0 when dropped)
    /// "constant-exterior" when the tail was added, "dropped" otherwise.
    std::string tail_mode;
    /// Upper bound on the dropped beyond-collar mass (0 when added).
    double dropped_bound = 0.0;
    std::size_t cells = 0;
    bool under_resolved = false;  // radius < 2h
    std::vector<std::string> warnings;
};

/// Energy with one variable in the ball and the other anywhere:
/// sum_{i in ball} sum_j w(i,j)|u_i - u_j|^p plus the analytic tail when
/// the exterior data is constant.
LocalizedEnergy localized_energy_report(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball);
/// Same, from precomputed row energies.
LocalizedEnergy localized_energy_report(const FieldMap& field, const KernelTable& kernel,
                                        std::span<const double> rows, const BallSpec& ball);
double localized_energy(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball);

struct NormalizedEnergy {
    LocalizedEnergy localized;
    double value = 0.0;  // R^{sp-n} * localized.value
};

NormalizedEnergy normalized_energy_report(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball);
NormalizedEnergy normalized_energy_report(const FieldMap& field, const KernelTable& kernel,
                                          std::span<const double> rows, const BallSpec& ball);
double normalized_energy(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball);

struct EnergyReport {
    double total = 0.0;       // grid double sum + 2 * tail
    double grid_total = 0.0;  // sum over all ordered pairs of grid cells
    double tail = 0.0;        // sum_i |u_i - c|^p * tail_weight(i), or 0 when dropped
    std::string tail_mode;
    double dropped_bound = 0.0;
    /// h^{(1-s)p}: order of the excluded same-cell self-interaction.
    double self_interaction_order = 0.0;
    std::vector<LocalizedEnergy> localized;
    std::vector<NormalizedEnergy> normalized;
    std::vector<std::string> warnings;
};

EnergyReport energy_report(const FieldMap& field, const KernelTable& kernel, std::span<const BallSpec> balls = {});
nlohmann::json to_json(const EnergyReport& report, const KernelTable& kernel);
nlohmann::json to_json(const LocalizedEnergy& e);

/// Weights h^n / (1 + |x_j - x0|^{n+sp}) of the tail space.
std::vector<double> tail_space_weights(const Grid& grid, const FractionalParams& params, const Point& x0);

/// sum_j h^n |u_j|^{p-1} / (1 + |x_j - x0|^{n+sp}).
double tail_integral(const FieldMap& field, const FractionalParams& params, const Point& x0);

/// 2 sum_{j != i} w(i,j) |u_i-u_j|^{p-2}(u_i-u_j) / h^n. Requires p >= 2.
Eigen::VectorXd fractional_p_laplacian(const FieldMap& field, const KernelTable& kernel, std::size_t i);

/// The operator at every cell, flat with the component index fastest.
std::vector<double> fractional_p_laplacian_all(const FieldMap& field, const KernelTable& kernel);

/// sum_{i<j} 2 w(i,j) |u_i-u_j|^{p-2}(u_i-u_j).(phi_i-phi_j). The test field
/// must vanish on frozen cells of `field`.
double weak_residual(const FieldMap& field, const KernelTable& kernel, const FieldMap& test);

/// r^{-lam} sum_{i in ball} h^n |u_i - mean_ball(u)|^p. Empty balls give 0.
double campanato_quotient(const FieldMap& field, const BallSpec& ball, double lam, double p);

}  // namespace fraclab
