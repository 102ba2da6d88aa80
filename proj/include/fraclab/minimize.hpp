#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fraclab/field.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/manifold.hpp"
#include "json.hpp"

namespace fraclab {

struct MinimizeOptions {
    int max_iters = 2000;
    /// Initial trial step; 0 selects h^{sp}/p.
    double step_init = 0.0;
    double backtrack = 0.5;  // beta in (0,1)
    double armijo = 1e-4;    // sufficient-decrease c in (0,1)
    int max_backtracks = 60;
    /// Stop when the l2 norm of the tangential gradient over free cells drops below this.
    double grad_tol = 1e-8;
    /// Extra seeded initializations beyond the given one.
    int restarts = 0;
    double restart_noise = 0.1;
    std::uint64_t seed = 0;
    /// Barzilai-Borwein trial steps after the first iteration.
    bool barzilai_borwein = true;
};

/// Collects every violated precondition.
void validate(const MinimizeOptions& opts);

struct RestartSummary {
    int index = 0;
    std::uint64_t seed = 0;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
    double projected_grad_norm = 0.0;
    std::string stop_reason;
};

struct MinimizerResult {
    explicit MinimizerResult(FieldMap f) : field(std::move(f)) {}

    FieldMap field;
    std::vector<double> energy_history;  // of the winning run, nonincreasing
    double projected_grad_norm = 0.0;
    bool converged = false;
    int restarts_used = 0;
    int winning_restart = 0;
    std::uint64_t winning_seed = 0;
    int iterations = 0;
    std::string stop_reason;
    double step_init = 0.0;
    double tangential_residual = 0.0;
    double max_constraint_violation = 0.0;
    std::vector<RestartSummary> runs;
};

/// dE/du_i = 2p sum_j w(i,j)|u_i-u_j|^{p-2}(u_i-u_j) for i in free_cells,
/// where E sums over all ordered pairs. Flat, component fastest, zero
/// outside free_cells.
std::vector<double> energy_gradient(const FieldMap& field, const KernelTable& kernel,
                                    std::span<const std::size_t> free_cells);

/// The objective minimized: sum over all ordered pairs of grid cells.
double grid_energy(const FieldMap& field, const KernelTable& kernel);

/// Projected gradient descent with Armijo backtracking; best over restarts.
MinimizerResult minimize(const FieldMap& initial, const KernelTable& kernel, const ManifoldSpec& manifold,
                         const MinimizeOptions& opts);

struct TangentialResidual {
    double max = 0.0;  // max over free cells of |Pi(u_i) op_i|
    std::vector<double> per_cell;  // indexed like the grid, 0 on frozen cells
};

TangentialResidual tangential_residual_report(const FieldMap& field, const KernelTable& kernel,
                                              const ManifoldSpec& manifold);
double tangential_residual(const FieldMap& field, const KernelTable& kernel, const ManifoldSpec& manifold);

struct SpotCheck {
    int trials = 0;
    double energy = 0.0;
    double max_decrease = 0.0;  // max over trials of E(u) - E(perturbed), may be negative
    double relative_max_decrease = 0.0;
    bool passed = false;  // max_decrease < tolerance * E
};

/// Random tangent perturbations of amplitude `amplitude` on free cells,
/// projected back to the target.
SpotCheck minimality_spot_check(const FieldMap& field, const KernelTable& kernel, const ManifoldSpec& manifold,
                                int trials, double amplitude, double tolerance, std::uint64_t seed);

nlohmann::json to_json(const MinimizerResult& r, const MinimizeOptions& opts);
nlohmann::json to_json(const SpotCheck& s);

}  // namespace fraclab
