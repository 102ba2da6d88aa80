#include "fraclab/comparison.hpp"

#include <cmath>
#include <limits>

#include "fraclab/errors.hpp"
#include "fraclab/power_law.hpp"
#include "fraclab/summation.hpp"
#include "pair_math.hpp"

namespace fraclab {

namespace {

double ball_energy(const FieldMap& f, const KernelTable& kernel, const std::vector<std::size_t>& cells) {
    const PowerLaw pw(kernel.params().p());
    const int N = f.components();
    const double* u = f.values().data();
    CompensatedSum acc;
    for (std::size_t i : cells) {
        const double* ui = u + i * N;
        double row = 0.0;
        for_each_partner(kernel, i, [&](std::size_t j, double w) {
            if (w != 0.0) row += w * pw.pow_p(detail::squared_difference(ui, u + j * N, N));
        });
        acc.add(row);
    }
    return acc.value();
}

Eigen::VectorXd random_shift(int N, double radius, Rng& rng) {
    Eigen::VectorXd a(N);
    for (;;) {
        for (int c = 0; c < N; ++c) a[c] = rng.uniform(-radius, radius);
        if (a.norm() < radius) return a;
    }
}

}  // namespace

ComparisonResult comparison_map(const FieldMap& field, const KernelTable& kernel, const ManifoldSpec& manifold,
                                const BallSpec& ball, const BallSpec& mean_ball, const ComparisonOptions& options,
                                Rng& rng) {
    if (!field.grid().same_lattice(kernel.grid())) throw ValidationError("field and kernel live on different grids");
    Violations v;
    v.check(ball.radius > 0.0, "ball radius must be > 0");
    v.check(mean_ball.radius > 0.0, "mean ball radius must be > 0");
    v.check(options.shift_samples >= 1, "shift_samples must be >= 1");
    v.check(options.retry_cap >= 1, "retry_cap must be >= 1");
    v.check(options.shift_radius >= 0.0, "shift_radius must be >= 0");
    v.check(manifold.ambient_dim() == field.components(), "manifold dimension differs from the field components");
    const double r_in = options.inner_radius > 0.0 ? options.inner_radius : 0.5 * ball.radius;
    v.check(r_in < ball.radius, "inner radius must be below the ball radius");
    v.throw_if_any();

    const Grid& g = field.grid();
    const int N = field.components();
    const int n = g.dim();
    const auto inside = ball_indices(g, ball);
    const auto mean_cells = ball_indices(g, mean_ball);
    if (mean_cells.empty()) throw ValidationError("mean ball contains no cells");

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(N);
    {
        std::vector<CompensatedSum> acc(N);
        for (std::size_t i : mean_cells) {
            for (int c = 0; c < N; ++c) acc[c].add(field.value(i)[c]);
        }
        for (int c = 0; c < N; ++c) mean[c] = acc[c].value() / static_cast<double>(mean_cells.size());
    }

    FieldMap vmap = field;
    for (std::size_t i : inside) {
        if (field.frozen(i)) continue;
        const double r = distance(g.center(i), ball.center, n);
        const double eta = r <= r_in ? 1.0 : (ball.radius - r) / (ball.radius - r_in);
        auto vi = vmap.value(i);
        for (int c = 0; c < N; ++c) vi[c] = eta * mean[c] + (1.0 - eta) * vi[c];
    }

    ComparisonResult best{field, vmap, Eigen::VectorXd::Zero(N)};
    best.energy_v = ball_energy(vmap, kernel, inside);
    double best_energy = std::numeric_limits<double>::infinity();
    bool found = false;

    for (int round = 0; round < options.retry_cap && !found; ++round) {
        ++best.rounds;
        for (int k = 0; k < options.shift_samples; ++k) {
            const Eigen::VectorXd a = random_shift(N, options.shift_radius, rng);
            ++best.samples_tried;
            FieldMap w = field;
            bool hit = false;
            for (std::size_t i : inside) {
                if (field.frozen(i)) continue;
                const Eigen::VectorXd vi = Eigen::Map<const Eigen::VectorXd>(vmap.value(i).data(), N);
                try {
                    Eigen::VectorXd z = manifold.retraction_shifted(vi, a);
                    if (manifold.has_retraction_inverse()) z = manifold.retraction_inverse(z, a);
                    for (int c = 0; c < N; ++c) w.value(i)[c] = z[c];
                } catch (const DegenerateInput&) {
                    hit = true;
                    break;
                }
            }
            if (hit) {
                ++best.singular_hits;
                continue;
            }
            found = true;
            const double e = ball_energy(w, kernel, inside);
            if (e < best_energy) {
                best_energy = e;
                best.field = std::move(w);
                best.shift = a;
            }
        }
    }
    if (!found) {
        throw DegenerateInput("comparison_map: every sampled shift hit the retraction singular set after " +
                              std::to_string(best.rounds) + " rounds");
    }
    best.energy_w = best_energy;
    if (best.energy_v > 0.0) {
        best.c_meas = best.energy_w / best.energy_v;
    } else {
        best.c_meas_defined = best.energy_w == 0.0;
        best.c_meas = best.c_meas_defined ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return best;
}

nlohmann::json to_json(const ComparisonResult& r) {
    nlohmann::json j;
    j["shift"] = std::vector<double>(r.shift.data(), r.shift.data() + r.shift.size());
    j["energy_w"] = r.energy_w;
    j["energy_v"] = r.energy_v;
    j["c_meas"] = r.c_meas_defined ? nlohmann::json(r.c_meas) : nlohmann::json(nullptr);
    j["samples_tried"] = r.samples_tried;
    j["singular_hits"] = r.singular_hits;
    j["rounds"] = r.rounds;
    return j;
}

}  // namespace fraclab
