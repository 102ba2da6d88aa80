#include "fraclab/energy.hpp"

#include <algorithm>
#include <cmath>

#include "fraclab/errors.hpp"
#include "fraclab/power_law.hpp"
#include "fraclab/summation.hpp"
#include "cell_mean.hpp"
#include "pair_math.hpp"

namespace fraclab {

namespace {

void require_match(const FieldMap& field, const KernelTable& kernel) {
    if (!field.grid().same_lattice(kernel.grid())) throw ValidationError("field and kernel live on different grids");
}

double row_energy(const FieldMap& field, const KernelTable& kernel, const PowerLaw& pw, std::size_t i) {
    const int N = field.components();
    const double* u = field.values().data();
    const double* ui = u + i * N;
    CompensatedSum acc;
    for_each_partner(kernel, i, [&](std::size_t j, double w) {
        if (w == 0.0) return;
        acc.add(w * pw.pow_p(detail::squared_difference(ui, u + j * N, N)));
    });
    return acc.value();
}

double vector_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double gagliardo_energy(const FieldMap& field, const KernelTable& kernel, std::span<const std::size_t> a,
                        std::span<const std::size_t> b) {
    require_match(field, kernel);
    const PowerLaw pw(kernel.params().p());
    const int N = field.components();
    const double* u = field.values().data();
    CompensatedSum acc;
    for (std::size_t i : a) {
        for (std::size_t j : b) {
            if (i == j) continue;
            acc.add(kernel.weight(i, j) * pw.pow_p(detail::squared_difference(u + i * N, u + j * N, N)));
        }
    }
    return acc.value();
}

std::vector<double> row_energies(const FieldMap& field, const KernelTable& kernel) {
    require_match(field, kernel);
    const PowerLaw pw(kernel.params().p());
    std::vector<double> rows(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) rows[i] = row_energy(field, kernel, pw, i);
    return rows;
}

std::optional<std::vector<double>> constant_exterior_value(const FieldMap& field) {
    const Grid& g = field.grid();
    std::optional<std::vector<double>> c;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_interior(i)) continue;
        const auto v = field.value(i);
        if (!c) {
            c = std::vector<double>(v.begin(), v.end());
        } else if (!std::equal(v.begin(), v.end(), c->begin())) {
            return std::nullopt;
        }
    }
    return c;
}

namespace {

struct TailModel {
    std::optional<std::vector<double>> constant;
    double exterior_bound = 0.0;  // max |u| over the collar
};

TailModel tail_model(const FieldMap& field) {
    TailModel m;
    m.constant = constant_exterior_value(field);
    const Grid& g = field.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.is_interior(i)) m.exterior_bound = std::max(m.exterior_bound, vector_norm(field.value(i)));
    }
    return m;
}

// Beyond-collar mass seen from cell i: exact for a constant exterior,
// otherwise a bound with |u - u_ext| <= |u| + max |u_collar|.
double tail_term(const FieldMap& field, const KernelTable& kernel, const TailModel& m, std::size_t i) {
    const double p = kernel.params().p();
    const auto v = field.value(i);
    if (m.constant) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < v.size(); ++c) d2 += (v[c] - (*m.constant)[c]) * (v[c] - (*m.constant)[c]);
        return PowerLaw(p).pow_p(d2) * kernel.tail_weight(i);
    }
    return std::pow(vector_norm(v) + m.exterior_bound, p) * kernel.tail_weight(i);
}

LocalizedEnergy localize(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                         const TailModel& m, const BallSpec& ball) {
    const Grid& g = field.grid();
    LocalizedEnergy e;
    e.ball = ball;
    const auto cells = ball_indices(g, ball);
    e.cells = cells.size();
    CompensatedSum grid_part;
    CompensatedSum tail;
    for (std::size_t i : cells) {
        grid_part.add(rows[i]);
        tail.add(tail_term(field, kernel, m, i));
    }
    e.grid_part = grid_part.value();
    if (m.constant) {
        e.tail_mode = "constant-exterior";
        e.tail = tail.value();
    } else {
        e.tail_mode = "dropped";
        e.dropped_bound = tail.value();
    }
    e.value = e.grid_part + e.tail;
    if (ball.radius < 2.0 * g.h()) {
        e.under_resolved = true;
        e.warnings.push_back("under-resolved: radius below 2h");
    }
    if (!g.interior_box().contains_ball(ball.center, ball.radius)) {
        e.warnings.push_back("ball extends into the collar");
    }
    if (!g.outer_box().contains_ball(ball.center, ball.radius)) {
        e.warnings.push_back("ball reaches the collar boundary; tail truncation dominates the error");
    }
    return e;
}

}  // namespace

LocalizedEnergy localized_energy_report(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                                        const BallSpec& ball) {
    require_match(field, kernel);
    if (!(ball.radius > 0.0)) throw ValidationError("ball radius must be > 0");
    if (rows.size() != field.size()) throw ValidationError("row energies do not match the field");
    return localize(field, kernel, rows, tail_model(field), ball);
}

LocalizedEnergy localized_energy_report(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball) {
    require_match(field, kernel);
    if (!(ball.radius > 0.0)) throw ValidationError("ball radius must be > 0");
    // Only rows inside the ball are needed.
    const PowerLaw pw(kernel.params().p());
    std::vector<double> rows(field.size(), 0.0);
    for (std::size_t i : ball_indices(field.grid(), ball)) rows[i] = row_energy(field, kernel, pw, i);
    return localize(field, kernel, rows, tail_model(field), ball);
}

double localized_energy(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball) {
    return localized_energy_report(field, kernel, ball).value;
}

namespace {

NormalizedEnergy normalize(const FractionalParams& params, LocalizedEnergy loc) {
    NormalizedEnergy n;
    n.value = std::pow(loc.ball.radius, params.sp_minus_n()) * loc.value;
    n.localized = std::move(loc);
    return n;
}

}  // namespace

NormalizedEnergy normalized_energy_report(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball) {
    return normalize(kernel.params(), localized_energy_report(field, kernel, ball));
}

NormalizedEnergy normalized_energy_report(const FieldMap& field, const KernelTable& kernel,
                                          std::span<const double> rows, const BallSpec& ball) {
    return normalize(kernel.params(), localized_energy_report(field, kernel, rows, ball));
}

double normalized_energy(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball) {
    return normalized_energy_report(field, kernel, ball).value;
}

EnergyReport energy_report(const FieldMap& field, const KernelTable& kernel, std::span<const BallSpec> balls) {
    require_match(field, kernel);
    const auto rows = row_energies(field, kernel);
    const TailModel m = tail_model(field);
    EnergyReport r;
    r.grid_total = compensated_sum(rows);
    CompensatedSum tail;
    for (std::size_t i = 0; i < field.size(); ++i) tail.add(tail_term(field, kernel, m, i));
    if (m.constant) {
        r.tail_mode = "constant-exterior";
        r.tail = tail.value();
    } else {
        r.tail_mode = "dropped";
        r.dropped_bound = 2.0 * tail.value();
        r.warnings.push_back("exterior data is not constant; beyond-collar mass dropped");
    }
    r.total = r.grid_total + 2.0 * r.tail;
    const auto& prm = kernel.params();
    r.self_interaction_order = std::pow(field.grid().h(), (1.0 - prm.s()) * prm.p());
    for (const auto& b : balls) {
        if (!(b.radius > 0.0)) throw ValidationError("ball radius must be > 0");
        auto loc = localize(field, kernel, rows, m, b);
        r.localized.push_back(loc);
        r.normalized.push_back(normalize(prm, std::move(loc)));
    }
    return r;
}

nlohmann::json to_json(const LocalizedEnergy& e) {
    nlohmann::json j;
    j["center"] = e.ball.center;
    j["radius"] = e.ball.radius;
    j["value"] = e.value;
    j["grid_part"] = e.grid_part;
    j["tail"] = e.tail;
    j["tail_mode"] = e.tail_mode;
    j["dropped_bound"] = e.dropped_bound;
    j["cells"] = e.cells;
    j["under_resolved"] = e.under_resolved;
    j["warnings"] = e.warnings;
    return j;
}

nlohmann::json to_json(const EnergyReport& report, const KernelTable& kernel) {
    const auto& prm = kernel.params();
    const Grid& g = kernel.grid();
    nlohmann::json j;
    j["params"] = {{"s", prm.s()}, {"p", prm.p()}, {"n", prm.n()}, {"N", prm.N()}};
    j["h"] = g.h();
    j["collar_width"] = g.collar_width();
    j["near_field_rule"] = to_string(kernel.rule());
    j["tail_mode"] = report.tail_mode;
    j["total"] = report.total;
    j["grid_total"] = report.grid_total;
    j["tail"] = report.tail;
    j["dropped_bound"] = report.dropped_bound;
    j["self_interaction_order"] = report.self_interaction_order;
    j["localized"] = nlohmann::json::array();
    for (const auto& e : report.localized) j["localized"].push_back(to_json(e));
    j["normalized"] = nlohmann::json::array();
    for (const auto& e : report.normalized) {
        j["normalized"].push_back({{"center", e.localized.ball.center}, {"radius", e.localized.ball.radius},
                                   {"value", e.value}, {"under_resolved", e.localized.under_resolved}});
    }
    j["warnings"] = report.warnings;
    return j;
}

std::vector<double> tail_space_weights(const Grid& grid, const FractionalParams& params, const Point& x0) {
    std::vector<double> w(grid.size());
    const double expo = params.kernel_exponent();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        w[j] = grid.cell_volume() / (1.0 + std::pow(distance(grid.center(j), x0, grid.dim()), expo));
    }
    return w;
}

double tail_integral(const FieldMap& field, const FractionalParams& params, const Point& x0) {
    const auto w = tail_space_weights(field.grid(), params, x0);
    CompensatedSum acc;
    for (std::size_t j = 0; j < field.size(); ++j) {
        const double a = vector_norm(field.value(j));
        if (a == 0.0) continue;
        acc.add(w[j] * std::pow(a, params.p() - 1.0));
    }
    return acc.value();
}

Eigen::VectorXd fractional_p_laplacian(const FieldMap& field, const KernelTable& kernel, std::size_t i) {
    require_match(field, kernel);
    kernel.params().require_operator_range("fractional_p_laplacian");
    const PowerLaw pw(kernel.params().p());
    const int N = field.components();
    const double* u = field.values().data();
    const double* ui = u + i * N;
    std::vector<CompensatedSum> acc(N);
    for_each_partner(kernel, i, [&](std::size_t j, double w) {
        if (w == 0.0) return;
        const double* uj = u + j * N;
        const double f = w * pw.pow_pm2(detail::squared_difference(ui, uj, N));
        for (int c = 0; c < N; ++c) acc[c].add(f * (ui[c] - uj[c]));
    });
    Eigen::VectorXd out(N);
    const double scale = 2.0 / field.grid().cell_volume();
    for (int c = 0; c < N; ++c) out[c] = scale * acc[c].value();
    return out;
}

std::vector<double> fractional_p_laplacian_all(const FieldMap& field, const KernelTable& kernel) {
    const int N = field.components();
    std::vector<double> out(field.size() * N);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const auto v = fractional_p_laplacian(field, kernel, i);
        for (int c = 0; c < N; ++c) out[i * N + c] = v[c];
    }
    return out;
}

double weak_residual(const FieldMap& field, const KernelTable& kernel, const FieldMap& test) {
    require_match(field, kernel);
    kernel.params().require_operator_range("weak_residual");
    if (!test.grid().same_lattice(field.grid()) || test.components() != field.components()) {
        throw ValidationError("test field must share the grid and component count of the field");
    }
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!field.frozen(i)) continue;
        for (double x : test.value(i)) {
            if (x != 0.0) throw ValidationError("test field must vanish on frozen cells (cell " + std::to_string(i) + ")");
        }
    }
    const PowerLaw pw(kernel.params().p());
    const int N = field.components();
    const double* u = field.values().data();
    const double* phi = test.values().data();
    CompensatedSum acc;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double* ui = u + i * N;
        const double* pi = phi + i * N;
        for_each_partner(kernel, i, [&](std::size_t j, double w) {
            if (j <= i || w == 0.0) return;
            const double* uj = u + j * N;
            const double* pj = phi + j * N;
            double dot = 0.0;
            for (int c = 0; c < N; ++c) dot += (ui[c] - uj[c]) * (pi[c] - pj[c]);
            if (dot == 0.0) return;
            acc.add(2.0 * w * pw.pow_pm2(detail::squared_difference(ui, uj, N)) * dot);
        });
    }
    return acc.value();
}

double campanato_quotient(const FieldMap& field, const BallSpec& ball, double lam, double p) {
    if (!(ball.radius > 0.0)) throw ValidationError("ball radius must be > 0");
    const auto cells = ball_indices(field.grid(), ball);
    if (cells.empty()) return 0.0;
    const int N = field.components();
    const std::vector<double> m = detail::cell_mean(field, cells);
    const PowerLaw pw(p);
    CompensatedSum acc;
    for (std::size_t i : cells) acc.add(pw.pow_p(detail::squared_difference(field.value(i).data(), m.data(), N)));
    return std::pow(ball.radius, -lam) * field.grid().cell_volume() * acc.value();
}

}  // namespace fraclab
