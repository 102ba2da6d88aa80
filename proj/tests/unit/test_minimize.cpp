#include <cmath>

#include "approx.hpp"
#include "doctest.h"
#include "fraclab/energy.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/minimize.hpp"
#include "fraclab/presets.hpp"
#include "oracles.hpp"

using namespace fraclab;
namespace ft = fraclab::testing;

namespace {

Box cube(int n, double lo, double hi) {
    Box b;
    b.dim = n;
    for (int d = 0; d < n; ++d) {
        b.lo[d] = lo;
        b.hi[d] = hi;
    }
    return b;
}

FieldMap bump_field(const Grid& g, const ManifoldSpec& m, double amplitude, double width, Point center = {}) {
    PresetSpec spec;
    spec.name = "smooth-bump";
    spec.amplitude = amplitude;
    spec.width = width;
    spec.center = center;
    return make_preset(g, m, spec);
}

}  // namespace

TEST_SUITE("minimize") {

TEST_CASE("option validation") {
    MinimizeOptions o;
    CHECK_NOTHROW(validate(o));
    o.backtrack = 1.0;
    o.armijo = 0.0;
    o.grad_tol = -1.0;
    try {
        validate(o);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.violations().size() == 3);
    }
}

TEST_CASE("constant data needs no iterations") {
    const FractionalParams params(0.5, 2.5, 2, 3);
    const Grid g = build_grid(params, cube(2, -1, 1), 0.25, 0.5);
    const KernelTable k(g, params);
    const auto m = ManifoldSpec::sphere(3);
    FieldMap f(g, 3);
    for (std::size_t i = 0; i < g.size(); ++i) f.set_value(i, std::vector<double>{0.0, 0.0, 1.0});
    const auto grad = energy_gradient(f, k, f.free_cells());
    for (double x : grad) CHECK(x == 0.0);
    const auto r = minimize(f, k, m, {});
    CHECK(r.iterations == 0);
    CHECK(r.converged);
    CHECK(r.energy_history.back() == 0.0);
    CHECK(r.field.identical(f));
    CHECK(tangential_residual(f, k, m) == 0.0);
}

TEST_CASE("unconstrained quadratic case matches the dense solve") {
    const FractionalParams params(0.5, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 16, 0.5);
    const KernelTable k(g, params);
    const auto m = ManifoldSpec::euclidean(2);
    FieldMap f = bump_field(g, m, 1.0, 0.7, {0.8, 0, 0});
    for (std::size_t i : g.interior_indices()) f.set_value(i, std::vector<double>{0.0, 0.0});
    MinimizeOptions o;
    o.grad_tol = 1e-11;
    o.max_iters = 20000;
    const auto r = minimize(f, k, m, o);
    INFO(r.stop_reason, " ", r.iterations, " ", r.projected_grad_norm);
    REQUIRE(r.converged);
    FieldMap oracle(f);
    oracle.values() = ft::dense_quadratic_minimizer(f, k);
    const double e_oracle = static_cast<double>(ft::naive_total(oracle, k));
    CHECK(std::abs(r.energy_history.back() - e_oracle) <= 1e-8 * e_oracle);

    const auto res = tangential_residual_report(r.field, k, m);
    double full = 0.0;
    for (std::size_t i : r.field.free_cells()) full = std::max(full, fractional_p_laplacian(r.field, k, i).norm());
    CHECK(res.max == Rel(full).epsilon(1e-12));
    CHECK(res.max <= o.grad_tol / (params.p() * g.cell_volume()));
}

TEST_CASE("descent invariants on the sphere") {
    const FractionalParams params(0.4, 2.0, 1, 3);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 16, 0.5);
    const KernelTable k(g, params);
    const auto m = ManifoldSpec::sphere(3);
    FieldMap f = bump_field(g, m, 1.5, 1.0, {0.5, 0, 0});
    Rng rng(12);
    for (std::size_t i : g.interior_indices()) {
        std::vector<double> v{rng.normal(), rng.normal(), rng.normal()};
        m.project_inplace(v);
        f.set_value(i, v);
    }
    MinimizeOptions o;
    o.grad_tol = 1e-9;
    const auto r = minimize(f, k, m, o);
    INFO(r.stop_reason, " ", r.iterations, " ", r.projected_grad_norm);
    CHECK(r.converged);
    for (std::size_t t = 1; t < r.energy_history.size(); ++t) CHECK(r.energy_history[t] <= r.energy_history[t - 1]);
    CHECK(r.max_constraint_violation <= 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!f.frozen(i)) continue;
        for (int c = 0; c < 3; ++c) CHECK(r.field.value(i)[c] == f.value(i)[c]);
    }
    CHECK(r.energy_history.back() == Rel(grid_energy(r.field, k)).epsilon(1e-12));
    const auto spot = minimality_spot_check(r.field, k, m, 100, 1e-2, 1e-8, 99);
    CHECK(spot.passed);
    CHECK(spot.trials == 100);
}

TEST_CASE("restarts are deterministic and pick the lowest energy") {
    const FractionalParams params(0.4, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 8, 0.5);
    const KernelTable k(g, params);
    const auto m = ManifoldSpec::sphere(2);
    const FieldMap f = bump_field(g, m, 2.0, 0.8);
    MinimizeOptions o;
    o.restarts = 3;
    o.restart_noise = 0.5;
    o.seed = 17;
    o.grad_tol = 1e-9;
    const auto a = minimize(f, k, m, o);
    const auto b = minimize(f, k, m, o);
    CHECK(a.field.identical(b.field));
    CHECK(a.energy_history == b.energy_history);
    REQUIRE(a.runs.size() == 4);
    for (const auto& run : a.runs) {
        CHECK(a.energy_history.back() <= run.energy);
        CHECK(run.seed == o.seed + static_cast<std::uint64_t>(run.index));
    }
    for (const auto& run : a.runs) {
        if (run.energy == a.energy_history.back()) {
            CHECK(run.index == a.winning_restart);
            break;
        }
    }
}

TEST_CASE("degree-one data concentrates energy at the origin") {
    const FractionalParams params(0.5, 2.5, 2, 2);
    const Grid g = build_grid(params, cube(2, -1, 1), 1.0 / 8, 0.5);
    const KernelTable k(g, params);
    const auto m = ManifoldSpec::sphere(2);
    PresetSpec radial;
    radial.name = "radial-degree-1";
    const FieldMap f = make_preset(g, m, radial);
    MinimizeOptions o;
    o.grad_tol = 1e-7;
    const auto r = minimize(f, k, m, o);
    CHECK(std::isfinite(r.energy_history.back()));
    const auto rows = row_energies(r.field, k);
    std::size_t best = g.interior_indices().front();
    for (std::size_t i : g.interior_indices()) {
        if (rows[i] > rows[best]) best = i;
    }
    CHECK(std::hypot(g.center(best)[0], g.center(best)[1]) <= 2.0 * g.h());
}

TEST_CASE("rejects inputs off the target") {
    const FractionalParams params(0.4, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 0.25, 0.5);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    CHECK_THROWS_AS(minimize(f, k, ManifoldSpec::sphere(2), {}), ValidationError);
    CHECK_THROWS_AS(minimize(f, k, ManifoldSpec::sphere(3), {}), ValidationError);
}

TEST_CASE("result serializes") {
    const FractionalParams params(0.4, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 0.25, 0.5);
    const KernelTable k(g, params);
    const auto m = ManifoldSpec::sphere(2);
    const auto r = minimize(bump_field(g, m, 1.0, 0.5), k, m, {});
    const auto j = to_json(r, {});
    CHECK(j.contains("energy_history"));
    CHECK(j.contains("converged"));
    CHECK(j.contains("projected_grad_norm"));
}

}  // TEST_SUITE
