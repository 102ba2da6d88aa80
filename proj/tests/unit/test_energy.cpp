#include <cmath>
#include <numeric>

#include <Eigen/Dense>

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

std::vector<std::size_t> all_cells(const Grid& g) {
    std::vector<std::size_t> v(g.size());
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

void fill_constant(FieldMap& f, std::initializer_list<double> c) {
    for (std::size_t i = 0; i < f.size(); ++i) f.set_value(i, std::vector<double>(c));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("constant field has zero energy everywhere") {
    const FractionalParams params(0.5, 2.5, 2, 2);
    const Grid g = build_grid(params, cube(2, -1, 1), 0.25, 0.5);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    fill_constant(f, {0.6, 0.8});
    const auto all = all_cells(g);
    CHECK(gagliardo_energy(f, k, all, all) == 0.0);
    const BallSpec ball{{0.0, 0.0, 0.0}, 0.5};
    CHECK(localized_energy(f, k, ball) == 0.0);
    CHECK(normalized_energy(f, k, ball) == 0.0);
    const auto rep = energy_report(f, k);
    CHECK(rep.total == 0.0);
    CHECK(rep.tail_mode == "constant-exterior");
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(fractional_p_laplacian(f, k, i).norm() == 0.0);
    CHECK(campanato_quotient(f, ball, 2.0, 2.5) == 0.0);
}

TEST_CASE("two-cell hand sum counts both orderings") {
    const FractionalParams params(0.5, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, 0, 1), 0.25, 0.25);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    const std::size_t i = 2, j = 3;
    f.set_value(j, std::vector<double>{1.0, 0.0});
    const std::vector<std::size_t> pair{i, j};
    CHECK(gagliardo_energy(f, k, pair, pair) == Rel(2.0 * k.weight(i, j)).epsilon(1e-15));
}

TEST_CASE("random fields match the naive double loop") {
    Rng rng(7);
    const FractionalParams params(0.3, 2.5, 1, 3);
    const Grid g = build_grid(params, cube(1, 0, 1), 0.25, 0.25);
    REQUIRE(g.size() == 6);
    const KernelTable k(g, params);
    FieldMap f(g, 3);
    ft::fill_random(f, rng);
    const auto all = all_cells(g);
    CHECK(rel(gagliardo_energy(f, k, all, all), static_cast<double>(ft::naive_total(f, k))) < 1e-14);

    const FractionalParams p2(0.7, 3.0, 2, 2);
    const Grid g2 = build_grid(p2, cube(2, -0.5, 0.5), 0.25, 0.25);
    const KernelTable k2(g2, p2);
    FieldMap f2(g2, 2);
    ft::fill_random(f2, rng);
    const std::vector<std::size_t> a{1, 5, 7, 20}, b{0, 5, 9, 30, 31};
    CHECK(rel(gagliardo_energy(f2, k2, a, b), static_cast<double>(ft::naive_energy(f2, k2, a, b))) < 1e-14);
    CHECK(gagliardo_energy(f2, k2, a, b) == Rel(gagliardo_energy(f2, k2, b, a)).epsilon(1e-14));
    CHECK(gagliardo_energy(f2, k2, {}, b) == 0.0);
    CHECK(rel(grid_energy(f2, k2), static_cast<double>(ft::naive_total(f2, k2))) < 1e-13);
}

TEST_CASE("localized energy") {
    Rng rng(3);
    const FractionalParams params(0.5, 2.0, 2, 2);
    const Grid g = build_grid(params, cube(2, -1, 1), 0.25, 0.5);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    ft::fill_random(f, rng);
    const BallSpec ball{{0.1, 0.0, 0.0}, 0.6};
    const auto in = ball_indices(g, ball);
    const auto all = all_cells(g);
    const auto rep = localized_energy_report(f, k, ball);
    CHECK(rep.tail_mode == "dropped");
    CHECK(rep.tail == 0.0);
    CHECK(rep.dropped_bound > 0.0);
    CHECK(rel(rep.value, static_cast<double>(ft::naive_energy(f, k, in, all))) < 1e-13);
    CHECK(rep.cells == in.size());

    const auto whole = localized_energy_report(f, k, {{0.0, 0.0, 0.0}, 100.0});
    const auto total = energy_report(f, k);
    CHECK(rel(whole.grid_part, total.grid_total) < 1e-13);
    CHECK(!whole.warnings.empty());

    const auto small = localized_energy_report(f, k, {{0.0, 0.0, 0.0}, 0.3});
    CHECK(small.under_resolved);
    const auto norm = normalized_energy_report(f, k, ball);
    CHECK(norm.value == Rel(std::pow(0.6, params.sp() - 2.0) * rep.value).epsilon(1e-14));
}

TEST_CASE("constant exterior adds the analytic tail") {
    Rng rng(5);
    const FractionalParams params(0.5, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 0.125, 0.5);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    fill_constant(f, {1.0, 0.0});
    for (std::size_t i : g.interior_indices()) f.set_value(i, std::vector<double>{rng.uniform(), rng.uniform()});
    const auto rep = energy_report(f, k);
    REQUIRE(rep.tail_mode == "constant-exterior");
    long double tail = 0.0L;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double dx = f.value(i)[0] - 1.0, dy = f.value(i)[1];
        tail += (dx * dx + dy * dy) * k.tail_weight(i);
    }
    CHECK(rel(rep.tail, static_cast<double>(tail)) < 1e-13);
    CHECK(rep.total == Rel(rep.grid_total + 2.0 * rep.tail).epsilon(1e-15));
    const auto whole = localized_energy_report(f, k, {{0.0, 0.0, 0.0}, 100.0});
    CHECK(whole.value == Rel(rep.grid_total + rep.tail).epsilon(1e-14));
}

TEST_CASE("normalized energy is invariant under rescaling") {
    for (int n = 1; n <= 2; ++n) {
        const FractionalParams params(0.5, 2.5, n, 2);
        const ManifoldSpec sphere = ManifoldSpec::sphere(2);
        PresetSpec bump;
        bump.name = "smooth-bump";
        bump.amplitude = 1.0;
        bump.width = 0.5;
        bump.center = {0.2, 0.1, 0.0};
        const double h = n == 1 ? 1.0 / 32 : 1.0 / 8;
        const double lambda = 2.0;
        const Grid g1 = build_grid(params, cube(n, -1, 1), h, 1.0);
        const Grid g2 = build_grid(params, cube(n, -1 / lambda, 1 / lambda), h / lambda, 1.0 / lambda);
        FieldMap u = make_preset(g1, sphere, bump);
        FieldMap v(g2, 2);
        REQUIRE(g1.size() == g2.size());
        for (std::size_t i = 0; i < g1.size(); ++i) v.set_value(i, u.value(i));
        const KernelTable k1(g1, params), k2(g2, params);
        const double R = 0.5;
        const double a = normalized_energy(u, k1, {{0.0, 0.0, 0.0}, R});
        const double b = normalized_energy(v, k2, {{0.0, 0.0, 0.0}, R / lambda});
        CHECK(a > 0.0);
        CHECK(rel(b, a) < 0.02);
        const double ratio = energy_report(v, k2).total / energy_report(u, k1).total;
        CHECK(rel(ratio, std::pow(lambda, params.sp() - n)) < 0.02);
    }
}

TEST_CASE("radial unit field has scale-invariant normalized energy") {
    const FractionalParams params(0.5, 2.5, 2, 2);
    const ManifoldSpec sphere = ManifoldSpec::sphere(2);
    PresetSpec radial;
    radial.name = "radial-degree-1";
    for (double h : {1.0 / 16, 1.0 / 32}) {
        const Grid g = build_grid(params, cube(2, -1, 1), h, 0.5);
        const KernelTable k(g, params);
        const FieldMap f = make_preset(g, sphere, radial);
        const auto rows = row_energies(f, k);
        const double e1 = normalized_energy_report(f, k, rows, {{0.0, 0.0, 0.0}, 0.25}).value;
        const double e2 = normalized_energy_report(f, k, rows, {{0.0, 0.0, 0.0}, 0.5}).value;
        CHECK(e1 > 0.0);
        CHECK(e2 / e1 >= 0.8);
        CHECK(e2 / e1 <= 1.25);
    }
}

TEST_CASE("tail integral") {
    const FractionalParams params(0.5, 2.5, 2, 2);
    const Grid g = build_grid(params, cube(2, -1, 1), 0.25, 0.5);
    FieldMap f(g, 2);
    const Point x0{0.1, 0.2, 0.0};
    CHECK(tail_integral(f, params, x0) == 0.0);
    fill_constant(f, {0.0, -2.0});
    const auto w = tail_space_weights(g, params, x0);
    long double sum_w = 0.0L;
    for (double x : w) sum_w += x;
    CHECK(tail_integral(f, params, x0) == Rel(std::pow(2.0, 1.5) * static_cast<double>(sum_w)).epsilon(1e-13));
    Rng rng(9);
    ft::fill_random(f, rng, 3.0);
    long double naive = 0.0L;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double r = distance(g.center(j), x0, 2);
        naive += g.cell_volume() * std::pow(std::hypot(f.value(j)[0], f.value(j)[1]), 1.5) / (1.0 + std::pow(r, 2.0 + 1.25));
    }
    CHECK(tail_integral(f, params, x0) == Rel(static_cast<double>(naive)).epsilon(1e-13));
}

TEST_CASE("operator for p = 2 equals the dense linear operator") {
    Rng rng(1);
    const FractionalParams params(0.4, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, 0, 1), 1.0 / 16, 0.25);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    ft::fill_random(f, rng);
    const auto M = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
        for (Eigen::Index j = 0; j < M; ++j) {
            if (i == j) continue;
            const double w = k.weight(i, j);
            L(i, i) += 2.0 * w / g.cell_volume();
            L(i, j) -= 2.0 * w / g.cell_volume();
        }
    }
    Eigen::MatrixXd U(M, 2);
    for (Eigen::Index i = 0; i < M; ++i) U.row(i) << f.value(i)[0], f.value(i)[1];
    const Eigen::MatrixXd LU = L * U;
    const auto all = fractional_p_laplacian_all(f, k);
    for (Eigen::Index i = 0; i < M; ++i) {
        const Eigen::VectorXd op = fractional_p_laplacian(f, k, i);
        CHECK((op - LU.row(i).transpose()).norm() <= 1e-12 * LU.norm());
        CHECK(all[2 * i] == op[0]);
        CHECK(all[2 * i + 1] == op[1]);
    }
}

TEST_CASE("operator for p = 3 on a two-valued field") {
    const FractionalParams params(0.5, 3.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 0.125, 0.25);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        f.set_value(i, g.center(i)[0] < 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0});
    }
    for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{12}}) {
        double cross = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if ((g.center(j)[0] < 0) != (g.center(i)[0] < 0)) cross += k.weight(i, j);
        }
        const double sign = g.center(i)[0] < 0 ? 1.0 : -1.0;
        const double expect = 2.0 * std::sqrt(2.0) * cross / g.cell_volume();
        const Eigen::VectorXd op = fractional_p_laplacian(f, k, i);
        CHECK(op[0] == Rel(sign * expect).epsilon(1e-13));
        CHECK(op[1] == Rel(-sign * expect).epsilon(1e-13));
    }
    const FractionalParams low(0.5, 1.5, 1, 2);
    const KernelTable klow(g, low);
    CHECK_THROWS_AS(fractional_p_laplacian(f, klow, 0), ValidationError);
}

TEST_CASE("weak residual") {
    Rng rng(21);
    const FractionalParams params(0.5, 2.5, 2, 2);
    const Grid g = build_grid(params, cube(2, -0.5, 0.5), 0.125, 0.25);
    const KernelTable k(g, params);
    FieldMap u(g, 2), phi(g, 2);
    ft::fill_random(u, rng);
    CHECK(weak_residual(u, k, phi) == 0.0);
    for (std::size_t i : g.interior_indices()) phi.set_value(i, std::vector<double>{rng.uniform(-1, 1), rng.uniform(-1, 1)});

    const auto op = fractional_p_laplacian_all(u, k);
    long double pairing = 0.0L;
    for (std::size_t c = 0; c < op.size(); ++c) pairing += static_cast<long double>(op[c]) * phi.values()[c] * g.cell_volume();
    const double wr = weak_residual(u, k, phi);
    CHECK(std::abs(wr - static_cast<double>(pairing)) <= 1e-10 * std::max(1.0, std::abs(wr)));

    FieldMap phi2(phi);
    for (double& x : phi2.values()) x *= -2.5;
    CHECK(weak_residual(u, k, phi2) == Rel(-2.5 * wr).epsilon(1e-12));

    FieldMap c(g, 2);
    fill_constant(c, {0.3, -0.4});
    CHECK(weak_residual(c, k, phi) == 0.0);

    FieldMap bad(phi);
    bad.set_value(0, std::vector<double>{1.0, 0.0});
    CHECK_THROWS_AS(weak_residual(u, k, bad), ValidationError);
}

TEST_CASE("weak residual is symmetric for p = 2") {
    Rng rng(22);
    const FractionalParams params(0.5, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, 0, 1), 1.0 / 16, 0.25);
    const KernelTable k(g, params);
    FieldMap u(g, 2), phi(g, 2);
    for (std::size_t i : g.interior_indices()) {
        u.set_value(i, std::vector<double>{rng.uniform(-1, 1), rng.uniform(-1, 1)});
        phi.set_value(i, std::vector<double>{rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    CHECK(weak_residual(u, k, phi) == Rel(weak_residual(phi, k, u)).epsilon(1e-13));
}

TEST_CASE("campanato quotient") {
    const FractionalParams params(0.5, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 256, 0.25);
    FieldMap f(g, 2);
    for (std::size_t i = 0; i < g.size(); ++i) f.set_value(i, std::vector<double>{g.center(i)[0], 0.0});
    const double q1 = campanato_quotient(f, {{0.0, 0.0, 0.0}, 0.25}, 3.0, 2.0);
    const double q2 = campanato_quotient(f, {{0.0, 0.0, 0.0}, 0.5}, 3.0, 2.0);
    CHECK(q2 / q1 >= 0.9);
    CHECK(q2 / q1 <= 1.1);
    CHECK(q1 == Rel(2.0 / 3.0).epsilon(0.01));

    Rng rng(4);
    ft::fill_random(f, rng);
    const BallSpec ball{{0.1, 0.0, 0.0}, 0.3};
    const auto in = ball_indices(g, ball);
    long double m0 = 0, m1 = 0;
    for (std::size_t i : in) {
        m0 += f.value(i)[0];
        m1 += f.value(i)[1];
    }
    m0 /= in.size();
    m1 /= in.size();
    long double sum = 0;
    for (std::size_t i : in) {
        const long double a = f.value(i)[0] - m0, b = f.value(i)[1] - m1;
        sum += g.cell_volume() * std::pow(a * a + b * b, 1.25L);
    }
    const double expect = static_cast<double>(sum) * std::pow(0.3, -1.7);
    CHECK(campanato_quotient(f, ball, 1.7, 2.5) == Rel(expect).epsilon(1e-12));
    CHECK(campanato_quotient(f, {{5.0, 0.0, 0.0}, 0.01}, 1.0, 2.0) == 0.0);
}

TEST_CASE("gradient matches central differences") {
    Rng rng(31);
    for (double p : {2.0, 2.5, 3.0}) {
        const FractionalParams params(0.4, p, 1, 2);
        const Grid g = build_grid(params, cube(1, 0, 1), 1.0 / 32, 0.125);
        const KernelTable k(g, params);
        FieldMap f(g, 2);
        ft::fill_random(f, rng);
        const auto free = f.free_cells();
        const auto grad = energy_gradient(f, k, free);
        const double step = 1e-5;
        double worst = 0.0;
        for (std::size_t t = 0; t < 8; ++t) {
            const std::size_t i = free[(t * 7) % free.size()];
            double err2 = 0.0, norm2 = 0.0;
            for (int c = 0; c < 2; ++c) {
                FieldMap fp(f), fm(f);
                fp.value(i)[c] += step;
                fm.value(i)[c] -= step;
                const long double fd = (ft::naive_total(fp, k) - ft::naive_total(fm, k)) / (2.0L * step);
                const double gi = grad[2 * i + c];
                err2 += std::pow(gi - static_cast<double>(fd), 2);
                norm2 += gi * gi;
            }
            worst = std::max(worst, std::sqrt(err2 / norm2));
        }
        CHECK(worst < 1e-6);
        // p times the operator density times the cell volume.
        for (std::size_t i : free) {
            const Eigen::VectorXd op = fractional_p_laplacian(f, k, i);
            CHECK(grad[2 * i] == Rel(p * op[0] * g.cell_volume()).epsilon(1e-12));
        }
    }
}

TEST_CASE("report serializes") {
    const FractionalParams params(0.5, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, 0, 1), 0.25, 0.25);
    const KernelTable k(g, params);
    FieldMap f(g, 2);
    const std::vector<BallSpec> balls{{{0.5, 0.0, 0.0}, 0.3}};
    const auto rep = energy_report(f, k, balls);
    const auto j = to_json(rep, k);
    CHECK(j.contains("total"));
    CHECK(j["localized"].size() == 1);
    CHECK(j["normalized"].size() == 1);
}

}  // TEST_SUITE
