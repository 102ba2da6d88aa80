#include <algorithm>
#include <cmath>
#include <sstream>

#include "approx.hpp"
#include "doctest.h"
#include "fraclab/diagnostics.hpp"
#include "fraclab/energy.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/manifold.hpp"
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

FieldMap constant_field(const Grid& g) {
    FieldMap f(g, 2);
    for (std::size_t i = 0; i < g.size(); ++i) f.set_value(i, std::vector<double>{0.0, 1.0});
    return f;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("caccioppoli sweep") {
    const FractionalParams params(0.4, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 32, 0.5);
    const KernelTable k(g, params);
    const std::vector<double> rhos{0.05, 0.08, 0.1, 0.15};
    const auto flat = caccioppoli_sweep(constant_field(g), k, {0.0, 0.0, 0.0}, rhos);
    REQUIRE(flat.entries.size() == rhos.size());
    for (const auto& e : flat.entries) {
        CHECK(e.lhs == 0.0);
        CHECK(e.ratio == 0.0);
    }
    CHECK(flat.sup_ratio == 0.0);
    CHECK(count_lines(to_csv(flat)) == rhos.size() + 1);

    const FieldMap f = make_preset(g, ManifoldSpec::sphere(2), [] {
        PresetSpec s;
        s.name = "smooth-bump";
        s.width = 0.5;
        return s;
    }());
    const auto rep = caccioppoli_sweep(f, k, {0.0, 0.0, 0.0}, rhos);
    CHECK(rep.entries[0].under_resolved);
    CHECK(rep.resolved == rhos.size() - 1);
    CHECK(rep.all_finite);
    for (const auto& e : rep.entries) {
        CHECK(e.lhs >= 0.0);
        CHECK(e.rhs_core >= 0.0);
        CHECK(std::isfinite(e.ratio));
    }
    const std::vector<double> big{0.2};
    CHECK_THROWS_AS(caccioppoli_sweep(f, k, {0.0, 0.0, 0.0}, big), ValidationError);
}

TEST_CASE("decay probe") {
    const FractionalParams params(0.4, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 32, 0.5);
    const KernelTable k(g, params);
    const auto rep = decay_probe(constant_field(g), k, {0.0, 0.0, 0.0}, 0.5, 0.25, 1.0);
    CHECK(rep.vacuous);
    CHECK(rep.e_R == 0.0);
    CHECK(rep.e_thetaR == 0.0);
    try {
        decay_probe(constant_field(g), k, {0.0, 0.0, 0.0}, 0.5, 0.7, 1.0);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("(0, 1/2)") != std::string::npos);
    }
    CHECK_THROWS_AS(decay_probe(constant_field(g), k, {0.0, 0.0, 0.0}, 0.2, 0.25, 1.0), ValidationError);
    CHECK_THROWS_AS(decay_probe(constant_field(g), k, {0.0, 0.0, 0.0}, 0.5, 0.25, 0.0), ValidationError);
}

TEST_CASE("blow-up normalization") {
    const FractionalParams params(0.5, 2.5, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 32, 0.5);
    const KernelTable k(g, params);
    const BallSpec ball{{0.1, 0.0, 0.0}, 0.4};
    Rng rng(3);
    FieldMap f(g, 2);
    ft::fill_random_sphere(f, rng);
    const auto b = blowup_normalize(f, k, ball);
    CHECK(std::abs(localized_energy(b.field, k, ball) - 1.0) <= 1e-10);
    CHECK(std::abs(b.energy - 1.0) <= 1e-10);
    CHECK(b.mean_norm <= 1e-10);
    const auto again = blowup_normalize(b.field, k, ball);
    double diff = 0.0;
    for (std::size_t c = 0; c < f.values().size(); ++c) diff = std::max(diff, std::abs(again.field.values()[c] - b.field.values()[c]));
    CHECK(diff <= 1e-10);

    FieldMap affine(g, 2);
    for (std::size_t i = 0; i < g.size(); ++i) affine.set_value(i, std::vector<double>{2.0 * g.center(i)[0] + 1.0, -g.center(i)[0]});
    const auto a = blowup_normalize(affine, k, {{0.0, 0.0, 0.0}, 0.5});
    const auto in = ball_indices(g, {{0.0, 0.0, 0.0}, 0.5});
    long double m0 = 0.0L, m1 = 0.0L;
    for (std::size_t i : in) {
        m0 += a.field.value(i)[0];
        m1 += a.field.value(i)[1];
    }
    CHECK(std::abs(static_cast<double>(m0 / in.size())) <= 1e-10);
    CHECK(std::abs(static_cast<double>(m1 / in.size())) <= 1e-10);
    CHECK_THROWS_AS(blowup_normalize(constant_field(g), k, ball), DegenerateInput);
}

TEST_CASE("singular set detection") {
    const FractionalParams params(0.5, 2.5, 2, 2);
    const Grid g = build_grid(params, cube(2, -1, 1), 1.0 / 8, 0.5);
    const KernelTable k(g, params);
    const std::vector<double> scales{0.25, 0.375, 0.5};
    const auto none = singular_detect(constant_field(g), k, 1e-6, scales);
    CHECK(none.flagged.empty());
    CHECK(none.clusters.empty());

    PresetSpec radial;
    radial.name = "radial-degree-1";
    const FieldMap f = make_preset(g, ManifoldSpec::sphere(2), radial);
    const auto rows = row_energies(f, k);
    std::vector<std::size_t> prev;
    bool first = true;
    for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const auto rep = singular_detect(f, k, rows, eps, scales);
        if (!first) CHECK(std::includes(prev.begin(), prev.end(), rep.flagged.begin(), rep.flagged.end()));
        CHECK(rep.r_min == 0.25);
        CHECK(rep.r_max == 0.5);
        CHECK(rep.curves.size() == rep.flagged.size());
        prev = rep.flagged;
        first = false;
    }
    const std::vector<double> tiny{0.1};
    CHECK_THROWS_AS(singular_detect(f, k, 1.0, tiny), ValidationError);
    CHECK(default_eps1(f, k, rows, 0.5) > 0.0);
}

TEST_CASE("hoelder fit") {
    const FractionalParams params(0.5, 2.0, 1, 2);
    const Grid g = build_grid(params, cube(1, -1, 1), 1.0 / 512, 0.25);
    const std::vector<Point> centers{{0.0, 0.0, 0.0}};
    const std::vector<double> radii{0.02, 0.04, 0.08, 0.16, 0.32};

    FieldMap affine(g, 2);
    for (std::size_t i = 0; i < g.size(); ++i) affine.set_value(i, std::vector<double>{g.center(i)[0], 0.0});
    const auto a = holder_fit(affine, centers, 2.0, radii);
    CHECK(a.alpha_reported);
    CHECK(std::abs(a.alpha_hat - 1.0) <= 0.1);

    const auto c = holder_fit(constant_field(g), centers, 2.0, radii);
    CHECK(c.constant);
    CHECK(c.status == "infinitely-smooth");

    PresetSpec spec;
    spec.name = "holder-power";
    spec.alpha = 0.3;
    const FieldMap hp = make_preset(g, ManifoldSpec::sphere(2), spec);
    const auto r = holder_fit(hp, centers, 2.0, radii);
    CHECK(r.alpha_reported);
    CHECK(std::abs(r.alpha_hat - 0.3) <= 0.1);
    CHECK(count_lines(to_csv(r)) == r.radii.size() + 1);

    const std::vector<double> two{0.1, 0.2};
    CHECK_THROWS_AS(holder_fit(hp, centers, 2.0, two), ValidationError);
}

TEST_CASE("gehring probe") {
    const FractionalParams params(0.5, 2.5, 2, 2);
    const Grid g = build_grid(params, cube(2, -1, 1), 1.0 / 8, 0.5);
    const KernelTable k(g, params);
    const std::vector<BallSpec> balls{{{0.0, 0.0, 0.0}, 0.3}, {{0.25, -0.25, 0.0}, 0.4}};
    const std::vector<double> pbar{3.0, 4.0};
    const auto flat = gehring_probe(constant_field(g), k, balls, 1.5, pbar);
    for (const auto& b : flat.balls) CHECK(b.vacuous);
    for (double x : flat.gamma) CHECK(x == 0.0);

    PresetSpec bump;
    bump.name = "smooth-bump";
    bump.width = 0.6;
    const FieldMap f = make_preset(g, ManifoldSpec::sphere(2), bump);
    const auto rep = gehring_probe(f, k, balls, 1.5, pbar);
    CHECK(rep.power_mean_ok);
    for (const auto& b : rep.balls) {
        CHECK(b.power_mean_ratio >= 1.0 - 1e-12);
        CHECK(b.higher.size() == pbar.size());
    }
    for (double x : rep.gamma) CHECK(x >= 0.0);
    const std::vector<double> low{2.0};
    CHECK_THROWS_AS(gehring_probe(f, k, balls, 1.5, low), ValidationError);
    CHECK_THROWS_AS(gehring_probe(f, k, balls, 3.0, pbar), ValidationError);
}

TEST_CASE("hole-filling fit") {
    // h(r_k) = 0.5 h(r_{k+1}) + 1/(r_{k+1} - r_k) on a dyadic ladder.
    std::vector<double> r2{0.2, 0.4, 0.8, 1.6, 3.2};
    std::vector<double> v2(r2.size());
    v2.back() = 100.0;
    for (std::size_t k = r2.size() - 1; k-- > 0;) v2[k] = 0.5 * v2[k + 1] + 1.0 / (r2[k + 1] - r2[k]);
    const auto fit = holefill_convergence_check(r2, v2);
    CHECK(fit.consistent);
    CHECK(fit.theta == Rel(0.5).epsilon(1e-8));
    CHECK(fit.A == Rel(1.0).epsilon(1e-6));

    const std::vector<double> zeros(5, 0.0);
    const auto z = holefill_convergence_check(r2, zeros);
    CHECK(z.consistent);
    CHECK(z.zero_sentinel);

    const std::vector<double> inverted{9.0, 7.0, 5.0, 3.0, 1.0};
    const auto bad = holefill_convergence_check(r2, inverted);
    CHECK(!bad.consistent);
    CHECK(count_lines(to_csv(bad)) == 2);
    CHECK_THROWS_AS(holefill_convergence_check(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), ValidationError);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5}) CHECK(std::stod(format_number(x)) == x);
}

}  // TEST_SUITE
