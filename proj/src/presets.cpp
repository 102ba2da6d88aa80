#include "fraclab/presets.hpp"

#include <cmath>

#include "fraclab/errors.hpp"
#include "fraclab/snapshot.hpp"

namespace fraclab {

bool is_known_preset(const std::string& name) {
    return name == "constant" || name == "radial-degree-1" || name == "smooth-bump" || name == "holder-power" ||
           name == "file";
}

namespace {

void finish(FieldMap& f, const ManifoldSpec& m, const std::string& name) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double err = m.constraint_violation(f.value(i));
        if (err > 1e-12) {
            throw ValidationError("preset '" + name + "' produces values off the target (cell " + std::to_string(i) +
                                  ", violation " + std::to_string(err) + ")");
        }
    }
}

}  // namespace

FieldMap make_preset(const Grid& grid, const ManifoldSpec& manifold, const PresetSpec& spec) {
    const int N = manifold.ambient_dim();
    const int n = grid.dim();
    if (spec.name == "file") {
        FieldMap f = read_snapshot(spec.path);
        if (!f.grid().same_lattice(grid) || f.components() != N) {
            throw ValidationError("preset file '" + spec.path + "' does not match the configured grid or N");
        }
        finish(f, manifold, spec.name);
        return f;
    }
    FieldMap f(grid, N);
    if (spec.name == "constant") {
        std::vector<double> c = spec.value;
        if (c.empty()) {
            c.assign(N, 0.0);
            c[N - 1] = 1.0;
        }
        if (static_cast<int>(c.size()) != N) throw ValidationError("constant preset needs N components");
        for (std::size_t i = 0; i < f.size(); ++i) f.set_value(i, c);
    } else if (spec.name == "radial-degree-1") {
        if (N < n) throw ValidationError("radial-degree-1 needs N >= n");
        for (std::size_t i = 0; i < f.size(); ++i) {
            const Point& x = grid.center(i);
            const double r = distance(x, spec.center, n);
            if (r < 1e-12) throw ValidationError("radial-degree-1: a cell center coincides with the preset center");
            auto v = f.value(i);
            for (int d = 0; d < n; ++d) v[d] = (x[d] - spec.center[d]) / r;
        }
    } else if (spec.name == "smooth-bump") {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = distance(grid.center(i), spec.center, n);
            const double t = spec.amplitude * std::exp(-(r * r) / (spec.width * spec.width));
            auto v = f.value(i);
            if (manifold.kind() == ManifoldKind::euclidean) {
                v[0] = t;
            } else {
                v[0] = std::sin(t);
                v[N - 1] = std::cos(t);
            }
        }
    } else if (spec.name == "holder-power") {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = distance(grid.center(i), spec.center, n);
            const double t = spec.kappa * std::pow(r, spec.alpha);
            auto v = f.value(i);
            v[0] = std::cos(t);
            v[1] = std::sin(t);
        }
    } else {
        throw ValidationError("unknown boundary-data preset '" + spec.name + "'");
    }
    finish(f, manifold, spec.name);
    return f;
}

}  // namespace fraclab
