#include "fraclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fraclab/errors.hpp"

namespace fraclab {

double distance(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        const double t = a[d] - b[d];
        s += t * t;
    }
    return std::sqrt(s);
}

double Box::volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= hi[d] - lo[d];
    return v;
}

double Box::diameter() const {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
    return std::sqrt(s);
}

bool Box::contains(const Point& x, double tol) const {
    for (int d = 0; d < dim; ++d) {
        if (x[d] < lo[d] - tol || x[d] > hi[d] + tol) return false;
    }
    return true;
}

bool Box::contains_ball(const Point& center, double radius, double tol) const {
    for (int d = 0; d < dim; ++d) {
        if (center[d] - radius < lo[d] - tol || center[d] + radius > hi[d] + tol) return false;
    }
    return true;
}

MultiIndex Grid::multi_index(std::size_t i) const {
    const auto& e = d_->extents;
    MultiIndex k{0, 0, 0};
    k[2] = i % e[2];
    i /= e[2];
    k[1] = i % e[1];
    k[0] = i / e[1];
    return k;
}

std::size_t Grid::linear_index(const MultiIndex& k) const {
    const auto& e = d_->extents;
    return (k[0] * e[1] + k[1]) * e[2] + k[2];
}

bool Grid::same_lattice(const Grid& other) const {
    if (d_ == other.d_) return true;
    if (dim() != other.dim() || extents() != other.extents() || collar_layers() != other.collar_layers()) return false;
    if (std::abs(h() - other.h()) > 1e-12 * h()) return false;
    for (int d = 0; d < dim(); ++d) {
        if (std::abs(interior_box().lo[d] - other.interior_box().lo[d]) > 1e-12 * (1.0 + std::abs(interior_box().lo[d])))
            return false;
    }
    return true;
}

double default_collar_width(const Box& box) { return 2.0 * box.diameter(); }

Grid build_grid(const FractionalParams& params, const Box& box, double h, double collar_width,
                GridOptions options) {
    Violations v;
    v.check(box.dim == params.n(),
            "box dimension " + std::to_string(box.dim) + " differs from n = " + std::to_string(params.n()));
    v.check(std::isfinite(h) && h > 0.0, "cell size h must be > 0");
    v.check(std::isfinite(collar_width) && collar_width >= h, "collar_width must be >= h");
    for (int d = 0; d < box.dim && d < 3; ++d) {
        v.check(box.hi[d] > box.lo[d], "box must be nonempty along axis " + std::to_string(d));
    }
    v.throw_if_any();

    const int dim = box.dim;
    MultiIndex interior_ext{1, 1, 1};
    for (int d = 0; d < dim; ++d) {
        const double cells = (box.hi[d] - box.lo[d]) / h;
        const double rounded = std::round(cells);
        if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded)) {
            v.add("box length along axis " + std::to_string(d) + " is not an integer multiple of h");
        }
        interior_ext[d] = static_cast<std::size_t>(rounded);
    }
    v.throw_if_any();

    const auto layers = static_cast<std::size_t>(std::floor(collar_width / h + 1e-9));
    MultiIndex ext{1, 1, 1};
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) {
        ext[d] = interior_ext[d] + 2 * layers;
        total *= ext[d];
    }
    if (total > options.max_cells) {
        throw ValidationError("cell count " + std::to_string(total) + " exceeds the configured cap of " +
                              std::to_string(options.max_cells));
    }

    auto data = std::make_shared<Grid::Data>();
    data->dim = dim;
    data->h = h;
    data->cell_volume = std::pow(h, dim);
    data->requested_collar = collar_width;
    data->collar_layers = layers;
    data->interior = box;
    data->outer = box;
    for (int d = 0; d < dim; ++d) {
        data->outer.lo[d] = box.lo[d] - static_cast<double>(layers) * h;
        data->outer.hi[d] = box.hi[d] + static_cast<double>(layers) * h;
    }
    data->extents = ext;
    data->interior_extents = interior_ext;
    data->centers.resize(total);
    data->tags.resize(total);

    std::size_t idx = 0;
    for (std::size_t k0 = 0; k0 < ext[0]; ++k0) {
        for (std::size_t k1 = 0; k1 < ext[1]; ++k1) {
            for (std::size_t k2 = 0; k2 < ext[2]; ++k2, ++idx) {
                const MultiIndex k{k0, k1, k2};
                Point c{0.0, 0.0, 0.0};
                bool interior = true;
                for (int d = 0; d < dim; ++d) {
                    c[d] = data->outer.lo[d] + (static_cast<double>(k[d]) + 0.5) * h;
                    if (k[d] < layers || k[d] >= layers + interior_ext[d]) interior = false;
                }
                data->centers[idx] = c;
                data->tags[idx] = interior ? 0 : 1;
                if (interior) {
                    data->interior_indices.push_back(idx);
                }
            }
        }
    }
    data->interior_count = data->interior_indices.size();

    Grid g;
    g.d_ = std::move(data);
    return g;
}

namespace {

// Inclusive lattice index range along one axis that may hold centers within
// distance r of x; widened by one cell and filtered exactly afterwards.
std::pair<std::size_t, std::size_t> axis_range(const Grid& grid, int d, double x, double r) {
    const double lo = grid.outer_box().lo[d];
    const double h = grid.h();
    const auto n = static_cast<long long>(grid.extents()[d]);
    long long a = static_cast<long long>(std::floor((x - r - lo) / h - 0.5)) - 1;
    long long b = static_cast<long long>(std::ceil((x + r - lo) / h - 0.5)) + 1;
    a = std::clamp(a, 0LL, n - 1);
    b = std::clamp(b, 0LL, n - 1);
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

}  // namespace

std::vector<std::size_t> ball_indices(const Grid& grid, const BallSpec& ball) {
    if (!(ball.radius > 0.0)) throw ValidationError("ball radius must be > 0");
    std::vector<std::size_t> out;
    const int dim = grid.dim();
    std::array<std::pair<std::size_t, std::size_t>, 3> range{{{0, 0}, {0, 0}, {0, 0}}};
    for (int d = 0; d < dim; ++d) {
        // Skip balls that miss the lattice entirely.
        if (ball.center[d] + ball.radius < grid.outer_box().lo[d] ||
            ball.center[d] - ball.radius > grid.outer_box().hi[d])
            return out;
        range[d] = axis_range(grid, d, ball.center[d], ball.radius);
    }
    const double r2 = ball.radius * ball.radius;
    for (std::size_t k0 = range[0].first; k0 <= range[0].second; ++k0) {
        for (std::size_t k1 = range[1].first; k1 <= range[1].second; ++k1) {
            for (std::size_t k2 = range[2].first; k2 <= range[2].second; ++k2) {
                const std::size_t i = grid.linear_index({k0, k1, k2});
                const Point& c = grid.center(i);
                double s = 0.0;
                for (int d = 0; d < dim; ++d) s += (c[d] - ball.center[d]) * (c[d] - ball.center[d]);
                if (s < r2) out.push_back(i);
            }
        }
    }
    return out;
}

std::vector<std::size_t> annulus_indices(const Grid& grid, const Point& center, double r_in, double r_out) {
    if (!(r_in >= 0.0) || !(r_out > r_in)) throw ValidationError("annulus requires 0 <= r_in < r_out");
    auto outer = ball_indices(grid, {center, r_out});
    if (r_in == 0.0) return outer;
    const auto inner = ball_indices(grid, {center, r_in});
    std::vector<std::size_t> out;
    out.reserve(outer.size() - inner.size());
    std::set_difference(outer.begin(), outer.end(), inner.begin(), inner.end(), std::back_inserter(out));
    return out;
}

}  // namespace fraclab
