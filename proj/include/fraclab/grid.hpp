#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fraclab/params.hpp"

namespace fraclab {

/// Points always carry three coordinates; only the first n are meaningful.
using Point = std::array<double, 3>;
using MultiIndex = std::array<std::size_t, 3>;

double distance(const Point& a, const Point& b, int dim);

/// Axis-aligned box [lo, hi] in R^dim.
struct Box {
    int dim = 1;
    Point lo{};
    Point hi{};

    double volume() const;
    double diameter() const;
    bool contains(const Point& x, double tol = 0.0) const;
    /// True when the closed ball lies inside the box (up to tol).
    bool contains_ball(const Point& center, double radius, double tol = 1e-12) const;
};

struct BallSpec {
    Point center{};
    double radius = 0.0;
};

enum class CellTag : std::uint8_t { interior = 0, collar = 1 };

struct GridOptions {
    /// Hard cap on the total number of cells (interior + collar).
    std::size_t max_cells = 60000;
};

/// Uniform lattice covering the interior box plus a rectangular collar of
/// exterior cells. Cells are stored in row-major order over the outer
/// lattice (axis 0 slowest). Copies share the same immutable storage.
class Grid {
public:
    int dim() const { return d_->dim; }
    double h() const { return d_->h; }
    double cell_volume() const { return d_->cell_volume; }
    const Box& interior_box() const { return d_->interior; }
    /// Interior box expanded by the effective collar width in every axis.
    const Box& outer_box() const { return d_->outer; }
    /// Collar actually realised by whole lattice layers (<= requested).
    double collar_width() const { return static_cast<double>(d_->collar_layers) * d_->h; }
    double requested_collar_width() const { return d_->requested_collar; }
    std::size_t collar_layers() const { return d_->collar_layers; }

    std::size_t size() const { return d_->centers.size(); }
    std::size_t interior_count() const { return d_->interior_count; }
    std::size_t collar_count() const { return size() - interior_count(); }
    /// Lattice extent per axis (1 for unused axes).
    const MultiIndex& extents() const { return d_->extents; }
    /// Interior cells per axis.
    const MultiIndex& interior_extents() const { return d_->interior_extents; }

    const Point& center(std::size_t i) const { return d_->centers[i]; }
    CellTag tag(std::size_t i) const { return static_cast<CellTag>(d_->tags[i]); }
    bool is_interior(std::size_t i) const { return d_->tags[i] == 0; }

    MultiIndex multi_index(std::size_t i) const;
    std::size_t linear_index(const MultiIndex& k) const;

    /// Interior cell indices in ascending order.
    const std::vector<std::size_t>& interior_indices() const { return d_->interior_indices; }

    /// Same lattice geometry (dimension, spacing, boxes, extents).
    bool same_lattice(const Grid& other) const;

private:
    friend Grid build_grid(const FractionalParams&, const Box&, double, double, GridOptions);

    struct Data {
        int dim = 1;
        double h = 0.0;
        double cell_volume = 0.0;
        double requested_collar = 0.0;
        std::size_t collar_layers = 0;
        Box interior;
        Box outer;
        MultiIndex extents{1, 1, 1};
        MultiIndex interior_extents{1, 1, 1};
        std::size_t interior_count = 0;
        std::vector<Point> centers;
        std::vector<std::uint8_t> tags;
        std::vector<std::size_t> interior_indices;
    };
    std::shared_ptr<const Data> d_;
};

/// Default collar: twice the diameter of the interior box.
double default_collar_width(const Box& box);

/// Errors: h <= 0, collar_width < h, box not an integer number of cells per
/// axis, dimension mismatch with params, or cell count above the cap.
Grid build_grid(const FractionalParams& params, const Box& box, double h, double collar_width,
                GridOptions options = {});

/// Cells whose centers lie strictly inside the ball, ascending.
std::vector<std::size_t> ball_indices(const Grid& grid, const BallSpec& ball);

/// ball_indices(r_out) minus ball_indices(r_in), ascending.
std::vector<std::size_t> annulus_indices(const Grid& grid, const Point& center, double r_in, double r_out);

}  // namespace fraclab
