#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/params.hpp"

namespace fraclab {

/// How pairs closer than 2h*sqrt(n) are integrated.
enum class NearFieldRule {
    /// cell_pair when sp < 1, distance_weighted otherwise.
    automatic,
    /// Exact cell-pair integral of |x-y|^{-(n+sp)}. Finite for touching
    /// cells only when sp < 1.
    cell_pair,
    /// |x_i-x_j|^{-p} times the cell-pair integral of |x-y|^{p-n-sp}: exact
    /// for affine data in 1D and finite for every s < 1.
    distance_weighted,
};

std::string to_string(NearFieldRule rule);
NearFieldRule near_field_rule_from_string(const std::string& name);

struct KernelOptions {
    NearFieldRule rule = NearFieldRule::automatic;
    /// Gauss-Legendre order for the smooth parts of near-field integrals.
    int gauss_order = 16;
};

/// Symmetric pair weights w(i,j) ~ \int_{cell_i}\int_{cell_j} |x-y|^{-(n+sp)},
/// with w(i,i) = 0. The lattice is uniform, so weights are stored once per
/// absolute offset; symmetry holds exactly by construction.
class KernelTable {
public:
    KernelTable(Grid grid, FractionalParams params, KernelOptions options = {});

    const Grid& grid() const { return grid_; }
    const FractionalParams& params() const { return params_; }
    NearFieldRule rule() const { return rule_; }

    double weight(std::size_t i, std::size_t j) const {
        const MultiIndex a = grid_.multi_index(i);
        const MultiIndex b = grid_.multi_index(j);
        return offset_weight(absdiff(a[0], b[0]), absdiff(a[1], b[1]), absdiff(a[2], b[2]));
    }
    double offset_weight(std::size_t d0, std::size_t d1, std::size_t d2) const {
        return table_[(d0 * ext_[1] + d1) * ext_[2] + d2];
    }
    /// Raw offset table, indexed by (|dk0| * e1 + |dk1|) * e2 + |dk2|.
    const std::vector<double>& offset_table() const { return table_; }

    /// True when |x_i - x_j| < 2 h sqrt(n), the near-field threshold.
    bool is_near(std::size_t i, std::size_t j) const;

    /// h^n \int_{R^n \ outer box} |x_i - y|^{-(n+sp)} dy: the weight of the
    /// region beyond the collar as seen from cell i.
    double tail_weight(std::size_t i) const { return tail_[i]; }

private:
    static std::size_t absdiff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

    Grid grid_;
    FractionalParams params_;
    NearFieldRule rule_;
    MultiIndex ext_;
    std::vector<double> table_;
    std::vector<double> tail_;
};

/// Dimensionless near-field integral \int |z|^{-gamma} prod_d tent(z_d - k_d) dz
/// for unit cells, tent(t) = max(0, 1 - |t|). Requires k != 0 and a finite
/// integral (gamma < n + #{d : |k_d| = 1} when all |k_d| <= 1).
double unit_offset_integral(int n, const std::array<long, 3>& k, double gamma, int gauss_order = 16);

/// \int_{R^n \ box} |x - y|^{-(n+sp)} dy for x strictly inside the box.
double exterior_kernel_integral(const Box& box, const Point& x, double sp);

/// Loops over every cell j of the lattice in ascending order and calls
/// f(j, w(i, j)). The diagonal is visited with weight 0.
template <class F>
inline void for_each_partner(const KernelTable& kernel, std::size_t i, F&& f) {
    const Grid& g = kernel.grid();
    const MultiIndex& e = g.extents();
    const MultiIndex a = g.multi_index(i);
    const double* table = kernel.offset_table().data();
    std::size_t j = 0;
    for (std::size_t j0 = 0; j0 < e[0]; ++j0) {
        const std::size_t b0 = (j0 > a[0] ? j0 - a[0] : a[0] - j0) * e[1];
        for (std::size_t j1 = 0; j1 < e[1]; ++j1) {
            const std::size_t b1 = (b0 + (j1 > a[1] ? j1 - a[1] : a[1] - j1)) * e[2];
            for (std::size_t j2 = 0; j2 < e[2]; ++j2, ++j) {
                f(j, table[b1 + (j2 > a[2] ? j2 - a[2] : a[2] - j2)]);
            }
        }
    }
}

}  // namespace fraclab
