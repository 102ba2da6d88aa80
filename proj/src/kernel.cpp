#include "fraclab/kernel.hpp"

#include <cmath>
#include <string>

#include "fraclab/errors.hpp"
#include "quadrature.hpp"

namespace fraclab {

std::string to_string(NearFieldRule rule) {
    switch (rule) {
        case NearFieldRule::automatic: return "automatic";
        case NearFieldRule::cell_pair: return "cell-pair";
        case NearFieldRule::distance_weighted: return "distance-weighted";
    }
    return "unknown";
}

NearFieldRule near_field_rule_from_string(const std::string& name) {
    if (name == "automatic" || name == "auto") return NearFieldRule::automatic;
    if (name == "cell-pair") return NearFieldRule::cell_pair;
    if (name == "distance-weighted") return NearFieldRule::distance_weighted;
    throw ValidationError("unknown near-field rule '" + name + "'");
}

namespace {

// Linear tent factor a + b * xi on one reflected unit interval.
struct LinearFactor {
    double a;
    double b;
};

// Sub-cube of the support that has the origin as a corner. The integrand is
// |z|^{-gamma} prod (a_d + b_d xi_d) on [0,1]^n. Split into n pyramids
// {xi_m = max}, substitute xi = t * u with u_m = 1, and integrate the
// polynomial in t exactly: \int_0^1 t^{n-1-gamma+j} dt = 1 / (n - gamma + j).
double corner_piece(int n, const std::array<LinearFactor, 3>& f, double gamma, const detail::GaussRule& rule) {
    int vanishing = 0;
    for (int d = 0; d < n; ++d) {
        if (f[d].a == 0.0) ++vanishing;
    }
    if (!(static_cast<double>(n) - gamma + vanishing > 0.0)) {
        throw ValidationError("near-field integral diverges for touching cells (exponent " + std::to_string(gamma) +
                              ", contact codimension " + std::to_string(vanishing) + ")");
    }

    auto radial = [&](const std::array<double, 3>& u) {
        // Coefficients of prod_d (a_d + b_d u_d t) in powers of t.
        std::array<double, 4> c{1.0, 0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) {
            std::array<double, 4> next{0.0, 0.0, 0.0, 0.0};
            for (int j = 0; j < n; ++j) {
                next[j] += c[j] * f[d].a;
                next[j + 1] += c[j] * f[d].b * u[d];
            }
            c = next;
        }
        double norm2 = 0.0;
        for (int d = 0; d < n; ++d) norm2 += u[d] * u[d];
        double s = 0.0;
        for (int j = vanishing; j <= n; ++j) s += c[j] / (static_cast<double>(n) - gamma + j);
        return std::pow(norm2, -0.5 * gamma) * s;
    };

    double total = 0.0;
    for (int m = 0; m < n; ++m) {
        if (n == 1) {
            total += radial({1.0, 0.0, 0.0});
            continue;
        }
        // Free coordinates are the axes other than m.
        std::array<int, 2> free{0, 0};
        int nf = 0;
        for (int d = 0; d < n; ++d) {
            if (d != m) free[nf++] = d;
        }
        const auto& x = rule.nodes;
        const auto& w = rule.weights;
        const std::size_t q = x.size();
        if (nf == 1) {
            for (std::size_t i = 0; i < q; ++i) {
                std::array<double, 3> u{0.0, 0.0, 0.0};
                u[m] = 1.0;
                u[free[0]] = 0.5 * (x[i] + 1.0);
                total += 0.5 * w[i] * radial(u);
            }
        } else {
            for (std::size_t i = 0; i < q; ++i) {
                for (std::size_t k = 0; k < q; ++k) {
                    std::array<double, 3> u{0.0, 0.0, 0.0};
                    u[m] = 1.0;
                    u[free[0]] = 0.5 * (x[i] + 1.0);
                    u[free[1]] = 0.5 * (x[k] + 1.0);
                    total += 0.25 * w[i] * w[k] * radial(u);
                }
            }
        }
    }
    return total;
}

// Sub-cube away from the origin (|z| >= 1 on it): tensor Gauss on a 4^n
// subdivision.
double smooth_piece(int n, const std::array<double, 3>& lo, const std::array<long, 3>& k,
                    const std::array<int, 3>& side, double gamma, const detail::GaussRule& rule) {
    constexpr int pieces = 4;
    const std::size_t q = rule.nodes.size();
    // 1D node lists per axis, including the tent factor.
    std::array<std::vector<double>, 3> pts;
    std::array<std::vector<double>, 3> wts;
    for (int d = 0; d < 3; ++d) {
        if (d >= n) {
            pts[d] = {0.0};
            wts[d] = {1.0};
            continue;
        }
        const double step = 1.0 / pieces;
        for (int s = 0; s < pieces; ++s) {
            const double mid = lo[d] + (s + 0.5) * step;
            for (std::size_t i = 0; i < q; ++i) {
                const double z = mid + 0.5 * step * rule.nodes[i];
                const double tent = side[d] == 0 ? z - static_cast<double>(k[d] - 1) : static_cast<double>(k[d] + 1) - z;
                pts[d].push_back(z);
                wts[d].push_back(0.5 * step * rule.weights[i] * tent);
            }
        }
    }
    double total = 0.0;
    for (std::size_t a = 0; a < pts[0].size(); ++a) {
        for (std::size_t b = 0; b < pts[1].size(); ++b) {
            for (std::size_t c = 0; c < pts[2].size(); ++c) {
                const double r2 = pts[0][a] * pts[0][a] + pts[1][b] * pts[1][b] + pts[2][c] * pts[2][c];
                total += wts[0][a] * wts[1][b] * wts[2][c] * std::pow(r2, -0.5 * gamma);
            }
        }
    }
    return total;
}

}  // namespace

double unit_offset_integral(int n, const std::array<long, 3>& k, double gamma, int gauss_order) {
    bool zero = true;
    for (int d = 0; d < n; ++d) zero = zero && k[d] == 0;
    if (zero) throw ValidationError("unit_offset_integral: the self pair is excluded");

    const detail::GaussRule corner_rule = detail::gauss_legendre(gauss_order);
    const detail::GaussRule smooth_rule = detail::gauss_legendre(6);

    double total = 0.0;
    const int combos = 1 << n;
    for (int mask = 0; mask < combos; ++mask) {
        std::array<int, 3> side{0, 0, 0};
        std::array<double, 3> lo{0.0, 0.0, 0.0};
        bool has_origin = true;
        for (int d = 0; d < n; ++d) {
            side[d] = (mask >> d) & 1;
            // side 0: [k-1, k] with rising tent, side 1: [k, k+1] falling.
            lo[d] = static_cast<double>(k[d] - 1 + side[d]);
            if (lo[d] != -1.0 && lo[d] != 0.0) has_origin = false;
        }
        if (!has_origin) {
            total += smooth_piece(n, lo, k, side, gamma, smooth_rule);
            continue;
        }
        // Reflect [-1, 0] onto [0, 1]; write each tent factor as a + b*xi.
        std::array<LinearFactor, 3> f{};
        for (int d = 0; d < n; ++d) {
            const double sigma = lo[d] == -1.0 ? -1.0 : 1.0;
            auto tent = [&](double z) {
                return side[d] == 0 ? z - static_cast<double>(k[d] - 1) : static_cast<double>(k[d] + 1) - z;
            };
            const double at0 = tent(0.0);
            f[d] = {at0, tent(sigma) - at0};
        }
        total += corner_piece(n, f, gamma, corner_rule);
    }
    return total;
}

double exterior_kernel_integral(const Box& box, const Point& x, double sp) {
    const int n = box.dim;
    for (int d = 0; d < n; ++d) {
        if (!(x[d] > box.lo[d] && x[d] < box.hi[d])) {
            throw ValidationError("exterior_kernel_integral: point must lie strictly inside the box");
        }
    }
    if (n == 1) {
        return (std::pow(x[0] - box.lo[0], -sp) + std::pow(box.hi[0] - x[0], -sp)) / sp;
    }
    static const detail::GaussRule rule = detail::gauss_legendre(24);
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int side = 0; side < 2; ++side) {
            const double dist = side == 0 ? x[a] - box.lo[a] : box.hi[a] - x[a];
            std::array<int, 2> tang{0, 0};
            int nt = 0;
            for (int d = 0; d < n; ++d) {
                if (d != a) tang[nt++] = d;
            }
            // Rays through this face: substitute t = dist * tan(phi) per
            // tangential axis so the face integral is smooth in phi.
            std::array<double, 2> phi_lo{0.0, 0.0};
            std::array<double, 2> phi_hi{0.0, 0.0};
            for (int t = 0; t < nt; ++t) {
                phi_lo[t] = std::atan((box.lo[tang[t]] - x[tang[t]]) / dist);
                phi_hi[t] = std::atan((box.hi[tang[t]] - x[tang[t]]) / dist);
            }
            double face = 0.0;
            if (n == 2) {
                face = detail::integrate_1d(rule, phi_lo[0], phi_hi[0], 4,
                                            [&](double phi) { return std::pow(std::cos(phi), sp); });
            } else {
                face = detail::integrate_1d(rule, phi_lo[0], phi_hi[0], 2, [&](double p1) {
                    const double t1 = std::tan(p1);
                    const double sec1 = 1.0 + t1 * t1;
                    return detail::integrate_1d(rule, phi_lo[1], phi_hi[1], 2, [&](double p2) {
                        const double t2 = std::tan(p2);
                        const double sec2 = 1.0 + t2 * t2;
                        return std::pow(1.0 + t1 * t1 + t2 * t2, -0.5 * (3.0 + sp)) * sec1 * sec2;
                    });
                });
            }
            total += std::pow(dist, -sp) * face;
        }
    }
    return total / sp;
}

KernelTable::KernelTable(Grid grid, FractionalParams params, KernelOptions options)
    : grid_(std::move(grid)), params_(params), rule_(options.rule), ext_(grid_.extents()) {
    if (grid_.dim() != params_.n()) throw ValidationError("kernel: grid dimension differs from params.n");
    const int n = params_.n();
    const double sp = params_.sp();
    const double p = params_.p();
    const double h = grid_.h();
    if (rule_ == NearFieldRule::automatic) {
        rule_ = sp < 1.0 ? NearFieldRule::cell_pair : NearFieldRule::distance_weighted;
    }
    if (rule_ == NearFieldRule::cell_pair && sp >= 1.0) {
        throw ValidationError("cell-pair near-field rule diverges for touching cells when sp >= 1 (sp = " +
                              std::to_string(sp) + "); use distance-weighted");
    }

    const double scale = std::pow(h, static_cast<double>(n) - sp);
    const double alpha = params_.kernel_exponent();
    table_.assign(ext_[0] * ext_[1] * ext_[2], 0.0);
    for (std::size_t d0 = 0; d0 < ext_[0]; ++d0) {
        for (std::size_t d1 = 0; d1 < ext_[1]; ++d1) {
            for (std::size_t d2 = 0; d2 < ext_[2]; ++d2) {
                const std::size_t idx = (d0 * ext_[1] + d1) * ext_[2] + d2;
                const double k2 = static_cast<double>(d0 * d0 + d1 * d1 + d2 * d2);
                if (k2 == 0.0) continue;
                if (k2 < 4.0 * n) {
                    const std::array<long, 3> k{static_cast<long>(d0), static_cast<long>(d1), static_cast<long>(d2)};
                    if (rule_ == NearFieldRule::cell_pair) {
                        table_[idx] = scale * unit_offset_integral(n, k, alpha, options.gauss_order);
                    } else {
                        table_[idx] = scale * std::pow(k2, -0.5 * p) *
                                      unit_offset_integral(n, k, alpha - p, options.gauss_order);
                    }
                } else {
                    // Midpoint rule: h^{2n} |k h|^{-(n+sp)}.
                    table_[idx] = scale * std::pow(k2, -0.5 * alpha);
                }
            }
        }
    }

    tail_.resize(grid_.size());
    const double vol = grid_.cell_volume();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        tail_[i] = vol * exterior_kernel_integral(grid_.outer_box(), grid_.center(i), sp);
    }
}

bool KernelTable::is_near(std::size_t i, std::size_t j) const {
    const MultiIndex a = grid_.multi_index(i);
    const MultiIndex b = grid_.multi_index(j);
    double k2 = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double t = static_cast<double>(absdiff(a[d], b[d]));
        k2 += t * t;
    }
    return k2 > 0.0 && k2 < 4.0 * params_.n();
}

}  // namespace fraclab
