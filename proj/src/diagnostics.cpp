#include "fraclab/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "fraclab/energy.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/power_law.hpp"
#include "fraclab/summation.hpp"
#include "cell_mean.hpp"
#include "pair_math.hpp"

namespace fraclab {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

void require_match(const FieldMap& field, const KernelTable& kernel) {
    if (!field.grid().same_lattice(kernel.grid())) throw ValidationError("field and kernel live on different grids");
}

// sum_{i in ball} h^n |u_i - mean|^p without the radius factor.
double oscillation(const FieldMap& field, const std::vector<std::size_t>& cells, double p) {
    if (cells.empty()) return 0.0;
    const int N = field.components();
    const std::vector<double> m = detail::cell_mean(field, cells);
    const PowerLaw pw(p);
    CompensatedSum acc;
    for (std::size_t i : cells) acc.add(pw.pow_p(detail::squared_difference(field.value(i).data(), m.data(), N)));
    return field.grid().cell_volume() * acc.value();
}

std::vector<double> rows_for(const FieldMap& field, const KernelTable& kernel) { return row_energies(field, kernel); }

}  // namespace

// ---------------------------------------------------------------- Caccioppoli

CaccioppoliReport caccioppoli_sweep(const FieldMap& field, const KernelTable& kernel, const Point& x0,
                                    std::span<const double> rhos) {
    require_match(field, kernel);
    return caccioppoli_sweep(field, kernel, rows_for(field, kernel), x0, rhos);
}

CaccioppoliReport caccioppoli_sweep(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                                    const Point& x0, std::span<const double> rhos) {
    require_match(field, kernel);
    const auto& prm = kernel.params();
    prm.require_operator_range("caccioppoli_sweep");
    const Grid& g = field.grid();
    Violations v;
    v.check(!rhos.empty(), "caccioppoli_sweep needs at least one rho");
    for (double rho : rhos) {
        v.check(rho > 0.0, "rho must be > 0");
        v.check(g.interior_box().contains_ball(x0, 6.0 * rho),
                "B_{6 rho} must lie inside the interior box (rho = " + format_number(rho) + ")");
    }
    v.throw_if_any();

    CaccioppoliReport r;
    r.x0 = x0;
    for (double rho : rhos) {
        CaccioppoliEntry e;
        e.rho = rho;
        e.lhs = localized_energy_report(field, kernel, rows, {x0, rho}).value;
        e.rhs_core = std::pow(rho, -prm.sp()) * oscillation(field, ball_indices(g, {x0, 6.0 * rho}), prm.p());
        if (e.rhs_core > 0.0) {
            e.ratio = e.lhs / e.rhs_core;
        } else if (e.lhs == 0.0) {
            e.ratio = 0.0;
        } else {
            e.ratio = std::numeric_limits<double>::infinity();
        }
        e.finite = std::isfinite(e.ratio);
        e.under_resolved = rho < 2.0 * g.h();
        if (!e.under_resolved) {
            ++r.resolved;
            r.sup_ratio = std::max(r.sup_ratio, e.ratio);
            r.all_finite = r.all_finite && e.finite;
        }
        r.entries.push_back(e);
    }
    return r;
}

// ---------------------------------------------------------------- decay

void validate_decay_parameters(double theta, double eps1, Violations& v) {
    v.check(theta > 0.0 && theta < 0.5, "theta must lie in (0, 1/2) (decay hypothesis), got " + format_number(theta));
    v.check(eps1 > 0.0, "eps1 must be > 0");
}

DecayReport decay_probe(const FieldMap& field, const KernelTable& kernel, const Point& x0, double R, double theta,
                        double eps1) {
    require_match(field, kernel);
    return decay_probe(field, kernel, rows_for(field, kernel), x0, R, theta, eps1);
}

DecayReport decay_probe(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                        const Point& x0, double R, double theta, double eps1) {
    require_match(field, kernel);
    kernel.params().require_operator_range("decay_probe");
    Violations v;
    validate_decay_parameters(theta, eps1, v);
    v.check(R > 0.0, "R must be > 0");
    v.check(theta * R >= 2.0 * field.grid().h(), "theta R must be >= 2h (resolution guard)");
    v.throw_if_any();
    DecayReport r;
    r.x0 = x0;
    r.R = R;
    r.theta = theta;
    r.eps1 = eps1;
    r.e_R = normalized_energy_report(field, kernel, rows, {x0, R}).value;
    r.e_thetaR = normalized_energy_report(field, kernel, rows, {x0, theta * R}).value;
    if (r.e_R > 0.0) {
        r.ratio = r.e_thetaR / r.e_R;
    } else {
        r.vacuous = r.e_thetaR == 0.0;
        r.ratio = r.vacuous ? 0.0 : std::numeric_limits<double>::infinity();
    }
    r.small = r.e_R < eps1;
    return r;
}

// ---------------------------------------------------------------- blow-up

BlowupResult blowup_normalize(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball) {
    require_match(field, kernel);
    const double p = kernel.params().p();
    const double energy = localized_energy(field, kernel, ball);
    if (!(energy > 0.0)) throw DegenerateInput("blowup_normalize: localized energy vanishes, cannot normalize");
    const auto cells = ball_indices(field.grid(), ball);
    const int N = field.components();
    const std::vector<double> mean = detail::cell_mean(field, cells);
    const double eps = std::pow(energy, 1.0 / p);
    BlowupResult r(field);
    for (std::size_t i = 0; i < field.size(); ++i) {
        auto v = r.field.value(i);
        for (int c = 0; c < N; ++c) v[c] = (v[c] - mean[c]) / eps;
    }
    r.eps = eps;
    r.energy = localized_energy(r.field, kernel, ball);
    double m2 = 0.0;
    for (double mc : detail::cell_mean(r.field, cells)) m2 += mc * mc;
    r.mean_norm = std::sqrt(m2);
    return r;
}

// ---------------------------------------------------------------- singular set

double default_eps1(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows, double r_max) {
    const Grid& g = field.grid();
    const double scale = std::pow(r_max, kernel.params().sp_minus_n());
    std::vector<double> e;
    e.reserve(g.interior_count());
    for (std::size_t i : g.interior_indices()) {
        CompensatedSum acc;
        for (std::size_t j : ball_indices(g, {g.center(i), r_max})) acc.add(rows[j]);
        e.push_back(scale * acc.value());
    }
    if (e.empty()) return 0.0;
    const std::size_t mid = e.size() / 2;
    std::nth_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(mid), e.end());
    double median = e[mid];
    if (e.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return 0.1 * median;
}

SingularSetReport singular_detect(const FieldMap& field, const KernelTable& kernel, double eps1,
                                  std::span<const double> scales) {
    require_match(field, kernel);
    return singular_detect(field, kernel, rows_for(field, kernel), eps1, scales);
}

SingularSetReport singular_detect(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                                  double eps1, std::span<const double> scales) {
    require_match(field, kernel);
    kernel.params().require_operator_range("singular_detect");
    const Grid& g = field.grid();
    Violations v;
    v.check(eps1 > 0.0, "eps1 must be > 0");
    v.check(!scales.empty(), "singular_detect needs at least one scale");
    for (double R : scales) v.check(R >= 2.0 * g.h(), "every scale must be >= 2h, got " + format_number(R));
    v.throw_if_any();

    SingularSetReport r;
    r.eps1 = eps1;
    r.scales.assign(scales.begin(), scales.end());
    r.r_min = *std::min_element(scales.begin(), scales.end());
    r.r_max = *std::max_element(scales.begin(), scales.end());

    double best_density = -1.0;
    for (std::size_t i : g.interior_indices()) {
        if (rows[i] > best_density) {
            best_density = rows[i];
            r.density_argmax = i;
        }
    }
    r.density_argmax_point = g.center(r.density_argmax);

    const double sp_n = kernel.params().sp_minus_n();
    std::vector<double> curve(scales.size());
    for (std::size_t i : g.interior_indices()) {
        bool all = true;
        for (std::size_t k = 0; k < scales.size(); ++k) {
            CompensatedSum acc;
            for (std::size_t j : ball_indices(g, {g.center(i), scales[k]})) acc.add(rows[j]);
            curve[k] = std::pow(scales[k], sp_n) * acc.value();
            if (!(curve[k] > eps1)) {
                all = false;
                break;
            }
        }
        if (all) {
            r.flagged.push_back(i);
            r.curves.push_back(curve);
        }
    }

    // Connected components under the 3^n - 1 lattice neighbourhood.
    std::vector<int> label(g.size(), -1);
    std::vector<std::uint8_t> is_flagged(g.size(), 0);
    for (std::size_t i : r.flagged) is_flagged[i] = 1;
    const int n = g.dim();
    for (std::size_t seed : r.flagged) {
        if (label[seed] >= 0) continue;
        SingularCluster cl;
        const int id = static_cast<int>(r.clusters.size());
        std::vector<std::size_t> stack{seed};
        label[seed] = id;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            cl.cells.push_back(i);
            const MultiIndex k = g.multi_index(i);
            for (int a = -1; a <= 1; ++a) {
                for (int b = n > 1 ? -1 : 0; b <= (n > 1 ? 1 : 0); ++b) {
                    for (int c = n > 2 ? -1 : 0; c <= (n > 2 ? 1 : 0); ++c) {
                        const std::array<long long, 3> off{a, b, c};
                        MultiIndex nb = k;
                        bool ok = true;
                        for (int d = 0; d < 3; ++d) {
                            const long long x = static_cast<long long>(k[d]) + off[d];
                            if (x < 0 || x >= static_cast<long long>(g.extents()[d])) ok = false;
                            nb[d] = static_cast<std::size_t>(std::max(x, 0LL));
                        }
                        if (!ok) continue;
                        const std::size_t j = g.linear_index(nb);
                        if (is_flagged[j] && label[j] < 0) {
                            label[j] = id;
                            stack.push_back(j);
                        }
                    }
                }
            }
        }
        std::sort(cl.cells.begin(), cl.cells.end());
        double best = -1.0;
        for (std::size_t i : cl.cells) {
            for (int d = 0; d < n; ++d) cl.centroid[d] += g.center(i)[d];
            if (rows[i] > best) {
                best = rows[i];
                cl.peak_cell = i;
            }
        }
        for (int d = 0; d < n; ++d) cl.centroid[d] /= static_cast<double>(cl.cells.size());
        r.clusters.push_back(std::move(cl));
    }
    return r;
}

// ---------------------------------------------------------------- Hoelder

HolderReport holder_fit(const FieldMap& field, std::span<const Point> centers, double p, std::span<const double> radii,
                        const HolderOptions& options) {
    Violations v;
    v.check(!centers.empty(), "holder_fit needs at least one center");
    v.check(p > 1.0, "holder_fit needs p > 1");
    v.throw_if_any();
    const Grid& g = field.grid();
    const double r_floor = options.min_radius > 0.0 ? options.min_radius : 2.0 * g.h();
    HolderReport r;
    r.centers.assign(centers.begin(), centers.end());
    std::vector<double> sorted(radii.begin(), radii.end());
    std::sort(sorted.begin(), sorted.end());
    bool any_positive = false;
    std::size_t resolved = 0;
    for (double rad : sorted) {
        if (!(rad >= r_floor)) continue;
        ++resolved;
        double q = 0.0;
        for (const Point& z : centers) q = std::max(q, campanato_quotient(field, {z, rad}, g.dim(), p));
        if (q > 0.0) {
            any_positive = true;
            r.radii.push_back(rad);
            r.quotients.push_back(q);
        }
    }
    if (resolved >= 3 && !any_positive) {
        r.constant = true;
        r.status = "infinitely-smooth";
        return r;
    }
    if (r.radii.size() < 3) {
        throw ValidationError("holder_fit needs at least 3 usable radii (>= " + format_number(r_floor) +
                              " with a nonzero quotient), got " + std::to_string(r.radii.size()));
    }
    const std::size_t k = r.radii.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += std::log(r.radii[i]);
        my += std::log(r.quotients[i]);
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dx = std::log(r.radii[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r.quotients[i]) - my);
    }
    r.beta_hat = sxy / sxx;
    r.alpha_hat = r.beta_hat / p;
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double e = std::log(r.quotients[i]) - (my + r.beta_hat * (std::log(r.radii[i]) - mx));
        ss += e * e;
    }
    r.residual = std::sqrt(ss / static_cast<double>(k));
    r.alpha_reported = r.residual <= options.residual_threshold && r.alpha_hat > 0.0;
    r.status = r.alpha_reported ? "fitted" : (r.alpha_hat > 0.0 ? "residual-above-threshold" : "nonpositive-exponent");
    return r;
}

// ---------------------------------------------------------------- Gehring

GehringProbe gehring_probe(const FieldMap& field, const KernelTable& kernel, std::span<const BallSpec> balls, double q,
                           std::span<const double> pbar, double kappa) {
    require_match(field, kernel);
    return gehring_probe(field, kernel, rows_for(field, kernel), balls, q, pbar, kappa);
}

GehringProbe gehring_probe(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                           std::span<const BallSpec> balls, double q, std::span<const double> pbar, double kappa) {
    require_match(field, kernel);
    const double p = kernel.params().p();
    kernel.params().require_operator_range("gehring_probe");
    Violations v;
    v.check(q > 1.0 && q < p, "gehring_probe needs 1 < q < p");
    for (double pb : pbar) v.check(pb > p, "every pbar must exceed p");
    v.check(kappa >= 1.0, "enlargement factor kappa must be >= 1");
    for (const auto& b : balls) v.check(b.radius > 0.0, "ball radius must be > 0");
    v.throw_if_any();

    const Grid& g = field.grid();
    GehringProbe r;
    r.q = q;
    r.p = p;
    r.pbar.assign(pbar.begin(), pbar.end());
    r.kappa = kappa;
    r.gamma.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) r.gamma[i] = std::pow(std::max(rows[i], 0.0) / g.cell_volume(), 1.0 / p);

    auto power_mean = [&](const std::vector<std::size_t>& cells, double e) {
        if (cells.empty()) return 0.0;
        CompensatedSum acc;
        for (std::size_t i : cells) acc.add(std::pow(r.gamma[i], e));
        return std::pow(acc.value() / static_cast<double>(cells.size()), 1.0 / e);
    };

    bool first = true;
    for (const auto& b : balls) {
        GehringBall gb;
        gb.ball = b;
        const auto cells = ball_indices(g, b);
        const auto big = ball_indices(g, {b.center, kappa * b.radius});
        gb.mean_p = power_mean(cells, p);
        gb.mean_q = power_mean(cells, q);
        gb.mean_q_enlarged = power_mean(big, q);
        for (double pb : pbar) gb.higher.push_back(power_mean(cells, pb));
        if (gb.mean_q > 0.0) {
            gb.power_mean_ratio = gb.mean_p / gb.mean_q;
            gb.reverse_holder = gb.mean_q_enlarged > 0.0 ? gb.mean_p / gb.mean_q_enlarged : 0.0;
            r.power_mean_ok = r.power_mean_ok && gb.power_mean_ratio >= 1.0 - 1e-12;
            if (first) {
                r.rh_min = r.rh_max = gb.reverse_holder;
                first = false;
            } else {
                r.rh_min = std::min(r.rh_min, gb.reverse_holder);
                r.rh_max = std::max(r.rh_max, gb.reverse_holder);
            }
        } else {
            gb.vacuous = true;
        }
        r.balls.push_back(std::move(gb));
    }
    return r;
}

// ---------------------------------------------------------------- hole filling

HolefillReport holefill_convergence_check(std::span<const double> radii, std::span<const double> values,
                                          const HolefillOptions& o) {
    Violations v;
    v.check(radii.size() == values.size(), "radii and values must have equal length");
    v.check(radii.size() >= 4, "hole-filling fit needs at least 4 radii");
    for (std::size_t k = 0; k + 1 < radii.size(); ++k) v.check(radii[k] < radii[k + 1], "radii must increase");
    for (double x : values) v.check(std::isfinite(x) && x >= 0.0, "values must be finite and >= 0");
    v.check(o.alpha > 0.0 && o.beta > 0.0, "hole-filling exponents must be > 0");
    v.throw_if_any();

    HolefillReport r;
    if (std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; })) {
        r.consistent = true;
        r.zero_sentinel = true;
        r.reason = "zero-sequence";
        return r;
    }
    for (std::size_t k = 0; k + 1 < values.size(); ++k) r.monotone = r.monotone && values[k] <= values[k + 1];

    const std::size_t m = radii.size() - 1;
    const bool same_exp = o.alpha == o.beta;
    const int cols = same_exp ? 2 : 3;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(m), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        const double gap = radii[k + 1] - radii[k];
        const auto row = static_cast<Eigen::Index>(k);
        X(row, 0) = values[k + 1];
        X(row, 1) = std::pow(gap, -o.alpha);
        if (!same_exp) X(row, 2) = std::pow(gap, -o.beta);
        y[row] = values[k];
    }
    // Nonnegative least squares by enumerating active sets.
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(cols);
    for (int mask = 1; mask < (1 << cols); ++mask) {
        std::vector<Eigen::Index> idx;
        for (int c = 0; c < cols; ++c) {
            if (mask & (1 << c)) idx.push_back(c);
        }
        Eigen::MatrixXd Xs(X.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) Xs.col(static_cast<Eigen::Index>(c)) = X.col(idx[c]);
        const Eigen::VectorXd sol = Xs.colPivHouseholderQr().solve(y);
        if ((sol.array() < 0.0).any() || !sol.allFinite()) continue;
        const double res = (Xs * sol - y).squaredNorm();
        if (res < best) {
            best = res;
            coef.setZero();
            for (std::size_t c = 0; c < idx.size(); ++c) coef[idx[c]] = sol[static_cast<Eigen::Index>(c)];
        }
    }
    r.theta = coef[0];
    r.A = coef[1];
    r.B = same_exp ? 0.0 : coef[2];
    r.residual = std::isfinite(best) && y.norm() > 0.0 ? std::sqrt(best) / y.norm() : 0.0;
    if (!r.monotone) {
        r.reason = "values decrease as the radius grows";
    } else if (!(r.theta < 1.0)) {
        r.reason = "fitted theta >= 1";
    } else if (r.residual > o.residual_tol) {
        r.reason = "fit residual above tolerance";
    } else {
        r.consistent = true;
        r.reason = "consistent";
    }
    return r;
}

// ---------------------------------------------------------------- serialization

nlohmann::json to_json(const CaccioppoliReport& r) {
    nlohmann::json j;
    j["probe"] = "caccioppoli";
    j["x0"] = r.x0;
    j["sup_ratio"] = number_or_null(r.sup_ratio);
    j["resolved"] = r.resolved;
    j["all_finite"] = r.all_finite;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : r.entries) {
        j["entries"].push_back({{"rho", e.rho},
                                {"lhs", e.lhs},
                                {"rhs_core", e.rhs_core},
                                {"ratio", number_or_null(e.ratio)},
                                {"finite", e.finite},
                                {"under_resolved", e.under_resolved}});
    }
    return j;
}

std::string to_csv(const CaccioppoliReport& r) {
    std::ostringstream os;
    os << "rho,lhs,rhs_core,ratio,under_resolved\n";
    for (const auto& e : r.entries) {
        os << format_number(e.rho) << ',' << format_number(e.lhs) << ',' << format_number(e.rhs_core) << ','
           << format_number(e.ratio) << ',' << (e.under_resolved ? 1 : 0) << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const DecayReport& r) {
    return {{"probe", "decay"},       {"x0", r.x0},          {"R", r.R},
            {"theta", r.theta},       {"eps1", r.eps1},      {"e_R", r.e_R},
            {"e_thetaR", r.e_thetaR}, {"ratio", number_or_null(r.ratio)},
            {"vacuous", r.vacuous},   {"small", r.small}};
}

std::string to_csv(const DecayReport& r) {
    std::ostringstream os;
    os << "x0_0,x0_1,x0_2,R,theta,eps1,e_R,e_thetaR,ratio,vacuous,small\n";
    os << format_number(r.x0[0]) << ',' << format_number(r.x0[1]) << ',' << format_number(r.x0[2]) << ','
       << format_number(r.R) << ',' << format_number(r.theta) << ',' << format_number(r.eps1) << ','
       << format_number(r.e_R) << ',' << format_number(r.e_thetaR) << ',' << format_number(r.ratio) << ','
       << (r.vacuous ? 1 : 0) << ',' << (r.small ? 1 : 0) << '\n';
    return os.str();
}

nlohmann::json to_json(const BlowupResult& r) {
    return {{"probe", "blowup"}, {"eps", r.eps}, {"energy", r.energy}, {"mean_norm", r.mean_norm}};
}

nlohmann::json to_json(const SingularSetReport& r, const Grid& grid) {
    nlohmann::json j;
    j["probe"] = "singular";
    j["eps1"] = r.eps1;
    j["scales"] = r.scales;
    j["r_min"] = r.r_min;
    j["r_max"] = r.r_max;
    j["flagged_count"] = r.flagged.size();
    j["density_argmax"] = r.density_argmax;
    j["density_argmax_point"] = r.density_argmax_point;
    j["points"] = nlohmann::json::array();
    for (std::size_t k = 0; k < r.flagged.size(); ++k) {
        j["points"].push_back({{"cell", r.flagged[k]}, {"center", grid.center(r.flagged[k])}, {"curve", r.curves[k]}});
    }
    j["clusters"] = nlohmann::json::array();
    for (const auto& c : r.clusters) {
        j["clusters"].push_back(
            {{"size", c.cells.size()}, {"centroid", c.centroid}, {"peak_cell", c.peak_cell}, {"cells", c.cells}});
    }
    return j;
}

std::string to_csv(const SingularSetReport& r, const Grid& grid) {
    std::ostringstream os;
    os << "cell,x0,x1,x2,cluster";
    for (std::size_t k = 0; k < r.scales.size(); ++k) os << ",e_R" << k;
    os << '\n';
    std::vector<int> cluster_of(grid.size(), -1);
    for (std::size_t c = 0; c < r.clusters.size(); ++c) {
        for (std::size_t i : r.clusters[c].cells) cluster_of[i] = static_cast<int>(c);
    }
    for (std::size_t k = 0; k < r.flagged.size(); ++k) {
        const std::size_t i = r.flagged[k];
        const Point& x = grid.center(i);
        os << i << ',' << format_number(x[0]) << ',' << format_number(x[1]) << ',' << format_number(x[2]) << ','
           << cluster_of[i];
        for (double e : r.curves[k]) os << ',' << format_number(e);
        os << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const HolderReport& r) {
    nlohmann::json j;
    j["probe"] = "holder";
    j["centers"] = r.centers;
    j["radii"] = r.radii;
    j["quotients"] = r.quotients;
    j["beta_hat"] = r.beta_hat;
    j["alpha_hat"] = r.alpha_hat;
    j["residual"] = r.residual;
    j["alpha_reported"] = r.alpha_reported;
    j["constant"] = r.constant;
    j["status"] = r.status;
    return j;
}

std::string to_csv(const HolderReport& r) {
    std::ostringstream os;
    os << "r,quotient\n";
    for (std::size_t k = 0; k < r.radii.size(); ++k) {
        os << format_number(r.radii[k]) << ',' << format_number(r.quotients[k]) << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const GehringProbe& r, bool include_gamma) {
    nlohmann::json j;
    j["probe"] = "gehring";
    j["q"] = r.q;
    j["p"] = r.p;
    j["pbar"] = r.pbar;
    j["kappa"] = r.kappa;
    j["rh_min"] = r.rh_min;
    j["rh_max"] = r.rh_max;
    j["power_mean_ok"] = r.power_mean_ok;
    j["balls"] = nlohmann::json::array();
    for (const auto& b : r.balls) {
        j["balls"].push_back({{"center", b.ball.center},
                              {"radius", b.ball.radius},
                              {"mean_p", b.mean_p},
                              {"mean_q", b.mean_q},
                              {"mean_q_enlarged", b.mean_q_enlarged},
                              {"power_mean_ratio", b.power_mean_ratio},
                              {"reverse_holder", b.reverse_holder},
                              {"higher", b.higher},
                              {"vacuous", b.vacuous}});
    }
    if (include_gamma) j["gamma"] = r.gamma;
    return j;
}

std::string to_csv(const GehringProbe& r) {
    std::ostringstream os;
    os << "x0,x1,x2,radius,mean_p,mean_q,mean_q_enlarged,power_mean_ratio,reverse_holder";
    for (double pb : r.pbar) os << ",mean_pbar_" << format_number(pb);
    os << '\n';
    for (const auto& b : r.balls) {
        os << format_number(b.ball.center[0]) << ',' << format_number(b.ball.center[1]) << ','
           << format_number(b.ball.center[2]) << ',' << format_number(b.ball.radius) << ',' << format_number(b.mean_p)
           << ',' << format_number(b.mean_q) << ',' << format_number(b.mean_q_enlarged) << ','
           << format_number(b.power_mean_ratio) << ',' << format_number(b.reverse_holder);
        for (double x : b.higher) os << ',' << format_number(x);
        os << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const HolefillReport& r) {
    return {{"probe", "holefill"}, {"consistent", r.consistent}, {"zero_sentinel", r.zero_sentinel},
            {"monotone", r.monotone}, {"theta", r.theta},        {"A", r.A},
            {"B", r.B},               {"residual", r.residual},  {"reason", r.reason}};
}

std::string to_csv(const HolefillReport& r) {
    std::ostringstream os;
    os << "theta,A,B,residual,consistent\n";
    os << format_number(r.theta) << ',' << format_number(r.A) << ',' << format_number(r.B) << ','
       << format_number(r.residual) << ',' << (r.consistent ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace fraclab
