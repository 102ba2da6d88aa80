#include "fraclab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fraclab/energy.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/power_law.hpp"
#include "fraclab/rng.hpp"
#include "fraclab/summation.hpp"
#include "pair_math.hpp"

namespace fraclab {

void validate(const MinimizeOptions& o) {
    Violations v;
    v.check(o.max_iters > 0, "minimize.max_iters must be > 0");
    v.check(o.step_init >= 0.0 && std::isfinite(o.step_init), "minimize.step_init must be >= 0 (0 selects h^{sp}/p)");
    v.check(o.backtrack > 0.0 && o.backtrack < 1.0, "minimize.backtrack must lie in (0, 1)");
    v.check(o.armijo > 0.0 && o.armijo < 1.0, "minimize.armijo must lie in (0, 1)");
    v.check(o.max_backtracks > 0, "minimize.max_backtracks must be > 0");
    v.check(o.grad_tol > 0.0, "minimize.grad_tol must be > 0");
    v.check(o.restarts >= 0, "minimize.restarts must be >= 0");
    v.check(o.restart_noise >= 0.0, "minimize.restart_noise must be >= 0");
    v.throw_if_any();
}

namespace {

// E = C_ff + sum_{i free} sum_j c_j w(i,j)|u_i-u_j|^p with c_j = 2 for frozen
// j and 1 for free j; C_ff is the frozen-frozen part, fixed during descent.
class Objective {
public:
    Objective(const FieldMap& f, const KernelTable& k)
        : kernel_(k), pw_(k.params().p()), half_p_(0.5 * k.params().p()), N_(f.components()), free_(f.free_cells()), frozen_(f.frozen_mask()) {
        const double* u = f.values().data();
        CompensatedSum acc;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (!frozen_[i]) continue;
            const double* ui = u + i * N_;
            double row = 0.0;
            for_each_partner(kernel_, i, [&](std::size_t j, double w) {
                if (frozen_[j] && w != 0.0) row += w * pw_.pow_p(detail::squared_difference(ui, u + j * N_, N_));
            });
            acc.add(row);
        }
        cff_ = acc.value();
    }

    const std::vector<std::size_t>& free_cells() const { return free_; }

    double evaluate(const std::vector<double>& u, std::vector<double>* grad) const {
        switch (N_) {
            case 2: return grad ? run<2, true>(u, grad) : run<2, false>(u, grad);
            case 3: return grad ? run<3, true>(u, grad) : run<3, false>(u, grad);
            default: return grad ? run<0, true>(u, grad) : run<0, false>(u, grad);
        }
    }

    /// E(u + s) - E(u) from per-pair differences, accurate relative to the
    /// size of the change rather than to E itself. s vanishes on frozen cells.
    double delta(const std::vector<double>& u, const std::vector<double>& s) const {
        switch (N_) {
            case 2: return run_delta<2>(u, s);
            case 3: return run_delta<3>(u, s);
            default: return run_delta<0>(u, s);
        }
    }

private:
    // (b + d)^{p/2} - b^{p/2} without cancellation, for b = |u_i - u_j|^2.
    double power_difference(double b, double d) const {
        if (half_p_ == 1.0) return d;
        if (b <= 0.0) return std::pow(std::max(d, 0.0), half_p_);
        return std::pow(b, half_p_) * std::expm1(half_p_ * std::log1p(d / b));
    }

    template <int NC>
    double run_delta(const std::vector<double>& uv, const std::vector<double>& sv) const {
        const int N = NC > 0 ? NC : N_;
        const double* u = uv.data();
        const double* s = sv.data();
        CompensatedSum total;
        for (std::size_t i : free_) {
            const double* ui = u + i * N;
            const double* si = s + i * N;
            double row = 0.0;
            for_each_partner(kernel_, i, [&](std::size_t j, double w) {
                if (w == 0.0) return;
                const double* uj = u + j * N;
                const double* sj = s + j * N;
                double b = 0.0, d = 0.0;
                for (int c = 0; c < N; ++c) {
                    const double x = ui[c] - uj[c];
                    const double e = si[c] - sj[c];
                    b += x * x;
                    d += (2.0 * x + e) * e;
                }
                if (d == 0.0) return;
                const double term = w * power_difference(b, d);
                row += frozen_[j] ? 2.0 * term : term;
            });
            total.add(row);
        }
        return total.value();
    }

    template <int NC, bool Grad>
    double run(const std::vector<double>& uv, std::vector<double>* grad) const {
        const int N = NC > 0 ? NC : N_;
        const double* u = uv.data();
        const double two_p = 2.0 * pw_.p();
        CompensatedSum total;
        total.add(cff_);
        double g[8];
        std::vector<double> gdyn(Grad && N > 8 ? N : 0);
        double* gacc = N > 8 ? gdyn.data() : g;
        for (std::size_t i : free_) {
            const double* ui = u + i * N;
            double row = 0.0;
            if constexpr (Grad) std::fill(gacc, gacc + N, 0.0);
            for_each_partner(kernel_, i, [&](std::size_t j, double w) {
                if (w == 0.0) return;
                const double* uj = u + j * N;
                const double d2 = detail::squared_difference(ui, uj, N);
                const double t = w * pw_.pow_pm2(d2);
                row += frozen_[j] ? 2.0 * t * d2 : t * d2;
                if constexpr (Grad) {
                    for (int c = 0; c < N; ++c) gacc[c] += t * (ui[c] - uj[c]);
                }
            });
            total.add(row);
            if constexpr (Grad) {
                for (int c = 0; c < N; ++c) (*grad)[i * N + c] = two_p * gacc[c];
            }
        }
        return total.value();
    }

    const KernelTable& kernel_;
    PowerLaw pw_;
    double half_p_;
    int N_;
    std::vector<std::size_t> free_;
    std::vector<std::uint8_t> frozen_;
    double cff_ = 0.0;
};

struct RunOutcome {
    std::vector<double> u;
    std::vector<double> history;
    double gnorm = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string stop_reason;
};

double tangent_direction(const ManifoldSpec& m, const std::vector<double>& u, const std::vector<double>& g,
                         const std::vector<std::size_t>& free, int N, std::vector<double>& d) {
    double s = 0.0;
    for (std::size_t i : free) {
        std::span<double> di(d.data() + i * N, N);
        std::copy(g.begin() + i * N, g.begin() + (i + 1) * N, di.begin());
        // The second pass removes the normal residue left by cancellation
        // against a large normal component of g.
        m.tangent_inplace(std::span<const double>(u.data() + i * N, N), di);
        m.tangent_inplace(std::span<const double>(u.data() + i * N, N), di);
        for (double x : di) s += x * x;
    }
    return std::sqrt(s);
}

// Displacement of the projected step u -> P(u - tau d) for tangent d. On the
// sphere it is evaluated in closed form so that it stays accurate when it is
// far below the rounding of u itself.
void retraction_step(const ManifoldSpec& m, const double* u, const double* d, const double* t, double tau, int N,
                     double* s) {
    if (m.kind() == ManifoldKind::euclidean) {
        for (int c = 0; c < N; ++c) s[c] = -tau * d[c];
    } else if (m.kind() == ManifoldKind::sphere) {
        double dd = 0.0;
        for (int c = 0; c < N; ++c) dd += d[c] * d[c];
        const double t2 = tau * tau * dd;
        const double r = std::sqrt(1.0 + t2);
        const double shrink = t2 / (1.0 + r);
        for (int c = 0; c < N; ++c) s[c] = (-tau * d[c] - shrink * u[c]) / r;
    } else {
        for (int c = 0; c < N; ++c) s[c] = t[c] - u[c];
    }
}

RunOutcome descend(const Objective& obj, const ManifoldSpec& m, const MinimizeOptions& o, double step_init,
                   std::vector<double> u, int N) {
    const auto& free = obj.free_cells();
    RunOutcome out;
    std::vector<double> g(u.size(), 0.0), d(u.size(), 0.0), gt(u.size(), 0.0), trial(u.size());
    std::vector<double> step(u.size(), 0.0);
    std::vector<double> u_prev, d_prev;
    double E = obj.evaluate(u, &g);
    out.history.push_back(E);
    double tau = step_init;
    const double tau_min = step_init * 1e-12;
    const double tau_max = step_init * 1e12;
    out.stop_reason = "max-iters";
    for (int it = 0;; ++it) {
        out.gnorm = tangent_direction(m, u, g, free, N, d);
        if (out.gnorm <= o.grad_tol) {
            out.converged = true;
            out.stop_reason = "grad-tol";
            break;
        }
        if (it >= o.max_iters) break;
        if (it > 0 && o.barzilai_borwein) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i : free) {
                for (int c = 0; c < N; ++c) {
                    const std::size_t k = i * N + c;
                    const double s = u[k] - u_prev[k];
                    ss += s * s;
                    sy += s * (d[k] - d_prev[k]);
                }
            }
            if (sy > 0.0) tau = std::clamp(ss / sy, tau_min, tau_max);
        }
        bool accepted = false;
        double Et = 0.0;
        for (int b = 0; b < o.max_backtracks; ++b, tau *= o.backtrack) {
            trial = u;
            bool degenerate = false;
            double ip = 0.0;
            for (std::size_t i : free) {
                std::span<double> ti(trial.data() + i * N, N);
                for (int c = 0; c < N; ++c) ti[c] -= tau * d[i * N + c];
                try {
                    m.project_inplace(ti);
                } catch (const DegenerateInput&) {
                    degenerate = true;
                    break;
                }
                retraction_step(m, u.data() + i * N, d.data() + i * N, ti.data(), tau, N, step.data() + i * N);
                for (int c = 0; c < N; ++c) ip -= tau * g[i * N + c] * d[i * N + c];
            }
            if (degenerate) continue;
            Et = obj.evaluate(trial, &gt);
            // Near convergence the change drops below the rounding of E;
            // decide on the directly accumulated difference instead.
            double dE = Et - E;
            if (std::abs(dE) <= 1e-8 * std::abs(E)) {
                dE = obj.delta(u, step);
                Et = E + dE;
            }
            if (dE < 0.0 && dE <= o.armijo * ip) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.stop_reason = "line-search-failed";
            break;
        }
        u_prev = u;
        d_prev = d;
        u.swap(trial);
        g.swap(gt);
        E = Et;
        out.history.push_back(E);
        out.iterations = it + 1;
    }
    out.u = std::move(u);
    return out;
}

void check_constraint(const FieldMap& f, const ManifoldSpec& m) {
    Violations v;
    for (std::size_t i = 0; i < f.size() && v.list().size() < 10; ++i) {
        const double err = m.constraint_violation(f.value(i));
        v.check(err <= 1e-10, "cell " + std::to_string(i) + " is off the target by " + std::to_string(err));
    }
    v.throw_if_any();
}

}  // namespace

std::vector<double> energy_gradient(const FieldMap& field, const KernelTable& kernel,
                                    std::span<const std::size_t> free_cells) {
    if (!field.grid().same_lattice(kernel.grid())) throw ValidationError("field and kernel live on different grids");
    const PowerLaw pw(kernel.params().p());
    const int N = field.components();
    const double* u = field.values().data();
    std::vector<double> grad(field.size() * N, 0.0);
    std::vector<double> acc(N);
    for (std::size_t i : free_cells) {
        const double* ui = u + i * N;
        std::fill(acc.begin(), acc.end(), 0.0);
        for_each_partner(kernel, i, [&](std::size_t j, double w) {
            if (w == 0.0) return;
            const double* uj = u + j * N;
            const double t = w * pw.pow_pm2(detail::squared_difference(ui, uj, N));
            for (int c = 0; c < N; ++c) acc[c] += t * (ui[c] - uj[c]);
        });
        for (int c = 0; c < N; ++c) grad[i * N + c] = 2.0 * pw.p() * acc[c];
    }
    return grad;
}

double grid_energy(const FieldMap& field, const KernelTable& kernel) {
    return compensated_sum(row_energies(field, kernel));
}

MinimizerResult minimize(const FieldMap& initial, const KernelTable& kernel, const ManifoldSpec& manifold,
                         const MinimizeOptions& opts) {
    validate(opts);
    if (!initial.grid().same_lattice(kernel.grid())) throw ValidationError("field and kernel live on different grids");
    if (manifold.ambient_dim() != initial.components()) {
        throw ValidationError("manifold dimension differs from the field components");
    }
    check_constraint(initial, manifold);
    const auto& prm = kernel.params();
    const int N = initial.components();
    const double step_init =
        opts.step_init > 0.0 ? opts.step_init : std::pow(initial.grid().h(), prm.sp()) / prm.p();

    const Objective obj(initial, kernel);
    MinimizerResult result(initial);
    result.step_init = step_init;
    double best = std::numeric_limits<double>::infinity();
    RunOutcome winner;
    for (int k = 0; k <= opts.restarts; ++k) {
        const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(k);
        std::vector<double> u0 = initial.values();
        if (k > 0) {
            Rng rng(seed);
            std::vector<double> xi(N);
            for (std::size_t i : obj.free_cells()) {
                for (int c = 0; c < N; ++c) xi[c] = opts.restart_noise * rng.normal();
                std::span<double> ui(u0.data() + i * N, N);
                manifold.tangent_inplace(ui, xi);
                for (int c = 0; c < N; ++c) ui[c] += xi[c];
                manifold.project_inplace(ui);
            }
        }
        RunOutcome run = descend(obj, manifold, opts, step_init, std::move(u0), N);
        const double e = run.history.back();
        result.runs.push_back({k, seed, e, run.iterations, run.converged, run.gnorm, run.stop_reason});
        if (e < best) {
            best = e;
            winner = std::move(run);
            result.winning_restart = k;
            result.winning_seed = seed;
        }
    }
    result.restarts_used = opts.restarts;
    result.field.values() = std::move(winner.u);
    result.energy_history = std::move(winner.history);
    result.projected_grad_norm = winner.gnorm;
    result.converged = winner.converged;
    result.iterations = winner.iterations;
    result.stop_reason = winner.stop_reason;
    for (std::size_t i = 0; i < result.field.size(); ++i) {
        result.max_constraint_violation =
            std::max(result.max_constraint_violation, manifold.constraint_violation(result.field.value(i)));
    }
    if (prm.p() >= 2.0) result.tangential_residual = tangential_residual(result.field, kernel, manifold);
    return result;
}

TangentialResidual tangential_residual_report(const FieldMap& field, const KernelTable& kernel,
                                              const ManifoldSpec& manifold) {
    TangentialResidual r;
    r.per_cell.assign(field.size(), 0.0);
    for (std::size_t i : field.free_cells()) {
        Eigen::VectorXd op = fractional_p_laplacian(field, kernel, i);
        manifold.tangent_inplace(field.value(i), std::span<double>(op.data(), static_cast<std::size_t>(op.size())));
        r.per_cell[i] = op.norm();
        r.max = std::max(r.max, r.per_cell[i]);
    }
    return r;
}

double tangential_residual(const FieldMap& field, const KernelTable& kernel, const ManifoldSpec& manifold) {
    return tangential_residual_report(field, kernel, manifold).max;
}

SpotCheck minimality_spot_check(const FieldMap& field, const KernelTable& kernel, const ManifoldSpec& manifold,
                                int trials, double amplitude, double tolerance, std::uint64_t seed) {
    const Objective obj(field, kernel);
    const int N = field.components();
    SpotCheck s;
    s.trials = trials;
    s.energy = obj.evaluate(field.values(), nullptr);
    s.max_decrease = -std::numeric_limits<double>::infinity();
    Rng rng(seed);
    std::vector<double> xi(field.size() * N, 0.0);
    for (int t = 0; t < trials; ++t) {
        double biggest = 0.0;
        for (std::size_t i : obj.free_cells()) {
            std::span<double> xv(xi.data() + i * N, N);
            for (int c = 0; c < N; ++c) xv[c] = rng.normal();
            manifold.tangent_inplace(field.value(i), xv);
            double nrm = 0.0;
            for (double x : xv) nrm += x * x;
            biggest = std::max(biggest, std::sqrt(nrm));
        }
        if (biggest == 0.0) continue;
        std::vector<double> u = field.values();
        for (std::size_t i : obj.free_cells()) {
            std::span<double> ui(u.data() + i * N, N);
            for (int c = 0; c < N; ++c) ui[c] += amplitude / biggest * xi[i * N + c];
            manifold.project_inplace(ui);
        }
        s.max_decrease = std::max(s.max_decrease, s.energy - obj.evaluate(u, nullptr));
    }
    if (trials == 0) s.max_decrease = 0.0;
    s.relative_max_decrease = s.energy > 0.0 ? s.max_decrease / s.energy : 0.0;
    s.passed = s.max_decrease <= 0.0 || s.max_decrease < tolerance * s.energy;
    return s;
}

nlohmann::json to_json(const MinimizerResult& r, const MinimizeOptions& o) {
    nlohmann::json j;
    j["energy"] = r.energy_history.empty() ? 0.0 : r.energy_history.back();
    j["energy_history"] = r.energy_history;
    j["projected_grad_norm"] = r.projected_grad_norm;
    j["converged"] = r.converged;
    j["stop_reason"] = r.stop_reason;
    j["iterations"] = r.iterations;
    j["restarts_used"] = r.restarts_used;
    j["winning_restart"] = r.winning_restart;
    j["winning_seed"] = r.winning_seed;
    j["tangential_residual"] = r.tangential_residual;
    j["max_constraint_violation"] = r.max_constraint_violation;
    j["options"] = {{"max_iters", o.max_iters},         {"step_init", r.step_init},
                    {"backtrack", o.backtrack},         {"armijo", o.armijo},
                    {"max_backtracks", o.max_backtracks}, {"grad_tol", o.grad_tol},
                    {"restarts", o.restarts},           {"restart_noise", o.restart_noise},
                    {"seed", o.seed},                   {"barzilai_borwein", o.barzilai_borwein}};
    j["runs"] = nlohmann::json::array();
    for (const auto& run : r.runs) {
        j["runs"].push_back({{"index", run.index},
                             {"seed", run.seed},
                             {"energy", run.energy},
                             {"iterations", run.iterations},
                             {"converged", run.converged},
                             {"projected_grad_norm", run.projected_grad_norm},
                             {"stop_reason", run.stop_reason}});
    }
    return j;
}

nlohmann::json to_json(const SpotCheck& s) {
    return {{"trials", s.trials},
            {"energy", s.energy},
            {"max_decrease", s.max_decrease},
            {"relative_max_decrease", s.relative_max_decrease},
            {"passed", s.passed}};
}

}  // namespace fraclab
