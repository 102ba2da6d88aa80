#include "fraclab/manifold.hpp"

#include <cmath>
#include <limits>

#include "fraclab/errors.hpp"

namespace fraclab {

std::string to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::sphere: return "sphere";
        case ManifoldKind::euclidean: return "euclidean";
        case ManifoldKind::custom: return "custom";
    }
    return "unknown";
}

ManifoldSpec ManifoldSpec::sphere(int N) {
    if (N < 2) throw ValidationError("sphere target needs N >= 2");
    return ManifoldSpec(ManifoldKind::sphere, N, N, 1.0);
}

ManifoldSpec ManifoldSpec::euclidean(int N) {
    if (N < 1) throw ValidationError("euclidean target needs N >= 1");
    // Contractible: every homotopy group vanishes.
    return ManifoldSpec(ManifoldKind::euclidean, N, std::numeric_limits<int>::max(),
                        std::numeric_limits<double>::infinity());
}

ManifoldSpec ManifoldSpec::custom(int N, int lambda_conn, double reach_rho, CustomManifold callables) {
    Violations v;
    v.check(N >= 2, "custom target needs N >= 2");
    v.check(reach_rho > 0.0, "reach_rho must be > 0");
    v.check(static_cast<bool>(callables.project), "custom target needs a projection");
    v.check(static_cast<bool>(callables.tangent_projector), "custom target needs a tangent projector");
    v.throw_if_any();
    ManifoldSpec m(ManifoldKind::custom, N, lambda_conn, reach_rho);
    m.custom_ = std::move(callables);
    return m;
}

Eigen::VectorXd ManifoldSpec::project(const Eigen::VectorXd& x) const {
    if (x.size() != N_) throw ValidationError("project: expected a vector of length " + std::to_string(N_));
    switch (kind_) {
        case ManifoldKind::sphere: {
            const double r = x.norm();
            if (!(r > tube_eps)) throw DegenerateInput("project: point too close to the origin (|x| <= 1e-8)");
            return x / r;
        }
        case ManifoldKind::euclidean: return x;
        case ManifoldKind::custom: return custom_.project(x);
    }
    return x;
}

Eigen::MatrixXd ManifoldSpec::tangent_projector(const Eigen::VectorXd& u) const {
    switch (kind_) {
        case ManifoldKind::sphere: return Eigen::MatrixXd::Identity(N_, N_) - u * u.transpose();
        case ManifoldKind::euclidean: return Eigen::MatrixXd::Identity(N_, N_);
        case ManifoldKind::custom: return custom_.tangent_projector(u);
    }
    return Eigen::MatrixXd::Identity(N_, N_);
}

Eigen::MatrixXd ManifoldSpec::normal_projector(const Eigen::VectorXd& u) const {
    return Eigen::MatrixXd::Identity(N_, N_) - tangent_projector(u);
}

Eigen::VectorXd ManifoldSpec::retraction_shifted(const Eigen::VectorXd& x, const Eigen::VectorXd& a) const {
    if (kind_ == ManifoldKind::custom && custom_.retraction_shifted) return custom_.retraction_shifted(x, a);
    if (kind_ == ManifoldKind::sphere && !((x - a).norm() > tube_eps)) {
        throw DegenerateInput("retraction_shifted: x coincides with the shift (singular set)");
    }
    return project(x - a);
}

bool ManifoldSpec::has_retraction_inverse() const {
    return kind_ != ManifoldKind::custom || static_cast<bool>(custom_.retraction_inverse);
}

Eigen::VectorXd ManifoldSpec::retraction_inverse(const Eigen::VectorXd& z, const Eigen::VectorXd& a) const {
    switch (kind_) {
        case ManifoldKind::sphere: {
            // y = a + t z with |y| = 1 and t > 0.
            const double az = a.dot(z);
            const double disc = az * az + 1.0 - a.squaredNorm();
            if (!(disc >= 0.0)) throw DegenerateInput("retraction_inverse: shift outside the unit ball");
            return a + (-az + std::sqrt(disc)) * z;
        }
        case ManifoldKind::euclidean: return z + a;
        case ManifoldKind::custom:
            if (!custom_.retraction_inverse) throw Error("custom target has no retraction inverse");
            return custom_.retraction_inverse(z, a);
    }
    return z;
}

double ManifoldSpec::constraint_violation(std::span<const double> x) const {
    switch (kind_) {
        case ManifoldKind::sphere: {
            double s = 0.0;
            for (double c : x) s += c * c;
            return std::abs(std::sqrt(s) - 1.0);
        }
        case ManifoldKind::euclidean: return 0.0;
        case ManifoldKind::custom: {
            const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
            return (custom_.project(v) - v).norm();
        }
    }
    return 0.0;
}

void ManifoldSpec::project_inplace(std::span<double> x) const {
    switch (kind_) {
        case ManifoldKind::sphere: {
            double s = 0.0;
            for (double c : x) s += c * c;
            const double r = std::sqrt(s);
            if (!(r > tube_eps)) throw DegenerateInput("project: point too close to the origin (|x| <= 1e-8)");
            for (double& c : x) c /= r;
            return;
        }
        case ManifoldKind::euclidean: return;
        case ManifoldKind::custom: {
            Eigen::Map<Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
            const Eigen::VectorXd out = custom_.project(v);
            v = out;
            return;
        }
    }
}

void ManifoldSpec::tangent_inplace(std::span<const double> u, std::span<double> g) const {
    switch (kind_) {
        case ManifoldKind::sphere: {
            double dot = 0.0;
            for (std::size_t c = 0; c < u.size(); ++c) dot += u[c] * g[c];
            for (std::size_t c = 0; c < u.size(); ++c) g[c] -= dot * u[c];
            return;
        }
        case ManifoldKind::euclidean: return;
        case ManifoldKind::custom: {
            const Eigen::VectorXd uu = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
            Eigen::Map<Eigen::VectorXd> gg(g.data(), static_cast<Eigen::Index>(g.size()));
            const Eigen::VectorXd out = custom_.tangent_projector(uu) * gg;
            gg = out;
            return;
        }
    }
}

bool ManifoldSpec::satisfies_hypotheses(double p) const {
    return static_cast<double>(lambda_) > std::max(p, 2.0);
}

double taylor_remainder(const ManifoldSpec& m, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Eigen::VectorXd d = u - v;
    return (d - m.tangent_projector(v) * d).norm();
}

Eigen::VectorXd random_target_point(const ManifoldSpec& m, Rng& rng) {
    Eigen::VectorXd x(m.ambient_dim());
    for (;;) {
        for (Eigen::Index c = 0; c < x.size(); ++c) x[c] = rng.normal();
        if (x.norm() > 1e-3) break;
    }
    return m.project(x);
}

RetractionProbe retraction_lipschitz_probe(const ManifoldSpec& m, const Eigen::VectorXd& a, std::size_t samples,
                                           Rng& rng) {
    RetractionProbe out;
    for (std::size_t k = 0; k < samples; ++k) {
        const Eigen::VectorXd x = random_target_point(m, rng);
        Eigen::VectorXd y = random_target_point(m, rng);
        // Half of the pairs are close, to see the local Lipschitz constant.
        if (k % 2 == 1) {
            Eigen::VectorXd step(m.ambient_dim());
            for (Eigen::Index c = 0; c < step.size(); ++c) step[c] = rng.normal();
            y = m.project(x + 1e-3 * step);
        }
        const double dxy = (x - y).norm();
        if (dxy == 0.0) continue;
        const double q = (m.retraction_shifted(x, a) - m.retraction_shifted(y, a)).norm() / dxy;
        out.forward.max_quotient = std::max(out.forward.max_quotient, q);
        ++out.forward.samples;
        if (m.has_retraction_inverse()) {
            const double qi = (m.retraction_inverse(x, a) - m.retraction_inverse(y, a)).norm() / dxy;
            out.inverse.max_quotient = std::max(out.inverse.max_quotient, qi);
            ++out.inverse.samples;
        }
    }
    out.forward.finite = std::isfinite(out.forward.max_quotient);
    out.inverse.finite = std::isfinite(out.inverse.max_quotient);
    return out;
}

LipschitzProbe projection_lipschitz_probe(const ManifoldSpec& m, std::size_t samples, Rng& rng) {
    LipschitzProbe out;
    for (std::size_t k = 0; k < samples; ++k) {
        const Eigen::VectorXd x = random_target_point(m, rng) * rng.uniform(1.0, 3.0);
        Eigen::VectorXd y = random_target_point(m, rng) * rng.uniform(1.0, 3.0);
        if (k % 2 == 1) {
            Eigen::VectorXd step(m.ambient_dim());
            for (Eigen::Index c = 0; c < step.size(); ++c) step[c] = rng.normal();
            y = x + 1e-3 * step;
            if (y.norm() < 1.0) y = x - 1e-3 * step;
            if (y.norm() < 1.0) continue;
        }
        const double dxy = (x - y).norm();
        if (dxy == 0.0) continue;
        out.max_quotient = std::max(out.max_quotient, (m.project(x) - m.project(y)).norm() / dxy);
        ++out.samples;
    }
    out.finite = std::isfinite(out.max_quotient);
    return out;
}

double taylor_constant_probe(const ManifoldSpec& m, double max_dist, std::size_t samples, Rng& rng) {
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const Eigen::VectorXd v = random_target_point(m, rng);
        Eigen::VectorXd step(m.ambient_dim());
        for (Eigen::Index c = 0; c < step.size(); ++c) step[c] = rng.normal();
        step *= rng.uniform(0.0, 1.0) * max_dist / step.norm();
        const Eigen::VectorXd u = m.project(v + step);
        const double d = (u - v).norm();
        if (d == 0.0 || d > max_dist) continue;
        worst = std::max(worst, taylor_remainder(m, u, v) / (d * d));
    }
    return worst;
}

}  // namespace fraclab
