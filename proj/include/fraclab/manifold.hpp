#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "fraclab/rng.hpp"

namespace fraclab {

enum class ManifoldKind { sphere, euclidean, custom };

std::string to_string(ManifoldKind kind);

/// Callables describing a user-supplied target. retraction_shifted and
/// retraction_inverse are optional; P_a(x) = project(x - a) by default.
struct CustomManifold {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> project;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> tangent_projector;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> retraction_shifted;
    /// (P_a restricted to the target)^{-1}, evaluated at a target point z.
    std::function<Eigen::VectorXd(const Eigen::VectorXd& z, const Eigen::VectorXd& a)> retraction_inverse;
};

/// Target manifold in R^N given by nearest-point projection, tangent
/// projector and shifted retraction. The unit sphere S^{N-1} is built in;
/// `euclidean` is the unconstrained case (projection = identity).
class ManifoldSpec {
public:
    static ManifoldSpec sphere(int N);
    static ManifoldSpec euclidean(int N);
    static ManifoldSpec custom(int N, int lambda_conn, double reach_rho, CustomManifold callables);

    ManifoldKind kind() const { return kind_; }
    int ambient_dim() const { return N_; }
    /// Connectivity index: pi_0 = ... = pi_{lambda-2} = 0. N for S^{N-1}.
    int lambda_conn() const { return lambda_; }
    double reach_rho() const { return reach_; }
    /// Sphere tube guard: |x| must exceed this.
    static constexpr double tube_eps = 1e-8;

    /// Nearest point on the target. Throws DegenerateInput off the tube.
    Eigen::VectorXd project(const Eigen::VectorXd& x) const;
    /// Pi(u), orthogonal projection onto T_u.
    Eigen::MatrixXd tangent_projector(const Eigen::VectorXd& u) const;
    /// I - Pi(u).
    Eigen::MatrixXd normal_projector(const Eigen::VectorXd& u) const;
    /// P_a(x) = P(x - a). Throws DegenerateInput on the singular set.
    Eigen::VectorXd retraction_shifted(const Eigen::VectorXd& x, const Eigen::VectorXd& a) const;
    /// Point y on the target with P_a(y) = z, for z on the target.
    Eigen::VectorXd retraction_inverse(const Eigen::VectorXd& z, const Eigen::VectorXd& a) const;
    bool has_retraction_inverse() const;

    /// Distance of x from the target (sphere: ||x| - 1|).
    double constraint_violation(std::span<const double> x) const;

    /// In-place helpers on raw component arrays of length N.
    void project_inplace(std::span<double> x) const;
    /// g <- Pi(u) g.
    void tangent_inplace(std::span<const double> u, std::span<double> g) const;

    /// lambda > max{p, 2}, the connectivity hypothesis of the regularity theory.
    bool satisfies_hypotheses(double p) const;

private:
    ManifoldSpec(ManifoldKind kind, int N, int lambda, double reach) : kind_(kind), N_(N), lambda_(lambda), reach_(reach) {}

    ManifoldKind kind_;
    int N_;
    int lambda_;
    double reach_;
    CustomManifold custom_;
};

/// |(u - v) - Pi(v)(u - v)|, the second-order remainder of pi at v.
double taylor_remainder(const ManifoldSpec& m, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct LipschitzProbe {
    double max_quotient = 0.0;
    std::size_t samples = 0;
    bool finite = true;
};

/// Sampled difference quotients |P_a(x) - P_a(y)| / |x - y| over pairs of
/// target points, and of the inverse of P_a on the target (Lambda).
struct RetractionProbe {
    LipschitzProbe forward;
    LipschitzProbe inverse;
};

RetractionProbe retraction_lipschitz_probe(const ManifoldSpec& m, const Eigen::VectorXd& a, std::size_t samples,
                                           Rng& rng);

/// Difference quotients of the projection for points with |x| >= 1.
LipschitzProbe projection_lipschitz_probe(const ManifoldSpec& m, std::size_t samples, Rng& rng);

/// Max of taylor_remainder / |u - v|^2 over random target pairs with
/// |u - v| <= max_dist.
double taylor_constant_probe(const ManifoldSpec& m, double max_dist, std::size_t samples, Rng& rng);

/// Uniform random point on the sphere / standard normal vector otherwise,
/// projected to the target.
Eigen::VectorXd random_target_point(const ManifoldSpec& m, Rng& rng);

}  // namespace fraclab
