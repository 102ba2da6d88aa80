#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"
#include "fraclab/field.hpp"
#include "fraclab/kernel.hpp"
#include "json.hpp"

namespace fraclab {

// ---------------------------------------------------------------- Caccioppoli

struct CaccioppoliEntry {
    double rho = 0.0;
    double lhs = 0.0;       // localized energy on B_rho
    double rhs_core = 0.0;  // rho^{-sp} sum_{B_6rho} h^n |u - mean|^p
    double ratio = 0.0;     // lhs / rhs_core; 0 when both vanish
    bool finite = true;
    bool under_resolved = false;  // rho < 2h, excluded from the sup
};

struct CaccioppoliReport {
    Point x0{};
    std::vector<CaccioppoliEntry> entries;
    double sup_ratio = 0.0;  // over resolved entries
    std::size_t resolved = 0;
    bool all_finite = true;
};

/// Requires B_{6 rho}(x0) inside the interior box for every rho.
CaccioppoliReport caccioppoli_sweep(const FieldMap& field, const KernelTable& kernel, const Point& x0,
                                    std::span<const double> rhos);
/// Same, with precomputed row energies.
CaccioppoliReport caccioppoli_sweep(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                                    const Point& x0, std::span<const double> rhos);

// ---------------------------------------------------------------- decay

struct DecayReport {
    Point x0{};
    double R = 0.0;
    double theta = 0.0;
    double eps1 = 0.0;
    double e_R = 0.0;       // normalized energy on B_R
    double e_thetaR = 0.0;  // normalized energy on B_{theta R}
    double ratio = 0.0;
    bool vacuous = false;  // both energies vanish
    bool small = false;    // e_R < eps1
};

/// Requires theta in (0, 1/2), eps1 > 0 and theta R >= 2h.
DecayReport decay_probe(const FieldMap& field, const KernelTable& kernel, const Point& x0, double R, double theta,
                        double eps1);
DecayReport decay_probe(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                        const Point& x0, double R, double theta, double eps1);

/// Collects the decay-probe preconditions.
void validate_decay_parameters(double theta, double eps1, Violations& v);

// ---------------------------------------------------------------- blow-up

struct BlowupResult {
    explicit BlowupResult(FieldMap f) : field(std::move(f)) {}

    FieldMap field;        // v = (u - mean_ball u) / eps on every cell
    double eps = 0.0;      // eps^p = localized energy of u on the ball
    double energy = 0.0;   // localized energy of v on the ball (1 up to rounding)
    double mean_norm = 0.0;  // |mean_ball v|
};

/// Throws DegenerateInput when the localized energy vanishes.
BlowupResult blowup_normalize(const FieldMap& field, const KernelTable& kernel, const BallSpec& ball);

// ---------------------------------------------------------------- singular set

struct SingularCluster {
    std::vector<std::size_t> cells;
    Point centroid{};
    std::size_t peak_cell = 0;  // flagged cell with the largest row energy
};

struct SingularSetReport {
    double eps1 = 0.0;
    std::vector<double> scales;
    double r_min = 0.0;
    double r_max = 0.0;
    std::vector<std::size_t> flagged;
    /// Normalized energy per scale for each flagged cell (same order).
    std::vector<std::vector<double>> curves;
    std::vector<SingularCluster> clusters;
    std::size_t density_argmax = 0;  // interior cell with the largest energy density
    Point density_argmax_point{};
};

/// Flags interior cells whose normalized energy exceeds eps1 at every scale.
/// Scales must all be >= 2h.
SingularSetReport singular_detect(const FieldMap& field, const KernelTable& kernel, double eps1,
                                  std::span<const double> scales);
SingularSetReport singular_detect(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                                  double eps1, std::span<const double> scales);

/// 0.1 times the median over interior cells of the normalized energy at r_max.
double default_eps1(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows, double r_max);

// ---------------------------------------------------------------- Hoelder

struct HolderOptions {
    double residual_threshold = 0.15;  // rms of the log-log fit
    /// Radii below this are skipped (0 means 2h).
    double min_radius = 0.0;
};

struct HolderReport {
    std::vector<Point> centers;
    std::vector<double> radii;      // usable radii
    std::vector<double> quotients;  // sup over centers of the quotient at lam = n
    double beta_hat = 0.0;
    double alpha_hat = 0.0;  // beta_hat / p
    double residual = 0.0;
    bool alpha_reported = false;  // residual below threshold and alpha_hat > 0
    bool constant = false;        // all quotients vanish: "infinitely smooth"
    std::string status;
};

/// Least-squares slope of log(sup_z quotient(z, r)) against log r. Throws
/// ValidationError with fewer than 3 usable radii.
HolderReport holder_fit(const FieldMap& field, std::span<const Point> centers, double p, std::span<const double> radii,
                        const HolderOptions& options = {});

// ---------------------------------------------------------------- Gehring

struct GehringBall {
    BallSpec ball;
    double mean_p = 0.0;           // (mean_B Gamma^p)^{1/p}
    double mean_q = 0.0;           // (mean_B Gamma^q)^{1/q}
    double mean_q_enlarged = 0.0;  // (mean_{kappa B} Gamma^q)^{1/q}
    double power_mean_ratio = 0.0;  // mean_p / mean_q, >= 1
    double reverse_holder = 0.0;    // mean_p / mean_q_enlarged
    std::vector<double> higher;     // (mean_B Gamma^{pbar})^{1/pbar} per pbar
    bool vacuous = false;
};

struct GehringProbe {
    double q = 0.0;
    double p = 0.0;
    std::vector<double> pbar;
    double kappa = 2.0;
    std::vector<double> gamma;  // per cell
    std::vector<GehringBall> balls;
    double rh_min = 0.0;
    double rh_max = 0.0;
    bool power_mean_ok = true;
};

/// Gamma(y) = (sum_j w(j,y)|u_j - u_y|^p / h^n)^{1/p}. Requires 1 < q < p < pbar.
GehringProbe gehring_probe(const FieldMap& field, const KernelTable& kernel, std::span<const BallSpec> balls, double q,
                           std::span<const double> pbar, double kappa = 2.0);
GehringProbe gehring_probe(const FieldMap& field, const KernelTable& kernel, std::span<const double> rows,
                           std::span<const BallSpec> balls, double q, std::span<const double> pbar, double kappa = 2.0);

// ---------------------------------------------------------------- hole filling

struct HolefillOptions {
    double alpha = 1.0;  // exponent of the A/(R-r)^alpha term
    double beta = 2.0;   // exponent of the B/(R-r)^beta term
    double residual_tol = 0.05;  // relative rms of the fit
};

struct HolefillReport {
    bool consistent = false;
    bool zero_sentinel = false;  // h == 0: consistent with any theta
    bool monotone = true;
    double theta = 0.0;
    double A = 0.0;
    double B = 0.0;
    double residual = 0.0;
    std::string reason;
};

/// Fits h(r_k) = theta h(r_{k+1}) + A/(r_{k+1}-r_k)^alpha + B/(r_{k+1}-r_k)^beta
/// with theta, A, B >= 0 over consecutive radii (increasing, at least 4).
HolefillReport holefill_convergence_check(std::span<const double> radii, std::span<const double> values,
                                          const HolefillOptions& options = {});

// ---------------------------------------------------------------- serialization

nlohmann::json to_json(const CaccioppoliReport& r);
nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const BlowupResult& r);
nlohmann::json to_json(const SingularSetReport& r, const Grid& grid);
nlohmann::json to_json(const HolderReport& r);
nlohmann::json to_json(const GehringProbe& r, bool include_gamma = false);
nlohmann::json to_json(const HolefillReport& r);

std::string to_csv(const CaccioppoliReport& r);
std::string to_csv(const DecayReport& r);
std::string to_csv(const SingularSetReport& r, const Grid& grid);
std::string to_csv(const HolderReport& r);
std::string to_csv(const GehringProbe& r);
std::string to_csv(const HolefillReport& r);

/// Shortest round-trip decimal form, used for every CSV number.
std::string format_number(double x);

}  // namespace fraclab
